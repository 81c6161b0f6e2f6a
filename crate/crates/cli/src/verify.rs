//! The invariant suite behind `sheights verify`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use subspace_heights::config::{fmt_num, rel_close, Tolerances};
use subspace_heights::exponents::{chain_bounds, estimate_exponents, record_curve, EnumOptions, EstimateOptions, Target};
use subspace_heights::exterior::{gen_det, wedge};
use subspace_heights::geometry::{cinner, cnorm, mu, mu_wedge, omega_i, orth_complement, CVec, NumericSubspace};
use subspace_heights::goingdown::{going_down, GoingDownOptions};
use subspace_heights::height::{
    height_ideal, height_lattice, hermitian_complement, phi_complement, scale_row, SubspaceOverK,
};
use subspace_heights::lattice::{det_lattice, enumerate_ball, full_lattice, lll_reduce};
use subspace_heights::numberfield::builtins;
use subspace_heights::poly;
use subspace_heights::ring::Ring;
use subspace_heights::NumberField;

use crate::error::CliResult;
use crate::input::{parse_json, InstanceFile};

const DEMO_FIRST: &str = include_str!("../../../data/goingdown_qi.json");
const DEMO_SECOND: &str = include_str!("../../../data/goingdown_qi_second.json");

pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckFn = fn(&mut ChaCha8Rng, &Tolerances) -> CliResult<(bool, String)>;

const CHECKS: &[(&str, &str, CheckFn)] = &[
    ("numberfield", "norm_equals_embedding_product", norm_vs_embeddings),
    ("numberfield", "full_lattice_covolume", full_covolume),
    ("exterior", "lagrange_identity", lagrange_identity),
    ("exterior", "plucker_relations", plucker_relations),
    ("geometry", "complement_identity", complement_identity),
    ("geometry", "mu_product_vs_wedge", mu_product_vs_wedge),
    ("height", "ideal_vs_lattice", ideal_vs_lattice),
    ("height", "duality", duality),
    ("height", "basis_invariance", basis_invariance),
    ("lattice", "lll_preserves_covolume", lll_covolume),
    ("lattice", "ball_count", ball_count),
    ("goingdown", "demo_first_branch", demo_first),
    ("goingdown", "demo_second_branch", demo_second),
    ("exponents", "golden_ratio_records", golden_records),
    ("exponents", "algebraic_target", algebraic_target),
    ("exponents", "chain_at_generic_values", chain_generic),
];

/// Runs every check on `jobs` threads; each check draws from its own stream
/// so the report does not depend on scheduling.
pub fn run(seed: u64, jobs: usize, tol: &Tolerances) -> CliResult<Vec<CheckResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| crate::error::CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| {
        CHECKS
            .par_iter()
            .enumerate()
            .map(|(i, (module, name, f))| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                r.set_stream(i as u64);
                let (passed, detail) = match f(&mut r, tol) {
                    Ok(x) => x,
                    Err(e) => (false, format!("error: {e}")),
                };
                Ok(CheckResult { module, name, passed, detail })
            })
            .collect()
    })
}

pub fn render(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "{:<12} {:<32} {} {}\n",
            r.module,
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
    out
}

fn fields() -> Vec<Arc<NumberField>> {
    ["Q", "Q(i)", "Q(sqrt2)", "Q(zeta3)"].iter().filter_map(|n| builtins::by_name(n)).map(Arc::new).collect()
}

fn small(r: &mut ChaCha8Rng, p: usize) -> Vec<i64> {
    (0..p).map(|_| r.gen_range(-3..=3)).collect()
}

fn random_subspace(r: &mut ChaCha8Rng, k: &Arc<NumberField>, n: usize, d: usize) -> SubspaceOverK {
    loop {
        let rows: Vec<Vec<Vec<i64>>> = (0..d).map(|_| (0..n).map(|_| small(r, k.degree())).collect()).collect();
        if let Ok(s) = SubspaceOverK::from_int_rows(k, &rows) {
            return s;
        }
    }
}

fn random_cvec(r: &mut ChaCha8Rng, n: usize) -> CVec {
    (0..n).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn norm_vs_embeddings(r: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let mut err = 0.0f64;
    for k in builtins::all() {
        for _ in 0..20 {
            let x = k.elem(&small(r, k.degree()));
            let prod: Complex64 = k.embeddings(&x).iter().product();
            let exact = poly::to_f64(&k.norm_elem(&x));
            err = err.max((prod - exact).norm() / exact.abs().max(1.0));
        }
    }
    Ok((err <= 1e-9, format!("max_err={}", fmt_num(err))))
}

fn full_covolume(_: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let mut err = 0.0f64;
    for k in fields() {
        let det = det_lattice(&full_lattice(&k, 2))?;
        err = err.max(rel_err(det, k.delta().powi(2)));
    }
    Ok((err <= 1e-9, format!("max_rel_err={}", fmt_num(err))))
}

fn lagrange_identity(r: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let mut err = 0.0f64;
    for _ in 0..50 {
        let (u, v) = (random_cvec(r, 4), random_cvec(r, 4));
        let lhs = gen_det(&[u.clone(), v.clone()])?.powi(2);
        let rhs = cnorm(&u).powi(2) * cnorm(&v).powi(2) - cinner(&u, &v).norm_sqr();
        err = err.max(rel_err(lhs, rhs));
    }
    Ok((err <= 1e-9, format!("max_rel_err={}", fmt_num(err))))
}

fn plucker_relations(r: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let mut ok = true;
    for k in fields() {
        for _ in 0..5 {
            let s = random_subspace(r, &k, 4, 2);
            let w = wedge(k.as_ref(), s.plucker(), s.plucker())?;
            ok &= w.is_zero(k.as_ref());
        }
    }
    Ok((ok, "p ^ p = 0 for 20 planes".into()))
}

fn complement_identity(r: &mut ChaCha8Rng, tol: &Tolerances) -> CliResult<(bool, String)> {
    let mut err = 0.0f64;
    for _ in 0..30 {
        let b = NumericSubspace::from_basis(&[random_cvec(r, 4), random_cvec(r, 4)], tol)?;
        let x = NumericSubspace::from_basis(&[random_cvec(r, 4)], tol)?;
        let w1 = omega_i(&x, &b, 1)?;
        let w2 = omega_i(&x, &orth_complement(&b)?, 1)?;
        err = err.max((w1 * w1 + w2 * w2 - 1.0).abs());
    }
    Ok((err <= 1e-9, format!("max_err={}", fmt_num(err))))
}

fn mu_product_vs_wedge(r: &mut ChaCha8Rng, tol: &Tolerances) -> CliResult<(bool, String)> {
    let mut err = 0.0f64;
    for _ in 0..30 {
        let ab = vec![random_cvec(r, 5), random_cvec(r, 5)];
        let bb = vec![random_cvec(r, 5), random_cvec(r, 5), random_cvec(r, 5)];
        let a = NumericSubspace::from_basis(&ab, tol)?;
        let b = NumericSubspace::from_basis(&bb, tol)?;
        err = err.max((mu(&a, &b)? - mu_wedge(&ab, &bb)?).abs());
    }
    Ok((err <= 1e-8, format!("max_err={}", fmt_num(err))))
}

fn ideal_vs_lattice(r: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let mut err = 0.0f64;
    for k in fields() {
        for _ in 0..10 {
            let n = r.gen_range(2..=4);
            let d = r.gen_range(1..n);
            let s = random_subspace(r, &k, n, d);
            err = err.max(rel_err(height_ideal(&s)?, height_lattice(&s)?));
        }
    }
    Ok((err <= 1e-6, format!("max_rel_err={}", fmt_num(err))))
}

fn duality(r: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let mut err = 0.0f64;
    for k in fields() {
        for _ in 0..10 {
            let n = r.gen_range(2..=4);
            let d = r.gen_range(1..n);
            let s = random_subspace(r, &k, n, d);
            let h = height_ideal(&s)?;
            err = err.max(rel_err(h, height_ideal(&phi_complement(&s)?)?));
            err = err.max(rel_err(h, height_ideal(&hermitian_complement(&s)?)?));
        }
    }
    Ok((err <= 1e-6, format!("max_rel_err={}", fmt_num(err))))
}

fn basis_invariance(r: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let mut err = 0.0f64;
    for k in fields() {
        for _ in 0..5 {
            let s = random_subspace(r, &k, 3, 2);
            let mut lambda = k.elem(&small(r, k.degree()));
            if k.is_zero(&lambda) {
                lambda = k.one();
            }
            let t = scale_row(&s, 0, &lambda)?;
            err = err.max(rel_err(height_ideal(&s)?, height_ideal(&t)?));
        }
    }
    Ok((err <= 1e-9, format!("max_rel_err={}", fmt_num(err))))
}

fn lll_covolume(r: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let mut err = 0.0f64;
    for k in fields() {
        let s = random_subspace(r, &k, 3, 2);
        let l = subspace_heights::lattice::lattice_of_subspace(&s)?;
        let before = det_lattice(&l)?;
        let after = det_lattice(&lll_reduce(&l, None)?)?;
        err = err.max(rel_err(before, after));
    }
    Ok((err <= 1e-9, format!("max_rel_err={}", fmt_num(err))))
}

fn ball_count(_: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let basis = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let got = enumerate_ball(&basis, 25.0, 10_000)?.points.len();
    let brute = (-5i64..=5).flat_map(|a| (-5i64..=5).map(move |b| a * a + b * b)).filter(|&s| s > 0 && s <= 25).count();
    Ok((got == brute, format!("points={got} expected={brute}")))
}

fn demo(text: &str, tol: &Tolerances) -> CliResult<(bool, String)> {
    let inst: InstanceFile = parse_json("demo", text)?;
    let cert = going_down(&inst.build(tol)?, &GoingDownOptions { tol: tol.clone(), ..Default::default() })?;
    Ok((
        cert.invariants.all(),
        format!("H(B)={} H(Bm1)={} H'={}", fmt_num(cert.height_b), fmt_num(cert.height_bm1), fmt_num(cert.h_prime)),
    ))
}

fn demo_first(_: &mut ChaCha8Rng, tol: &Tolerances) -> CliResult<(bool, String)> {
    demo(DEMO_FIRST, tol)
}

fn demo_second(_: &mut ChaCha8Rng, tol: &Tolerances) -> CliResult<(bool, String)> {
    demo(DEMO_SECOND, tol)
}

fn golden_records(_: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let k = Arc::new(builtins::rationals());
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let t = Target::numeric(&[Complex64::new(1.0, 0.0), Complex64::new(phi, 0.0)])?;
    let qmax = 1e4;
    let curve = record_curve(&k, &t, 0, qmax, &EnumOptions::default())?;
    let mut oracle = vec![(0.0f64, 1.0f64), (1.0, 1.0)];
    loop {
        let (a, b) = oracle[oracle.len() - 1];
        if (b * b + (a + b) * (a + b)).sqrt() > qmax {
            break;
        }
        oracle.push((b, a + b));
    }
    // |F_k phi - F_(k+1)| = phi^-k, free of cancellation
    let unit = (1.0 + phi * phi).sqrt();
    let mut ok = oracle.len() == curve.records.len();
    for (kk, ((a, b), rec)) in oracle.iter().zip(&curve.records).enumerate() {
        let h = (a * a + b * b).sqrt();
        let v = phi.powi(-(kk as i32)) / unit;
        ok &= rel_close(rec.height, h, 1e-9) && (rec.value - v).abs() <= 1e-9;
    }
    let est = estimate_exponents(&curve, &EstimateOptions::default())?;
    Ok((ok, format!("records={} omega={}", curve.records.len(), fmt_num(est.omega))))
}

fn algebraic_target(_: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    let k = Arc::new(builtins::gaussian());
    let t = Target::algebraic(&k, vec![k.elem(&[1]), k.elem(&[2, 1]), k.elem(&[0, 3])])?;
    let mut ok = true;
    for j in 0..2 {
        let curve = record_curve(&k, &t, j, 100.0, &EnumOptions::default())?;
        let est = estimate_exponents(&curve, &EstimateOptions::default())?;
        ok &= est.omega.is_infinite() && est.omega_hat.is_infinite();
    }
    Ok((ok, "omega = inf for j = 0, 1".into()))
}

fn chain_generic(_: &mut ChaCha8Rng, _: &Tolerances) -> CliResult<(bool, String)> {
    // generic exponents (j + 1) / (n - j) sit exactly on both chain bounds
    let mut err = 0.0f64;
    for n in 2..=5usize {
        for j in 1..n {
            let wj = (j as f64 + 1.0) / (n - j) as f64;
            let wprev = j as f64 / (n - j + 1) as f64;
            let (lo, hi) = chain_bounds(n, j, wj);
            err = err.max((lo - wprev).abs()).max((hi - wprev).abs());
        }
    }
    Ok((err <= 1e-12, format!("max_err={}", fmt_num(err))))
}
