//! Approximation of a target direction `u` by `K`-subspaces of bounded
//! height: record curves, exponent estimates and the transference chain.
//!
//! Lines and hyperplanes are searched shell by shell in height (`Q` doubles
//! from shell to shell) inside an ellipsoid that is thin in the directions
//! where a new record must be small: away from `u` for lines, along `conj(u)`
//! for hyperplane normals. The thin radius comes from the best value found
//! so far. For `Q` and imaginary quadratic fields of class number one this
//! covers every subspace that can set a record; elsewhere the radii are
//! inflated by a safety factor and coverage is heuristic.

use std::collections::HashSet;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{cnorm, principal_data, CVec, NumericSubspace};
use crate::goingdown::{going_down, Branch, GoingDownCertificate, GoingDownInput, GoingDownOptions};
use crate::height::{height_ideal, phi_kernel, SubspaceOverK};
use crate::lattice::{enumerate_ball, full_lattice, lll_reduce_with};
use crate::numberfield::{FieldElement, NumberField};
use crate::poly;
use crate::ring::{Field, Ring};

/// Safety factor on the search radii when coverage is not exact.
pub const DEFAULT_KAPPA: f64 = 4.0;

/// Discriminants of the imaginary quadratic fields with class number one.
const CLASS_NUMBER_ONE: [i64; 9] = [-3, -4, -7, -8, -11, -19, -43, -67, -163];

/// Whether every line of height `<= Q` has a representative whose embedded
/// norm is `Q^{1/p}` and whose content ideal is trivial: `Q` itself and
/// imaginary quadratic fields of class number one.
pub fn exact_cover(k: &NumberField) -> bool {
    match k.degree() {
        1 => true,
        2 if !k.is_real() => CLASS_NUMBER_ONE.iter().any(|d| *k.disc() == (*d).into()),
        _ => false,
    }
}

/// The target of an approximation problem: a unit vector of `C^{n+1}`,
/// optionally with the exact vector over `K` it comes from.
#[derive(Clone, Debug)]
pub struct Target {
    pub u: CVec,
    pub exact: Option<Vec<FieldElement>>,
}

impl Target {
    pub fn numeric(u: &[Complex64]) -> Result<Self> {
        let nu = cnorm(u);
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::ZeroVector);
        }
        Ok(Target { u: u.iter().map(|x| x / nu).collect(), exact: None })
    }

    pub fn algebraic(k: &NumberField, v: Vec<FieldElement>) -> Result<Self> {
        let emb: CVec = v.iter().map(|x| k.embed_unchecked(x, 1)).collect();
        let mut t = Self::numeric(&emb)?;
        t.exact = Some(v);
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct EnumOptions {
    pub kappa: Option<f64>,
    /// Point budget per enumeration call.
    pub max_points: usize,
    /// Middle dimensions: how many short vectors enter the spans.
    pub max_vectors: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { kappa: None, max_points: 2_000_000, max_vectors: 48 }
    }
}

impl EnumOptions {
    fn kappa_for(&self, k: &NumberField) -> f64 {
        self.kappa.unwrap_or(if exact_cover(k) { 1.0 } else { DEFAULT_KAPPA })
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Coverage {
    pub kappa: f64,
    /// True when the search provably reached every relevant subspace.
    pub exact: bool,
    pub shells: usize,
    pub points_examined: usize,
    pub truncated: bool,
}

/// Scales `v` so that its first nonzero entry is 1.
pub fn normalize_vector(k: &NumberField, v: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let lead = v.iter().find(|x| !x.is_zero())?;
    let inv = k.inv(lead)?;
    Some(v.iter().map(|x| k.mul(x, &inv)).collect())
}

/// `H(span X) = prod_j ||X^(j)|| / N(content ideal)`.
pub fn line_height(k: &NumberField, x: &[FieldElement]) -> Result<f64> {
    let na = k.ideal_norm(x)?;
    let prod: f64 = (1..=k.degree()).map(|j| cnorm(&embed(k, x, j))).product();
    Ok(prod / poly::to_f64(&na))
}

fn embed(k: &NumberField, x: &[FieldElement], j: usize) -> CVec {
    x.iter().map(|c| k.embed_unchecked(c, j)).collect()
}

/// `sum a_k b_k` with compensated products and sums; accurate to about one
/// ulp of the result even under heavy cancellation.
fn dot2(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for (a, b) in pairs {
        let p = a * b;
        let pe = a.mul_add(b, -p);
        let t = s + p;
        let z = t - s;
        c += (s - (t - z)) + (p - z) + pe;
        s = t;
    }
    s + c
}

/// `sum_k x_k conj(w_k)`, compensated.
fn cdot(x: &[Complex64], w: &[Complex64]) -> Complex64 {
    let re = dot2(x.iter().zip(w).flat_map(|(a, b)| [(a.re, b.re), (a.im, b.im)]));
    let im = dot2(x.iter().zip(w).flat_map(|(a, b)| [(a.im, b.re), (-a.re, b.im)]));
    Complex64::new(re, im)
}

/// `omega(u, span X)` for a unit `u`.
fn line_omega(u: &[Complex64], x: &[Complex64]) -> f64 {
    let a = cdot(x, u);
    let nx = cnorm(x);
    let perp: f64 = x.iter().zip(u).map(|(xi, ui)| (xi - a * ui).norm_sqr()).sum::<f64>().sqrt();
    (perp / nx).min(1.0)
}

/// `omega(u, S)` for the hyperplane `S = {x : sum x_k z_k = 0}`.
fn hyperplane_omega(u: &[Complex64], z: &[Complex64]) -> f64 {
    let uc: CVec = u.iter().map(|x| x.conj()).collect();
    (cdot(z, &uc).norm() / cnorm(z)).min(1.0)
}

/// Largest factor by which one LLL pass tightens the thin radius.
const TIGHTEN_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Points are line generators; thin directions are orthogonal to `w`.
    Line,
    /// Points are hyperplane normals; the thin direction is `w`.
    Normal,
}

/// Integral vectors of `O_K^{n1}` with `||thin part|| <~ thin` and every
/// embedding of norm `<~ thick`, deduplicated projectively. Also returns
/// the number of lattice points examined and whether the budget ran out.
fn enumerate_near(
    k: &Arc<NumberField>,
    n1: usize,
    w: &[Complex64],
    mode: Mode,
    thin: f64,
    thick: f64,
    max_points: usize,
) -> Result<(Vec<Vec<FieldElement>>, usize, bool)> {
    let p = k.degree();
    let q = k.q();
    let lattice = full_lattice(k, n1);
    let parts = if p > q { 3.0f64 } else { 2.0 };
    let scale = 1.0 / parts.sqrt();
    let map = |v: &[f64], thin: f64| -> Vec<f64> {
        // sigma_1 coordinates; the second block of rho holds -Im sigma_1
        let x: CVec = (0..n1)
            .map(|i| if q == 2 { Complex64::new(v[i], -v[n1 + i]) } else { Complex64::new(v[i], 0.0) })
            .collect();
        let a = cdot(&x, w);
        let mut out = Vec::with_capacity(4 * n1 + p * n1);
        match mode {
            Mode::Line => {
                for (xi, wi) in x.iter().zip(w) {
                    let r = xi - a * wi;
                    out.push(r.re * scale / thin);
                    out.push(r.im * scale / thin);
                }
            }
            Mode::Normal => {
                out.push(a.re * scale / thin);
                out.push(a.im * scale / thin);
            }
        }
        for xi in &x {
            out.push(xi.re * scale / thick);
            out.push(xi.im * scale / thick);
        }
        for t in &v[q * n1..] {
            out.push(t * scale / thick);
        }
        out
    };
    // tighten in stages so every pass starts from a basis reduced for a
    // nearby form
    let mut cur = thick;
    let mut reduced = lattice;
    let mut images;
    loop {
        cur = (cur * TIGHTEN_STEP).max(thin);
        let f = |v: &[f64]| map(v, cur);
        (reduced, images, _) = lll_reduce_with(&reduced, &f)?;
        if cur <= thin {
            break;
        }
    }
    let en = enumerate_ball(&images, 1.0 + 1e-9, max_points)?;
    let examined = en.points.len();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (coords, _) in &en.points {
        let v = reduced.combination(coords);
        if let Some(key) = normalize_vector(k, &v) {
            if seen.insert(key) {
                out.push(v);
            }
        }
    }
    Ok((out, examined, en.truncated))
}

/// A subspace found by the enumeration with its height.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub subspace: SubspaceOverK,
    pub height: f64,
}

fn line_subspace(k: &Arc<NumberField>, x: Vec<FieldElement>) -> Result<SubspaceOverK> {
    SubspaceOverK::new(k.clone(), vec![x])
}

fn hyperplane_subspace(k: &Arc<NumberField>, z: &[FieldElement]) -> Result<SubspaceOverK> {
    phi_kernel(k, &[z.to_vec()], z.len())
}

/// Every subspace of dimension `dim` in `K^{n1}` with `H <= qmax (1 + 1e-9)`,
/// each exactly once, sorted by height. Lines and hyperplanes come from a
/// ball enumeration of generators or normals (`H(S) = H(S^phi-perp)`); middle
/// dimensions are spans of tuples of short vectors, which is heuristic.
pub fn enumerate_subspaces(
    k: &Arc<NumberField>,
    n1: usize,
    dim: usize,
    qmax: f64,
    opts: &EnumOptions,
) -> Result<(Vec<Candidate>, Coverage)> {
    if dim == 0 || dim >= n1 {
        return Err(Error::Dimension(format!("need 1 <= dim <= {}, got {dim}", n1 - 1)));
    }
    if !(qmax >= 1.0) {
        return Err(Error::InvalidInput(format!("Qmax = {qmax} must be at least 1")));
    }
    let kappa = opts.kappa_for(k);
    let p = k.degree() as f64;
    let limit = qmax * (1.0 + 1e-9);
    let w = vec![Complex64::new(0.0, 0.0); n1];
    let mut cov = Coverage { kappa, exact: exact_cover(k) && (dim == 1 || dim + 1 == n1), shells: 1, ..Default::default() };
    let mut out = Vec::new();
    if dim == 1 || dim + 1 == n1 {
        let radius = kappa * qmax.powf(1.0 / p) * (1.0 + 1e-9);
        let (vecs, examined, truncated) = enumerate_near(k, n1, &w, Mode::Line, radius, radius, opts.max_points)?;
        cov.points_examined = examined;
        cov.truncated = truncated;
        for v in vecs {
            let h = line_height(k, &v)?;
            if h <= limit {
                let subspace = if dim == 1 { line_subspace(k, v)? } else { hyperplane_subspace(k, &v)? };
                out.push(Candidate { subspace, height: h });
            }
        }
    } else {
        let radius = kappa * qmax.powf(1.0 / (dim as f64 * p)) * p.sqrt();
        let (mut vecs, examined, truncated) = enumerate_near(k, n1, &w, Mode::Line, radius, radius, opts.max_points)?;
        cov.points_examined = examined;
        cov.truncated = truncated || vecs.len() > opts.max_vectors;
        vecs.truncate(opts.max_vectors);
        let mut seen = HashSet::new();
        for combo in combinations(vecs.len(), dim) {
            let rows: Vec<Vec<FieldElement>> = combo.iter().map(|&i| vecs[i].clone()).collect();
            let Ok(s) = SubspaceOverK::new(k.clone(), rows) else { continue };
            if !seen.insert(s.normalized_plucker().coords().to_vec()) {
                continue;
            }
            let h = height_ideal(&s)?;
            if h <= limit {
                out.push(Candidate { subspace: s, height: h });
            }
        }
    }
    out.sort_by(|a, b| a.height.total_cmp(&b.height));
    Ok((out, cov))
}

fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    rec(0, n, m, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub height: f64,
    /// `H(S) omega_1^q(u, S)`.
    pub value: f64,
    /// `u` lies in `S` exactly (only decided for exact targets).
    pub exact_zero: bool,
    /// Normalized Plücker coordinates of `S`.
    pub plucker: Vec<Vec<String>>,
    #[serde(skip)]
    pub subspace: SubspaceOverK,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecordCurve {
    pub j: usize,
    pub q: usize,
    pub qmax: f64,
    pub u: Vec<[f64; 2]>,
    pub records: Vec<Record>,
    pub coverage: Coverage,
}

impl RecordCurve {
    pub fn has_exact_zero(&self) -> bool {
        self.records.iter().any(|r| r.exact_zero)
    }
}

fn make_record(s: SubspaceOverK, height: f64, value: f64, exact_zero: bool) -> Record {
    let plucker = s.normalized_plucker().coords().iter().map(|c| c.to_strings()).collect();
    Record { height, value, exact_zero, plucker, subspace: s }
}

fn value_of(q: usize, height: f64, omega: f64) -> f64 {
    height * omega.powi(q as i32)
}

/// Pareto frontier of `(H(S), H(S) omega_1^q(u, S))` over `K`-subspaces of
/// dimension `j + 1` with `H(S) <= qmax`.
pub fn record_curve(k: &Arc<NumberField>, target: &Target, j: usize, qmax: f64, opts: &EnumOptions) -> Result<RecordCurve> {
    let n1 = target.len();
    let dim = j + 1;
    if dim >= n1 {
        return Err(Error::Dimension(format!("j = {j} needs j + 1 < n + 1 = {n1}")));
    }
    if !(qmax >= 1.0 && qmax.is_finite()) {
        return Err(Error::InvalidInput(format!("Qmax = {qmax} must be a finite real >= 1")));
    }
    let u = &target.u;
    let q = k.q();
    let tol = Tolerances::default();
    let mut records: Vec<Record> = Vec::new();
    let coverage;
    if dim == 1 || dim + 1 == n1 {
        let mode = if dim == 1 { Mode::Line } else { Mode::Normal };
        // hyperplane S = ker(z -> sum x_k z_k) is close to u when z is close to conj(u)
        let w: CVec = if mode == Mode::Line { u.clone() } else { u.iter().map(|x| x.conj()).collect() };
        let kappa = opts.kappa_for(k);
        let (pf, qf) = (k.degree() as f64, q as f64);
        let mut cov = Coverage { kappa, exact: exact_cover(k), ..Default::default() };
        let mut best = f64::INFINITY;
        let mut q_lo = 0.0f64;
        let mut q_hi = qmax.min(4.0);
        let mut seen = HashSet::new();
        loop {
            let r = if best.is_finite() { best } else { q_hi };
            let thick = kappa * q_hi.powf(1.0 / pf) * (1.0 + 1e-9);
            let thin = (kappa * r.powf(1.0 / qf) * q_hi.powf(1.0 / pf) / q_lo.max(1.0).powf(1.0 / qf)).min(thick) * (1.0 + 1e-9);
            let (vecs, examined, truncated) = enumerate_near(k, n1, &w, mode, thin, thick, opts.max_points)?;
            cov.shells += 1;
            cov.points_examined += examined;
            cov.truncated |= truncated;
            let mut shell: Vec<(f64, f64, bool, Vec<FieldElement>)> = Vec::new();
            for v in vecs {
                let key = normalize_vector(k, &v).expect("nonzero");
                if seen.contains(&key) {
                    continue;
                }
                let h = line_height(k, &v)?;
                if h > q_hi * (1.0 + 1e-9) {
                    continue;
                }
                seen.insert(key);
                let x1 = embed(k, &v, 1);
                let omega = if mode == Mode::Line { line_omega(u, &x1) } else { hyperplane_omega(u, &x1) };
                let exact_zero = match &target.exact {
                    Some(t) => match mode {
                        Mode::Line => {
                            let rows = vec![v.clone(), t.clone()];
                            crate::ring::rank(k.as_ref(), &rows) == 1
                        }
                        Mode::Normal => {
                            let s = v.iter().zip(t).fold(k.zero(), |acc, (a, b)| k.add(&acc, &k.mul(a, b)));
                            s.is_zero()
                        }
                    },
                    None => false,
                };
                let value = if exact_zero { 0.0 } else { value_of(q, h, omega) };
                shell.push((h, value, exact_zero, v));
            }
            shell.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            for (h, value, exact_zero, v) in shell {
                if value < best {
                    best = value;
                    let s = if mode == Mode::Line { line_subspace(k, v)? } else { hyperplane_subspace(k, &v)? };
                    records.push(make_record(s, h, value, exact_zero));
                }
            }
            if q_hi >= qmax || best == 0.0 {
                break;
            }
            q_lo = q_hi;
            q_hi = (q_hi * 2.0).min(qmax);
        }
        coverage = cov;
    } else {
        let (cands, cov) = enumerate_subspaces(k, n1, dim, qmax, opts)?;
        let a = NumericSubspace::from_basis(&[u.clone()], &tol)?;
        let mut best = f64::INFINITY;
        for c in cands {
            let exact_zero = target.exact.as_ref().is_some_and(|t| c.subspace.contains_vector(t));
            let value = if exact_zero {
                0.0
            } else {
                let omega = principal_data(&a, &c.subspace.numeric(&tol)?)?.omegas[0];
                value_of(q, c.height, omega)
            };
            if value < best {
                best = value;
                records.push(make_record(c.subspace, c.height, value, exact_zero));
            }
        }
        coverage = cov;
    }
    Ok(RecordCurve { j, q, qmax, u: u.iter().map(|z| [z.re, z.im]).collect(), records, coverage })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentEstimate {
    pub omega: f64,
    pub omega_hat: f64,
    /// Lower end of the window the estimates are taken over.
    pub window_lo: f64,
    pub records_in_window: usize,
    /// Least-squares slope of `-log value` against `log H` over the window.
    pub slope: Option<f64>,
    /// Change of the estimates when the window moves down one decade.
    pub decade_delta: Option<(f64, f64)>,
}

/// Estimator window: `[floor, Qmax]` with a fixed floor, otherwise the top
/// decade `[Qmax / 10, Qmax]`.
#[derive(Clone, Debug, Default)]
pub struct EstimateOptions {
    pub floor: Option<f64>,
}

fn window_estimates(records: &[Record], lo: f64, hi: f64) -> Option<(f64, f64, usize)> {
    if !(hi > 1.0) || lo >= hi {
        return None;
    }
    let ratio = |v: f64, h: f64| -v.ln() / h.ln();
    // staircase value just below height h
    let before = |h: f64| records.iter().take_while(|r| r.height < h).last().map(|r| r.value);
    let inside: Vec<&Record> = records.iter().filter(|r| r.height >= lo && r.height <= hi && r.height > 1.0).collect();
    // omega(Q) peaks at record heights and at the left end of the window
    let lo_eff = lo.max(1.0 + 1e-12);
    let at_lo = before(lo_eff * (1.0 + 1e-12)).map(|v| ratio(v, lo_eff));
    let omega = inside.iter().map(|r| ratio(r.value, r.height)).chain(at_lo).fold(f64::NEG_INFINITY, f64::max);
    if omega == f64::NEG_INFINITY {
        return None;
    }
    let mut omega_hat = ratio(before(hi * (1.0 + 1e-12))?, hi);
    for r in &inside {
        if let Some(v) = before(r.height) {
            omega_hat = omega_hat.min(ratio(v, r.height));
        }
    }
    Some((omega, omega_hat, inside.len()))
}

/// Limsup and liminf surrogates of `-log(H omega^q) / log Q` over the record
/// staircase.
pub fn estimate_exponents(curve: &RecordCurve, opts: &EstimateOptions) -> Result<ExponentEstimate> {
    let recs = &curve.records;
    if curve.has_exact_zero() {
        return Ok(ExponentEstimate {
            omega: f64::INFINITY,
            omega_hat: f64::INFINITY,
            window_lo: opts.floor.unwrap_or(curve.qmax / 10.0),
            records_in_window: 0,
            slope: None,
            decade_delta: None,
        });
    }
    if recs.len() < 5 {
        return Err(Error::TooFewRecords(recs.len()));
    }
    let hi = curve.qmax;
    let lo = opts.floor.unwrap_or(hi / 10.0).min(hi);
    let (omega, omega_hat, count) = window_estimates(recs, lo, hi)
        .ok_or_else(|| Error::InvalidInput("estimator window holds no staircase value".into()))?;
    let pts: Vec<(f64, f64)> = recs
        .iter()
        .filter(|r| r.height >= lo && r.height > 1.0 && r.value > 0.0)
        .map(|r| (r.height.ln(), -r.value.ln()))
        .collect();
    let slope = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    });
    let decade_delta = window_estimates(recs, lo / 10.0, lo).map(|(o, oh, _)| (omega - o, omega_hat - oh));
    Ok(ExponentEstimate { omega, omega_hat, window_lo: lo, records_in_window: count, slope, decade_delta })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainCheck {
    pub j: usize,
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// `lower <= upper`: the two neighbouring estimates can both be right.
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub n: usize,
    pub margin: f64,
    pub omega0_floor: f64,
    pub omega0_ok: bool,
    pub checks: Vec<ChainCheck>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.omega0_ok && self.checks.iter().all(|c| c.lower_ok && c.upper_ok)
    }
}

/// Bounds on `omega_{j-1}` in terms of `omega_j`; the lower one equals `j`
/// when `omega_j` is infinite.
pub fn chain_bounds(n: usize, j: usize, omega_j: f64) -> (f64, f64) {
    let jf = j as f64;
    let m = (n - j) as f64;
    if omega_j.is_infinite() {
        return (jf, f64::INFINITY);
    }
    (jf * omega_j / (omega_j + jf + 1.0), (m * omega_j - 1.0) / (m + 1.0))
}

/// Evaluates the chain `j w_j / (w_j + j + 1) <= w_{j-1} <= ((n-j) w_j - 1) / (n-j+1)`
/// and `w_0 >= 1/n` on estimates `omegas[j]`, `j = 0..n-1`, with an additive
/// margin.
pub fn check_chain(omegas: &[f64], n: usize, margin: f64) -> Result<ChainReport> {
    if n == 0 || omegas.len() != n {
        return Err(Error::InvalidInput(format!("expected {n} estimates, got {}", omegas.len())));
    }
    let floor = 1.0 / n as f64;
    let checks = (1..n)
        .map(|j| {
            let (lower, upper) = chain_bounds(n, j, omegas[j]);
            let value = omegas[j - 1];
            ChainCheck {
                j,
                lower,
                upper,
                value,
                lower_ok: value + margin >= lower,
                upper_ok: value <= upper + margin,
                consistent: lower <= upper,
            }
        })
        .collect();
    Ok(ChainReport { n, margin, omega0_floor: floor, omega0_ok: omegas[0] + margin >= floor, checks })
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    pub j: usize,
    pub y1: f64,
    /// `y'_1 = y_1 (j + 1) / (q y_1 + j)`.
    pub y1_prime: f64,
    /// `Q` at which the witness satisfies `H(S) omega^q <= Q^-(q y_1 - 1)`.
    pub q_before: f64,
    pub height_before: f64,
    pub value_before: f64,
    /// `Q'`, the `H'` of the going-down run.
    pub q_after: f64,
    pub height_after: f64,
    pub value_after: f64,
    pub dim_after: usize,
    /// The target lies in both subspaces; the output was taken directly.
    pub trivial: bool,
    #[serde(skip)]
    pub certificate: Option<GoingDownCertificate>,
}

/// Picks the last record with `H <= Q` of a curve of `(j+1)`-dimensional
/// subspaces and applies going down with `d = h = 1`, `c = 1`, `e = j + 1`,
/// `H = Q` and exponent `y_1`.
pub fn transfer_experiment(
    k: &Arc<NumberField>,
    target: &Target,
    j: usize,
    y1: f64,
    big_q: f64,
    enum_opts: &EnumOptions,
    gd_opts: &GoingDownOptions,
) -> Result<TransferReport> {
    if j == 0 {
        return Err(Error::InvalidInput("transfer needs j >= 1".into()));
    }
    let q = k.q() as f64;
    let jf = j as f64;
    let y1_prime = y1 * (jf + 1.0) / (q * y1 + jf);
    let curve = record_curve(k, target, j, big_q, enum_opts)?;
    let wit = curve
        .records
        .iter()
        .rev()
        .find(|r| r.value <= big_q.powf(-(q * y1 - 1.0)) * (1.0 + 1e-9))
        .ok_or_else(|| Error::NotFound { attempts: curve.records.len(), last_scale: big_q })?;
    let tol = gd_opts.tol.clone();
    if wit.exact_zero {
        let t = target.exact.as_ref().expect("exact zero implies an exact target");
        let mut rows = vec![t.clone()];
        for b in wit.subspace.basis() {
            let mut cand = rows.clone();
            cand.push(b.clone());
            if rows.len() < j && crate::ring::rank(k.as_ref(), &cand) == cand.len() {
                rows = cand;
            }
        }
        let s = SubspaceOverK::new(k.clone(), rows)?;
        let h = height_ideal(&s)?;
        return Ok(TransferReport {
            j,
            y1,
            y1_prime,
            q_before: big_q,
            height_before: wit.height,
            value_before: 0.0,
            q_after: h,
            height_after: h,
            value_after: 0.0,
            dim_after: s.dim(),
            trivial: true,
            certificate: None,
        });
    }
    let a = NumericSubspace::from_basis(&[target.u.clone()], &tol)?;
    let inp = GoingDownInput {
        a: a.clone(),
        b: wit.subspace.clone(),
        h: 1,
        y: vec![y1],
        height: big_q.max(wit.height),
        c: 1.0,
        branch: Branch::First,
    };
    let cert = going_down(&inp, gd_opts)?;
    let value_after = value_of(k.q(), cert.height_bm1, cert.omegas_after[0]);
    Ok(TransferReport {
        j,
        y1,
        y1_prime,
        q_before: inp.height,
        height_before: wit.height,
        value_before: wit.value,
        q_after: cert.h_prime,
        height_after: cert.height_bm1,
        value_after,
        dim_after: cert.setup.e - 1,
        trivial: false,
        certificate: Some(cert),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::builtins;

    fn golden() -> Target {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        Target::numeric(&[Complex64::new(1.0, 0.0), Complex64::new(phi, 0.0)]).unwrap()
    }

    #[test]
    fn lines_of_q2_up_to_five() {
        let q = Arc::new(builtins::rationals());
        let (cands, cov) = enumerate_subspaces(&q, 2, 1, 5.0, &EnumOptions::default()).unwrap();
        assert!(cov.exact);
        let mut brute = 0;
        for a in -5i64..=5 {
            for b in 0i64..=5 {
                if num_integer::gcd(a, b) != 1 || (b == 0 && a != 1) || (a <= 0 && b == 0) {
                    continue;
                }
                if ((a * a + b * b) as f64).sqrt() <= 5.0 {
                    brute += 1;
                }
            }
        }
        assert_eq!(cands.len(), brute);
        assert!(cands.windows(2).all(|w| w[0].height <= w[1].height));
    }

    #[test]
    fn projective_dedup() {
        let q = Arc::new(builtins::rationals());
        let a = normalize_vector(&q, &[q.from_int(3), q.from_int(4)]);
        let b = normalize_vector(&q, &[q.from_int(-6), q.from_int(-8)]);
        assert_eq!(a, b);
        let g = builtins::gaussian();
        let a = normalize_vector(&g, &[g.elem(&[1]), g.elem(&[0, 1])]);
        let b = normalize_vector(&g, &[g.elem(&[0, 1]), g.elem(&[-1])]);
        assert_eq!(a, b);
    }

    #[test]
    fn golden_records_follow_fibonacci() {
        let q = Arc::new(builtins::rationals());
        let curve = record_curve(&q, &golden(), 0, 1e3, &EnumOptions::default()).unwrap();
        let mut fib = vec![(0i64, 1i64), (1, 1)];
        while fib.len() < 40 {
            let (a, b) = fib[fib.len() - 1];
            fib.push((b, a + b));
        }
        let oracle: Vec<f64> = fib
            .iter()
            .map(|(a, b)| ((a * a + b * b) as f64).sqrt())
            .filter(|h| *h <= 1e3)
            .collect();
        let got: Vec<f64> = curve.records.iter().map(|r| r.height).collect();
        assert_eq!(got.len(), oracle.len(), "{got:?}");
        for (g, o) in got.iter().zip(&oracle) {
            assert!((g - o).abs() < 1e-9 * o);
        }
    }

    #[test]
    fn algebraic_target_gives_infinite_exponent() {
        let k = Arc::new(builtins::gaussian());
        let t = Target::algebraic(&k, vec![k.elem(&[1]), k.elem(&[2, 1]), k.elem(&[0, 3])]).unwrap();
        let curve = record_curve(&k, &t, 0, 100.0, &EnumOptions::default()).unwrap();
        assert!(curve.has_exact_zero());
        let est = estimate_exponents(&curve, &EstimateOptions::default()).unwrap();
        assert!(est.omega.is_infinite() && est.omega_hat.is_infinite());
        let curve = record_curve(&k, &t, 1, 100.0, &EnumOptions::default()).unwrap();
        assert!(curve.has_exact_zero());
    }

    #[test]
    fn chain_examples() {
        let (lo, hi) = chain_bounds(2, 1, 2.0);
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        assert!(check_chain(&[0.5, 2.0], 2, 1e-12).unwrap().passed());
        let r = check_chain(&[0.3, 0.5, 1.0], 3, 0.0).unwrap();
        assert!(!r.checks[0].consistent);
        assert!(!r.passed());
        let (lo, hi) = chain_bounds(2, 1, f64::INFINITY);
        assert_eq!(lo, 1.0);
        assert!(hi.is_infinite());
        let r = check_chain(&[1.0], 1, 0.0).unwrap();
        assert!(r.checks.is_empty() && r.passed());
    }
}
