//! Instance generators shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subspace_heights::config::Tolerances;
use subspace_heights::geometry::{cnorm, orth_complement, CVec, NumericSubspace};
use subspace_heights::goingdown::{Branch, GoingDownInput};
use subspace_heights::height::{height_ideal, SubspaceOverK};
use subspace_heights::numberfield::NumberField;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random element with small integer power-basis coordinates.
pub fn small_entry(r: &mut ChaCha8Rng, p: usize, bound: i64) -> Vec<i64> {
    (0..p).map(|_| r.gen_range(-bound..=bound)).collect()
}

/// A random subspace of dimension `d` in `K^n` with small integer data, or
/// `None` if the sampled rows were dependent.
pub fn random_subspace(r: &mut ChaCha8Rng, k: &Arc<NumberField>, n: usize, d: usize, bound: i64) -> Option<SubspaceOverK> {
    let rows: Vec<Vec<Vec<i64>>> =
        (0..d).map(|_| (0..n).map(|_| small_entry(r, k.degree(), bound)).collect()).collect();
    SubspaceOverK::from_int_rows(k, &rows).ok()
}

pub fn random_subspace_retry(r: &mut ChaCha8Rng, k: &Arc<NumberField>, n: usize, d: usize, bound: i64) -> SubspaceOverK {
    loop {
        if let Some(s) = random_subspace(r, k, n, d, bound) {
            return s;
        }
    }
}

/// Random unit vector in the span of an orthonormal family, real when `real`.
pub fn random_unit_in(r: &mut ChaCha8Rng, onb: &[CVec], real: bool) -> CVec {
    let n = onb[0].len();
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for q in onb {
        let c = if real {
            Complex64::new(r.gen_range(-1.0..1.0), 0.0)
        } else {
            Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
        };
        for (vi, qi) in v.iter_mut().zip(q) {
            *vi += c * qi;
        }
    }
    let nv = cnorm(&v);
    v.into_iter().map(|x| x / nv).collect()
}

/// Unit directions `Y` in `B` and `N` orthogonal to `B` (zero when `B` is
/// everything).
pub fn directions(r: &mut ChaCha8Rng, b: &SubspaceOverK) -> (CVec, CVec) {
    let tol = Tolerances::default();
    let bn = b.numeric(&tol).unwrap();
    let real = b.field().is_real();
    let y = random_unit_in(r, bn.onb(), real);
    let nvec = if b.dim() < b.ambient() {
        random_unit_in(r, orth_complement(&bn).unwrap().onb(), real)
    } else {
        vec![Complex64::new(0.0, 0.0); b.ambient()]
    };
    (y, nvec)
}

/// The line spanned by `Y + eps N`.
pub fn line(dirs: &(CVec, CVec), eps: f64) -> NumericSubspace {
    let x: CVec = dirs.0.iter().zip(&dirs.1).map(|(a, c)| a + c * eps).collect();
    NumericSubspace::from_basis(&[x], &Tolerances::default()).unwrap()
}

/// First-branch instance at height parameter `big_h` whose hypothesis holds
/// at half the allowed distance.
pub fn first_branch_instance(dirs: &(CVec, CVec), b: &SubspaceOverK, y: f64, big_h: f64) -> GoingDownInput {
    let q = b.field().q() as f64;
    let hb = height_ideal(b).unwrap();
    let eps = 0.5 * (big_h.powf(-(q * y - 1.0)) / hb).powf(1.0 / q);
    GoingDownInput { a: line(dirs, eps), b: b.clone(), h: 1, y: vec![y], height: big_h, c: 1.0, branch: Branch::First }
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Uniform-ish random unit vector of length `n`, real when `real`.
pub fn random_unit(r: &mut ChaCha8Rng, n: usize, real: bool) -> CVec {
    let e: Vec<CVec> = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0)).collect())
        .collect();
    random_unit_in(r, &e, real)
}
