//! Floating-point LLL with an exact integer transform.

use super::EmbeddedLattice;
use crate::error::{Error, Result};

pub const LLL_DELTA: f64 = 0.99;

const MAX_ROUNDS: usize = 12;
const MAX_STEPS: usize = 200_000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gso(b: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let r = b.len();
    let mut mu = vec![vec![0.0; r]; r];
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(r);
    let mut bn = vec![0.0; r];
    for i in 0..r {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &bstar[j]) / bn[j];
            for (vk, sk) in v.iter_mut().zip(&bstar[j]) {
                *vk -= mu[i][j] * sk;
            }
        }
        bn[i] = dot(&v, &v);
        let scale = dot(&b[i], &b[i]);
        if !bn[i].is_finite() || bn[i] <= 1e-28 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Reduction("numerically singular Gram matrix".into()));
        }
        bstar.push(v);
    }
    Ok((mu, bn))
}

fn round_i64(x: f64) -> Result<i64> {
    let q = x.round();
    if !q.is_finite() || q.abs() > 4.0e15 {
        return Err(Error::Overflow);
    }
    Ok(q as i64)
}

fn row_sub(t: &mut [Vec<i64>], k: usize, j: usize, q: i64) -> Result<()> {
    let (src, dst) = if j < k {
        let (h, tl) = t.split_at_mut(k);
        (&h[j], &mut tl[0])
    } else {
        let (h, tl) = t.split_at_mut(j);
        (&tl[0], &mut h[k])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        *d = s.checked_mul(q).and_then(|v| d.checked_sub(v)).ok_or(Error::Overflow)?;
    }
    Ok(())
}

/// LLL on floating vectors, applying every row operation to `transform`.
/// Returns whether any operation was performed.
pub fn lll_float(basis: &mut [Vec<f64>], transform: &mut [Vec<i64>], delta: f64) -> Result<bool> {
    let r = basis.len();
    if r <= 1 {
        if r == 1 && dot(&basis[0], &basis[0]) == 0.0 {
            return Err(Error::Reduction("zero basis vector".into()));
        }
        return Ok(false);
    }
    let (mut mu, mut bn) = gso(basis)?;
    let mut changed = false;
    let mut k = 1;
    let mut steps = 0;
    while k < r {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Reduction("step limit exceeded".into()));
        }
        for j in (0..k).rev() {
            if mu[k][j].abs() > 0.5 {
                let q = round_i64(mu[k][j])?;
                let qf = q as f64;
                let (h, tl) = basis.split_at_mut(k);
                for (x, y) in tl[0].iter_mut().zip(&h[j]) {
                    *x -= qf * y;
                }
                row_sub(transform, k, j, q)?;
                for i in 0..j {
                    mu[k][i] -= qf * mu[j][i];
                }
                mu[k][j] -= qf;
                changed = true;
            }
        }
        if bn[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * bn[k - 1] {
            basis.swap(k, k - 1);
            transform.swap(k, k - 1);
            let g = gso(basis)?;
            mu = g.0;
            bn = g.1;
            changed = true;
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    Ok(changed)
}

/// LLL-reduces `l` for the quadratic form `||map(x)||^2`. Returns the reduced
/// lattice, its images under `map`, and the exact transform `t` (reduced
/// generators are `t * gens`).
pub fn lll_reduce_with(
    l: &EmbeddedLattice,
    map: &dyn Fn(&[f64]) -> Vec<f64>,
) -> Result<(EmbeddedLattice, Vec<Vec<f64>>, Vec<Vec<i64>>)> {
    let r = l.rank();
    let identity = |r: usize| -> Vec<Vec<i64>> {
        (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect()
    };
    let mut total = identity(r);
    let mut cur = l.clone();
    for _ in 0..MAX_ROUNDS {
        let mut images: Vec<Vec<f64>> = cur.real_basis().iter().map(|v| map(v)).collect();
        let mut t = identity(r);
        let changed = lll_float(&mut images, &mut t, LLL_DELTA)?;
        if !changed {
            return Ok((cur, images, total));
        }
        cur = cur.transformed(&t);
        total = mat_mul(&t, &total)?;
    }
    let images = cur.real_basis().iter().map(|v| map(v)).collect();
    Ok((cur, images, total))
}

pub(crate) fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let nc = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..nc)
                .map(|c| {
                    row.iter().zip(b).try_fold(0i64, |acc, (x, brow)| {
                        x.checked_mul(brow[c]).and_then(|v| acc.checked_add(v)).ok_or(Error::Overflow)
                    })
                })
                .collect()
        })
        .collect()
}

/// LLL reduction with an optional positive diagonal weighting of the real
/// coordinates.
pub fn lll_reduce(l: &EmbeddedLattice, weights: Option<&[f64]>) -> Result<EmbeddedLattice> {
    if l.rank() == 0 {
        return Err(Error::Reduction("empty lattice".into()));
    }
    if let Some(w) = weights {
        if w.len() != l.ambient() || w.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidInput("weights must be positive, one per real coordinate".into()));
        }
    }
    let map = |v: &[f64]| -> Vec<f64> {
        match weights {
            Some(w) => v.iter().zip(w).map(|(x, s)| x * s).collect(),
            None => v.to_vec(),
        }
    };
    Ok(lll_reduce_with(l, &map)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{det_lattice, full_lattice};
    use crate::numberfield::builtins;
    use std::sync::Arc;

    #[test]
    fn skewed_plane_reduces() {
        let q = Arc::new(builtins::rationals());
        let gens = vec![vec![q.from_int(1), q.from_int(0)], vec![q.from_int(1000), q.from_int(1)]];
        let l = EmbeddedLattice::from_gens(q, 2, gens);
        let red = lll_reduce(&l, None).unwrap();
        let n0 = dot(&red.real_basis()[0], &red.real_basis()[0]).sqrt();
        assert!(n0 <= 2f64.sqrt() * 1.0 + 1e-12);
        assert!((det_lattice(&red).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reduced_basis_is_untouched() {
        let q = Arc::new(builtins::rationals());
        let l = full_lattice(&q, 3);
        let (red, _, t) = lll_reduce_with(&l, &|v| v.to_vec()).unwrap();
        assert_eq!(t, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(red.gens(), l.gens());
    }

    #[test]
    fn weights_are_validated() {
        let q = Arc::new(builtins::rationals());
        let l = full_lattice(&q, 2);
        assert!(lll_reduce(&l, Some(&[1.0, -1.0])).is_err());
        assert!(lll_reduce(&l, Some(&[1.0, 1e6])).is_ok());
    }
}
