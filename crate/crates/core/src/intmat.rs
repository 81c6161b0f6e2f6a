//! Dense integer matrices: row echelon / Hermite normal form with unimodular
//! transforms, integer kernels and Smith invariants.
//!
//! Matrices are `Vec<Vec<BigInt>>` in row-major order. Sizes here are tiny
//! (at most a few dozen rows), so plain Euclidean row reduction is adequate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

fn row_sub_mul(target: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(src) {
        if !s.is_zero() {
            *t -= q * s;
        }
    }
}

/// Row echelon form over the integers, applying the same unimodular row
/// operations to `transform` (which must have one row per row of `rows`).
/// Returns the pivot columns. After the call `rows[..rank]` are the nonzero
/// echelon rows with positive pivots, reduced above each pivot.
fn echelon_tracked(rows: &mut IntMatrix, transform: &mut Option<&mut IntMatrix>) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c at or below row r
            let mut best: Option<usize> = None;
            for i in r..nrows {
                if !rows[i][c].is_zero()
                    && best.is_none_or(|b| rows[i][c].abs() < rows[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            if let Some(t) = transform.as_deref_mut() {
                t.swap(r, b);
            }
            let mut done = true;
            for i in (r + 1)..nrows {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let (head, tail) = rows.split_at_mut(i);
                row_sub_mul(&mut tail[0], &head[r], &q);
                if let Some(t) = transform.as_deref_mut() {
                    let (th, tt) = t.split_at_mut(i);
                    row_sub_mul(&mut tt[0], &th[r], &q);
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -&*x;
            }
            if let Some(t) = transform.as_deref_mut() {
                for x in t[r].iter_mut() {
                    *x = -&*x;
                }
            }
        }
        for i in 0..r {
            let q = rows[i][c].div_floor(&rows[r][c]);
            let (head, tail) = rows.split_at_mut(r);
            row_sub_mul(&mut head[i], &tail[0], &q);
            if let Some(t) = transform.as_deref_mut() {
                let (th, tt) = t.split_at_mut(r);
                row_sub_mul(&mut th[i], &tt[0], &q);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Row Hermite normal form: the nonzero rows of the echelon form of the
/// lattice spanned by `rows`.
pub fn hnf(rows: &[Vec<BigInt>]) -> IntMatrix {
    let mut m = rows.to_vec();
    let pivots = echelon_tracked(&mut m, &mut None);
    m.truncate(pivots.len());
    m
}

/// Index `[Z^dim : L]` of the lattice spanned by `rows`, or `None` when the
/// rows do not span a full-rank sublattice of `Z^dim`.
pub fn full_rank_index(rows: &[Vec<BigInt>], dim: usize) -> Option<BigInt> {
    let h = hnf(rows);
    if h.len() != dim {
        return None;
    }
    Some(h.iter().enumerate().fold(BigInt::one(), |acc, (i, r)| acc * &r[i]))
}

/// A Z-basis of `{z in Z^ncols : m z = 0}`. The basis is saturated: it spans
/// every integer vector of the rational kernel.
pub fn kernel_basis(m: &[Vec<BigInt>], ncols: usize) -> IntMatrix {
    // rows of [m^T | I]; reduce the left block, the zero rows carry the kernel
    let nrows = m.len();
    let mut left: IntMatrix = (0..ncols)
        .map(|j| (0..nrows).map(|i| m[i][j].clone()).collect())
        .collect();
    let mut right: IntMatrix = identity(ncols);
    let rank = if nrows == 0 { 0 } else { echelon_tracked(&mut left, &mut Some(&mut right)).len() };
    right.split_off(rank)
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Smith invariant factors (positive, each dividing the next) of the matrix.
/// Zero invariants are omitted, so the length equals the rank.
pub fn smith_invariants(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a = rows.to_vec();
    let nr = a.len();
    let nc = a.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // locate the smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        for i in (t + 1)..nr {
            if !a[i][t].is_zero() {
                let q = a[i][t].div_floor(&a[t][t]);
                let (head, tail) = a.split_at_mut(i);
                row_sub_mul(&mut tail[0], &head[t], &q);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in (t + 1)..nc {
            if !a[t][j].is_zero() {
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..nr {
                    let v = &q * &a[i][t];
                    a[i][j] -= v;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // pivot must divide the whole trailing block
        let mut offender = None;
        'scan: for i in (t + 1)..nr {
            for j in (t + 1)..nc {
                if !a[i][j].is_multiple_of(&a[t][t]) {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            let (head, tail) = a.split_at_mut(i);
            for (x, y) in head[t].iter_mut().zip(tail[0].iter()) {
                *x += y;
            }
            continue;
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Multiply an integer row vector by a matrix: `v * m`.
pub fn vec_mat(v: &[BigInt], m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let nc = m.first().map_or(0, |r| r.len());
    let mut out = vec![BigInt::zero(); nc];
    for (vi, row) in v.iter().zip(m) {
        if vi.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o += vi * x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(v: &[&[i64]]) -> IntMatrix {
        v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn hnf_index_of_gaussian_ideal() {
        // ideal (2, 1+i) in Z[i]: generators 2, 2i, 1+i, -1+i
        let rows = mat(&[&[2, 0], &[0, 2], &[1, 1], &[-1, 1]]);
        assert_eq!(full_rank_index(&rows, 2), Some(BigInt::from(2)));
    }

    #[test]
    fn kernel_is_saturated() {
        let m = mat(&[&[2, 4, 6]]);
        let k = kernel_basis(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigInt = v.iter().zip(&m[0]).map(|(a, b)| a * b).sum();
            assert!(s.is_zero());
        }
        assert!(smith_invariants(&k).iter().all(|d| d.is_one()));
    }

    #[test]
    fn smith_of_diagonal_mix() {
        let m = mat(&[&[2, 0], &[0, 3]]);
        assert_eq!(smith_invariants(&m), vec![BigInt::from(1), BigInt::from(6)]);
        let m = mat(&[&[4, 0, 0], &[0, 6, 0]]);
        assert_eq!(smith_invariants(&m), vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn rank_deficient_index() {
        let rows = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(full_rank_index(&rows, 2), None);
    }
}
