//! Exterior powers of `R^n` for a scalar ring `R`, with dense coordinates on
//! the basis `e_I = e_{i_1} ^ ... ^ e_{i_m}` (`i_1 < ... < i_m`).
//!
//! Index sets are bitmasks over `0..n`; coordinates are stored in colex
//! order, which is the order of the masks as integers. The slot of a mask is
//! its rank in the combinatorial number system.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numberfield::{FieldElement, NumberField};
use crate::ring::{Complexes, Field, Hermitian, Ring};

pub const MAX_AMBIENT: usize = 16;

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Colex rank of a mask among masks of the same popcount.
pub fn mask_rank(mask: u32) -> usize {
    let mut rank = 0;
    let mut t = 0;
    let mut m = mask;
    while m != 0 {
        let pos = m.trailing_zeros() as usize;
        t += 1;
        rank += binom(pos, t);
        m &= m - 1;
    }
    rank
}

/// All `m`-subsets of `0..n` as masks, in colex order.
pub fn subsets(n: usize, m: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(binom(n, m));
    if m > n {
        return out;
    }
    if m == 0 {
        out.push(0);
        return out;
    }
    // Gosper's hack walks same-popcount masks in increasing order
    let mut x: u64 = (1u64 << m) - 1;
    let limit = 1u64 << n;
    while x < limit {
        out.push(x as u32);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// Sign of `e_I ^ e_J` relative to `e_{I u J}`: the parity of the number of
/// pairs `i in I`, `j in J` with `i > j`.
pub fn wedge_sign(i: u32, j: u32) -> bool {
    let mut count = 0u32;
    let mut m = j;
    while m != 0 {
        let pos = m.trailing_zeros();
        let above = if pos >= 31 { 0 } else { i >> (pos + 1) };
        count += above.count_ones();
        m &= m - 1;
    }
    count % 2 == 1
}

pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiVector<T> {
    n: usize,
    grade: usize,
    coords: Vec<T>,
}

impl<T: Clone> MultiVector<T> {
    pub fn zero<R: Ring<Elem = T>>(ring: &R, n: usize, grade: usize) -> Result<Self> {
        if n > MAX_AMBIENT {
            return Err(Error::AmbientTooLarge(n));
        }
        if grade > n {
            return Err(Error::Dimension(format!("grade {grade} exceeds ambient dimension {n}")));
        }
        Ok(MultiVector { n, grade, coords: vec![ring.zero(); binom(n, grade)] })
    }

    /// The grade-1 element with the given coordinates.
    pub fn from_vector(v: &[T]) -> Result<Self> {
        if v.len() > MAX_AMBIENT {
            return Err(Error::AmbientTooLarge(v.len()));
        }
        Ok(MultiVector { n: v.len(), grade: 1, coords: v.to_vec() })
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    /// Coordinates in colex order of the index sets.
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    /// Coordinate on the index set `mask`.
    pub fn get(&self, mask: u32) -> Option<&T> {
        if mask.count_ones() as usize != self.grade || (self.n < 32 && mask >> self.n != 0) {
            return None;
        }
        self.coords.get(mask_rank(mask))
    }

    /// `(mask, coordinate)` pairs in colex order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &T)> {
        subsets(self.n, self.grade).into_iter().zip(self.coords.iter())
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> MultiVector<U> {
        MultiVector { n: self.n, grade: self.grade, coords: self.coords.iter().map(f).collect() }
    }

    pub fn is_zero<R: Ring<Elem = T>>(&self, ring: &R) -> bool {
        self.coords.iter().all(|c| ring.is_zero(c))
    }

    pub fn scale<R: Ring<Elem = T>>(&self, ring: &R, s: &T) -> Self {
        MultiVector { n: self.n, grade: self.grade, coords: self.coords.iter().map(|c| ring.mul(s, c)).collect() }
    }

    pub fn add<R: Ring<Elem = T>>(&self, ring: &R, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(MultiVector {
            n: self.n,
            grade: self.grade,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| ring.add(a, b)).collect(),
        })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch(self.n, other.n));
        }
        if self.grade != other.grade {
            return Err(Error::GradeMismatch(self.grade, other.grade));
        }
        Ok(())
    }
}

/// `u ^ v`.
pub fn wedge<R: Ring>(ring: &R, u: &MultiVector<R::Elem>, v: &MultiVector<R::Elem>) -> Result<MultiVector<R::Elem>> {
    if u.n != v.n {
        return Err(Error::AmbientMismatch(u.n, v.n));
    }
    if u.grade + v.grade > u.n {
        return Err(Error::GradeOverflow { a: u.grade, b: v.grade, n: u.n });
    }
    let mut out = MultiVector::zero(ring, u.n, u.grade + v.grade)?;
    let su = subsets(u.n, u.grade);
    let sv = subsets(v.n, v.grade);
    for (mi, a) in su.iter().zip(&u.coords) {
        if ring.is_zero(a) {
            continue;
        }
        for (mj, b) in sv.iter().zip(&v.coords) {
            if mi & mj != 0 || ring.is_zero(b) {
                continue;
            }
            let prod = ring.mul(a, b);
            let slot = &mut out.coords[mask_rank(mi | mj)];
            *slot = if wedge_sign(*mi, *mj) { ring.sub(slot, &prod) } else { ring.add(slot, &prod) };
        }
    }
    Ok(out)
}

/// `X_1 ^ ... ^ X_m` for vectors of a common length `n`.
pub fn wedge_vectors<R: Ring>(ring: &R, n: usize, vectors: &[Vec<R::Elem>]) -> Result<MultiVector<R::Elem>> {
    let mut acc = MultiVector::zero(ring, n, 0)?;
    acc.coords[0] = ring.one();
    for v in vectors {
        if v.len() != n {
            return Err(Error::AmbientMismatch(n, v.len()));
        }
        acc = wedge(ring, &acc, &MultiVector::from_vector(v)?)?;
    }
    Ok(acc)
}

/// Hermitian inner product, conjugate-linear in the second argument.
pub fn inner<R: Hermitian>(ring: &R, u: &MultiVector<R::Elem>, v: &MultiVector<R::Elem>) -> Result<R::Elem> {
    u.same_shape(v)?;
    Ok(u.coords
        .iter()
        .zip(&v.coords)
        .fold(ring.zero(), |acc, (a, b)| ring.add(&acc, &ring.mul(a, &ring.conj(b)))))
}

pub fn norm<R: Hermitian>(ring: &R, u: &MultiVector<R::Elem>) -> f64 {
    u.coords.iter().map(|c| ring.abs_sq(c)).sum::<f64>().sqrt()
}

/// Generalized determinant `||X_1 ^ ... ^ X_m||` of complex vectors.
pub fn gen_det(vectors: &[Vec<Complex64>]) -> Result<f64> {
    let Some(n) = vectors.first().map(|v| v.len()) else {
        return Ok(1.0);
    };
    if vectors.len() > n {
        return Ok(0.0);
    }
    Ok(norm(&Complexes, &wedge_vectors(&Complexes, n, vectors)?))
}

/// Real-vector convenience wrapper for [`gen_det`].
pub fn gen_det_real(vectors: &[Vec<f64>]) -> Result<f64> {
    let c: Vec<Vec<Complex64>> =
        vectors.iter().map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
    gen_det(&c)
}

/// Plücker coordinates of the span of `basis`; fails on a dependent basis.
pub fn plucker<R: Ring>(ring: &R, n: usize, basis: &[Vec<R::Elem>]) -> Result<MultiVector<R::Elem>> {
    let w = wedge_vectors(ring, n, basis)?;
    if w.is_zero(ring) {
        return Err(Error::RankDeficient);
    }
    Ok(w)
}

/// Projective normalization: divide by the first nonzero coordinate.
pub fn normalize<F: Field>(field: &F, u: &MultiVector<F::Elem>) -> Result<MultiVector<F::Elem>> {
    let lead = u.coords.iter().find(|c| !field.is_zero(c)).ok_or(Error::ZeroVector)?;
    let inv = field.inv(lead).expect("nonzero lead");
    Ok(u.scale(field, &inv))
}

/// Image of an exact multivector under the embedding `sigma_j`.
pub fn embed_multivector(k: &NumberField, u: &MultiVector<FieldElement>, j: usize) -> Result<MultiVector<Complex64>> {
    if j == 0 || j > k.degree() {
        return Err(Error::IndexOutOfRange { index: j, max: k.degree() });
    }
    Ok(u.map(|x| k.embed_unchecked(x, j)))
}
