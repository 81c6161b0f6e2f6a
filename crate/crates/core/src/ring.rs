//! Scalar rings used by the exterior algebra and exact linear algebra.
//!
//! Rings are passed explicitly as context objects (`&R`) so that number field
//! elements do not need to carry a reference to their field.

use num_complex::Complex64;
use std::fmt::Debug;

pub trait Ring {
    type Elem: Clone + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

pub trait Field: Ring {
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }
}

/// Rings with a complex conjugation and an absolute value, used for the
/// Hermitian inner product on exterior powers.
pub trait Hermitian: Ring {
    fn conj(&self, a: &Self::Elem) -> Self::Elem;
    fn abs_sq(&self, a: &Self::Elem) -> f64;
    fn to_complex(&self, a: &Self::Elem) -> Complex64;
}

/// Floating complex numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complexes;

impl Ring for Complexes {
    type Elem = Complex64;
    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }
    fn sub(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a - b
    }
    fn mul(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b
    }
    fn neg(&self, a: &Complex64) -> Complex64 {
        -a
    }
    fn is_zero(&self, a: &Complex64) -> bool {
        a.re == 0.0 && a.im == 0.0
    }
}

impl Field for Complexes {
    fn inv(&self, a: &Complex64) -> Option<Complex64> {
        (!self.is_zero(a)).then(|| 1.0 / a)
    }
}

impl Hermitian for Complexes {
    fn conj(&self, a: &Complex64) -> Complex64 {
        a.conj()
    }
    fn abs_sq(&self, a: &Complex64) -> f64 {
        a.norm_sqr()
    }
    fn to_complex(&self, a: &Complex64) -> Complex64 {
        *a
    }
}

/// Reduced row echelon form over an exact field. Returns the pivot columns;
/// `rows` is left with the nonzero rows first.
pub fn rref<F: Field>(field: &F, rows: &mut [Vec<F::Elem>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = field.inv(&rows[r][c]).expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = field.mul(x, &inv);
        }
        for i in 0..nrows {
            if i == r || field.is_zero(&rows[i][c]) {
                continue;
            }
            let f = rows[i][c].clone();
            let (a, b) = if i < r {
                let (h, t) = rows.split_at_mut(r);
                (&mut h[i], &t[0])
            } else {
                let (h, t) = rows.split_at_mut(i);
                (&mut t[0], &h[r])
            };
            for (x, y) in a.iter_mut().zip(b.iter()) {
                if !field.is_zero(y) {
                    *x = field.sub(x, &field.mul(&f, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(field: &F, rows: &[Vec<F::Elem>]) -> usize {
    let mut m = rows.to_vec();
    rref(field, &mut m).len()
}

/// Basis of `{x : rows * x = 0}` (right kernel) over an exact field.
pub fn kernel<F: Field>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Vec<Vec<F::Elem>> {
    let mut m = rows.to_vec();
    let pivots = rref(field, &mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![field.zero(); ncols];
            v[fc] = field.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(&m[r][fc]);
            }
            v
        })
        .collect()
}
