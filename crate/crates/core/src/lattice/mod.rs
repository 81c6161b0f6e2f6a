//! Lattices in `E^{np}` obtained from `O_K`-modules through the real
//! embedding `rho`, with exact generators and floating images.

mod body;
mod enumerate;
mod lll;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::height::{phi_complement, SubspaceOverK};
use crate::intmat;
use crate::numberfield::{FieldElement, NumberField};
use crate::ring::Ring;

pub use body::{decompose, find_point_in_body, BodyHit, BodyParts, BodySpec, Functional};
pub use enumerate::{enumerate_ball, Enumeration};
pub use lll::{lll_float, lll_reduce, lll_reduce_with, LLL_DELTA};

/// `rho(X) = (X^[1], ..., X^[p])`: the real-coordinate blocks of `X`, block
/// `i` holding the `i`-th real coordinate of every entry.
pub fn rho(k: &NumberField, x: &[FieldElement]) -> Vec<f64> {
    let n = x.len();
    let p = k.degree();
    let mut out = vec![0.0; n * p];
    for (c, xc) in x.iter().enumerate() {
        for (i, v) in k.real_coords(xc).into_iter().enumerate() {
            out[i * n + c] = v;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct LatticePoint {
    /// Integer coordinates with respect to the generators of the lattice.
    pub coords: Vec<i64>,
    pub vector: Vec<FieldElement>,
    pub image: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct EmbeddedLattice {
    field: Arc<NumberField>,
    n: usize,
    gens: Vec<Vec<FieldElement>>,
    real_basis: Vec<Vec<f64>>,
    gram: Vec<Vec<f64>>,
}

impl EmbeddedLattice {
    pub fn from_gens(field: Arc<NumberField>, n: usize, gens: Vec<Vec<FieldElement>>) -> Self {
        let real_basis: Vec<Vec<f64>> = gens.iter().map(|g| rho(&field, g)).collect();
        let gram = gram_of(&real_basis);
        EmbeddedLattice { field, n, gens, real_basis, gram }
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }
    pub fn field_arc(&self) -> &Arc<NumberField> {
        &self.field
    }
    /// Length of the vectors over the field.
    pub fn n(&self) -> usize {
        self.n
    }
    /// Real ambient dimension `n p`.
    pub fn ambient(&self) -> usize {
        self.n * self.field.degree()
    }
    pub fn rank(&self) -> usize {
        self.gens.len()
    }
    pub fn gens(&self) -> &[Vec<FieldElement>] {
        &self.gens
    }
    pub fn real_basis(&self) -> &[Vec<f64>] {
        &self.real_basis
    }
    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    /// The exact vector `sum_i coords_i g_i`.
    pub fn combination(&self, coords: &[i64]) -> Vec<FieldElement> {
        let k = self.field.as_ref();
        let mut out = vec![k.zero(); self.n];
        for (c, g) in coords.iter().zip(&self.gens) {
            if *c == 0 {
                continue;
            }
            let cr = k.from_int(*c);
            for (o, x) in out.iter_mut().zip(g) {
                *o = k.add(o, &k.mul(&cr, x));
            }
        }
        out
    }

    /// A lattice point with an image recomputed from its exact vector.
    pub fn point(&self, coords: &[i64]) -> LatticePoint {
        let vector = self.combination(coords);
        let image = rho(&self.field, &vector);
        LatticePoint { coords: coords.to_vec(), vector, image }
    }

    /// The lattice with generators `t * gens` (rows of `t`).
    pub fn transformed(&self, t: &[Vec<i64>]) -> EmbeddedLattice {
        let gens = t.iter().map(|row| self.combination(row)).collect();
        EmbeddedLattice::from_gens(self.field.clone(), self.n, gens)
    }
}

fn gram_of(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter().map(|a| rows.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect()).collect()
}

/// `rho(O_K^n)`, generated by `b_i e_k`.
pub fn full_lattice(field: &Arc<NumberField>, n: usize) -> EmbeddedLattice {
    let k = field.as_ref();
    let mut gens = Vec::with_capacity(n * k.degree());
    for c in 0..n {
        for b in k.integral_basis() {
            let mut v = vec![k.zero(); n];
            v[c] = b.clone();
            gens.push(v);
        }
    }
    EmbeddedLattice::from_gens(field.clone(), n, gens)
}

/// Integer coordinates of `X in O_K^n` in the basis `b_i e_k` (index `k p + i`),
/// or `None` if some entry is not integral.
pub fn integral_coordinates(k: &NumberField, x: &[FieldElement]) -> Option<Vec<BigInt>> {
    let mut out = Vec::with_capacity(x.len() * k.degree());
    for xc in x {
        for c in k.integral_coords(xc) {
            if !c.is_integer() {
                return None;
            }
            out.push(c.to_integer());
        }
    }
    Some(out)
}

/// Integer basis of `S cap O_K^n` in the coordinates `b_i e_k`, saturated in
/// `Z^{np}`.
pub fn subspace_module(s: &SubspaceOverK) -> Result<Vec<Vec<BigInt>>> {
    let k = s.field();
    let (n, p) = (s.ambient(), k.degree());
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    if s.dim() < n {
        let comp = phi_complement(s)?;
        for c in comp.basis() {
            // phi(X, c) = sum_k sum_i z_{k,i} b_i c_k, one equation per power-basis coordinate
            let mut eq: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n * p]; p];
            for (col, ck) in c.iter().enumerate() {
                for (i, b) in k.integral_basis().iter().enumerate() {
                    let prod = k.mul(b, ck);
                    for (t, v) in prod.coeffs().iter().enumerate() {
                        eq[t][col * p + i] = v.clone();
                    }
                }
            }
            for row in eq {
                let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                let lr = BigRational::from_integer(l);
                rows.push(row.iter().map(|v| (v * &lr).to_integer()).collect());
            }
        }
    }
    let ker = if rows.is_empty() { intmat::identity(n * p) } else { intmat::kernel_basis(&rows, n * p) };
    let reduced = intmat::hnf(&ker);
    if reduced.len() != s.dim() * p {
        return Err(Error::Reduction(format!("expected rank {}, got {}", s.dim() * p, reduced.len())));
    }
    Ok(reduced)
}

/// `Lambda(S) = rho(O_K(S))`, a lattice of rank `d p`.
pub fn lattice_of_subspace(s: &SubspaceOverK) -> Result<EmbeddedLattice> {
    let k = s.field();
    let (n, p) = (s.ambient(), k.degree());
    let module = subspace_module(s)?;
    let gens = module
        .iter()
        .map(|z| (0..n).map(|col| k.from_integral_coords(&z[col * p..(col + 1) * p])).collect())
        .collect();
    Ok(EmbeddedLattice::from_gens(s.field_arc().clone(), n, gens))
}

/// `d(L) = sqrt(det Gram)`, via a Householder QR of the generator images.
pub fn det_lattice(l: &EmbeddedLattice) -> Result<f64> {
    let r = l.rank();
    if r == 0 {
        return Ok(1.0);
    }
    let m = l.ambient();
    if r > m {
        return Err(Error::RankDeficient);
    }
    let a = DMatrix::from_fn(m, r, |i, j| l.real_basis[j][i]);
    let qr = a.qr();
    Ok(qr.r().diagonal().iter().map(|x| x.abs()).product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::builtins;

    #[test]
    fn rho_examples() {
        let q = builtins::rationals();
        assert_eq!(rho(&q, &[q.from_int(3), q.from_int(4)]), vec![3.0, 4.0]);
        let k = builtins::gaussian();
        let v = rho(&k, &[k.one(), k.generator()]);
        let expect = [1.0, 0.0, 0.0, -1.0];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn lattice_of_line_over_q() {
        let q = Arc::new(builtins::rationals());
        let s = SubspaceOverK::from_int_rows(&q, &[vec![vec![3], vec![4]]]).unwrap();
        let l = lattice_of_subspace(&s).unwrap();
        assert_eq!(l.rank(), 1);
        let g = &l.real_basis()[0];
        assert!((g[0].abs() - 3.0).abs() < 1e-12 && (g[1].abs() - 4.0).abs() < 1e-12);
        assert!((det_lattice(&l).unwrap() - 5.0).abs() < 1e-12);
        let s = SubspaceOverK::from_int_rows(&q, &[vec![vec![6], vec![8]]]).unwrap();
        assert!((det_lattice(&lattice_of_subspace(&s).unwrap()).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_of_gaussian_line() {
        let k = Arc::new(builtins::gaussian());
        let s = SubspaceOverK::from_int_rows(&k, &[vec![vec![1, 0], vec![0, 1]]]).unwrap();
        let l = lattice_of_subspace(&s).unwrap();
        assert_eq!(l.rank(), 2);
        assert!((det_lattice(&l).unwrap() - 2.0).abs() < 1e-12);
        for g in l.gens() {
            assert!(s.contains_vector(g));
        }
    }

    #[test]
    fn full_lattice_covolume() {
        for k in builtins::all() {
            let k = Arc::new(k);
            let l = full_lattice(&k, 2);
            let expect = k.delta().powi(2);
            assert!((det_lattice(&l).unwrap() - expect).abs() < 1e-9 * expect, "{}", k.name());
        }
    }

    #[test]
    fn det_of_trivial_lattices() {
        let q = Arc::new(builtins::rationals());
        let empty = EmbeddedLattice::from_gens(q.clone(), 2, vec![]);
        assert_eq!(det_lattice(&empty).unwrap(), 1.0);
        assert!((det_lattice(&full_lattice(&q, 2)).unwrap() - 1.0).abs() < 1e-15);
    }
}
