//! Search for a nonzero lattice point in a product body
//! `Pi x {|<x, f_j>| <= beta_j} x {||x_0|| <= C r}` over pairwise orthogonal
//! subspaces: a parallelepiped `Pi` spanning `S*`, a slab system on an
//! orthonormal frame `T` orthogonal to `S*`, and a ball on the rest.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::lll::{lll_reduce_with, mat_mul};
use super::{enumerate_ball, EmbeddedLattice, LatticePoint};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Functional {
    /// Unit direction in `E^{np}`.
    pub direction: Vec<f64>,
    pub bound: f64,
}

#[derive(Clone, Debug)]
pub struct BodySpec {
    /// Basis of the sublattice whose half-open cell `sum c_i v_i`,
    /// `|c_i| <= 1/2`, forms the first factor.
    pub pi_basis: Vec<Vec<f64>>,
    pub functionals: Vec<Functional>,
    /// Base radius of the residual ball, multiplied by the scale.
    pub radius: f64,
    /// Initial value of the residual scale `C`.
    pub scale: f64,
    /// How many times `C` may be doubled.
    pub max_doublings: usize,
    /// Enumeration budget per attempt.
    pub max_points: usize,
    /// Slack on the closed boundary of every constraint.
    pub slack: f64,
}

impl BodySpec {
    pub fn new(pi_basis: Vec<Vec<f64>>, functionals: Vec<Functional>, radius: f64) -> Self {
        BodySpec {
            pi_basis,
            functionals,
            radius,
            scale: 1.0,
            max_doublings: 24,
            max_points: 400_000,
            slack: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BodyParts {
    /// Coefficients of `x*` in the parallelepiped basis.
    pub pi_coeffs: Vec<f64>,
    /// `<x_T, f_j>` for each functional.
    pub t_values: Vec<f64>,
    /// `||x_0||`.
    pub residual: f64,
    /// `||x_T||`.
    pub t_norm: f64,
}

#[derive(Clone, Debug)]
pub struct BodyHit {
    /// Coordinates with respect to the generators of the searched lattice.
    pub point: LatticePoint,
    pub scale: f64,
    pub attempts: usize,
    pub parts: BodyParts,
}

struct Projector {
    pi: DMatrix<f64>,
    coeff_map: DMatrix<f64>,
    frame: Vec<DVector<f64>>,
}

impl Projector {
    fn new(body: &BodySpec, dim: usize) -> Result<Self> {
        let k = body.pi_basis.len();
        let pi = DMatrix::from_fn(k, dim, |i, j| body.pi_basis[i][j]);
        let coeff_map = if k == 0 {
            DMatrix::zeros(0, dim)
        } else {
            let gram = &pi * pi.transpose();
            let inv = gram.try_inverse().ok_or(Error::RankDeficient)?;
            inv * &pi
        };
        let frame = body.functionals.iter().map(|f| DVector::from_column_slice(&f.direction)).collect();
        Ok(Projector { pi, coeff_map, frame })
    }

    fn split(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>, DVector<f64>) {
        let xv = DVector::from_column_slice(x);
        let c = &self.coeff_map * &xv;
        let t: Vec<f64> = self.frame.iter().map(|f| f.dot(&xv)).collect();
        let mut rest = xv - self.pi.transpose() * &c;
        for (f, tv) in self.frame.iter().zip(&t) {
            rest -= f * *tv;
        }
        (c.iter().copied().collect(), t, rest)
    }
}

/// Orthogonal decomposition of `x` against the body's subspaces.
pub fn decompose(body: &BodySpec, x: &[f64]) -> Result<BodyParts> {
    let proj = Projector::new(body, x.len())?;
    let (pi_coeffs, t_values, rest) = proj.split(x);
    let t_norm = t_values.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(BodyParts { pi_coeffs, t_values, residual: rest.norm(), t_norm })
}

fn satisfies(body: &BodySpec, parts: &BodyParts, scale: f64, rest_dim: usize) -> bool {
    let s = body.slack;
    parts.pi_coeffs.iter().all(|c| c.abs() <= 0.5 + s)
        && parts.t_values.iter().zip(&body.functionals).all(|(v, f)| v.abs() <= f.bound * (1.0 + s))
        && (rest_dim == 0 || parts.residual <= body.radius * scale * (1.0 + s))
}

/// Finds a nonzero point of `lattice` in the body, doubling the residual scale
/// until one is found. Candidates are produced by enumerating a containing
/// ellipsoid and are checked against the body itself; the first hit in the
/// enumeration order (weighted norm, then coefficients) is returned.
pub fn find_point_in_body(lattice: &EmbeddedLattice, body: &BodySpec) -> Result<BodyHit> {
    let dim = lattice.ambient();
    let kp = body.pi_basis.len();
    let kt = body.functionals.len();
    if body.pi_basis.iter().any(|v| v.len() != dim) || body.functionals.iter().any(|f| f.direction.len() != dim) {
        return Err(Error::AmbientMismatch(dim, body.pi_basis.first().map_or(0, |v| v.len())));
    }
    if kp + kt > dim {
        return Err(Error::Dimension("body factors exceed the ambient dimension".into()));
    }
    if body.functionals.iter().any(|f| !(f.bound > 0.0)) || !(body.radius > 0.0) || !(body.scale > 0.0) {
        return Err(Error::InvalidInput("body bounds must be positive".into()));
    }
    let rest_dim = dim - kp - kt;
    let parts_count = [kp > 0, kt > 0, rest_dim > 0].iter().filter(|b| **b).count() as f64;
    let proj = Projector::new(body, dim)?;

    let mut scale = body.scale;
    let mut attempts = 0;
    loop {
        attempts += 1;
        let radius = body.radius * scale;
        let map = |x: &[f64]| -> Vec<f64> {
            let (c, t, rest) = proj.split(x);
            let mut out = Vec::with_capacity(kp + kt + dim);
            let wc = 2.0 / (kp as f64 * parts_count).sqrt();
            out.extend(c.iter().map(|v| v * wc));
            for (v, f) in t.iter().zip(&body.functionals) {
                out.push(v / (f.bound * (kt as f64 * parts_count).sqrt()));
            }
            if rest_dim > 0 {
                let wr = 1.0 / (radius * parts_count.sqrt());
                out.extend(rest.iter().map(|v| v * wr));
            }
            out
        };
        let (reduced, images, t) = lll_reduce_with(lattice, &map)?;
        let en = enumerate_ball(&images, 1.0 + 1e-9, body.max_points)?;
        if en.truncated {
            return Err(Error::NotFound { attempts, last_scale: scale });
        }
        for (coords, _) in &en.points {
            let pt = reduced.point(coords);
            let (c, tv, rest) = proj.split(&pt.image);
            let t_norm = tv.iter().map(|v| v * v).sum::<f64>().sqrt();
            let residual = rest.norm();
            let xn = pt.image.iter().map(|v| v * v).sum::<f64>().sqrt();
            if t_norm <= 1e-12 * xn && residual <= 1e-12 * xn {
                continue;
            }
            let parts = BodyParts { pi_coeffs: c, t_values: tv, residual, t_norm };
            if satisfies(body, &parts, scale, rest_dim) {
                let orig = mat_mul(&[coords.clone()], &t)?.remove(0);
                let point = LatticePoint { coords: orig, vector: pt.vector, image: pt.image };
                return Ok(BodyHit { point, scale, attempts, parts });
            }
        }
        if rest_dim == 0 || attempts > body.max_doublings {
            return Err(Error::NotFound { attempts, last_scale: scale });
        }
        scale *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::full_lattice;
    use crate::numberfield::builtins;
    use std::sync::Arc;

    fn z2() -> EmbeddedLattice {
        full_lattice(&Arc::new(builtins::rationals()), 2)
    }

    #[test]
    fn square_body_finds_unit_vector() {
        let f = |d: Vec<f64>| Functional { direction: d, bound: 1.5 };
        let body = BodySpec::new(vec![], vec![f(vec![1.0, 0.0]), f(vec![0.0, 1.0])], 1.0);
        let hit = find_point_in_body(&z2(), &body).unwrap();
        let v = &hit.point.image;
        assert!((v[0].abs() + v[1].abs() - 1.0).abs() < 1e-12);
        assert_eq!(hit.attempts, 1);
    }

    #[test]
    fn small_ball_needs_doubling() {
        let mut body = BodySpec::new(vec![], vec![], 0.25);
        body.max_doublings = 0;
        assert!(matches!(find_point_in_body(&z2(), &body), Err(Error::NotFound { attempts: 1, .. })));
        body.max_doublings = 5;
        let hit = find_point_in_body(&z2(), &body).unwrap();
        assert_eq!(hit.scale, 4.0);
        assert_eq!(hit.attempts, 3);
    }

    #[test]
    fn parallelepiped_excludes_its_own_lattice() {
        // Pi spanned by (1, 0): only points with nonzero second coordinate count
        let body = BodySpec::new(vec![vec![1.0, 0.0]], vec![], 1.0);
        let hit = find_point_in_body(&z2(), &body).unwrap();
        assert!(hit.parts.pi_coeffs[0].abs() <= 0.5);
        assert!((hit.point.image[1].abs() - 1.0).abs() < 1e-12);
        assert_eq!(hit.point.image[0], 0.0);
    }
}
