//! Distances and principal angles between subspaces of `C^n` (real subspaces
//! are handled as complex ones with zero imaginary parts).
//!
//! The inner product is `<x, y> = sum x_k conj(y_k)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub type CVec = Vec<Complex64>;

/// Above this cosine the sine is recomputed from a residual projection.
pub const LAMBDA_SWITCH: f64 = 1.0 - 1e-6;

pub fn to_cvec(v: &[f64]) -> CVec {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

pub fn cinner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn cnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Removes from `v` its components along the orthonormal family `onb`
/// (two passes of modified Gram-Schmidt).
fn orthogonalize(v: &mut [Complex64], onb: &[CVec]) {
    for _ in 0..2 {
        for q in onb {
            let c = cinner(v, q);
            axpy(v, -c, q);
        }
    }
}

/// Extends the orthonormal family `onb` by vectors from `candidates`, picking
/// at each step the candidate with the largest residual, until `target`
/// vectors are present.
fn complete_onb(mut onb: Vec<CVec>, candidates: &[CVec], target: usize) -> Vec<CVec> {
    while onb.len() < target {
        let best = candidates
            .iter()
            .map(|c| {
                let mut r = c.clone();
                orthogonalize(&mut r, &onb);
                r
            })
            .max_by(|a, b| cnorm(a).total_cmp(&cnorm(b)))
            .expect("candidates available");
        let nb = cnorm(&best);
        if nb == 0.0 {
            break;
        }
        onb.push(best.iter().map(|x| x / nb).collect());
    }
    onb
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericSubspace {
    n: usize,
    onb: Vec<CVec>,
}

impl NumericSubspace {
    /// Orthonormalizes `basis`; fails when it is numerically dependent at the
    /// relative rank tolerance.
    pub fn from_basis(basis: &[CVec], tol: &Tolerances) -> Result<Self> {
        let n = basis.first().map(|v| v.len()).ok_or_else(|| Error::Dimension("empty basis".into()))?;
        if basis.len() > n {
            return Err(Error::RankDeficient);
        }
        let mut onb: Vec<CVec> = Vec::with_capacity(basis.len());
        for v in basis {
            if v.len() != n {
                return Err(Error::AmbientMismatch(n, v.len()));
            }
            let scale = cnorm(v);
            if scale == 0.0 {
                return Err(Error::RankDeficient);
            }
            let mut r = v.clone();
            orthogonalize(&mut r, &onb);
            let nr = cnorm(&r);
            if nr <= tol.rank * scale {
                return Err(Error::RankDeficient);
            }
            onb.push(r.iter().map(|x| x / nr).collect());
        }
        Ok(NumericSubspace { n, onb })
    }

    pub fn from_real_basis(basis: &[Vec<f64>], tol: &Tolerances) -> Result<Self> {
        let c: Vec<CVec> = basis.iter().map(|v| to_cvec(v)).collect();
        Self::from_basis(&c, tol)
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.onb.len()
    }

    pub fn onb(&self) -> &[CVec] {
        &self.onb
    }

    /// True when every basis vector has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.onb.iter().flatten().all(|z| z.im == 0.0)
    }

    /// Largest deviation of the Gram matrix of the stored basis from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.onb.iter().enumerate() {
            for (j, b) in self.onb.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((cinner(a, b) - target).norm());
            }
        }
        worst
    }

    pub fn project(&self, x: &[Complex64]) -> CVec {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for q in &self.onb {
            axpy(&mut out, cinner(x, q), q);
        }
        out
    }

    /// `x` minus its orthogonal projection.
    pub fn residual(&self, x: &[Complex64]) -> CVec {
        let mut r = x.to_vec();
        orthogonalize(&mut r, &self.onb);
        r
    }

    /// Image under a linear map given by its matrix (applied to columns).
    pub fn transform(&self, u: &DMatrix<Complex64>, tol: &Tolerances) -> Result<Self> {
        let basis: Vec<CVec> = self
            .onb
            .iter()
            .map(|v| (u * nalgebra::DVector::from_column_slice(v)).iter().copied().collect())
            .collect();
        Self::from_basis(&basis, tol)
    }
}

fn check_nonzero(x: &[Complex64]) -> Result<f64> {
    let n = cnorm(x);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(n)
}

/// Projective distance `||X ^ Y|| / (||X|| ||Y||)`, evaluated as the sine of
/// the angle through a residual to avoid cancellation.
pub fn proj_dist(x: &[Complex64], y: &[Complex64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::AmbientMismatch(x.len(), y.len()));
    }
    let nx = check_nonzero(x)?;
    let ny = check_nonzero(y)?;
    let xh: CVec = x.iter().map(|v| v / nx).collect();
    let yh: CVec = y.iter().map(|v| v / ny).collect();
    let mut r = xh.clone();
    orthogonalize(&mut r, std::slice::from_ref(&yh));
    Ok(cnorm(&r).min(1.0))
}

/// `omega(X, B)`: sine of the angle between `X` and the subspace `B`.
pub fn dist_point_subspace(x: &[Complex64], b: &NumericSubspace) -> Result<f64> {
    if x.len() != b.n {
        return Err(Error::AmbientMismatch(b.n, x.len()));
    }
    let nx = check_nonzero(x)?;
    let xh: CVec = x.iter().map(|v| v / nx).collect();
    Ok(cnorm(&b.residual(&xh)).min(1.0))
}

#[derive(Clone, Debug)]
pub struct PrincipalData {
    /// Cosines, descending.
    pub lambdas: Vec<f64>,
    /// Sines, ascending.
    pub omegas: Vec<f64>,
    /// Orthonormal basis of `A`; the first `f` vectors are aligned.
    pub x_basis: Vec<CVec>,
    /// Orthonormal basis of `B`; the first `f` vectors are aligned.
    pub y_basis: Vec<CVec>,
}

fn to_matrix(cols: &[CVec], n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r])
}

fn columns(m: &DMatrix<Complex64>) -> Vec<CVec> {
    m.column_iter().map(|c| c.iter().copied().collect()).collect()
}

/// Principal angles between `A` and `B`: `lambda_i` are the singular values
/// of the cross-Gram matrix `<a_i, b_j>` and `omega_i = sqrt(1 - lambda_i^2)`.
pub fn principal_data(a: &NumericSubspace, b: &NumericSubspace) -> Result<PrincipalData> {
    if a.n != b.n {
        return Err(Error::AmbientMismatch(a.n, b.n));
    }
    let n = a.n;
    let (d, e) = (a.dim(), b.dim());
    let f = d.min(e);
    let am = to_matrix(&a.onb, n);
    let bm = to_matrix(&b.onb, n);
    let m = am.adjoint() * &bm;
    let (sv, u, v) = if a.is_real() && b.is_real() {
        // keep singular vectors real so that aligned bases stay in R^n
        let svd = m.map(|z| z.re).svd(true, true);
        let u = svd.u.expect("left singular vectors requested").map(|x| Complex64::new(x, 0.0));
        let v = svd.v_t.expect("right singular vectors requested").transpose().map(|x| Complex64::new(x, 0.0));
        (svd.singular_values, u, v)
    } else {
        let svd = m.svd(true, true);
        let u = svd.u.expect("left singular vectors requested");
        let v = svd.v_t.expect("right singular vectors requested").adjoint();
        (svd.singular_values, u, v)
    };
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    order.truncate(f);

    let mut lambdas: Vec<f64> = order.iter().map(|&i| sv[i].clamp(0.0, 1.0)).collect();
    let mut omegas: Vec<f64> = lambdas.iter().map(|l| (1.0 - l * l).max(0.0).sqrt()).collect();

    if lambdas.iter().any(|&l| l > LAMBDA_SWITCH) {
        // sines of the principal angles are the singular values of the part
        // of the smaller subspace that sticks out of the larger one
        let (small, large) = if d <= e { (&am, b) } else { (&bm, a) };
        let resid: Vec<CVec> = columns(small).iter().map(|c| large.residual(c)).collect();
        let rm = to_matrix(&resid, n);
        let mut sines: Vec<f64> = rm.singular_values().iter().copied().collect();
        sines.sort_by(f64::total_cmp);
        for i in 0..f {
            if lambdas[i] > LAMBDA_SWITCH {
                omegas[i] = sines[i].clamp(0.0, 1.0);
                lambdas[i] = (1.0 - omegas[i] * omegas[i]).max(0.0).sqrt();
            }
        }
    }

    let xs = am * DMatrix::from_fn(d, f, |r, c| u[(r, order[c])]);
    let ys = bm * DMatrix::from_fn(e, f, |r, c| v[(r, order[c])]);
    let x_basis = complete_onb(normalize_cols(columns(&xs)), &a.onb, d);
    let y_basis = complete_onb(normalize_cols(columns(&ys)), &b.onb, e);
    Ok(PrincipalData { lambdas, omegas, x_basis, y_basis })
}

fn normalize_cols(cols: Vec<CVec>) -> Vec<CVec> {
    cols.into_iter()
        .map(|c| {
            let nc = cnorm(&c);
            c.into_iter().map(|x| x / nc).collect()
        })
        .collect()
}

/// `omega_i(A, B)` for `1 <= i <= min(d, e)`.
pub fn omega_i(a: &NumericSubspace, b: &NumericSubspace, i: usize) -> Result<f64> {
    let f = a.dim().min(b.dim());
    if i == 0 || i > f {
        return Err(Error::IndexOutOfRange { index: i, max: f });
    }
    Ok(principal_data(a, b)?.omegas[i - 1])
}

/// `mu(A, B)`: product of all `omega_k`.
pub fn mu(a: &NumericSubspace, b: &NumericSubspace) -> Result<f64> {
    Ok(principal_data(a, b)?.omegas.iter().product())
}

/// `||X_1 ^ .. ^ X_d ^ Y_1 ^ .. ^ Y_e|| / (||X_1 ^ .. ^ X_d|| ||Y_1 ^ .. ^ Y_e||)`
/// for arbitrary bases; requires `d + e <= n`.
pub fn mu_wedge(a_basis: &[CVec], b_basis: &[CVec]) -> Result<f64> {
    let n = a_basis.first().or(b_basis.first()).map(|v| v.len()).ok_or(Error::ZeroVector)?;
    if a_basis.len() + b_basis.len() > n {
        return Err(Error::Dimension(format!(
            "d + e = {} exceeds ambient dimension {n}",
            a_basis.len() + b_basis.len()
        )));
    }
    let da = crate::exterior::gen_det(a_basis)?;
    let db = crate::exterior::gen_det(b_basis)?;
    if da == 0.0 || db == 0.0 {
        return Err(Error::RankDeficient);
    }
    let all: Vec<CVec> = a_basis.iter().chain(b_basis).cloned().collect();
    Ok(crate::exterior::gen_det(&all)? / (da * db))
}

/// Hermitian orthogonal complement; requires `0 < e < n`.
pub fn orth_complement(b: &NumericSubspace) -> Result<NumericSubspace> {
    let (n, e) = (b.n, b.dim());
    if e == 0 || e >= n {
        return Err(Error::Dimension(format!("complement needs 0 < e < n, got e = {e}, n = {n}")));
    }
    let std_basis: Vec<CVec> = (0..n)
        .map(|k| (0..n).map(|i| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let full = complete_onb(b.onb.clone(), &std_basis, n);
    Ok(NumericSubspace { n, onb: full[e..].to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn sub(v: &[&[f64]]) -> NumericSubspace {
        let b: Vec<Vec<f64>> = v.iter().map(|r| r.to_vec()).collect();
        NumericSubspace::from_real_basis(&b, &tol()).unwrap()
    }

    #[test]
    fn proj_dist_examples() {
        let e1 = to_cvec(&[1.0, 0.0]);
        let e2 = to_cvec(&[0.0, 1.0]);
        assert_eq!(proj_dist(&e1, &e1).unwrap(), 0.0);
        assert!((proj_dist(&e1, &e2).unwrap() - 1.0).abs() < 1e-15);
        let t = PI / 6.0;
        let y = to_cvec(&[t.cos(), t.sin()]);
        assert!((proj_dist(&e1, &y).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(proj_dist(&e1, &to_cvec(&[0.0, 0.0])), Err(Error::ZeroVector)));
    }

    #[test]
    fn dist_point_subspace_examples() {
        let b = sub(&[&[1.0, 1.0]]);
        let x = to_cvec(&[1.0, 0.0]);
        assert!((dist_point_subspace(&x, &b).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(dist_point_subspace(&to_cvec(&[2.0, 2.0]), &b).unwrap() < 1e-15);
        assert!((dist_point_subspace(&to_cvec(&[1.0, -1.0]), &b).unwrap() - 1.0).abs() < 1e-15);
        let bp = orth_complement(&b).unwrap();
        let s = dist_point_subspace(&x, &b).unwrap().powi(2) + dist_point_subspace(&x, &bp).unwrap().powi(2);
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn principal_data_examples() {
        let a = sub(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let pd = principal_data(&a, &a).unwrap();
        assert!(pd.lambdas.iter().all(|l| (l - 1.0).abs() < 1e-15));
        assert!(pd.omegas.iter().all(|w| w.abs() < 1e-15));
        let b = sub(&[&[0.0, 0.0, 1.0]]);
        let pd = principal_data(&a, &b).unwrap();
        assert_eq!(pd.omegas.len(), 1);
        assert!((pd.omegas[0] - 1.0).abs() < 1e-15);
        let t = PI / 6.0;
        let a = sub(&[&[1.0, 0.0]]);
        let b = sub(&[&[t.cos(), t.sin()]]);
        assert!((omega_i(&a, &b, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!(omega_i(&a, &b, 2).is_err());
    }

    #[test]
    fn aligned_bases() {
        let a = sub(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 1.0, 0.0]]);
        let b = sub(&[&[1.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
        let pd = principal_data(&a, &b).unwrap();
        assert_eq!(pd.y_basis.len(), 3);
        for (i, x) in pd.x_basis.iter().enumerate() {
            for (j, y) in pd.y_basis.iter().enumerate() {
                let expect = if i == j { pd.lambdas[i] } else { 0.0 };
                assert!((cinner(x, y) - expect).norm() < 1e-12, "{i} {j}");
            }
        }
        let ys = NumericSubspace::from_basis(&pd.y_basis, &tol()).unwrap();
        assert!(ys.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn tiny_angles_use_residual() {
        let eps = 1e-9;
        let a = sub(&[&[1.0, 0.0, 0.0]]);
        let b = sub(&[&[1.0, eps, 0.0], &[0.0, 0.0, 1.0]]);
        let w = omega_i(&a, &b, 1).unwrap();
        assert!((w - eps).abs() < 1e-20, "{w}");
    }

    #[test]
    fn mu_examples() {
        let a = sub(&[&[1.0, 0.0]]);
        let b = sub(&[&[0.0, 1.0]]);
        assert!((mu(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        let a = sub(&[&[1.0, 0.0, 0.0]]);
        let b = sub(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert!(mu(&a, &b).unwrap() < 1e-15);
        assert!(mu_wedge(a.onb(), b.onb()).unwrap() < 1e-15);
        assert!(mu_wedge(b.onb(), b.onb()).is_err());
    }

    #[test]
    fn complement_examples() {
        let b = sub(&[&[1.0, 0.0, 0.0]]);
        let c = orth_complement(&b).unwrap();
        assert_eq!(c.dim(), 2);
        let pd = principal_data(&c, &sub(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])).unwrap();
        assert!(pd.omegas.iter().all(|w| *w < 1e-12));
        let cc = orth_complement(&c).unwrap();
        assert!(omega_i(&cc, &b, 1).unwrap() < 1e-12);
        assert!(orth_complement(&sub(&[&[1.0, 0.0], &[0.0, 1.0]])).is_err());
    }
}
