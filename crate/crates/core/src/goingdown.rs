//! Going down: inside a `K`-subspace `B` of dimension `e` that approximates a
//! numeric subspace `A`, build a `K`-subspace of dimension `e - 1` that still
//! approximates `A`, by finding a short vector `W` over the conjugate field in
//! a product body and taking the orthogonal complement of `W` together with
//! `B^perp`.
//!
//! All real geometry happens in `E^{np}` through `rho` taken over the
//! conjugate field `K'`. For a complex vector `Y` and `Z in K'^n`,
//! `<Y, Z> = <Y1, rho Z> + i <Y2, rho Z>` with `Y1 = (Re Y, -Im Y, 0, ..)` and
//! `Y2 = (Im Y, Re Y, 0, ..)` (the second block of `rho` is the imaginary
//! part under the conjugate embedding).

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::exterior::{self, gen_det};
use crate::geometry::{cinner, cnorm, principal_data, CVec, NumericSubspace};
use crate::height::{self, hermitian_complement, phi_kernel, SubspaceOverK, SubspaceSpec};
use crate::lattice::{self, find_point_in_body, BodyHit, BodySpec, EmbeddedLattice, Functional};
use crate::numberfield::{rat_to_string, FieldElement, NumberField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Branch {
    /// Hypothesis `H(B) omega_i^q(A, B) <= c^q H^-(q y_i - 1)` for `i <= h`.
    First,
    /// Hypothesis `omega_i(A, B) = 0` for `i <= h`, with target height `h_prime`.
    Second { h_prime: f64 },
}

#[derive(Clone, Debug)]
pub struct GoingDownInput {
    pub a: NumericSubspace,
    pub b: SubspaceOverK,
    pub h: usize,
    pub y: Vec<f64>,
    /// The height parameter `H`.
    pub height: f64,
    pub c: f64,
    pub branch: Branch,
}

#[derive(Clone, Debug)]
pub struct GoingDownOptions {
    pub tol: Tolerances,
    /// Initial residual scale of the body.
    pub scale: f64,
    pub max_doublings: usize,
    pub max_points: usize,
    /// Second branch: how many times the body may be rebuilt.
    pub max_retries: usize,
    /// Second branch: geometric shrink factor for `H_1` on retry.
    pub shrink: f64,
    /// Second branch: inflation constant used for the first attempt.
    pub inflation: f64,
}

impl Default for GoingDownOptions {
    fn default() -> Self {
        GoingDownOptions {
            tol: Tolerances::default(),
            scale: 1.0,
            max_doublings: 24,
            max_points: 400_000,
            max_retries: 8,
            shrink: 0.8,
            inflation: 1.0,
        }
    }
}

/// Derived sizes and exponents of a validated input.
#[derive(Clone, Debug, Serialize)]
pub struct Setup {
    pub n: usize,
    pub d: usize,
    pub e: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    /// `y = y_1 + ... + y_h`.
    pub y_sum: f64,
    /// `y'_i = y_i e / (q y + e - 1)` (first branch).
    pub y_prime: Vec<f64>,
    /// `y'_0 = e / (q h)` (second branch).
    pub y0_prime: f64,
    pub height_b: f64,
}

/// Validates the input and computes the derived exponents.
pub fn setup(inp: &GoingDownInput, tol: &Tolerances) -> Result<Setup> {
    let k = inp.b.field();
    let n = inp.b.ambient();
    if inp.a.ambient() != n {
        return Err(Error::AmbientMismatch(n, inp.a.ambient()));
    }
    let (d, e, h) = (inp.a.dim(), inp.b.dim(), inp.h);
    let (_, r2) = k.signature();
    if r2 > 0 && k.roots()[0].im == 0.0 {
        return Err(Error::UnsupportedField("distinguished embedding must be non-real when the field has complex places".into()));
    }
    let q = k.q();
    let p = k.degree();
    if e < 2 {
        return Err(Error::InvalidInput(format!("dim B must be at least 2, got {e}")));
    }
    if h == 0 || h > d.min(e - 1) {
        return Err(Error::InvalidInput(format!("h = {h} outside 1..={}", d.min(e - 1))));
    }
    if q == 1 && !inp.a.is_real() {
        return Err(Error::InvalidInput("A must be real when the field embeds into R".into()));
    }
    if !(inp.height >= 1.0 && inp.height.is_finite()) {
        return Err(Error::InvalidInput(format!("H = {} must be a finite real >= 1", inp.height)));
    }
    if !(inp.c >= 1.0 && inp.c.is_finite()) {
        return Err(Error::InvalidInput(format!("c = {} must be a finite real >= 1", inp.c)));
    }
    let height_b = height::height_ideal(&inp.b)?;
    if height_b > inp.height * (1.0 + tol.rel) {
        return Err(Error::InvalidInput(format!("H(B) = {height_b} exceeds H = {}", inp.height)));
    }
    let qf = q as f64;
    let ef = e as f64;
    let floor = 1.0 / (qf * h as f64);
    let (y_sum, y_prime) = match inp.branch {
        Branch::First => {
            if inp.y.len() != h {
                return Err(Error::InvalidInput(format!("expected {h} exponents y, got {}", inp.y.len())));
            }
            if inp.y.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidInput("exponents y must be nonincreasing".into()));
            }
            if inp.y[h - 1] < floor * (1.0 - tol.rel) {
                return Err(Error::InvalidInput(format!("y_h = {} is below 1/(qh) = {floor}", inp.y[h - 1])));
            }
            let y_sum: f64 = inp.y.iter().sum();
            let yp: Vec<f64> = inp.y.iter().map(|yi| yi * ef / (qf * y_sum + ef - 1.0)).collect();
            if let Some(bad) = yp.iter().find(|v| **v < (1.0 - tol.rel) / qf) {
                return Err(Error::InvalidInput(format!("y' = {bad} is below 1/q")));
            }
            (y_sum, yp)
        }
        Branch::Second { h_prime } => {
            if !(h_prime.is_finite() && h_prime >= inp.height) {
                return Err(Error::InvalidInput(format!("H' = {h_prime} must be at least H = {}", inp.height)));
            }
            (inp.y.iter().sum(), Vec::new())
        }
    };
    Ok(Setup { n, d, e, m: n - e, p, q, y_sum, y_prime, y0_prime: ef / (qf * h as f64), height_b })
}

/// `(Y1, Y2)` frame vectors of a complex vector in `E^{np}` (only `Y1` when
/// `q = 1`).
pub fn frame_vectors(y: &[Complex64], q: usize, p: usize) -> Vec<Vec<f64>> {
    let n = y.len();
    let mut first = vec![0.0; n * p];
    for (k, z) in y.iter().enumerate() {
        first[k] = z.re;
        if q == 2 {
            first[n + k] = -z.im;
        }
    }
    if q == 1 {
        return vec![first];
    }
    let mut second = vec![0.0; n * p];
    for (k, z) in y.iter().enumerate() {
        second[k] = z.im;
        second[n + k] = z.re;
    }
    vec![first, second]
}

/// Per-`j` bounds of the slab constraints and the base radius of the residual
/// ball.
#[derive(Clone, Debug, Serialize)]
pub struct BodyBounds {
    pub slab: Vec<f64>,
    pub radius: f64,
}

pub fn first_branch_bounds(s: &Setup, y: &[f64], big_h: f64) -> BodyBounds {
    let (qf, ep, hf) = (s.q as f64, (s.e * s.p) as f64, y.len() as f64);
    let lead = (qf * s.y_sum - 1.0) / ep;
    let excess = (big_h / s.height_b).powf(1.0 / (qf * hf));
    BodyBounds { slab: y.iter().map(|yj| big_h.powf(-(yj - lead)) * excess).collect(), radius: big_h.powf(lead) }
}

pub fn second_branch_bounds(s: &Setup, h: usize, h1: f64) -> BodyBounds {
    let r = (s.q * h) as f64 / (s.e * s.p) as f64;
    BodyBounds { slab: vec![h1.powf(-(1.0 - r)); h], radius: h1.powf(r) }
}

/// `H_1 >= 1` from `H' = C H H_1^{qh/e}`.
pub fn second_branch_schedule(big_h: f64, h_prime: f64, h: usize, e: usize, q: usize, inflation: f64) -> Result<f64> {
    if !(inflation > 0.0) || h_prime < inflation * big_h * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(format!("H' = {h_prime} is below C H = {}", inflation * big_h)));
    }
    let h1 = (h_prime / (inflation * big_h)).powf(e as f64 / (q * h) as f64);
    Ok(h1.max(1.0))
}

/// Volume of the unit ball in `E^l`.
pub fn unit_ball_volume(l: usize) -> f64 {
    // V(l) = pi^{l/2} / Gamma(l/2 + 1), by the recursion V(l) = 2 pi V(l-2) / l
    let mut v = if l % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if l % 2 == 0 { 2 } else { 3 };
    while k <= l {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

/// Volume of the body with parallelepiped volume `pi_volume`, `q` slabs per
/// bound and a residual ball of radius `scale * radius` in the remaining
/// dimensions of `E^{ep}`.
pub fn body_volume(pi_volume: f64, bounds: &BodyBounds, q: usize, scale: f64, rest_dim: usize) -> f64 {
    let slabs: f64 = bounds.slab.iter().map(|b| (2.0 * b).powi(q as i32)).product();
    pi_volume * slabs * (scale * bounds.radius).powi(rest_dim as i32) * unit_ball_volume(rest_dim)
}

/// `2^{pn} Delta^n`, the volume past which a body must contain a nonzero
/// point of `rho(O^n)`.
pub fn minkowski_threshold(k: &NumberField, n: usize) -> f64 {
    2f64.powi((k.degree() * n) as i32) * k.delta().powi(n as i32)
}

/// Orthogonal decomposition `W^(j) = U_j + V_j` against the span of the
/// `Z_i^(j)`.
pub fn decompose_w(w: &CVec, zs: &[CVec]) -> Result<(CVec, CVec, f64)> {
    let n = w.len();
    let mut onb: Vec<CVec> = Vec::new();
    for z in zs {
        let mut r = z.clone();
        for _ in 0..2 {
            for qv in &onb {
                let c = cinner(&r, qv);
                for (ri, qi) in r.iter_mut().zip(qv) {
                    *ri -= c * qi;
                }
            }
        }
        let nr = cnorm(&r);
        if nr <= 1e-14 * cnorm(z) {
            return Err(Error::RankDeficient);
        }
        onb.push(r.iter().map(|x| x / nr).collect());
    }
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    for qv in &onb {
        let c = cinner(w, qv);
        for (ui, qi) in u.iter_mut().zip(qv) {
            *ui += c * qi;
        }
    }
    let v: CVec = w.iter().zip(&u).map(|(a, b)| a - b).collect();
    let nv = cnorm(&v);
    Ok((u, v, nv))
}

/// `B^{e-1} = <W, Z_1, .., Z_m>^perp` as a subspace over the field of `B`:
/// the `phi`-kernel of the same coefficient vectors read in `K`.
pub fn assemble_bm1(w: &[FieldElement], zs: &[Vec<FieldElement>], b: &SubspaceOverK) -> Result<SubspaceOverK> {
    let n = b.ambient();
    let mut rows = vec![w.to_vec()];
    rows.extend(zs.iter().cloned());
    if height::exact_rank(b.field(), &rows) != rows.len() {
        return Err(Error::DependentW);
    }
    phi_kernel(b.field_arc(), &rows, n)
}

/// Independent recheck of the body constraints: `x*` through a QR factorization
/// of the parallelepiped basis, the slab values through direct inner products.
#[derive(Clone, Debug, Serialize)]
pub struct BodyCheck {
    pub pi_coeff_max: f64,
    pub slab_ratio_max: f64,
    pub residual: f64,
    pub residual_bound: f64,
    pub passed: bool,
}

pub fn recheck_body(body: &BodySpec, scale: f64, x: &[f64], slack: f64) -> BodyCheck {
    let dim = x.len();
    let xv = DVector::from_column_slice(x);
    let kp = body.pi_basis.len();
    let (coeffs, proj) = if kp == 0 {
        (Vec::new(), DVector::zeros(dim))
    } else {
        let a = DMatrix::from_fn(dim, kp, |i, j| body.pi_basis[j][i]);
        let qr = a.qr();
        let qm = qr.q();
        let qtx = qm.transpose() * &xv;
        let c = qr.r().solve_upper_triangular(&qtx).unwrap_or_else(|| DVector::from_element(kp, f64::INFINITY));
        (c.iter().copied().collect::<Vec<f64>>(), qm * qtx)
    };
    let mut rest = &xv - proj;
    let mut slab_ratio_max = 0.0f64;
    for f in &body.functionals {
        let fv = DVector::from_column_slice(&f.direction);
        let t = fv.dot(&xv);
        slab_ratio_max = slab_ratio_max.max(t.abs() / f.bound);
        rest -= fv * t;
    }
    let pi_coeff_max = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let residual = rest.norm();
    let rest_dim = dim - kp - body.functionals.len();
    let residual_bound = body.radius * scale;
    let passed = pi_coeff_max <= 0.5 + slack
        && slab_ratio_max <= 1.0 + slack
        && (rest_dim == 0 || residual <= residual_bound * (1.0 + slack) + slack * xv.norm());
    BodyCheck { pi_coeff_max, slab_ratio_max, residual, residual_bound, passed }
}

#[derive(Clone, Debug, Serialize)]
pub struct Invariants {
    pub containment: bool,
    pub dimension: bool,
    pub defined_over_k: bool,
    pub w_independent: bool,
    pub body_recheck: bool,
    pub inner_product_bound: bool,
    pub height_factorization: bool,
    pub ideal_norms: bool,
    pub heights_agree: bool,
    /// Second branch only: `H(Bm1) <= H'`.
    pub target_height: Option<bool>,
}

impl Invariants {
    pub fn all(&self) -> bool {
        self.containment
            && self.dimension
            && self.defined_over_k
            && self.w_independent
            && self.body_recheck
            && self.inner_product_bound
            && self.height_factorization
            && self.ideal_norms
            && self.heights_agree
            && self.target_height.unwrap_or(true)
    }
}

/// Measured constants standing in for the existence constants of the
/// theorem.
#[derive(Clone, Debug, Serialize)]
pub struct Ratios {
    /// First branch: `H(Bm1) / (H(B) H^{(qy-1)/e})`.
    pub height: Option<f64>,
    /// First branch: `H(Bm1) omega_i^q / (c^q H'^{-(q y'_i - 1)})`; second
    /// branch: `H(Bm1) omega_i^q / (H^{q y'_0} H'^{-(q y'_0 - 1)})`.
    pub approximation: Vec<f64>,
    /// `||V_j|| / radius` per embedding.
    pub complement: Vec<f64>,
    /// Second branch: `H(Bm1) / (H(B) H_1^{qh/e})`.
    pub inflation: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoingDownCertificate {
    pub branch: Branch,
    pub setup: Setup,
    /// `W` over the conjugate field, as power-basis coefficient strings.
    pub w: Vec<Vec<String>>,
    pub bm1: SubspaceSpec,
    /// `H'`: `H^{(e + qy - 1)/e}` in the first branch, the target in the second.
    pub h_prime: f64,
    /// Second branch: the `H_1` of the accepted attempt.
    pub h1: Option<f64>,
    pub retries: usize,
    pub bounds: BodyBounds,
    pub body_scale: f64,
    pub body_attempts: usize,
    /// Smallest doubling of the initial scale at which the body volume
    /// exceeds the Minkowski threshold.
    pub minkowski_scale: f64,
    pub inner_products: Vec<f64>,
    pub v_norms: Vec<f64>,
    pub height_b: f64,
    pub height_bm1: f64,
    pub height_bm1_lattice: f64,
    pub omegas_before: Vec<f64>,
    pub omegas_after: Vec<f64>,
    pub ideal_norm_a: String,
    pub ideal_norm_b: String,
    pub body_check: BodyCheck,
    pub ratios: Ratios,
    pub invariants: Invariants,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub bm1_subspace: Option<SubspaceOverK>,
    #[serde(skip)]
    pub w_vector: Vec<FieldElement>,
}

/// The pieces of the construction that do not depend on the body bounds.
struct Frame {
    kc: Arc<NumberField>,
    zs: Vec<Vec<FieldElement>>,
    full: EmbeddedLattice,
    pi_basis: Vec<Vec<f64>>,
    pi_volume: f64,
    ys: Vec<CVec>,
    frame: Vec<Vec<f64>>,
    omegas_before: Vec<f64>,
}

fn build_frame(inp: &GoingDownInput, s: &Setup, tol: &Tolerances) -> Result<Frame> {
    let b = &inp.b;
    let k = b.field_arc();
    let kc = if k.is_real() { k.clone() } else { Arc::new(k.conjugate_field()) };
    let (zs, pi_basis, pi_volume) = if s.m == 0 {
        (Vec::new(), Vec::new(), 1.0)
    } else {
        let comp = hermitian_complement(b)?;
        let lat = lattice::lll_reduce(&lattice::lattice_of_subspace(&comp)?, None)?;
        let vol = lattice::det_lattice(&lat)?;
        (comp.basis().to_vec(), lat.real_basis().to_vec(), vol)
    };
    let full = lattice::full_lattice(&kc, s.n);
    let pd = principal_data(&inp.a, &b.numeric(tol)?)?;
    let ys: Vec<CVec> = pd.y_basis[..inp.h].to_vec();
    let frame: Vec<Vec<f64>> = ys.iter().flat_map(|y| frame_vectors(y, s.q, s.p)).collect();
    check_frame(&frame, &pi_basis, tol)?;
    Ok(Frame { kc, zs, full, pi_basis, pi_volume, ys, frame, omegas_before: pd.omegas })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The frame must be orthonormal and orthogonal to the parallelepiped span.
pub fn check_frame(frame: &[Vec<f64>], pi_basis: &[Vec<f64>], tol: &Tolerances) -> Result<()> {
    let eps = tol.orth.max(1e-9);
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            if (dot(a, b) - target).abs() > eps {
                return Err(Error::InvalidInput(format!("frame is not orthonormal at ({i}, {j})")));
            }
        }
        for v in pi_basis {
            let nv = dot(v, v).sqrt();
            if dot(a, v).abs() > eps * nv {
                return Err(Error::InvalidInput("frame is not orthogonal to the complement lattice".into()));
            }
        }
    }
    Ok(())
}

fn body_for(fr: &Frame, bounds: &BodyBounds, q: usize, opts: &GoingDownOptions) -> BodySpec {
    let functionals = fr
        .frame
        .iter()
        .enumerate()
        .map(|(i, f)| Functional { direction: f.clone(), bound: bounds.slab[i / q] })
        .collect();
    let mut body = BodySpec::new(fr.pi_basis.clone(), functionals, bounds.radius);
    body.scale = opts.scale;
    body.max_doublings = opts.max_doublings;
    body.max_points = opts.max_points;
    body.slack = opts.tol.boundary;
    body
}

fn minkowski_scale(fr: &Frame, s: &Setup, bounds: &BodyBounds, opts: &GoingDownOptions) -> f64 {
    let rest_dim = s.e * s.p - s.q * bounds.slab.len();
    let threshold = minkowski_threshold(&fr.kc, s.n);
    let mut scale = opts.scale;
    if rest_dim == 0 {
        return scale;
    }
    for _ in 0..200 {
        if body_volume(fr.pi_volume, bounds, s.q, scale, rest_dim) > threshold {
            break;
        }
        scale *= 2.0;
    }
    scale
}

struct Attempt {
    hit: BodyHit,
    body: BodySpec,
    bm1: SubspaceOverK,
    height_bm1: f64,
}

fn attempt(inp: &GoingDownInput, fr: &Frame, s: &Setup, bounds: &BodyBounds, opts: &GoingDownOptions) -> Result<Attempt> {
    let body = body_for(fr, bounds, s.q, opts);
    let hit = find_point_in_body(&fr.full, &body)?;
    let bm1 = assemble_bm1(&hit.point.vector, &fr.zs, &inp.b)?;
    let height_bm1 = height::height_ideal(&bm1)?;
    Ok(Attempt { hit, body, bm1, height_bm1 })
}

/// Runs the construction and measures every quantity of the certificate.
pub fn going_down(inp: &GoingDownInput, opts: &GoingDownOptions) -> Result<GoingDownCertificate> {
    let tol = &opts.tol;
    let s = setup(inp, tol)?;
    let fr = build_frame(inp, &s, tol)?;
    let (qf, ef, hf) = (s.q as f64, s.e as f64, inp.h as f64);
    let mut warnings = Vec::new();

    let (att, bounds, h_prime, h1, retries) = match inp.branch {
        Branch::First => {
            for (i, yi) in inp.y.iter().enumerate() {
                let lhs = s.height_b * fr.omegas_before[i].powi(s.q as i32);
                let rhs = inp.c.powi(s.q as i32) * inp.height.powf(-(qf * yi - 1.0));
                if lhs > rhs * (1.0 + tol.rel) {
                    warnings.push(format!(
                        "hypothesis fails at i = {}: H(B) omega^q = {lhs:.6e} > {rhs:.6e}",
                        i + 1
                    ));
                }
            }
            let bounds = first_branch_bounds(&s, &inp.y, inp.height);
            let att = attempt(inp, &fr, &s, &bounds, opts)?;
            let h_prime = inp.height.powf((ef + qf * s.y_sum - 1.0) / ef);
            (att, bounds, h_prime, None, 0)
        }
        Branch::Second { h_prime } => {
            for i in 0..inp.h {
                if fr.omegas_before[i] > tol.orth.max(1e-8) {
                    warnings.push(format!("omega_{}(A, B) = {:.6e} is not zero", i + 1, fr.omegas_before[i]));
                }
            }
            let mut h1 = second_branch_schedule(inp.height, h_prime, inp.h, s.e, s.q, opts.inflation)?;
            let mut retries = 0;
            loop {
                let bounds = second_branch_bounds(&s, inp.h, h1);
                let att = attempt(inp, &fr, &s, &bounds, opts)?;
                if att.height_bm1 <= h_prime * (1.0 + tol.rel) {
                    break (att, bounds, h_prime, Some(h1), retries);
                }
                if retries >= opts.max_retries || h1 <= 1.0 {
                    return Err(Error::RetryExhausted(format!(
                        "H(Bm1) = {:.6e} > H' = {h_prime:.6e} after {retries} retries (H_1 = {h1:.6e})",
                        att.height_bm1
                    )));
                }
                let measured = att.height_bm1 / (s.height_b * h1.powf(qf * hf / ef));
                let scheduled = second_branch_schedule(inp.height, h_prime, inp.h, s.e, s.q, measured).unwrap_or(1.0);
                h1 = (h1 * opts.shrink).min(scheduled).max(1.0);
                retries += 1;
            }
        }
    };

    let kc = fr.kc.as_ref();
    let k = inp.b.field();
    let w = &att.hit.point.vector;
    let bm1 = &att.bm1;

    // measured quantities
    let w1: CVec = w.iter().map(|x| kc.embed_unchecked(x, 1)).collect();
    let inner_products: Vec<f64> = fr.ys.iter().map(|y| cinner(y, &w1).norm()).collect();
    let mut v_norms = Vec::with_capacity(s.p);
    let mut factorization_ok = true;
    for j in 1..=s.p {
        let wj: CVec = w.iter().map(|x| kc.embed_unchecked(x, j)).collect();
        let zj: Vec<CVec> = fr.zs.iter().map(|z| z.iter().map(|x| kc.embed_unchecked(x, j)).collect()).collect();
        let (_, _, nv) = decompose_w(&wj, &zj)?;
        v_norms.push(nv);
        let mut all = vec![wj];
        all.extend(zj.iter().cloned());
        let lhs = gen_det(&all)?;
        let rhs = nv * if zj.is_empty() { 1.0 } else { gen_det(&zj)? };
        if (lhs - rhs).abs() > 1e-9 * lhs.abs().max(rhs.abs()).max(1e-300) {
            factorization_ok = false;
        }
    }
    let height_bm1 = att.height_bm1;
    let height_bm1_lattice = height::height_lattice(bm1)?;
    let bm1_num = bm1.numeric(tol)?;
    let omegas_after = principal_data(&inp.a, &bm1_num)?.omegas;

    // ideals of the complement block and of W together with it, over K'
    let na = if fr.zs.is_empty() {
        num_rational::BigRational::from_integer(1.into())
    } else {
        let za = exterior::plucker(kc, s.n, &fr.zs)?;
        kc.ideal_norm(&za.coords().to_vec())?
    };
    let mut wz = vec![w.clone()];
    wz.extend(fr.zs.iter().cloned());
    let zb = exterior::plucker(kc, s.n, &wz)?;
    let nb = kc.ideal_norm(&zb.coords().to_vec())?;

    let body_check = recheck_body(&att.body, att.hit.scale, &att.hit.point.image, opts.tol.boundary.max(1e-9));
    let inner_ok = inner_products
        .iter()
        .zip(&bounds.slab)
        .all(|(v, b)| *v <= qf * b * (1.0 + 1e-9) + 1e-12);

    let invariants = Invariants {
        containment: inp.b.contains(bm1),
        dimension: bm1.dim() + 1 == s.e,
        defined_over_k: *bm1.field() == *k,
        w_independent: height::exact_rank(kc, &wz) == s.m + 1,
        body_recheck: body_check.passed,
        inner_product_bound: inner_ok,
        height_factorization: factorization_ok,
        ideal_norms: nb >= na,
        heights_agree: (height_bm1 - height_bm1_lattice).abs() <= 1e-6 * height_bm1,
        target_height: match inp.branch {
            Branch::First => None,
            Branch::Second { h_prime } => Some(height_bm1 <= h_prime * (1.0 + tol.rel)),
        },
    };

    let approx: Vec<f64> = (0..inp.h)
        .map(|i| {
            let lhs = height_bm1 * omegas_after[i].powi(s.q as i32);
            let rhs = match inp.branch {
                Branch::First => {
                    inp.c.powi(s.q as i32) * h_prime.powf(-(qf * s.y_prime[i] - 1.0))
                }
                Branch::Second { .. } => {
                    inp.height.powf(qf * s.y0_prime) * h_prime.powf(-(qf * s.y0_prime - 1.0))
                }
            };
            lhs / rhs
        })
        .collect();
    let ratios = Ratios {
        height: match inp.branch {
            Branch::First => Some(height_bm1 / (s.height_b * inp.height.powf((qf * s.y_sum - 1.0) / ef))),
            Branch::Second { .. } => None,
        },
        approximation: approx,
        complement: v_norms.iter().map(|v| v / bounds.radius).collect(),
        inflation: h1.map(|h1| height_bm1 / (s.height_b * h1.powf(qf * hf / ef))),
    };
    if !invariants.all() {
        warnings.push("certificate invariants failed".into());
    }

    let height_b = s.height_b;
    Ok(GoingDownCertificate {
        branch: inp.branch.clone(),
        minkowski_scale: minkowski_scale(&fr, &s, &bounds, opts),
        setup: s,
        w: w.iter().map(|x| x.to_strings()).collect(),
        bm1: bm1.to_spec(),
        h_prime,
        h1,
        retries,
        body_scale: att.hit.scale,
        body_attempts: att.hit.attempts,
        bounds,
        inner_products,
        v_norms,
        height_b,
        height_bm1,
        height_bm1_lattice,
        omegas_before: fr.omegas_before.clone(),
        omegas_after,
        ideal_norm_a: rat_to_string(&na),
        ideal_norm_b: rat_to_string(&nb),
        body_check,
        ratios,
        invariants,
        warnings,
        bm1_subspace: Some(att.bm1.clone()),
        w_vector: w.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::to_cvec;
    use crate::lattice::rho;
    use crate::numberfield::builtins;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn frame_identity_on_small_vectors() {
        let k = builtins::gaussian().conjugate_field();
        let y = vec![c(0.3, -0.4), c(0.5, 0.1), c(-0.2, 0.7)];
        let z = vec![k.elem(&[1, 2]), k.elem(&[-3, 0]), k.elem(&[0, 5])];
        let zc: CVec = z.iter().map(|x| k.embed_unchecked(x, 1)).collect();
        let rz = rho(&k, &z);
        let f = frame_vectors(&y, 2, 2);
        let expect = cinner(&y, &zc);
        let got = c(dot(&f[0], &rz), dot(&f[1], &rz));
        assert!((expect - got).norm() < 1e-12);
        let ny = cnorm(&y);
        assert!((dot(&f[0], &f[0]) - ny * ny).abs() < 1e-12);
        assert!(dot(&f[0], &f[1]).abs() < 1e-12);
    }

    #[test]
    fn decompose_w_edge_cases() {
        let z = vec![to_cvec(&[1.0, 0.0, 0.0])];
        let (u, v, nv) = decompose_w(&to_cvec(&[2.0, 0.0, 0.0]), &z).unwrap();
        assert!(nv < 1e-15 && cnorm(&u) > 1.9 && cnorm(&v) < 1e-15);
        let (u, _, nv) = decompose_w(&to_cvec(&[0.0, 3.0, 4.0]), &z).unwrap();
        assert!(cnorm(&u) < 1e-15 && (nv - 5.0).abs() < 1e-12);
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(second_branch_schedule(10.0, 10.0, 1, 2, 2, 1.0).unwrap(), 1.0);
        let hp = 3.0 * 10.0 * 2f64.powf(2.0 / 2.0);
        assert!((second_branch_schedule(10.0, hp, 1, 2, 2, 3.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(second_branch_schedule(10.0, 5.0, 1, 2, 2, 1.0).is_err());
    }

    #[test]
    fn unit_ball_volumes() {
        let pi = std::f64::consts::PI;
        for (l, v) in [(0, 1.0), (1, 2.0), (2, pi), (3, 4.0 * pi / 3.0), (4, pi * pi / 2.0)] {
            assert!((unit_ball_volume(l) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn assemble_with_full_b() {
        let q = Arc::new(builtins::rationals());
        let b = SubspaceOverK::from_int_rows(&q, &[vec![vec![1], vec![0]], vec![vec![0], vec![1]]]).unwrap();
        let w = vec![q.from_int(1), q.from_int(1)];
        let bm1 = assemble_bm1(&w, &[], &b).unwrap();
        assert_eq!(bm1.dim(), 1);
        assert!(b.contains(&bm1));
    }

    fn gaussian_b() -> SubspaceOverK {
        let k = Arc::new(builtins::gaussian());
        SubspaceOverK::from_int_rows(&k, &[vec![vec![1], vec![0, 1], vec![2]], vec![vec![0], vec![1], vec![1, 1]]]).unwrap()
    }

    #[test]
    fn second_branch_degenerate_instance() {
        let b = gaussian_b();
        let tol = Tolerances::default();
        let y1 = b.numeric(&tol).unwrap().onb()[0].clone();
        let a = NumericSubspace::from_basis(&[y1], &tol).unwrap();
        let hb = height::height_ideal(&b).unwrap();
        let inp = GoingDownInput {
            a,
            b: b.clone(),
            h: 1,
            y: vec![],
            height: hb,
            c: 1.0,
            branch: Branch::Second { h_prime: 50.0 * hb },
        };
        let cert = going_down(&inp, &GoingDownOptions::default()).unwrap();
        assert!(cert.invariants.all(), "{:?}", cert.invariants);
        assert!(cert.warnings.is_empty(), "{:?}", cert.warnings);
        assert!(cert.height_bm1 <= 50.0 * hb);
    }

    #[test]
    fn first_branch_over_rationals() {
        let q = Arc::new(builtins::rationals());
        let b = SubspaceOverK::from_int_rows(&q, &[vec![vec![1], vec![0], vec![1]], vec![vec![0], vec![1], vec![2]]]).unwrap();
        let tol = Tolerances::default();
        let onb = b.numeric(&tol).unwrap().onb().to_vec();
        let normal = to_cvec(&[1.0, 2.0, -1.0]);
        let big_h: f64 = 1e3;
        let eps = big_h.powf(-0.5) / height::height_ideal(&b).unwrap();
        let nn = cnorm(&normal);
        let x: CVec = (0..3).map(|i| onb[0][i] * 0.6 + onb[1][i] * 0.8 + normal[i] / nn * eps).collect();
        let a = NumericSubspace::from_basis(&[x], &tol).unwrap();
        let inp = GoingDownInput { a, b, h: 1, y: vec![1.5], height: big_h, c: 1.0, branch: Branch::First };
        let cert = going_down(&inp, &GoingDownOptions::default()).unwrap();
        assert!(cert.invariants.all(), "{:?}", cert.invariants);
        assert!(cert.warnings.is_empty(), "{:?}", cert.warnings);
        assert!((cert.height_bm1 - cert.height_bm1_lattice).abs() < 1e-6 * cert.height_bm1);
        assert!(cert.body_scale <= cert.minkowski_scale);
    }

    #[test]
    fn setup_rejects_bad_inputs() {
        let b = gaussian_b();
        let tol = Tolerances::default();
        let a = NumericSubspace::from_basis(&[b.numeric(&tol).unwrap().onb()[0].clone()], &tol).unwrap();
        let mk = |h: usize, y: Vec<f64>, height: f64| GoingDownInput {
            a: a.clone(),
            b: b.clone(),
            h,
            y,
            height,
            c: 1.0,
            branch: Branch::First,
        };
        assert!(setup(&mk(2, vec![1.0, 1.0], 100.0), &tol).is_err());
        assert!(setup(&mk(1, vec![0.4], 100.0), &tol).is_err());
        assert!(setup(&mk(1, vec![1.0], 1.0), &tol).is_err());
        assert!(setup(&mk(1, vec![1.0], 100.0), &tol).is_ok());
    }
}
