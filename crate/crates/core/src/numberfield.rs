//! Exact arithmetic in a number field `K = Q(t)` together with its ordered
//! complex embeddings.
//!
//! Elements are coordinate vectors in the power basis `1, t, ..., t^(p-1)`.
//! The embeddings `sigma_1..sigma_p` are ordered with the conjugate pairs
//! first (`sigma_{j+1}` is the conjugate of `sigma_j` for odd `j <= 2 r2`)
//! and the real embeddings last; `sigma_1` is the distinguished embedding
//! through which `K` is viewed inside the complex numbers.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::intmat;
use crate::poly::{self, RatPoly};
use crate::ring::{self, Field, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<BigRational>,
}

impl FieldElement {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        FieldElement { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        FieldElement { coeffs: coeffs.iter().map(|&c| poly::rat(c, 1)).collect() }
    }

    /// The rational `r` viewed in a field of degree `p`.
    pub fn rational(p: usize, r: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); p];
        coeffs[0] = r;
        FieldElement { coeffs }
    }

    pub fn integer(p: usize, n: i64) -> Self {
        Self::rational(p, poly::rat(n, 1))
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficients as `"num/den"` strings (denominator omitted when 1).
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rat_to_string).collect()
    }

    pub fn parse(p: usize, items: &[String], path: &str) -> Result<Self> {
        if items.len() != p {
            return Err(parse_err(path, format!("expected {p} coefficients, got {}", items.len())));
        }
        let coeffs = items
            .iter()
            .enumerate()
            .map(|(i, s)| parse_rational(s).map_err(|m| parse_err(format!("{path}[{i}]"), m)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(FieldElement { coeffs })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = rat_to_string(c);
            terms.push(match k {
                0 => cs,
                1 => format!("{cs}*t"),
                _ => format!("{cs}*t^{k}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

pub fn rat_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

#[derive(Clone, Debug)]
pub struct NumberField {
    name: String,
    min_poly: RatPoly,
    integral_basis: Vec<FieldElement>,
    to_integral: Vec<Vec<BigRational>>,
    disc: BigInt,
    r1: usize,
    r2: usize,
    roots: Vec<Complex64>,
    delta: f64,
    /// `t^(p+k)` in the power basis, `k = 0..p-1`.
    reductions: Vec<Vec<BigRational>>,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly
            && self.integral_basis == other.integral_basis
            && (self.roots[0] - other.roots[0]).norm() <= 1e-9 * (1.0 + self.roots[0].norm())
    }
}

impl NumberField {
    /// Builds a field from a monic defining polynomial (low degree first), an
    /// integral basis given as elements in the power basis, and the field
    /// discriminant. `embedding` selects the distinguished root (nearest
    /// root wins); by default the non-real root with positive imaginary part
    /// and largest real part is taken, or the largest real root for totally
    /// real fields.
    pub fn new(
        name: impl Into<String>,
        min_poly: RatPoly,
        integral_basis: Vec<FieldElement>,
        disc: BigInt,
        embedding: Option<Complex64>,
    ) -> Result<Self> {
        let name = name.into();
        let mut min_poly = min_poly;
        poly::trim(&mut min_poly);
        if !poly::is_monic(&min_poly) || min_poly.len() < 2 {
            return Err(Error::InvalidInput("defining polynomial must be monic of degree >= 1".into()));
        }
        let p = min_poly.len() - 1;
        if integral_basis.len() != p || integral_basis.iter().any(|b| b.coeffs.len() != p) {
            return Err(Error::InvalidInput(format!("integral basis must be {p} elements of length {p}")));
        }
        let to_integral = invert_columns(&integral_basis)
            .ok_or_else(|| Error::InvalidInput("integral basis is singular".into()))?;

        let fpoly: Vec<f64> = min_poly.iter().map(poly::to_f64).collect();
        let raw = poly::complex_roots(&fpoly);
        let (roots, r1, r2) = order_roots(raw, embedding)?;
        let delta = 2f64.powi(-(r2 as i32)) * poly::to_f64(&BigRational::from_integer(disc.abs())).sqrt();

        let reductions = power_reductions(&min_poly);
        let field = NumberField {
            name,
            min_poly,
            integral_basis,
            to_integral,
            disc,
            r1,
            r2,
            roots,
            delta,
            reductions,
        };
        field.validate()?;
        Ok(field)
    }

    fn validate(&self) -> Result<()> {
        let p = self.degree();
        // the integral basis must be closed under multiplication
        for a in &self.integral_basis {
            for b in &self.integral_basis {
                let c = self.integral_coords(&self.mul(a, b));
                if c.iter().any(|x| !x.is_integer()) {
                    return Err(Error::InvalidInput("integral basis is not closed under multiplication".into()));
                }
            }
        }
        // |det(sigma_j(b_i))|^2 must equal |disc|
        let m: Vec<Vec<Complex64>> = self
            .integral_basis
            .iter()
            .map(|b| (1..=p).map(|j| self.embed_unchecked(b, j)).collect())
            .collect();
        let det2 = complex_det(m).norm_sqr();
        let d = poly::to_f64(&BigRational::from_integer(self.disc.abs()));
        if (det2 - d).abs() > 1e-6 * d.max(1.0) {
            return Err(Error::InvalidInput(format!(
                "discriminant {} inconsistent with integral basis (|det|^2 = {det2})",
                self.disc
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }
    pub fn min_poly(&self) -> &RatPoly {
        &self.min_poly
    }
    pub fn integral_basis(&self) -> &[FieldElement] {
        &self.integral_basis
    }
    pub fn disc(&self) -> &BigInt {
        &self.disc
    }
    /// `(r1, r2)`: numbers of real embeddings and of conjugate pairs.
    pub fn signature(&self) -> (usize, usize) {
        (self.r1, self.r2)
    }
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }
    /// `2^(-r2) |disc|^(1/2)`.
    pub fn delta(&self) -> f64 {
        self.delta
    }
    /// 1 when the distinguished embedding is real, 2 otherwise.
    pub fn q(&self) -> usize {
        if self.r2 > 0 {
            2
        } else {
            1
        }
    }
    pub fn is_real(&self) -> bool {
        self.r2 == 0
    }

    pub fn elem(&self, coeffs: &[i64]) -> FieldElement {
        let mut c: Vec<BigRational> = coeffs.iter().map(|&x| poly::rat(x, 1)).collect();
        c.resize(self.degree(), BigRational::zero());
        FieldElement::new(c)
    }

    pub fn from_rational(&self, r: BigRational) -> FieldElement {
        FieldElement::rational(self.degree(), r)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement::integer(self.degree(), n)
    }

    /// The generator `t` (for `Q` this is the root 0 of `x`).
    pub fn generator(&self) -> FieldElement {
        let p = self.degree();
        if p == 1 {
            return FieldElement::rational(1, -self.min_poly[0].clone());
        }
        let mut c = vec![BigRational::zero(); p];
        c[1] = BigRational::one();
        FieldElement::new(c)
    }

    /// Image of `x` under `sigma_i`, `1 <= i <= p`.
    pub fn embed(&self, x: &FieldElement, i: usize) -> Result<Complex64> {
        if i == 0 || i > self.degree() {
            return Err(Error::IndexOutOfRange { index: i, max: self.degree() });
        }
        Ok(self.embed_unchecked(x, i))
    }

    pub(crate) fn embed_unchecked(&self, x: &FieldElement, i: usize) -> Complex64 {
        let z = self.roots[i - 1];
        x.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + poly::to_f64(c))
    }

    /// All `p` embeddings of `x`.
    pub fn embeddings(&self, x: &FieldElement) -> Vec<Complex64> {
        (1..=self.degree()).map(|i| self.embed_unchecked(x, i)).collect()
    }

    /// The real coordinates `x^[1..p]`: real and imaginary parts over the
    /// conjugate pairs (`Re sigma_i` for odd `i`, `Im sigma_i` for even `i`),
    /// then the real embeddings.
    pub fn real_coords(&self, x: &FieldElement) -> Vec<f64> {
        let emb = self.embeddings(x);
        real_coords_of(&emb, self.r2)
    }

    /// Field norm `N_{K/Q}(x)` as the resultant of the defining polynomial and
    /// the coordinate polynomial of `x`.
    pub fn norm_elem(&self, x: &FieldElement) -> BigRational {
        poly::resultant(&self.min_poly, &x.coeffs)
    }

    /// Coordinates of `x` with respect to the integral basis.
    pub fn integral_coords(&self, x: &FieldElement) -> Vec<BigRational> {
        self.to_integral
            .iter()
            .map(|row| row.iter().zip(&x.coeffs).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn is_integral(&self, x: &FieldElement) -> bool {
        self.integral_coords(x).iter().all(|c| c.is_integer())
    }

    /// The element with the given integer coordinates in the integral basis.
    pub fn from_integral_coords(&self, z: &[BigInt]) -> FieldElement {
        let p = self.degree();
        let mut c = vec![BigRational::zero(); p];
        for (zi, b) in z.iter().zip(&self.integral_basis) {
            if zi.is_zero() {
                continue;
            }
            let zr = BigRational::from_integer(zi.clone());
            for (ck, bk) in c.iter_mut().zip(&b.coeffs) {
                *ck += &zr * bk;
            }
        }
        FieldElement::new(c)
    }

    /// Norm of the fractional ideal generated by `gens`, computed as a lattice
    /// index through the integer Hermite normal form.
    pub fn ideal_norm(&self, gens: &[FieldElement]) -> Result<BigRational> {
        let p = self.degree();
        let gens: Vec<&FieldElement> = gens.iter().filter(|g| !g.is_zero()).collect();
        if gens.is_empty() {
            return Err(Error::ZeroIdeal);
        }
        let coords: Vec<Vec<BigRational>> = gens.iter().map(|g| self.integral_coords(g)).collect();
        let scale = coords
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale_r = BigRational::from_integer(scale.clone());
        let mut rows = Vec::with_capacity(gens.len() * p);
        for g in &gens {
            let sg = FieldElement::new(g.coeffs.iter().map(|c| c * &scale_r).collect());
            for b in &self.integral_basis {
                let prod = self.integral_coords(&self.mul(&sg, b));
                rows.push(prod.into_iter().map(|c| c.to_integer()).collect::<Vec<BigInt>>());
            }
        }
        let index = intmat::full_rank_index(&rows, p)
            .ok_or_else(|| Error::InvalidInput("ideal lattice is not of full rank".into()))?;
        let denom = num_traits::pow(scale, p);
        Ok(BigRational::new(index, denom))
    }

    /// The complex conjugate field: same defining polynomial, every root
    /// conjugated. Elements are transported by keeping their coefficients,
    /// which conjugates their image under `sigma_1`. Real fields are returned
    /// unchanged.
    pub fn conjugate_field(&self) -> NumberField {
        if self.is_real() {
            return self.clone();
        }
        let mut k = self.clone();
        k.roots = self.roots.iter().map(|z| z.conj()).collect();
        k.name = match self.name.strip_prefix("conj(").and_then(|s| s.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => format!("conj({})", self.name),
        };
        k
    }

    pub fn to_spec(&self) -> FieldSpec {
        FieldSpec::Explicit {
            name: Some(self.name.clone()),
            min_poly: self.min_poly.iter().map(rat_to_string).collect(),
            integral_basis: self.integral_basis.iter().map(|b| b.to_strings()).collect(),
            disc: DiscValue::Text(self.disc.to_string()),
            embedding: Some([self.roots[0].re, self.roots[0].im]),
        }
    }
}

impl Ring for NumberField {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        FieldElement::new(vec![BigRational::zero(); self.degree()])
    }
    fn one(&self) -> FieldElement {
        self.from_int(1)
    }
    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement::new(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect())
    }
    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement::new(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect())
    }
    fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement::new(a.coeffs.iter().map(|x| -x).collect())
    }
    fn is_zero(&self, a: &FieldElement) -> bool {
        a.is_zero()
    }
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.degree();
        if p == 1 {
            return FieldElement::new(vec![&a.coeffs[0] * &b.coeffs[0]]);
        }
        let mut prod = vec![BigRational::zero(); 2 * p - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let mut out: Vec<BigRational> = prod[..p].to_vec();
        for (k, c) in prod[p..].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(&self.reductions[k]) {
                if !r.is_zero() {
                    *o += c * r;
                }
            }
        }
        FieldElement::new(out)
    }
}

impl Field for NumberField {
    fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        let p = self.degree();
        if p == 1 {
            return Some(FieldElement::new(vec![a.coeffs[0].recip()]));
        }
        let q = crate::poly::rat(1, 1);
        let rats = RationalField;
        // columns a * t^i, augmented with e_0; solve by row reduction
        let mut cols = Vec::with_capacity(p);
        let mut cur = a.clone();
        for _ in 0..p {
            cols.push(cur.clone());
            cur = self.mul(&cur, &self.generator());
        }
        let mut rows: Vec<Vec<BigRational>> = (0..p)
            .map(|r| {
                let mut row: Vec<BigRational> = cols.iter().map(|c| c.coeffs[r].clone()).collect();
                row.push(if r == 0 { q.clone() } else { BigRational::zero() });
                row
            })
            .collect();
        let piv = ring::rref(&rats, &mut rows);
        if piv.len() != p || piv.iter().any(|&c| c >= p) {
            return None;
        }
        Some(FieldElement::new(rows.iter().map(|r| r[p].clone()).collect()))
    }
}

/// The rational numbers as an exact field.
#[derive(Clone, Copy, Debug, Default)]
pub struct RationalField;

impl Ring for RationalField {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

impl Field for RationalField {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
}

/// Real coordinates from the ordered complex embeddings.
pub fn real_coords_of(emb: &[Complex64], r2: usize) -> Vec<f64> {
    emb.iter()
        .enumerate()
        .map(|(k, z)| {
            let i = k + 1;
            if i <= 2 * r2 {
                if i % 2 == 1 {
                    z.re
                } else {
                    z.im
                }
            } else {
                z.re
            }
        })
        .collect()
}

fn invert_columns(basis: &[FieldElement]) -> Option<Vec<Vec<BigRational>>> {
    let p = basis.len();
    let rats = RationalField;
    // [B | I] with B having the basis elements as columns
    let mut rows: Vec<Vec<BigRational>> = (0..p)
        .map(|r| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b.coeffs[r].clone()).collect();
            row.extend((0..p).map(|c| if c == r { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let piv = ring::rref(&rats, &mut rows);
    if piv.len() != p || piv.iter().any(|&c| c >= p) {
        return None;
    }
    Some(rows.into_iter().map(|r| r[p..].to_vec()).collect())
}

fn power_reductions(f: &RatPoly) -> Vec<Vec<BigRational>> {
    let p = f.len() - 1;
    let mut out = Vec::new();
    // t^p = -(f_0 + ... + f_{p-1} t^{p-1})
    let mut cur: Vec<BigRational> = f[..p].iter().map(|c| -c).collect();
    for _ in 0..p.saturating_sub(1) {
        out.push(cur.clone());
        // multiply by t
        let top = cur[p - 1].clone();
        let mut next = vec![BigRational::zero(); p];
        for k in (1..p).rev() {
            next[k] = cur[k - 1].clone();
        }
        if !top.is_zero() {
            for (k, c) in f[..p].iter().enumerate() {
                next[k] -= &top * c;
            }
        }
        cur = next;
    }
    out
}

fn order_roots(raw: Vec<Complex64>, hint: Option<Complex64>) -> Result<(Vec<Complex64>, usize, usize)> {
    let mut reals = Vec::new();
    let mut upper = Vec::new();
    for z in raw {
        if z.im.abs() <= 1e-10 * (1.0 + z.norm()) {
            reals.push(Complex64::new(z.re, 0.0));
        } else if z.im > 0.0 {
            upper.push(z);
        }
    }
    let desc = |a: &Complex64, b: &Complex64| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im));
    reals.sort_by(desc);
    upper.sort_by(desc);
    let r1 = reals.len();
    let r2 = upper.len();
    let all: Vec<Complex64> = upper.iter().flat_map(|z| [*z, z.conj()]).chain(reals.iter().copied()).collect();
    let distinguished = match hint {
        Some(h) => all
            .iter()
            .copied()
            .min_by(|a, b| (a - h).norm().total_cmp(&(b - h).norm()))
            .expect("nonempty root list"),
        None => all[0],
    };
    let dist_is_real = distinguished.im == 0.0;
    if dist_is_real && r2 > 0 {
        return Err(Error::UnsupportedField(
            "a real distinguished embedding of a field with complex places is not supported".into(),
        ));
    }
    let mut roots = Vec::with_capacity(all.len());
    if dist_is_real {
        roots.push(distinguished);
        roots.extend(reals.iter().copied().filter(|z| *z != distinguished));
    } else {
        roots.push(distinguished);
        roots.push(distinguished.conj());
        for z in &upper {
            if (*z - distinguished).norm() < 1e-12 || (*z - distinguished.conj()).norm() < 1e-12 {
                continue;
            }
            roots.push(*z);
            roots.push(z.conj());
        }
        roots.extend(reals.iter().copied());
    }
    Ok((roots, r1, r2))
}

fn complex_det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].norm().total_cmp(&m[b][c].norm())).unwrap();
        if m[p][c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                let v = m[c][k];
                m[r][k] -= f * v;
            }
        }
    }
    det
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DiscValue {
    Int(i64),
    Text(String),
}

/// JSON description of a field: either a registry name or explicit data.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum FieldSpec {
    Builtin {
        builtin: String,
    },
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        min_poly: Vec<String>,
        /// Basis elements, each as its power-basis coefficient list.
        integral_basis: Vec<Vec<String>>,
        disc: DiscValue,
        /// Approximate distinguished root `[re, im]`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        embedding: Option<[f64; 2]>,
    },
}

impl FieldSpec {
    pub fn builtin(name: &str) -> Self {
        FieldSpec::Builtin { builtin: name.to_string() }
    }

    pub fn build(&self, path: &str) -> Result<NumberField> {
        match self {
            FieldSpec::Builtin { builtin } => builtins::by_name(builtin)
                .ok_or_else(|| parse_err(format!("{path}.builtin"), format!("unknown builtin field {builtin:?}"))),
            FieldSpec::Explicit { name, min_poly, integral_basis, disc, embedding } => {
                let f: RatPoly = min_poly
                    .iter()
                    .enumerate()
                    .map(|(i, s)| parse_rational(s).map_err(|m| parse_err(format!("{path}.min_poly[{i}]"), m)))
                    .collect::<Result<_>>()?;
                let p = f.len().saturating_sub(1);
                let basis = integral_basis
                    .iter()
                    .enumerate()
                    .map(|(i, b)| FieldElement::parse(p, b, &format!("{path}.integral_basis[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let disc = match disc {
                    DiscValue::Int(v) => BigInt::from(*v),
                    DiscValue::Text(s) => s.trim().parse().map_err(|_| parse_err(format!("{path}.disc"), "bad integer"))?,
                };
                let name = name.clone().unwrap_or_else(|| "K".to_string());
                NumberField::new(name, f, basis, disc, embedding.map(|[re, im]| Complex64::new(re, im)))
            }
        }
    }
}

pub mod builtins {
    //! Registry of the fields shipped with the library.

    use super::*;

    pub const NAMES: [&str; 7] = ["Q", "Q(i)", "Q(sqrt-2)", "Q(zeta3)", "Q(sqrt2)", "Q(sqrt5)", "Q(zeta5)"];

    fn key(name: &str) -> String {
        name.to_lowercase()
            .replace('√', "sqrt")
            .replace('ζ', "zeta")
            .replace('ℚ', "q")
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '(' && *c != ')')
            .collect()
    }

    fn make(name: &str, f: &[i64], basis: &[&[(i64, i64)]], disc: i64) -> NumberField {
        let f = f.iter().map(|&c| poly::rat(c, 1)).collect();
        let basis = basis
            .iter()
            .map(|b| FieldElement::new(b.iter().map(|&(n, d)| poly::rat(n, d)).collect()))
            .collect();
        NumberField::new(name, f, basis, BigInt::from(disc), None).expect("builtin field data is consistent")
    }

    pub fn rationals() -> NumberField {
        make("Q", &[0, 1], &[&[(1, 1)]], 1)
    }
    pub fn gaussian() -> NumberField {
        make("Q(i)", &[1, 0, 1], &[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]], -4)
    }
    pub fn sqrt_minus_2() -> NumberField {
        make("Q(sqrt-2)", &[2, 0, 1], &[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]], -8)
    }
    pub fn eisenstein() -> NumberField {
        make("Q(zeta3)", &[1, 1, 1], &[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]], -3)
    }
    pub fn sqrt2() -> NumberField {
        make("Q(sqrt2)", &[-2, 0, 1], &[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]], 8)
    }
    /// `Q(sqrt 5)` with the non-power integral basis `1, (1 + t)/2`.
    pub fn sqrt5() -> NumberField {
        make("Q(sqrt5)", &[-5, 0, 1], &[&[(1, 1), (0, 1)], &[(1, 2), (1, 2)]], 5)
    }
    pub fn zeta5() -> NumberField {
        let e = |k: usize| -> Vec<(i64, i64)> { (0..4).map(|i| (i64::from(i == k), 1)).collect() };
        let (b0, b1, b2, b3) = (e(0), e(1), e(2), e(3));
        make("Q(zeta5)", &[1, 1, 1, 1, 1], &[&b0, &b1, &b2, &b3], 125)
    }

    pub fn by_name(name: &str) -> Option<NumberField> {
        match key(name).as_str() {
            "q" => Some(rationals()),
            "qi" | "gaussian" => Some(gaussian()),
            "qsqrt-2" => Some(sqrt_minus_2()),
            "qzeta3" | "qsqrt-3" | "eisenstein" => Some(eisenstein()),
            "qsqrt2" => Some(sqrt2()),
            "qsqrt5" => Some(sqrt5()),
            "qzeta5" => Some(zeta5()),
            _ => None,
        }
    }

    pub fn all() -> Vec<NumberField> {
        NAMES.iter().map(|n| by_name(n).expect("registered")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::builtins::*;
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn embed_examples() {
        let k = gaussian();
        let t = k.generator();
        assert!(close(k.embed(&t, 1).unwrap(), Complex64::new(0.0, 1.0)));
        assert!(close(k.embed(&t, 2).unwrap(), Complex64::new(0.0, -1.0)));
        let k = sqrt2();
        let t = k.generator();
        assert!(close(k.embed(&t, 1).unwrap(), Complex64::new(2f64.sqrt(), 0.0)));
        assert!(close(k.embed(&t, 2).unwrap(), Complex64::new(-(2f64.sqrt()), 0.0)));
        let q = rationals();
        let x = q.from_rational(poly::rat(3, 2));
        assert!(close(q.embed(&x, 1).unwrap(), Complex64::new(1.5, 0.0)));
        assert!(matches!(q.embed(&x, 2), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(q.embed(&x, 0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn real_coords_examples() {
        let k = gaussian();
        let rc = k.real_coords(&k.generator());
        assert!(rc[0].abs() < 1e-15 && (rc[1] + 1.0).abs() < 1e-15);
        let rc = k.real_coords(&k.from_int(1));
        assert_eq!(rc, vec![1.0, 0.0]);
        let k = sqrt2();
        let rc = k.real_coords(&k.generator());
        assert!((rc[0] - 2f64.sqrt()).abs() < 1e-14 && (rc[1] + 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn norm_examples() {
        let k = gaussian();
        assert_eq!(k.norm_elem(&k.elem(&[1, 1])), poly::rat(2, 1));
        let q = rationals();
        assert_eq!(q.norm_elem(&q.from_int(-5)), poly::rat(-5, 1));
        let k = sqrt2();
        assert_eq!(k.norm_elem(&k.elem(&[1, 1])), poly::rat(-1, 1));
    }

    #[test]
    fn ideal_norm_examples() {
        let q = rationals();
        assert_eq!(q.ideal_norm(&[q.from_int(6), q.from_int(10)]).unwrap(), poly::rat(2, 1));
        assert_eq!(
            q.ideal_norm(&[q.from_rational(poly::rat(1, 2)), q.from_rational(poly::rat(1, 3))]).unwrap(),
            poly::rat(1, 6)
        );
        let k = gaussian();
        assert_eq!(k.ideal_norm(&[k.from_int(2), k.elem(&[1, 1])]).unwrap(), poly::rat(2, 1));
        assert!(matches!(k.ideal_norm(&[k.zero()]), Err(Error::ZeroIdeal)));
        assert!(matches!(k.ideal_norm(&[]), Err(Error::ZeroIdeal)));
    }

    #[test]
    fn ideal_norm_sqrt5_half_integers() {
        // (1+t)/2 is a unit of norm -1, so it generates the unit ideal
        let k = sqrt5();
        let phi = FieldElement::new(vec![poly::rat(1, 2), poly::rat(1, 2)]);
        assert!(k.is_integral(&phi));
        assert_eq!(k.norm_elem(&phi), poly::rat(-1, 1));
        assert_eq!(k.ideal_norm(&[phi]).unwrap(), poly::rat(1, 1));
        assert_eq!(k.ideal_norm(&[k.generator()]).unwrap(), poly::rat(5, 1));
    }

    #[test]
    fn conjugate_field_examples() {
        let k = gaussian();
        let kc = k.conjugate_field();
        assert!(close(kc.roots()[0], Complex64::new(0.0, -1.0)));
        assert!(close(kc.embed(&kc.generator(), 1).unwrap(), Complex64::new(0.0, -1.0)));
        assert_eq!(kc.conjugate_field(), k);
        assert_eq!(kc.conjugate_field().name(), "Q(i)");
        let q = rationals();
        assert_eq!(q.conjugate_field(), q);
        let s = sqrt2();
        assert_eq!(s.conjugate_field(), s);
    }

    #[test]
    fn field_invariants() {
        for k in all() {
            let p = k.degree();
            let (r1, r2) = k.signature();
            assert_eq!(p, r1 + 2 * r2, "{}", k.name());
            let roots = k.roots();
            for j in (0..2 * r2).step_by(2) {
                assert!(close(roots[j + 1], roots[j].conj()));
            }
            for z in &roots[2 * r2..] {
                assert_eq!(z.im, 0.0);
            }
            let d = poly::to_f64(&BigRational::from_integer(k.disc().abs()));
            assert!((k.delta() - 2f64.powi(-(r2 as i32)) * d.sqrt()).abs() < 1e-15);
            assert_eq!(k.q(), if r2 > 0 { 2 } else { 1 });
        }
    }

    #[test]
    fn inverse_and_multiplication() {
        for k in all() {
            let x = k.elem(&[2, -1, 3, 1]);
            let xi = k.inv(&x).unwrap();
            assert_eq!(k.mul(&x, &xi), k.one(), "{}", k.name());
        }
    }

    #[test]
    fn bad_discriminant_is_rejected() {
        let f = vec![poly::rat(1, 1), poly::rat(0, 1), poly::rat(1, 1)];
        let basis = vec![FieldElement::from_ints(&[1, 0]), FieldElement::from_ints(&[0, 1])];
        assert!(NumberField::new("bad", f, basis, BigInt::from(-3), None).is_err());
    }

    #[test]
    fn explicit_spec_round_trip() {
        let spec: FieldSpec = serde_json::from_str(
            r#"{"min_poly": ["1", "0", "1"], "integral_basis": [["1", "0"], ["0", "1"]], "disc": -4}"#,
        )
        .unwrap();
        let k = spec.build("field").unwrap();
        assert_eq!(k, gaussian());
        let k2 = k.to_spec().build("field").unwrap();
        assert_eq!(k2, k);
        let b: FieldSpec = serde_json::from_str(r#"{"builtin": "Q(√5)"}"#).unwrap();
        assert_eq!(b.build("f").unwrap().name(), "Q(sqrt5)");
    }

    #[test]
    fn embedding_hint_selects_root() {
        let f = vec![poly::rat(1, 1), poly::rat(0, 1), poly::rat(1, 1)];
        let basis = vec![FieldElement::from_ints(&[1, 0]), FieldElement::from_ints(&[0, 1])];
        let k = NumberField::new("K", f, basis, BigInt::from(-4), Some(Complex64::new(0.0, -1.0))).unwrap();
        assert!(close(k.roots()[0], Complex64::new(0.0, -1.0)));
    }
}
