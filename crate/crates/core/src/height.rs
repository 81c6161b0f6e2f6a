//! Subspaces of `K^n` given by exact bases, their heights, and the
//! complements with respect to the bilinear form `phi(x, y) = sum x_k y_k`
//! and to the Hermitian inner product.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{parse_err, Error, Result};
use crate::exterior::{self, MultiVector, MAX_AMBIENT};
use crate::geometry::{CVec, NumericSubspace};
use crate::lattice;
use crate::numberfield::{parse_rational, rat_to_string, FieldElement, FieldSpec, NumberField};
use crate::poly;
use crate::ring::{self, Complexes, Ring};

#[derive(Clone, Debug)]
pub struct SubspaceOverK {
    field: Arc<NumberField>,
    n: usize,
    basis: Vec<Vec<FieldElement>>,
    plucker: MultiVector<FieldElement>,
}

impl SubspaceOverK {
    pub fn new(field: Arc<NumberField>, basis: Vec<Vec<FieldElement>>) -> Result<Self> {
        let n = basis.first().map(|r| r.len()).ok_or_else(|| Error::Dimension("empty basis".into()))?;
        if n > MAX_AMBIENT {
            return Err(Error::AmbientTooLarge(n));
        }
        let p = field.degree();
        for row in &basis {
            if row.len() != n {
                return Err(Error::AmbientMismatch(n, row.len()));
            }
            if row.iter().any(|x| x.coeffs().len() != p) {
                return Err(Error::FieldMismatch);
            }
        }
        let plucker = exterior::plucker(field.as_ref(), n, &basis)?;
        Ok(SubspaceOverK { field, n, basis, plucker })
    }

    /// Convenience constructor from small integer rows (coefficients in the
    /// power basis; a plain integer entry `c` is read as `c` in `K`).
    pub fn from_int_rows(field: &Arc<NumberField>, rows: &[Vec<Vec<i64>>]) -> Result<Self> {
        let basis = rows.iter().map(|r| r.iter().map(|c| field.elem(c)).collect()).collect();
        Self::new(field.clone(), basis)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }
    pub fn field_arc(&self) -> &Arc<NumberField> {
        &self.field
    }
    pub fn ambient(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.basis
    }
    pub fn plucker(&self) -> &MultiVector<FieldElement> {
        &self.plucker
    }

    /// Plücker coordinates scaled so that the first nonzero one is 1; two
    /// subspaces coincide exactly when these agree.
    pub fn normalized_plucker(&self) -> MultiVector<FieldElement> {
        exterior::normalize(self.field.as_ref(), &self.plucker).expect("plucker vector is nonzero")
    }

    /// Basis vectors under `sigma_j`.
    pub fn embedded_basis(&self, j: usize) -> Vec<CVec> {
        self.basis.iter().map(|r| r.iter().map(|x| self.field.embed_unchecked(x, j)).collect()).collect()
    }

    /// The subspace of `C^n` obtained through the distinguished embedding.
    pub fn numeric(&self, tol: &Tolerances) -> Result<NumericSubspace> {
        NumericSubspace::from_basis(&self.embedded_basis(1), tol)
    }

    /// Exact membership test.
    pub fn contains_vector(&self, v: &[FieldElement]) -> bool {
        if v.len() != self.n {
            return false;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        ring::rank(self.field.as_ref(), &rows) == self.dim()
    }

    pub fn contains(&self, other: &SubspaceOverK) -> bool {
        *self.field == *other.field && other.basis.iter().all(|v| self.contains_vector(v))
    }

    pub fn same_subspace(&self, other: &SubspaceOverK) -> bool {
        self.dim() == other.dim() && self.contains(other)
    }

    pub fn to_spec(&self) -> SubspaceSpec {
        SubspaceSpec {
            field: self.field.to_spec(),
            n: self.n,
            basis: self
                .basis
                .iter()
                .map(|r| r.iter().map(|x| EntrySpec::Coeffs(x.to_strings().into_iter().map(RatSpec::Text).collect())).collect())
                .collect(),
        }
    }
}

/// Height split into its exact ideal part and the archimedean factors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightParts {
    /// Norm of the ideal generated by the Plücker coordinates.
    pub ideal_norm: String,
    /// `||X_1^(j) ^ ... ^ X_d^(j)||` for `j = 1..p`.
    pub archimedean: Vec<f64>,
    pub value: f64,
}

/// `H(S) = N(a)^-1 prod_j ||X_1^(j) ^ ... ^ X_d^(j)||` with `a` the ideal of the
/// Plücker coordinates.
pub fn height_parts(s: &SubspaceOverK) -> Result<HeightParts> {
    let k = s.field();
    let coords: Vec<FieldElement> = s.plucker.coords().iter().filter(|c| !c.is_zero()).cloned().collect();
    let na = k.ideal_norm(&coords)?;
    let archimedean: Vec<f64> = (1..=k.degree())
        .map(|j| exterior::norm(&Complexes, &s.plucker.map(|x| k.embed_unchecked(x, j))))
        .collect();
    let value = archimedean.iter().product::<f64>() / poly::to_f64(&na);
    Ok(HeightParts { ideal_norm: rat_to_string(&na), archimedean, value })
}

pub fn height_ideal(s: &SubspaceOverK) -> Result<f64> {
    Ok(height_parts(s)?.value)
}

/// `H(S) = Delta^-d d(Lambda(S))`.
pub fn height_lattice(s: &SubspaceOverK) -> Result<f64> {
    let lat = lattice::lattice_of_subspace(s)?;
    let lat = lattice::lll_reduce(&lat, None)?;
    let det = lattice::det_lattice(&lat)?;
    Ok(det / s.field().delta().powi(s.dim() as i32))
}

/// Rescales a vector by a positive rational so that its power-basis
/// coordinates are coprime integers.
fn clear_denominators(v: Vec<FieldElement>) -> Vec<FieldElement> {
    let mut l = BigInt::one();
    let mut g = BigInt::zero();
    for x in &v {
        for c in x.coeffs() {
            l = l.lcm(c.denom());
        }
    }
    let lr = BigRational::from_integer(l);
    let scaled: Vec<FieldElement> =
        v.iter().map(|x| FieldElement::new(x.coeffs().iter().map(|c| c * &lr).collect())).collect();
    for x in &scaled {
        for c in x.coeffs() {
            g = g.gcd(c.numer());
        }
    }
    if g.is_zero() || g.is_one() {
        return scaled;
    }
    let gr = BigRational::from_integer(g);
    scaled.into_iter().map(|x| FieldElement::new(x.coeffs().iter().map(|c| c / &gr).collect())).collect()
}

/// `{x in K^n : phi(x, s) = 0 for all s in S}`.
pub fn phi_complement(s: &SubspaceOverK) -> Result<SubspaceOverK> {
    let (n, d) = (s.n, s.dim());
    if d == 0 || d >= n {
        return Err(Error::Dimension(format!("complement needs 0 < d < n, got d = {d}, n = {n}")));
    }
    let ker = ring::kernel(s.field(), &s.basis, n);
    let basis = ker.into_iter().map(clear_denominators).collect();
    SubspaceOverK::new(s.field.clone(), basis)
}

/// Coefficientwise transport to the conjugate field.
pub fn conjugate_subspace(s: &SubspaceOverK) -> SubspaceOverK {
    let kc = if s.field.is_real() { s.field.clone() } else { Arc::new(s.field.conjugate_field()) };
    SubspaceOverK { field: kc, n: s.n, basis: s.basis.clone(), plucker: s.plucker.clone() }
}

/// The Hermitian orthogonal complement, a subspace over the conjugate field.
pub fn hermitian_complement(s: &SubspaceOverK) -> Result<SubspaceOverK> {
    Ok(conjugate_subspace(&phi_complement(s)?))
}

/// The `phi`-kernel over the field of `rows` (a list of vectors) as a subspace.
pub fn phi_kernel(field: &Arc<NumberField>, rows: &[Vec<FieldElement>], n: usize) -> Result<SubspaceOverK> {
    let ker = ring::kernel(field.as_ref(), rows, n);
    if ker.is_empty() {
        return Err(Error::Dimension("phi-kernel is zero".into()));
    }
    SubspaceOverK::new(field.clone(), ker.into_iter().map(clear_denominators).collect())
}

/// Exact rank of a family of vectors over the field.
pub fn exact_rank(field: &NumberField, rows: &[Vec<FieldElement>]) -> usize {
    ring::rank(field, rows)
}

/// A rational scalar in JSON: an integer or a `"num/den"` string.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RatSpec {
    Int(i64),
    Text(String),
}

impl RatSpec {
    pub fn parse(&self, path: &str) -> Result<BigRational> {
        match self {
            RatSpec::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            RatSpec::Text(s) => parse_rational(s).map_err(|m| parse_err(path, m)),
        }
    }
}

/// A vector entry: a rational, or a list of power-basis coefficients.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum EntrySpec {
    Scalar(RatSpec),
    Coeffs(Vec<RatSpec>),
}

impl EntrySpec {
    pub fn build(&self, k: &NumberField, path: &str) -> Result<FieldElement> {
        match self {
            EntrySpec::Scalar(r) => Ok(k.from_rational(r.parse(path)?)),
            EntrySpec::Coeffs(cs) => {
                if cs.len() != k.degree() {
                    return Err(parse_err(path, format!("expected {} coefficients, got {}", k.degree(), cs.len())));
                }
                let coeffs = cs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.parse(&format!("{path}[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(FieldElement::new(coeffs))
            }
        }
    }
}

/// JSON description of a subspace: `{ "field": ..., "n": ..., "basis": [[entry, ...], ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SubspaceSpec {
    pub field: FieldSpec,
    pub n: usize,
    pub basis: Vec<Vec<EntrySpec>>,
}

impl SubspaceSpec {
    pub fn build(&self, path: &str) -> Result<SubspaceOverK> {
        let k = Arc::new(self.field.build(&format!("{path}.field"))?);
        self.build_in(&k, path)
    }

    /// Builds the subspace over an already constructed field.
    pub fn build_in(&self, k: &Arc<NumberField>, path: &str) -> Result<SubspaceOverK> {
        let mut basis = Vec::with_capacity(self.basis.len());
        for (r, row) in self.basis.iter().enumerate() {
            if row.len() != self.n {
                return Err(parse_err(format!("{path}.basis[{r}]"), format!("expected {} entries", self.n)));
            }
            basis.push(
                row.iter()
                    .enumerate()
                    .map(|(c, e)| e.build(k, &format!("{path}.basis[{r}][{c}]")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        SubspaceOverK::new(k.clone(), basis).map_err(|e| match e {
            Error::RankDeficient => parse_err(format!("{path}.basis"), "basis is rank deficient"),
            other => other,
        })
    }
}

/// Multiplies row `r` of the basis by `lambda` (used by invariance checks).
pub fn scale_row(s: &SubspaceOverK, r: usize, lambda: &FieldElement) -> Result<SubspaceOverK> {
    let k = s.field();
    let mut basis = s.basis.clone();
    basis[r] = basis[r].iter().map(|x| k.mul(lambda, x)).collect();
    SubspaceOverK::new(s.field.clone(), basis)
}

/// Replaces the basis by `m * basis` for a square matrix `m` over the field.
pub fn change_basis(s: &SubspaceOverK, m: &[Vec<FieldElement>]) -> Result<SubspaceOverK> {
    let k = s.field();
    let basis = m
        .iter()
        .map(|row| {
            (0..s.n)
                .map(|c| {
                    row.iter()
                        .zip(&s.basis)
                        .fold(k.zero(), |acc, (a, b)| k.add(&acc, &k.mul(a, &b[c])))
                })
                .collect()
        })
        .collect();
    SubspaceOverK::new(s.field.clone(), basis)
}
