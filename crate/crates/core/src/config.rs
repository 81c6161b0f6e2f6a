//! Floating-point tolerances shared across modules.
//!
//! Exact computations (ideal norms, containment, kernels) never consult these;
//! they only gate comparisons between floating quantities.

use serde::{Deserialize, Serialize};

/// Environment variable that overrides the base relative tolerance.
pub const PRECISION_ENV: &str = "SH_PRECISION";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Base relative tolerance for floating comparisons.
    pub rel: f64,
    /// Orthonormality tolerance for numeric subspaces.
    pub orth: f64,
    /// Slack on the closed boundary of lattice-search constraints.
    pub boundary: f64,
    /// Relative threshold under which a floating family counts as dependent.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::with_base(1e-9)
    }
}

impl Tolerances {
    pub fn with_base(rel: f64) -> Self {
        Tolerances { rel, orth: rel * 10.0, boundary: rel, rank: rel * 1e-1 }
    }

    /// Defaults, with the base tolerance overridden by `SH_PRECISION` when it
    /// holds a positive float.
    pub fn from_env() -> Self {
        match std::env::var(PRECISION_ENV).ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            Some(v) if v > 0.0 && v.is_finite() => Self::with_base(v),
            _ => Self::default(),
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.rel, self.orth, self.boundary, self.rank].iter().all(|t| *t > 0.0 && t.is_finite())
    }
}

/// Relative closeness `|a - b| <= tol * max(|a|, |b|, 1e-300)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1e-300);
    (a - b).abs() <= tol * scale
}

/// Formats a float with twelve digits after the point, switching to
/// scientific notation outside `[1e-4, 1e12)`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.12}", 0.0);
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if (1e-4..1e12).contains(&a) {
        format!("{:.12}", x)
    } else {
        format!("{:.11e}", x)
    }
}
