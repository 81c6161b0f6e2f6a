//! Univariate polynomials with rational coefficients (low degree first) and a
//! complex root finder for defining polynomials.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type RatPoly = Vec<BigRational>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // fall back through the logarithm for out-of-range magnitudes
    let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
    let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
    n / d
}

pub fn trim(p: &mut RatPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &RatPoly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Remainder of `a` modulo `b` (`b` nonzero).
pub fn rem(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let db = degree(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut r = a.clone();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let q = &r[dr] / &lead;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate().take(db + 1) {
            if !c.is_zero() {
                let v = &q * c;
                r[i + shift] -= v;
            }
        }
        trim(&mut r);
    }
    r
}

/// Resultant `Res(f, g)` computed by the Euclidean remainder sequence over Q.
/// For monic `f` this equals the product of `g` over the roots of `f`.
pub fn resultant(f: &RatPoly, g: &RatPoly) -> BigRational {
    let mut f = f.clone();
    let mut g = g.clone();
    trim(&mut f);
    trim(&mut g);
    let mut acc = BigRational::one();
    loop {
        let (Some(m), Some(n)) = (degree(&f), degree(&g)) else {
            return BigRational::zero();
        };
        if n == 0 {
            return acc * pow(&g[0], m);
        }
        if m == 0 {
            // Res(c, g) = c^deg g
            return acc * pow(&f[0], n);
        }
        let r = rem(&f, &g);
        let Some(dr) = degree(&r) else {
            return BigRational::zero();
        };
        if (m * n) % 2 == 1 {
            acc = -acc;
        }
        acc *= pow(&g[n], m - dr);
        f = g;
        g = r;
    }
}

pub fn pow(x: &BigRational, e: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= x;
    }
    out
}

pub fn eval_complex(p: &[f64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_with_derivative(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

/// All complex roots of a monic polynomial with float coefficients (low
/// degree first), by Aberth iteration followed by Newton polishing.
pub fn complex_roots(p: &[f64]) -> Vec<Complex64> {
    let deg = p.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![Complex64::new(-p[0] / p[1], 0.0)];
    }
    let bound = 1.0 + p[..deg].iter().map(|c| (c / p[deg]).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, ang)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (v, dv) = eval_with_derivative(p, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let s: Complex64 = (0..deg).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * s);
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = eval_with_derivative(p, *zi);
            if dv.norm() == 0.0 {
                break;
            }
            *zi -= v / dv;
        }
    }
    z
}

pub fn is_monic(p: &RatPoly) -> bool {
    degree(p).is_some_and(|d| p[d].is_one())
}

pub fn abs_rat(x: &BigRational) -> BigRational {
    x.abs()
}
