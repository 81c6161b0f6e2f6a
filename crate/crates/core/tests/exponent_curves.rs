mod common;

use std::collections::HashSet;
use std::sync::Arc;

use num_complex::Complex64;
use common::*;
use subspace_heights::exponents::{
    enumerate_subspaces, estimate_exponents, record_curve, transfer_experiment, EnumOptions, EstimateOptions, Target,
};
use subspace_heights::goingdown::GoingDownOptions;
use subspace_heights::numberfield::builtins;

fn golden() -> Target {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    Target::numeric(&[Complex64::new(1.0, 0.0), Complex64::new(phi, 0.0)]).unwrap()
}

#[test]
fn enumeration_has_no_repeats() {
    for k in [builtins::rationals(), builtins::gaussian(), builtins::eisenstein()] {
        let k = Arc::new(k);
        for dim in [1, 2] {
            let (cands, _) = enumerate_subspaces(&k, 3, dim, 8.0, &EnumOptions::default()).unwrap();
            let mut seen = HashSet::new();
            for c in &cands {
                assert!(seen.insert(c.subspace.normalized_plucker().coords().to_vec()), "{} dim {dim}", k.name());
                assert!(c.height <= 8.0 * (1.0 + 1e-9));
            }
        }
    }
}

#[test]
fn gaussian_lines_by_brute_force() {
    // primitive vectors of Z[i]^2 up to units, H = |a|^2 + |b|^2
    let k = Arc::new(builtins::gaussian());
    let (cands, cov) = enumerate_subspaces(&k, 2, 1, 10.0, &EnumOptions::default()).unwrap();
    assert!(cov.exact);
    let mut brute = HashSet::new();
    let r = -3i64..=3;
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    let v = vec![k.elem(&[a, b]), k.elem(&[c, d])];
                    if (a * a + b * b + c * c + d * d) as f64 > 10.0 {
                        continue;
                    }
                    if k.ideal_norm(&v).map(|n| n == num_rational::BigRational::from_integer(1.into())).unwrap_or(false) {
                        brute.insert(subspace_heights::exponents::normalize_vector(&k, &v).unwrap());
                    }
                }
            }
        }
    }
    assert_eq!(cands.len(), brute.len());
}

#[test]
fn golden_curve_equals_convergents_up_to_1e5() {
    let k = Arc::new(builtins::rationals());
    let curve = record_curve(&k, &golden(), 0, 1e5, &EnumOptions::default()).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let unit = (1.0 + phi * phi).sqrt();
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut i = 0;
    while (a * a + b * b).sqrt() <= 1e5 {
        let rec = &curve.records[i];
        assert!((rec.height - (a * a + b * b).sqrt()).abs() <= 1e-9 * rec.height);
        assert!((rec.value - phi.powi(-(i as i32)) / unit).abs() <= 1e-9);
        (a, b) = (b, a + b);
        i += 1;
    }
    assert_eq!(curve.records.len(), i);
}

#[test]
fn estimates_grow_with_qmax_under_fixed_floor() {
    let k = Arc::new(builtins::gaussian());
    let mut r = rng(5);
    for _ in 0..5 {
        let u = random_unit(&mut r, 3, false);
        let t = Target::numeric(&u).unwrap();
        let mut last = f64::NEG_INFINITY;
        for qmax in [1e3, 1e4, 1e5] {
            let c = record_curve(&k, &t, 0, qmax, &EnumOptions::default()).unwrap();
            let e = estimate_exponents(&c, &EstimateOptions { floor: Some(100.0) }).unwrap();
            assert!(e.omega >= last - 1e-12);
            last = e.omega;
        }
    }
}

#[test]
fn record_curves_are_pareto() {
    let mut r = rng(9);
    for k in [builtins::rationals(), builtins::gaussian()] {
        let k = Arc::new(k);
        for j in 0..2 {
            let u = random_unit(&mut r, 3, k.q() == 1);
            let c = record_curve(&k, &Target::numeric(&u).unwrap(), j, 1e4, &EnumOptions::default()).unwrap();
            assert!(c.records.windows(2).all(|w| w[0].height <= w[1].height && w[0].value > w[1].value));
            assert!(c.coverage.exact && !c.coverage.truncated);
        }
    }
}

#[test]
fn too_few_records_is_an_error() {
    let k = Arc::new(builtins::rationals());
    let c = record_curve(&k, &golden(), 0, 2.0, &EnumOptions::default()).unwrap();
    assert!(estimate_exponents(&c, &EstimateOptions::default()).is_err());
}

#[test]
fn algebraic_target_transfers_trivially() {
    let k = Arc::new(builtins::gaussian());
    let t = Target::algebraic(&k, vec![k.elem(&[1]), k.elem(&[1, 1]), k.elem(&[0, 2])]).unwrap();
    let rep = transfer_experiment(&k, &t, 1, 2.0, 100.0, &EnumOptions::default(), &GoingDownOptions::default()).unwrap();
    assert!(rep.trivial);
    assert_eq!(rep.dim_after, 1);
    assert_eq!(rep.value_after, 0.0);
}
