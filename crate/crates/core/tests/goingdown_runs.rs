mod common;

use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use common::*;
use subspace_heights::config::Tolerances;
use subspace_heights::geometry::{cinner, CVec};
use subspace_heights::goingdown::{decompose_w, frame_vectors, going_down, second_branch_schedule, Branch, GoingDownOptions};
use subspace_heights::height::height_ideal;
use subspace_heights::lattice::rho;
use subspace_heights::numberfield::builtins;

fn cvec(n: usize) -> impl Strategy<Value = CVec> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

proptest! {
    #[test]
    fn frame_pairs_reproduce_inner_product(y in cvec(3), z in proptest::collection::vec(proptest::collection::vec(-5i64..=5, 2), 3)) {
        // <Y, Z> = <f1, rho(Z')> + i <f2, rho(Z')> with Z' read in the conjugate field
        let k = builtins::gaussian();
        let kc = k.conjugate_field();
        let zv: Vec<_> = z.iter().map(|c| kc.elem(c)).collect();
        let emb: CVec = zv.iter().map(|x| kc.embed(x, 1).unwrap()).collect();
        let f = frame_vectors(&y, 2, 2);
        let r = rho(&kc, &zv);
        let dot = |a: &[f64]| a.iter().zip(&r).map(|(x, y)| x * y).sum::<f64>();
        let got = Complex64::new(dot(&f[0]), dot(&f[1]));
        prop_assert!((got - cinner(&y, &emb)).norm() < 1e-9);
    }

    #[test]
    fn decomposition_is_orthogonal(w in cvec(4), z in proptest::collection::vec(cvec(4), 2)) {
        let (u, v, nv) = decompose_w(&w, &z).unwrap();
        for zi in &z {
            prop_assert!(cinner(&v, zi).norm() < 1e-9);
        }
        for i in 0..4 {
            prop_assert!((u[i] + v[i] - w[i]).norm() < 1e-12);
        }
        prop_assert!((nv - v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).abs() < 1e-12);
    }
}

#[test]
fn schedule_closed_forms() {
    assert!((second_branch_schedule(10.0, 10.0, 1, 2, 2, 1.0).unwrap() - 1.0).abs() < 1e-12);
    let hp = 10.0 * 2f64.powf(2.0 / 2.0);
    assert!((second_branch_schedule(10.0, hp, 1, 2, 2, 1.0).unwrap() - 2.0).abs() < 1e-12);
    assert!(second_branch_schedule(10.0, 5.0, 1, 2, 2, 1.0).is_err());
}

#[test]
fn first_branch_family_certificates() {
    let grid = [1e2, 1e3];
    for (k, y) in [(builtins::rationals(), 2.0), (builtins::gaussian(), 1.25)] {
        let k = Arc::new(k);
        let mut r = rng(11);
        for (n, e) in [(3usize, 2usize), (4, 3)] {
            let b = loop {
                let b = random_subspace_retry(&mut r, &k, n, e, 2);
                if height_ideal(&b).unwrap() <= 100.0 {
                    break b;
                }
            };
            let dirs = directions(&mut r, &b);
            for big_h in grid {
                let cert = going_down(&first_branch_instance(&dirs, &b, y, big_h), &GoingDownOptions::default()).unwrap();
                assert!(cert.invariants.all(), "{:?}", cert.invariants);
                assert!(cert.warnings.is_empty(), "{:?}", cert.warnings);
                assert_eq!(cert.bm1_subspace.as_ref().unwrap().dim(), e - 1);
                assert!(cert.bm1_subspace.as_ref().unwrap().contains(&b) == false);
                assert!(b.contains(cert.bm1_subspace.as_ref().unwrap()));
            }
        }
    }
}

#[test]
fn real_case_forbids_complex_targets() {
    let k = Arc::new(builtins::rationals());
    let mut r = rng(3);
    let b = random_subspace_retry(&mut r, &k, 3, 2, 2);
    let dirs = directions(&mut r, &b);
    let mut inp = first_branch_instance(&dirs, &b, 2.0, 100.0);
    let mut x: CVec = inp.a.onb()[0].clone();
    x[0] += Complex64::new(0.0, 0.5);
    inp.a = subspace_heights::geometry::NumericSubspace::from_basis(&[x], &Tolerances::default()).unwrap();
    assert!(going_down(&inp, &GoingDownOptions::default()).is_err());
    assert!(matches!(inp.branch, Branch::First));
}
