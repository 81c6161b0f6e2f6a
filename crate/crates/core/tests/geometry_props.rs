use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use subspace_heights::config::Tolerances;
use subspace_heights::geometry::{mu, mu_wedge, orth_complement, principal_data, proj_dist, CVec, NumericSubspace};

fn cvec(n: usize) -> impl Strategy<Value = CVec> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

fn basis(d: usize, n: usize) -> impl Strategy<Value = Vec<CVec>> {
    proptest::collection::vec(cvec(n), d)
}

fn sub(b: &[CVec]) -> Option<NumericSubspace> {
    NumericSubspace::from_basis(b, &Tolerances::default()).ok().filter(|s| s.dim() == b.len())
}

proptest! {
    #[test]
    fn sines_are_sorted_and_bounded(a in basis(2, 4), b in basis(2, 4)) {
        let (Some(a), Some(b)) = (sub(&a), sub(&b)) else { return Ok(()) };
        let pd = principal_data(&a, &b).unwrap();
        prop_assert!(pd.omegas.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        prop_assert!(pd.omegas.iter().all(|w| (0.0..=1.0).contains(w)));
        for (l, w) in pd.lambdas.iter().zip(&pd.omegas) {
            prop_assert!((l * l + w * w - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn complement_identity(x in cvec(4), b in basis(2, 4)) {
        let (Some(xs), Some(bs)) = (sub(&[x]), sub(&b)) else { return Ok(()) };
        let w1 = principal_data(&xs, &bs).unwrap().omegas[0];
        let w2 = principal_data(&xs, &orth_complement(&bs).unwrap()).unwrap().omegas[0];
        prop_assert!((w1 * w1 + w2 * w2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unitary_invariance(a in basis(2, 4), b in basis(2, 4), m in basis(4, 4)) {
        let (Some(sa), Some(sb)) = (sub(&a), sub(&b)) else { return Ok(()) };
        let mm = DMatrix::from_fn(4, 4, |r, c| m[c][r]);
        let qr = mm.qr();
        let u = qr.q();
        let tol = Tolerances::default();
        let before = principal_data(&sa, &sb).unwrap().omegas;
        let after = principal_data(&sa.transform(&u, &tol).unwrap(), &sb.transform(&u, &tol).unwrap()).unwrap().omegas;
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn mu_definitions_agree(a in basis(2, 5), b in basis(3, 5)) {
        let (Some(sa), Some(sb)) = (sub(&a), sub(&b)) else { return Ok(()) };
        prop_assert!((mu(&sa, &sb).unwrap() - mu_wedge(&a, &b).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn line_distance_is_first_sine(x in cvec(3), y in cvec(3)) {
        let (Some(sx), Some(sy)) = (sub(&[x.clone()]), sub(&[y.clone()])) else { return Ok(()) };
        let w = principal_data(&sx, &sy).unwrap().omegas[0];
        prop_assert!((w - proj_dist(&x, &y).unwrap()).abs() < 1e-9);
    }
}

/// Grid oracle for the first sine: `min over unit x in A of dist(x, B)`.
#[test]
fn first_sine_matches_grid_oracle() {
    let tol = Tolerances::default();
    let c = |a: f64, b: f64| Complex64::new(a, b);
    let a = NumericSubspace::from_basis(&[vec![c(1.0, 0.0), c(0.0, 0.0), c(0.3, 0.1)], vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, -0.4)]], &tol).unwrap();
    let b = NumericSubspace::from_basis(&[vec![c(0.2, 0.0), c(0.5, 0.5), c(1.0, 0.0)]], &tol).unwrap();
    let w = principal_data(&b, &a).unwrap().omegas[0];
    let mut best = f64::INFINITY;
    let steps = 400;
    for i in 0..=steps {
        let t = std::f64::consts::FRAC_PI_2 * i as f64 / steps as f64;
        for j in 0..steps {
            let ph = std::f64::consts::TAU * j as f64 / steps as f64;
            let coef = [c(t.cos(), 0.0), Complex64::from_polar(t.sin(), ph)];
            let x: CVec = (0..3).map(|k| coef[0] * a.onb()[0][k] + coef[1] * a.onb()[1][k]).collect();
            best = best.min(proj_dist(&x, &b.onb()[0]).unwrap());
        }
    }
    assert!((best - w).abs() < 1e-3, "{best} vs {w}");
}
