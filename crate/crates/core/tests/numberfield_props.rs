use proptest::prelude::*;
use subspace_heights::numberfield::builtins;
use subspace_heights::poly;
use subspace_heights::ring::{Field, Ring};

fn coeffs(p: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-20i64..=20, p)
}

proptest! {
    #[test]
    fn embeddings_are_ring_maps(idx in 0usize..7, a in coeffs(4), b in coeffs(4)) {
        let k = builtins::all().swap_remove(idx);
        let p = k.degree();
        let (x, y) = (k.elem(&a[..p]), k.elem(&b[..p]));
        let xy = k.mul(&x, &y);
        let sum = k.add(&x, &y);
        for i in 1..=p {
            let (ex, ey) = (k.embed(&x, i).unwrap(), k.embed(&y, i).unwrap());
            let scale = 1.0 + ex.norm() * ey.norm();
            prop_assert!((k.embed(&xy, i).unwrap() - ex * ey).norm() <= 1e-9 * scale);
            prop_assert!((k.embed(&sum, i).unwrap() - ex - ey).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn norm_is_multiplicative(idx in 0usize..7, a in coeffs(4), b in coeffs(4)) {
        let k = builtins::all().swap_remove(idx);
        let p = k.degree();
        let (x, y) = (k.elem(&a[..p]), k.elem(&b[..p]));
        prop_assert_eq!(k.norm_elem(&k.mul(&x, &y)), k.norm_elem(&x) * k.norm_elem(&y));
    }

    #[test]
    fn inverse_is_exact(idx in 0usize..7, a in coeffs(4)) {
        let k = builtins::all().swap_remove(idx);
        let x = k.elem(&a[..k.degree()]);
        prop_assume!(!k.is_zero(&x));
        let inv = k.inv(&x).unwrap();
        prop_assert_eq!(k.mul(&x, &inv), k.one());
    }

    #[test]
    fn principal_ideal_norm_is_element_norm(idx in 0usize..7, a in coeffs(4)) {
        let k = builtins::all().swap_remove(idx);
        let x = k.elem(&a[..k.degree()]);
        prop_assume!(!k.is_zero(&x));
        let n = k.ideal_norm(std::slice::from_ref(&x)).unwrap();
        prop_assert_eq!(n, poly::abs_rat(&k.norm_elem(&x)));
    }
}

#[test]
fn delta_matches_discriminant() {
    for k in builtins::all() {
        let (_, r2) = k.signature();
        let d: f64 = k.disc().to_string().parse().unwrap();
        let expect = 2f64.powi(-(r2 as i32)) * d.abs().sqrt();
        assert!((k.delta() - expect).abs() < 1e-12 * expect, "{}", k.name());
    }
}
