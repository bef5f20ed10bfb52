//! Property tests over arbitrary small inputs, complementing the seeded
//! sweeps: structural identities and norm axioms that must hold for every
//! input, not just for the generators' output.

use iptt::linalg::CMatrix;
use iptt::norms::UINorm;
use iptt::transformer::{IptiTransformer, OperatorField};
use iptt::HerglotzFn;
use num_complex::Complex64;
use proptest::prelude::*;

fn arb_matrix(dim: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im)),
        dim * dim,
    )
    .prop_map(move |entries| {
        CMatrix::from_fn(dim, |i, j| entries[i * dim + j]).expect("square data")
    })
}

fn arb_weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..1.0, len).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        raw.iter().map(|w| w / total).collect()
    })
}

fn arb_field(dim: usize, atoms: usize) -> impl Strategy<Value = OperatorField> {
    (arb_weights(atoms), proptest::collection::vec(arb_matrix(dim), atoms))
        .prop_map(|(weights, ops)| OperatorField::probability(weights, ops).expect("field"))
}

fn arb_herglotz() -> impl Strategy<Value = HerglotzFn> {
    proptest::collection::vec((0.0f64..std::f64::consts::TAU, 0.05f64..1.0), 1..5).prop_map(
        |raw| {
            let total: f64 = raw.iter().map(|(_, w)| w).sum();
            let atoms: Vec<(f64, f64)> =
                raw.iter().map(|(a, w)| (*a, w / total)).collect();
            HerglotzFn::new(&atoms).expect("atoms")
        },
    )
}

proptest! {
    #[test]
    fn adjoint_is_an_involution(field in arb_field(3, 3)) {
        let back = field.adjoint().adjoint();
        for (a, b) in field.ops().iter().zip(back.ops()) {
            prop_assert_eq!(a.max_abs_diff(b), 0.0);
        }
        prop_assert_eq!(field.weights(), back.weights());
    }

    #[test]
    fn korkine_rewrites_the_centered_transformer(
        left in arb_field(2, 3),
        right_ops in proptest::collection::vec(arb_matrix(2), 3),
        x in arb_matrix(2),
    ) {
        let right = OperatorField::probability(left.weights().to_vec(), right_ops).expect("field");
        let t = IptiTransformer::new(left, right).expect("transformer");
        let lhs = t.korkine_lhs(&x).expect("lhs");
        let rhs = t.korkine_rhs(&x).expect("rhs");
        let scale = rhs.frobenius_norm().max(1.0);
        prop_assert!((&lhs - &rhs).frobenius_norm() / scale <= 1e-10);
    }

    #[test]
    fn variance_forms_coincide(field in arb_field(3, 4)) {
        let direct = field.variance().expect("variance");
        let pair = field.variance_pair_form().expect("pair form");
        let scale = direct.frobenius_norm().max(1.0);
        prop_assert!(direct.max_abs_diff(&pair) / scale <= 1e-10);
    }

    #[test]
    fn norms_satisfy_triangle_and_homogeneity(
        a in arb_matrix(3),
        b in arb_matrix(3),
        c in -3.0f64..3.0,
    ) {
        for norm in [
            UINorm::operator(),
            UINorm::schatten(1.0).unwrap(),
            UINorm::schatten(2.5).unwrap(),
            UINorm::kyfan(2).unwrap(),
        ] {
            let na = norm.eval(&a).expect("norm");
            let nb = norm.eval(&b).expect("norm");
            let nsum = norm.eval(&(&a + &b)).expect("norm");
            prop_assert!(nsum <= na + nb + 1e-9 * (na + nb).max(1.0));

            let nscaled = norm.eval(&a.scale_re(c)).expect("norm");
            prop_assert!((nscaled - c.abs() * na).abs() <= 1e-9 * na.max(1.0));
        }
    }

    #[test]
    fn transformer_application_is_linear(
        field in arb_field(2, 2),
        x in arb_matrix(2),
        y in arb_matrix(2),
        c in -2.0f64..2.0,
    ) {
        let t = IptiTransformer::new(field.clone(), field).expect("transformer");
        let combined = t.apply(&(&x.scale_re(c) + &y)).expect("apply");
        let split = &t.apply(&x).expect("apply").scale_re(c) + &t.apply(&y).expect("apply");
        let scale = split.frobenius_norm().max(1.0);
        prop_assert!(combined.max_abs_diff(&split) / scale <= 1e-12);
    }

    #[test]
    fn herglotz_values_keep_positive_real_part(
        f in arb_herglotz(),
        re in -0.7f64..0.7,
        im in -0.7f64..0.7,
    ) {
        let z = Complex64::new(re, im);
        prop_assume!(z.norm() < 0.99);
        let value = f.eval(z).expect("inside disk");
        prop_assert!(value.re > 0.0);
        let at_zero = f.eval(Complex64::new(0.0, 0.0)).expect("origin");
        prop_assert!((at_zero - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn norm_tokens_round_trip(p in 1.0f64..8.0, k in 1usize..6) {
        let schatten = UINorm::schatten(p).unwrap();
        let parsed: UINorm = schatten.to_string().parse().unwrap();
        prop_assert_eq!(parsed.to_string(), schatten.to_string());

        let kyfan = UINorm::kyfan(k).unwrap();
        let parsed: UINorm = kyfan.to_string().parse().unwrap();
        prop_assert_eq!(parsed.to_string(), kyfan.to_string());

        let reconvex = UINorm::reconvex(UINorm::kyfan(k).unwrap(), p).unwrap();
        let parsed: UINorm = reconvex.to_string().parse().unwrap();
        prop_assert_eq!(parsed.to_string(), reconvex.to_string());
    }

    #[test]
    fn scalar_gruss_bound_never_fails(
        samples in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..80),
    ) {
        let f: Vec<f64> = samples.iter().map(|(a, _)| *a).collect();
        let g: Vec<f64> = samples.iter().map(|(_, b)| *b).collect();
        let r = iptt::ineq::eval_gruss_scalar(&f, &g, -1.0, 1.0, -1.0, 1.0).expect("bound");
        prop_assert!(r.margin >= -1e-12);
    }
}
