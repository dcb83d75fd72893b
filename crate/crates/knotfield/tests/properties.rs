//! Property-based checks of the coordinate maps, differentiation engine,
//! and field construction over randomly drawn specs and points.

use knotfield::calculus::{
    curl_g_with_volume, div_g_with_volume, fd_derivative_oracle, jacobian_of_map, CoordMap, Domain,
};
use knotfield::fields::field_x_at;
use knotfield::geometry::{
    make_knot_spec, psi, psi_inv, torus_knot_point, twist, twist_inv, wrap_angle, KnotSpec,
    ToroidalPoint,
};
use knotfield::linalg::{mat_mul, max_abs_diff, IDENTITY};
use knotfield::metric::metric_g_at;
use proptest::prelude::*;
use std::f64::consts::PI;

fn pq() -> impl Strategy<Value = (i64, i64)> {
    prop_oneof![
        Just((1_i64, 1_i64)),
        Just((2, 3)),
        Just((3, 2)),
        Just((2, 5)),
    ]
}

fn spec() -> impl Strategy<Value = KnotSpec> {
    (pq(), -2_i64..=2).prop_map(|((p, q), k)| make_knot_spec(p, q, k).unwrap())
}

fn model_point() -> impl Strategy<Value = ToroidalPoint> {
    (-3.1..3.1_f64, -3.1..3.1_f64, 0.55..1.45_f64)
        .prop_map(|(a, c, t)| ToroidalPoint::new(a, c, t))
}

proptest! {
    #[test]
    fn wrap_angle_is_canonical(x in -50.0..50.0_f64) {
        let w = wrap_angle(x);
        prop_assert!(w > -PI && w <= PI);
        let turns = (x - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn tube_map_round_trips(p in model_point()) {
        let cart = psi(&p);
        let back = psi_inv(&cart).unwrap();
        prop_assert!(back.approx_eq(&p, 1e-12), "{back:?} vs {p:?}");
    }

    #[test]
    fn shear_map_round_trips(p in model_point(), s in spec()) {
        let fwd = twist(&p, &s);
        let back = twist_inv(&fwd, &s);
        prop_assert!(back.approx_eq(&p, 1e-12), "{back:?} vs {p:?}");
    }

    #[test]
    fn knot_lies_on_unit_tube(t in 0.0..7.0_f64, (p, q) in pq()) {
        let pt = torus_knot_point(p, q, t);
        prop_assert!((pt.big_r - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn forward_and_inverse_jacobians_invert(p in model_point(), s in spec()) {
        let j_fwd = jacobian_of_map(CoordMap::PsiAfterTwist(s), p.coords()).unwrap();
        let image = psi(&twist(&p, &s));
        let j_inv =
            jacobian_of_map(CoordMap::InverseOfPsiAfterTwist(s), image.coords()).unwrap();
        let prod = mat_mul(&j_inv, &j_fwd);
        prop_assert!(max_abs_diff(&prod, &IDENTITY) <= 1e-8, "{prod:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_jets_match_finite_differences(p in model_point(), s in spec(), axis in 0_usize..3, comp in 0_usize..3) {
        let cart = psi(&p);
        let jets = field_x_at(&knotfield::calculus::seed_point(cart.coords()), &s);
        let fd = fd_derivative_oracle(
            &|x| {
                let j = field_x_at(&knotfield::calculus::seed_point(x), &s);
                j[comp].value
            },
            cart.coords(),
            axis,
            Domain::Annulus,
        )
        .unwrap();
        let jet = jets[comp].partials[axis];
        prop_assert!((jet - fd).abs() <= 1e-6 * (1.0 + jet.abs()), "jet {jet} vs fd {fd}");
    }

    #[test]
    fn field_is_a_curl_eigenfield_at_random_points(p in model_point(), s in spec()) {
        let cart = psi(&p);
        let field = |j: &[knotfield::calculus::Jet; 3]| field_x_at(j, &s);
        let metric = |j: &[knotfield::calculus::Jet; 3]| metric_g_at(j, &s);
        let volume = |j: &[knotfield::calculus::Jet; 3]| knotfield::metric::volume_element_at(j);
        let x = {
            let j = field(&knotfield::calculus::seed_point(cart.coords()));
            [j[0].value, j[1].value, j[2].value]
        };
        let curl =
            curl_g_with_volume(&field, &metric, &volume, cart.coords(), Domain::Annulus).unwrap();
        let div =
            div_g_with_volume(&field, &metric, &volume, cart.coords(), Domain::Annulus).unwrap();
        let norm = knotfield::math::norm3(x).max(1e-8);
        let defect = knotfield::math::norm3([
            curl[0] - x[0],
            curl[1] - x[1],
            curl[2] - x[2],
        ]);
        prop_assert!(defect / norm <= 1e-8, "curl defect {defect} at |X| = {norm}");
        prop_assert!(div.abs() <= 1e-8, "div {div}");
    }
}
