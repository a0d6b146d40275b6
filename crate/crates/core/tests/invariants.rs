//! Cross-module property tests: the solver against the forward map, the
//! swap equivariance of the solver, and the induced transformation of the
//! fiber-zero coordinate under the symmetry action.

use num_complex::Complex64;
use proptest::prelude::*;
use twistor_lines::{
    act_on_params, fiber_zero_point, incidence_map, jacobian, solve_line_through,
    swap_involution, ChordalTolerance, Family, GroupElement, LineParams, SpacePoint, SpherePoint,
};

fn arb_complex(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..range, -range..range).prop_map(|(re, im)| Complex64::new(re, im))
}

fn arb_point() -> impl Strategy<Value = SpherePoint> {
    (arb_complex(3.0), arb_complex(3.0))
        .prop_filter_map("valid point", |(z0, z1)| SpherePoint::new(z0, z1).ok())
}

fn arb_interior_a() -> impl Strategy<Value = SpherePoint> {
    (0.02f64..50.0, 0.0..std::f64::consts::TAU)
        .prop_filter("off K", |(m, _)| (m - 1.0).abs() > 1e-3)
        .prop_map(|(m, phi)| SpherePoint::from_affine(Complex64::from_polar(m, phi)))
}

fn arb_t() -> impl Strategy<Value = SpherePoint> {
    (0.1f64..10.0, 0.0..std::f64::consts::TAU)
        .prop_map(|(m, phi)| SpherePoint::from_affine(Complex64::from_polar(m, phi)))
}

fn arb_group() -> impl Strategy<Value = GroupElement> {
    (
        arb_complex(1.0),
        arb_complex(1.0),
        0.0..std::f64::consts::TAU,
    )
        .prop_filter_map("unit element", |(a, b, phi)| {
            GroupElement::new(a, b, Complex64::from_polar(1.0, phi)).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Every off-diagonal point of a generic fiber is passed by exactly one
    /// member of each family, and the two solutions straddle |a| = 1.
    #[test]
    fn fiberwise_double_cover(x in arb_point(), y in arb_point(), t in arb_t()) {
        prop_assume!(x.chordal_distance(&y) > 1e-4);
        let p = SpacePoint::new(x, y, t);
        let tol = ChordalTolerance::default();
        let (plus, _) = solve_line_through(&p, Family::Mplus, &tol).unwrap();
        let (minus, _) = solve_line_through(&p, Family::Mminus, &tol).unwrap();
        prop_assert!(plus.a_modulus() < 1.0);
        prop_assert!(minus.a_modulus() > 1.0);
        for params in [plus, minus] {
            let q = incidence_map(&params, &t).unwrap();
            prop_assert!(x.chordal_distance(&q.x) < 1e-9);
            prop_assert!(y.chordal_distance(&q.y) < 1e-9);
        }
    }

    /// Solving the component-swapped point in the other family returns the
    /// swapped parameters (d, 1/conj(a)).
    #[test]
    fn solver_is_swap_equivariant(x in arb_point(), y in arb_point(), t in arb_t()) {
        prop_assume!(x.chordal_distance(&y) > 1e-4);
        let tol = ChordalTolerance::default();
        let p = SpacePoint::new(x, y, t);
        let (plus, _) = solve_line_through(&p, Family::Mplus, &tol).unwrap();
        let swapped_point = SpacePoint::new(y, x, t);
        let (minus, _) = solve_line_through(&swapped_point, Family::Mminus, &tol).unwrap();
        let expected = swap_involution(&plus);
        prop_assert!(minus.d().chordal_distance(&expected.d()) < 1e-9);
        prop_assert!(minus.a().chordal_distance(&expected.a()) < 1e-9);
    }

    /// The conformal density rescales to the real 4x4 determinant by
    /// exactly (1 + |d|^2)(1 + |t|^2) in the standard chart.
    #[test]
    fn jacobian_density_relation(d in arb_complex(5.0), a in arb_interior_a(), t in arb_t()) {
        let params = LineParams::new(SpherePoint::from_affine(d), a);
        let j = jacobian(&params, &t).unwrap();
        let r = t.to_affine().unwrap().norm_sqr();
        let factor = (1.0 + d.norm_sqr()) * (1.0 + r);
        prop_assert!((j.density * factor - j.real_det).abs() <= 1e-12 * j.real_det.abs());
        // Sign approaches: negative inside the unit circle, positive outside.
        let inside = params.a_modulus() < 1.0;
        prop_assert_eq!(j.real_det < 0.0, inside);
    }

    /// Measured transformation law of the fiber-zero coordinate under the
    /// symmetry action: v scales by the unit multiplier of `a` times the
    /// ratio of the chart factors, so
    /// |v'| / |v| = rep_norm_sqr(d') / rep_norm_sqr(d).
    #[test]
    fn fiber_zero_transforms_by_the_chart_ratio(
        g in arb_group(),
        d in arb_point(),
        a in arb_interior_a(),
    ) {
        let params = LineParams::new(d, a);
        let moved = act_on_params(&g, &params);
        let v0 = fiber_zero_point(&params).unwrap().v;
        let v1 = fiber_zero_point(&moved).unwrap().v;
        let (m0, m1) = (v0.to_affine().unwrap().norm(), v1.to_affine().unwrap().norm());
        let expected = moved.d().rep_norm_sqr() / params.d().rep_norm_sqr();
        prop_assert!(
            ((m1 / m0) - expected).abs() <= 1e-9 * expected,
            "|v'|/|v| = {} vs chart ratio {}", m1 / m0, expected
        );
    }

    /// Curves of one family never collide within a fiber: parameter
    /// separation bounds image separation away from zero.
    #[test]
    fn images_of_distinct_parameters_stay_apart(
        d1 in arb_point(), d2 in arb_point(),
        a1 in arb_interior_a(), a2 in arb_interior_a(),
        t in arb_t(),
    ) {
        let p1 = LineParams::new(d1, a1);
        let mut p2 = LineParams::new(d2, a2);
        if p1.family() != p2.family() {
            p2 = swap_involution(&p2);
        }
        let sep = p1.d().chordal_distance(&p2.d()).max(p1.a().chordal_distance(&p2.a()));
        prop_assume!(sep > 1e-3);
        let q1 = incidence_map(&p1, &t).unwrap();
        let q2 = incidence_map(&p2, &t).unwrap();
        let image_sep = q1.x.chordal_distance(&q2.x).max(q1.y.chordal_distance(&q2.y));
        prop_assert!(image_sep > 1e-12);
    }
}
