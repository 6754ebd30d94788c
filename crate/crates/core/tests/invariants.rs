use hardylab::catalog::{
    evaluate_sides_with, holder_mixed_power, holder_power, remainder_quantities, Family, InequalityInstance, Params,
    Verdict,
};
use hardylab::model::{Expr, HomogeneousSetting, RadialProfile};
use hardylab::quadrature::{integrate_fn, Tolerance};
use hardylab::sharpness::{frs_constant, frs_phi};
use hardylab::transforms::CritSubcritContext;
use proptest::prelude::*;

fn relative_only() -> Tolerance {
    Tolerance { abs: f64::MIN_POSITIVE, rel: 1e-10, max_panels: 10_000 }
}

fn euler_hardy(q: f64, p: f64, alpha: f64) -> InequalityInstance {
    let params = Params { p: Some(p), alpha: Some(alpha), ..Default::default() };
    InequalityInstance::new(Family::EulerHardy, params, HomogeneousSetting::new(q).unwrap()).unwrap()
}

fn window() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..5.0, 1.2f64..6.0).prop_map(|(lo, w)| (lo, lo * w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn euler_hardy_ratio_is_homogeneous_and_dilation_invariant(
        (lo, hi) in window(),
        c in prop_oneof![-50.0f64..-0.02, 0.02f64..50.0],
        lambda in 0.2f64..5.0,
        q in 2.5f64..8.0,
        p in 1.3f64..4.0,
    ) {
        let alpha = 0.3 * q / p;
        let inst = euler_hardy(q, p, alpha);
        let f = RadialProfile::bump(lo, hi).unwrap().times_expr(Expr::affine(1.0, 0.3 * lo));
        let base = evaluate_sides_with(&inst, &f, &relative_only()).unwrap();
        prop_assert_eq!(base.verdict, Verdict::Holds);
        let scaled = evaluate_sides_with(&inst, &f.scale(c), &relative_only()).unwrap();
        prop_assert!((scaled.ratio - base.ratio).abs() < 1e-9 * base.ratio);
        let dilated = evaluate_sides_with(&inst, &f.dilate(lambda).unwrap(), &relative_only()).unwrap();
        prop_assert!((dilated.ratio - base.ratio).abs() < 1e-8 * base.ratio);
    }

    #[test]
    fn profile_text_round_trips((lo, hi) in window(), a in -3.0f64..3.0, k in -2.5f64..2.5) {
        let f = RadialProfile::bump(lo, hi)
            .unwrap()
            .times_expr(Expr::add(vec![Expr::power_of_r(k), Expr::c(a)]));
        let back = RadialProfile::parse(&f.to_text()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn radius_map_inverts(q in 3.0f64..9.0, dm in 0.0f64..1.0, big_r in 0.1f64..10.0, t in 0.4f64..0.99) {
        let m = 2.0 + dm * (q - 3.0);
        let ctx = CritSubcritContext::new(q, m, big_r, 1.0, 1.0).unwrap();
        // s(r) = R exp(1 - r^-kappa) takes (0, 1) onto (0, R)
        let r = t;
        let s = ctx.radius_map(r);
        prop_assert!(s > 0.0 && s < big_r);
        prop_assert!((ctx.inverse_radius_map(s) - r).abs() < 1e-9 * r);
    }

    #[test]
    fn holder_equalities_hold_pointwise(
        c in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
        alpha in -2.0f64..2.0,
        p in 1.2f64..5.0,
        q in 1.2f64..5.0,
        a in -1.0f64..1.0,
        b in -1.0f64..1.0,
    ) {
        let grid: Vec<f64> = (0..25).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 24.0)).collect();
        for row in holder_power(c, alpha, p, &grid).unwrap() {
            prop_assert!(row.relative_gap() < 1e-12, "{:?}", row);
        }
        prop_assume!((p - q).abs() > 0.5);
        for row in holder_mixed_power(p, q, a, b, &grid).unwrap() {
            prop_assert!(row.relative_gap() < 1e-12, "{:?}", row);
        }
    }

    #[test]
    fn power_integrals_match_closed_form((lo, hi) in window(), k in -3.0f64..3.0) {
        prop_assume!((k + 1.0).abs() > 1e-3);
        let tol = Tolerance::default();
        let res = integrate_fn(&|r: f64| r.powf(k), lo, hi, &[], &[], &tol).unwrap();
        let exact = (hi.powf(k + 1.0) - lo.powf(k + 1.0)) / (k + 1.0);
        prop_assert!((res.value - exact).abs() <= tol.target(exact) * 10.0);
    }

    #[test]
    fn frs_constant_is_the_minimum(p in 2.0f64..8.0, t in 0.0001f64..0.5) {
        let c = frs_constant(p).unwrap();
        prop_assert!(c > 0.0 && c <= 1.0 + 1e-15);
        prop_assert!(c <= frs_phi(p, t) + 1e-12);
    }

    #[test]
    fn remainder_constant_vanishes_only_at_the_balanced_b(
        q in 3.0f64..8.0,
        pf in 0.0f64..0.9,
        b in -1.0f64..4.0,
    ) {
        let p = 2.0 + pf * (q - 2.0);
        let s = HomogeneousSetting::new(q).unwrap();
        let balanced = q * (p - 1.0) / p;
        let rq = remainder_quantities(p, 0.0, b, &s).unwrap();
        prop_assert!(rq.c_p >= 0.0);
        if (b - balanced).abs() > 1e-6 {
            prop_assert!(rq.c_p > 0.0);
        }
        prop_assert_eq!(remainder_quantities(p, 0.0, balanced, &s).unwrap().c_p, 0.0);
    }
}
