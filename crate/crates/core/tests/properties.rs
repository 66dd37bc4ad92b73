use agrivolt_core::agronomy::{default_responses, ShadeClass, ShadeResponse};
use agrivolt_core::economics::{
    apply_fit, chi, delta_fit_threshold, evaluate, kappa_l, ppr, price_normalized, y_pv_prime, CostComponents,
    EconInputs, EconParams, PremiumMode,
};
use agrivolt_core::optics::{beam_balance, ground_profile, module_views, ArrayLayout, BeamGeometry};
use agrivolt_core::solar::{at_rotation, in_st_window, st_rotation, RotationState, SunPosition};
use proptest::prelude::*;

fn layout() -> impl Strategy<Value = ArrayLayout> {
    (1.0f64..8.0, 1.0f64..4.0, 0.0f64..1.0).prop_map(|(a, chord, lift)| {
        let height = chord / 2.0 + 0.2 + 4.0 * lift;
        ArrayLayout::new(a * chord, chord, height, 0.0).unwrap()
    })
}

fn sun() -> impl Strategy<Value = SunPosition> {
    (0.0f64..88.0, 0.0f64..360.0).prop_map(|(z, az)| SunPosition::from_angles(z, az))
}

proptest! {
    #[test]
    fn beam_flux_is_conserved(l in layout(), s in sun(), r in -90.0f64..90.0, dni in 1.0f64..1000.0) {
        let b = beam_balance(&l, &RotationState::tracker(r), dni, &s);
        let total = b.on_modules + b.on_ground;
        prop_assert!((total - b.incident).abs() <= 1e-6 * b.incident, "{b:?}");
    }

    #[test]
    fn ground_never_exceeds_open_field(
        l in layout(), s in sun(), r in -90.0f64..90.0, dni in 0.0f64..1000.0, dhi in 0.0f64..400.0,
    ) {
        let p = ground_profile(&l, &RotationState::tracker(r), dni, dhi, &s, 64);
        for &g in &p.irradiance {
            prop_assert!(g >= 0.0);
            prop_assert!(g <= p.unshaded_ghi * (1.0 + 1e-12) + 1e-9, "{g} > {}", p.unshaded_ghi);
        }
    }

    #[test]
    fn anti_tracking_passes_the_whole_beam(l in layout(), s in sun()) {
        let rot = at_rotation(&s, 90.0).unwrap();
        let b = beam_balance(&l, &rot, 800.0, &s);
        prop_assert!(b.on_modules.abs() <= 1e-9 * b.incident.max(1.0));
        let g = BeamGeometry::new(&l, &rot, &s).unwrap();
        prop_assert!((g.lit_fraction(&l) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn standard_tracking_maximises_beam_on_modules(s in sun(), r in -90.0f64..90.0) {
        let st = st_rotation(&s, 90.0).unwrap();
        let best = st.cos_incidence(&s);
        prop_assert!(RotationState::tracker(r).cos_incidence(&s) <= best + 1e-12);
    }

    #[test]
    fn view_factors_are_fractions(l in layout(), r in -90.0f64..90.0) {
        let v = module_views(&l, &RotationState::tracker(r));
        for f in [v.front, v.rear] {
            prop_assert!(f.sky >= 0.0 && f.ground >= 0.0);
            prop_assert!(f.sky + f.ground <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn ct_windows_nest(n1 in 0.0f64..24.0, n2 in 0.0f64..24.0, offset in 0.0f64..12.0) {
        let (lo, hi) = if n1 <= n2 { (n1, n2) } else { (n2, n1) };
        if in_st_window(lo, offset) {
            prop_assert!(in_st_window(hi, offset));
        }
    }

    #[test]
    fn chi_closed_form_matches_summation(d in 0.0f64..0.05, r in 0.0f64..0.12, n in 1u32..60) {
        let q = (1.0 - d) / (1.0 + r);
        let sum: f64 = (1..=n).map(|k| q.powi(k as i32)).sum();
        let closed = chi(d, r, Some(n)).unwrap();
        prop_assert!((closed - sum).abs() <= 1e-10 * sum);
    }

    #[test]
    fn threshold_tariff_brings_ppr_to_one(
        p in 0.01f64..3.0, pb0 in 0.0f64..0.5, yy in 50.0f64..500.0, y in 0.05f64..1.3,
    ) {
        let c = chi(0.01, 0.05, None).unwrap();
        let th = delta_fit_threshold(p, pb0, 0.06, yy, y, c, 100.0);
        let pb = apply_fit(pb0, th, 0.06, yy, y, c, 100.0);
        if p > pb0 {
            prop_assert!((ppr(p, pb) - 1.0).abs() < 1e-9);
        } else {
            prop_assert_eq!(th, 0.0);
        }
    }

    #[test]
    fn ppr_orders_like_price(p1 in -1.0f64..3.0, p2 in -1.0f64..3.0, pb in 0.001f64..2.0) {
        if p1 <= p2 {
            prop_assert!(ppr(p1, pb) <= ppr(p2, pb));
        }
    }

    #[test]
    fn unit_costs_reproduce_normalized_price(
        a in 1.0f64..8.0, m_l in 2.0f64..40.0, rho in 0.5f64..3.0, eps in 0.1f64..1.0,
        kappa_m in 1.0f64..2.0, y in 0.0f64..1.3, area in 1.0f64..1e5,
    ) {
        let c = chi(0.01, 0.05, None).unwrap();
        let c_m = 100.0;
        let comp = CostComponents {
            module_area_av: area,
            a_lm_av: a,
            a_lm_gmpv: 2.0,
            c_m_gmpv: c_m,
            c_m_av: kappa_m * c_m,
            c_l_gmpv: c_m / m_l,
            c_l_av: rho * c_m / m_l,
            epsilon: eps,
            y_pv: y,
            chi: c,
        };
        let closed = price_normalized(kappa_m, kappa_l(eps, a, m_l, rho), y_pv_prime(2.0, m_l, y));
        prop_assert!((comp.price_normalized() - closed).abs() < 1e-9 * (1.0 + closed.abs()));
    }

    #[test]
    fn more_soft_cost_share_never_raises_threshold(
        y in 0.2f64..1.2, revenue in 0.0f64..10_000.0, a in 2.0f64..6.0, m1 in 5.0f64..40.0, m2 in 5.0f64..40.0,
    ) {
        let (lo, hi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
        let inputs = EconInputs { a_lm: a, y_pv: y, crop_revenue: revenue, yy_ref: 400.0, tracked: true };
        let at = |m_l| evaluate(&EconParams { m_l, ..EconParams::default() }, &inputs).unwrap().delta_fit_th;
        prop_assert!(at(hi) <= at(lo) + 1e-9);
    }

    #[test]
    fn shade_classes_are_ordered(par in 0.0f64..=1.0) {
        let set = default_responses();
        let f = |c: &str| set.get(&ShadeClass::parse(c)).unwrap().eval(par);
        prop_assert!(f("S") <= f("T") + 1e-12);
        prop_assert!(f("T") <= f("L") + 1e-12);
        prop_assert!(f("S") >= 0.0);
    }

    #[test]
    fn fitted_curve_recovers_its_coefficients(a in -1.0f64..0.0, b in -0.5f64..0.0) {
        let pts: Vec<(f64, f64)> = (0..7).map(|i| {
            let par = 1.0 - 0.1 * i as f64;
            let x = 1.0 - par;
            (par, 1.0 + a * x + b * x * x)
        }).collect();
        let fit = ShadeResponse::fit(ShadeClass::Tolerant, &pts).unwrap();
        prop_assert!((fit.a - a).abs() < 1e-9 && (fit.b - b).abs() < 1e-9);
    }
}

#[test]
fn ideal_agrivoltaics_price_vanishes() {
    // Ground-mounted costs, no land premium, and the reference's own yield.
    let p = price_normalized(1.0, kappa_l(1.0, 2.0, 10.0, 1.0), y_pv_prime(2.0, 10.0, 1.0));
    assert_eq!(p, 0.0);
}

#[test]
fn additive_premium_differs_from_multiplicative() {
    let mult = EconParams::default();
    let add = EconParams {
        premium_mode: PremiumMode::Additive,
        ..mult
    };
    assert!((mult.kappa_m(true) - 1.38 * 1.2).abs() < 1e-12);
    assert!((add.kappa_m(true) - 1.58).abs() < 1e-12);
    assert_eq!(mult.kappa_m(false), add.kappa_m(false));
}

#[test]
fn infinite_horizon_is_the_limit_of_long_lives() {
    let inf = chi(0.01, 0.05, None).unwrap();
    let long = chi(0.01, 0.05, Some(2000)).unwrap();
    assert!((inf - long).abs() < 1e-9);
    assert!(chi(0.0, 0.0, None).is_err());
}
