mod common;

use std::sync::OnceLock;

use agrivolt::run;
use agrivolt_core::agronomy::{default_responses, ShadeClass};
use agrivolt_core::crops::builtin_plan;
use agrivolt_core::economics::EconParams;
use agrivolt_core::optics::ArrayLayout;
use agrivolt_core::planner::{
    ct_economics, feasible_st_window, max_st_hours_per_month, monthly_day_length, n_grid, CtCache, Enforcement,
    MonthlyResponses, Thresholds,
};
use agrivolt_core::time::MonthSet;
use agrivolt_core::weather::{SiteConfig, WeatherSeries};
use common::synth;
use proptest::prelude::*;

const K: usize = 64;

fn cache_for(weather: &WeatherSeries, a_lm: f64) -> CtCache {
    run::ct_cache(weather, &ArrayLayout::with_a_lm(a_lm).unwrap(), 90.0, K).unwrap()
}

fn khanewal() -> &'static CtCache {
    static CACHE: OnceLock<CtCache> = OnceLock::new();
    CACHE.get_or_init(|| cache_for(&synth::punjab_like_series(&SiteConfig::khanewal(), 7), 2.0))
}

fn uniform(class: ShadeClass) -> MonthlyResponses {
    MonthlyResponses::uniform(default_responses().get(&class).unwrap())
}

fn window(
    cache: &CtCache,
    class: ShadeClass,
    energy: f64,
    crop: f64,
    step: f64,
    enforcement: &Enforcement,
) -> Vec<f64> {
    feasible_st_window(
        cache,
        &uniform(class),
        &Thresholds::new(energy, crop).unwrap(),
        MonthSet::ALL,
        enforcement,
        &n_grid(step, 14.0).unwrap(),
    )
    .unwrap()
    .window()
}

fn class() -> impl Strategy<Value = ShadeClass> {
    prop_oneof![
        Just(ShadeClass::Sensitive),
        Just(ShadeClass::Tolerant),
        Just(ShadeClass::Loving)
    ]
}

fn enforcement() -> impl Strategy<Value = Enforcement> {
    prop_oneof![
        Just(Enforcement::Monthly),
        Just(Enforcement::punjab_seasons()),
        Just(Enforcement::whole_period())
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn raising_a_threshold_never_enlarges_the_window(
        c in class(),
        e in enforcement(),
        energy in 0.3f64..0.95,
        crop in 0.3f64..0.95,
        de in 0.0f64..0.2,
        dc in 0.0f64..0.2,
    ) {
        let loose = window(khanewal(), c.clone(), energy, crop, 0.5, &e);
        let tight = window(khanewal(), c, (energy + de).min(1.0), (crop + dc).min(1.0), 0.5, &e);
        prop_assert!(tight.iter().all(|n| loose.contains(n)), "{:?} not within {:?}", tight, loose);
    }

    #[test]
    fn halving_the_step_keeps_every_feasible_point(
        c in class(),
        e in enforcement(),
        energy in 0.5f64..0.9,
        crop in 0.5f64..0.9,
    ) {
        let coarse = window(khanewal(), c.clone(), energy, crop, 1.0, &e);
        let fine = window(khanewal(), c, energy, crop, 0.5, &e);
        prop_assert!(coarse.iter().all(|n| fine.contains(n)), "{:?} lost from {:?}", coarse, fine);
    }
}

fn max_st(site: &SiteConfig, weather: &WeatherSeries, a_lm: f64) -> [f64; 12] {
    let cache = cache_for(weather, a_lm);
    max_st_hours_per_month(
        &cache,
        &uniform(ShadeClass::Tolerant),
        &Thresholds::default(),
        &n_grid(0.5, 14.0).unwrap(),
        &monthly_day_length(site, 2018),
    )
    .unwrap()
}

#[test]
fn mirrored_site_shifts_the_monthly_limits_by_half_a_year() {
    let north = SiteConfig::khanewal();
    let south = north.mirrored();
    let a = max_st(&north, &synth::clear_sky_series(&north, None), 2.0);
    let b = max_st(&south, &synth::clear_sky_series(&south, None), 2.0);
    for m in 0..12 {
        assert!(
            (a[m] - b[(m + 6) % 12]).abs() <= 2.0,
            "month {}: {} vs {}",
            m + 1,
            a[m],
            b[(m + 6) % 12]
        );
    }
}

#[test]
fn sydney_summer_limits_standard_tracking_to_about_seven_hours() {
    let site = synth::sydney();
    let limits = max_st(&site, &synth::clear_sky_series(&site, Some(7)), 2.0);
    let summer = [limits[10], limits[11], limits[0], limits[1]];
    let mean = summer.iter().sum::<f64>() / 4.0;
    assert!((mean - 7.0).abs() <= 1.5, "Nov-Feb limits {summer:?}");
}

#[test]
fn ten_percent_tariff_makes_high_value_tracking_viable_near_ten_hours() {
    let weather = synth::punjab_like_series(&SiteConfig::khanewal(), 7);
    let cache = cache_for(&weather, 3.0);
    let econ = EconParams {
        delta_fit: 10.0,
        ..EconParams::default()
    };
    let grid = n_grid(0.5, 14.0).unwrap();
    let rows = ct_economics(
        &cache,
        3.0,
        &builtin_plan("HV").unwrap(),
        &default_responses(),
        &econ,
        &grid,
    )
    .unwrap();
    let first = rows.iter().find(|e| e.econ.ppr <= 1.0).expect("viable somewhere").n;
    assert!((first - 10.0).abs() <= 1.0, "viable from {first} h");
    assert!(rows.iter().filter(|e| e.n >= first).all(|e| e.econ.ppr <= 1.0));

    let lv = ct_economics(
        &cache,
        3.0,
        &builtin_plan("LV").unwrap(),
        &default_responses(),
        &econ,
        &grid,
    )
    .unwrap();
    for (h, l) in rows.iter().zip(&lv) {
        assert!(h.econ.delta_fit_th < l.econ.delta_fit_th, "at {} h", h.n);
    }
}
