//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use agrivolt::cli::{execute, Cli, Verb};
use agrivolt::commands::table2_spec;
use agrivolt::ingest::Scenario;
use agrivolt::run;
use agrivolt_core::agronomy::ShadeClass;
use agrivolt_core::crops::builtin_plan;
use agrivolt_core::economics::{apply_fit, chi, delta_fit_threshold, evaluate, ppr, EconInputs, EconParams};
use agrivolt_core::optics::{beam_balance, ground_profile, ArrayLayout};
use agrivolt_core::planner::{ct_economics, feasible_st_window, CtCache, Enforcement, MonthlyResponses, Thresholds};
use agrivolt_core::simulate::y_pv;
use agrivolt_core::solar::{st_rotation, sun_position, RotationState, SunPosition, TrackingScheme};
use agrivolt_core::time::{CivilDateTime, MonthSet};
use agrivolt_core::weather::WeatherSeries;
use common::fixture::Fixture;
use common::ray::{ground_irradiance, Field};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RAYS: usize = 10_000;
const GROUND_POINTS: usize = 100;
/// ST hours over which the monotone trends are judged; 12 h is a full standard-tracking day.
const TREND_MAX_HOURS: f64 = 12.0;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

struct Context {
    fixture: Fixture,
    scenario: Scenario,
    weather: WeatherSeries,
}

impl Context {
    fn new() -> Self {
        let fixture = Fixture::new();
        let scenario = fixture.scenario();
        let weather = scenario.site.load_weather().expect("fixture weather");
        Self {
            fixture,
            scenario,
            weather,
        }
    }

    fn cache(&self, a_lm: f64) -> CtCache {
        let layout = self.scenario.layout_for(&TrackingScheme::st(), a_lm).unwrap();
        run::ct_cache(&self.weather, &layout, 90.0, GROUND_POINTS).unwrap()
    }

    fn annual_y_pv(&self, scheme: TrackingScheme, a_lm: f64) -> f64 {
        let layout = self.scenario.layout_for(&scheme, a_lm).unwrap();
        let series = run::simulate_year(&self.weather, &layout, &scheme, GROUND_POINTS).unwrap();
        y_pv(&series, MonthSet::ALL).unwrap()
    }
}

/// View-factor ground profiles against ray casting, and beam conservation.
fn geometry_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst_rms: f64 = 0.0;
    for _ in 0..20 {
        let chord = 2.0;
        let layout = ArrayLayout::new(
            rng.random_range(1.0..6.0) * chord,
            chord,
            rng.random_range(1.05..4.0),
            0.0,
        )
        .unwrap();
        let rotation = rng.random_range(-85.0..85.0);
        let sun = SunPosition::from_angles(rng.random_range(0.0..85.0), rng.random_range(0.0..360.0));
        let (dni, dhi) = (rng.random_range(50.0..1000.0), rng.random_range(10.0..300.0));
        let rot = RotationState::tracker(rotation);
        let profile = ground_profile(&layout, &rot, dni, dhi, &sun, GROUND_POINTS);
        let field = Field {
            pitch: layout.pitch,
            chord: layout.chord,
            height: layout.height,
            rotation,
        };
        let [e, _, z] = sun.direction();
        let oracle: Vec<f64> = profile
            .points
            .iter()
            .map(|&u| ground_irradiance(&field, u, dni, dhi, (e, z), RAYS))
            .collect();
        let mean = oracle.iter().sum::<f64>() / oracle.len() as f64;
        let mse = profile
            .irradiance
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            / oracle.len() as f64;
        worst_rms = worst_rms.max(mse.sqrt() / mean);
    }

    let mut worst_residual: f64 = 0.0;
    let site = agrivolt_core::weather::SiteConfig::khanewal();
    let layouts = [2.0, 4.0, 6.0].map(|a| ArrayLayout::with_a_lm(a).unwrap());
    let mut t = CivilDateTime::date(2018, 1, 1);
    for _ in 0..8760 {
        let sun = sun_position(&site, &t);
        if sun.is_up {
            let rot = st_rotation(&sun, 90.0).unwrap();
            for layout in &layouts {
                let b = beam_balance(layout, &rot, 800.0, &sun);
                if b.incident > 0.0 {
                    let residual = (b.incident - b.on_modules - b.on_ground).abs() / b.incident;
                    worst_residual = worst_residual.max(residual);
                }
            }
        }
        t = t.add_seconds(3600);
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        "geometry oracle",
        worst_rms < 0.01 && worst_residual < 1e-6 && secs < 60.0,
        format!(
            "worst profile RMS {:.3}% over 20 cases ({RAYS} rays), worst beam residual {worst_residual:.1e}, {secs:.1} s",
            worst_rms * 100.0
        ),
    )
}

/// Discount factor and tariff threshold closed forms against brute force; the ideal price.
fn economics_closed_forms() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut worst_chi: f64 = 0.0;
    let mut worst_fit: f64 = 0.0;
    for _ in 0..50 {
        let (d, r) = (rng.random_range(0.0..0.05), rng.random_range(0.01..0.12));
        let q = (1.0 - d) / (1.0 + r);
        let mut term = 1.0;
        let mut sum = 0.0;
        for _ in 0..10_000 {
            term *= q;
            sum += term;
        }
        let closed = chi(d, r, Some(10_000)).unwrap();
        worst_chi = worst_chi.max((closed - sum).abs() / sum);

        let p = rng.random_range(0.1..3.0);
        let pb0 = rng.random_range(0.0..0.09);
        let yy = rng.random_range(100.0..500.0);
        let y = rng.random_range(0.2..1.3);
        let c = chi(d, r, None).unwrap();
        let closed = delta_fit_threshold(p, pb0, 0.06, yy, y, c, 100.0);
        let ratio = |delta: f64| ppr(p, apply_fit(pb0, delta, 0.06, yy, y, c, 100.0));
        let (mut lo, mut hi) = (0.0, 1.0);
        while ratio(hi) > 1.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ratio(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        worst_fit = worst_fit.max((closed - hi).abs());
    }

    let ideal = [5.0, 10.0, 17.0, 30.0].iter().all(|&m_l| {
        let params = EconParams {
            kappa_m_fixed: 1.0,
            rho_l: 1.0,
            epsilon: 1.0,
            m_l,
            ..EconParams::default()
        };
        let inputs = EconInputs {
            a_lm: params.a_lm_gmpv,
            y_pv: 1.0,
            crop_revenue: 0.0,
            yy_ref: 300.0,
            tracked: false,
        };
        evaluate(&params, &inputs).unwrap().p_prime == 0.0
    });
    check(
        "economics closed forms",
        worst_chi < 1e-10 && worst_fit < 1e-9 && ideal,
        format!("chi rel err {worst_chi:.1e}, threshold abs err {worst_fit:.1e}, ideal price exactly 0: {ideal}"),
    )
}

fn scheme_orderings(cx: &Context) -> Check {
    let st = cx.annual_y_pv(TrackingScheme::st(), 2.0);
    let ns = cx.annual_y_pv(TrackingScheme::ns_fixed(), 2.0);
    let at = cx.annual_y_pv(TrackingScheme::at(), 2.0);
    let ew = cx.annual_y_pv(TrackingScheme::ew_vertical(), 2.0);
    check(
        "scheme orderings",
        st > ns && ns > at && ew < 1.0 && 1.0 < st,
        format!("Y_PV ST {st:.4}, N/S {ns:.4}, AT {at:.4}, E/W {ew:.4}"),
    )
}

/// Largest step against the expected direction (`sign` +1 rising, -1 falling), inside and beyond the trend domain.
fn worst_reversal(n: &[f64], v: &[f64], sign: f64) -> (f64, f64) {
    let mut inside: f64 = 0.0;
    let mut beyond: f64 = 0.0;
    for i in 1..v.len() {
        let reversal = -sign * (v[i] - v[i - 1]);
        if n[i] <= TREND_MAX_HOURS {
            inside = inside.max(reversal);
        } else {
            beyond = beyond.max(reversal);
        }
    }
    (inside, beyond)
}

fn saturation(cache: &CtCache) -> Check {
    let grid: Vec<f64> = (0..=28).map(|i| i as f64 * 0.5).collect();
    let y: Vec<f64> = grid
        .iter()
        .map(|&n| y_pv(&cache.series(n).unwrap(), MonthSet::ALL).unwrap())
        .collect();
    let at = |n: f64| y[(n * 2.0) as usize];
    let (inside, beyond) = worst_reversal(&grid, &y, 1.0);
    let (early, late) = (at(6.0) - at(4.0), at(12.0) - at(10.0));
    check(
        "saturation in ST hours",
        inside <= 0.0 && late < 0.5 * early,
        format!(
            "largest drop over 0-12 h {inside:.1e} (beyond 12 h {beyond:.1e}), gain 4->6 h {early:.4}, gain 10->12 h {late:.4}"
        ),
    )
}

fn lower_edge(cache: &CtCache, class: ShadeClass, crop: f64, enforcement: &Enforcement, cx: &Context) -> Option<f64> {
    let responses = cx.scenario.responses().unwrap();
    let monthly = MonthlyResponses::uniform(responses.get(&class).unwrap());
    let grid = cx.scenario.grid().unwrap();
    feasible_st_window(
        cache,
        &monthly,
        &Thresholds::new(0.8, crop).unwrap(),
        MonthSet::ALL,
        enforcement,
        &grid,
    )
    .unwrap()
    .bounds()
    .map(|b| b.0)
}

fn feasibility(cx: &Context, cache2: &CtCache) -> Check {
    let annual = Enforcement::whole_period();
    let cache6 = cx.cache(6.0);
    let s2 = lower_edge(cache2, ShadeClass::Sensitive, 0.8, &annual, cx);
    let l2 = lower_edge(cache2, ShadeClass::Loving, 0.8, &annual, cx);
    let s6 = lower_edge(&cache6, ShadeClass::Sensitive, 0.7, &annual, cx);
    let l2_seasonal = lower_edge(cache2, ShadeClass::Loving, 0.8, &Enforcement::punjab_seasons(), cx);
    let l2_monthly = lower_edge(cache2, ShadeClass::Loving, 0.8, &Enforcement::Monthly, cx);
    let near = |v: Option<f64>, target: f64| v.is_some_and(|n| (n - target).abs() <= 1.0);
    let show = |v: Option<f64>| v.map_or("none".to_string(), |n| format!("{n} h"));
    check(
        "feasibility windows",
        s2.is_none() && near(l2, 5.0) && near(s6, 6.0),
        format!(
            "annual enforcement: S at a_lm 2 from {}, L at a_lm 2 from {}, S at a_lm 6 (crop 0.7) from {}; L seasonal from {}, monthly from {}",
            show(s2),
            show(l2),
            show(s6),
            show(l2_seasonal),
            show(l2_monthly)
        ),
    )
}

type Key = (String, String, u64, u64);

fn table2_trends(cx: &Context) -> Check {
    let spec = table2_spec(&cx.scenario);
    let weather = BTreeMap::from([(cx.scenario.site_name().to_string(), cx.weather.clone())]);
    let responses = cx.scenario.responses().unwrap();
    let rows = run::run_sweep(
        &cx.scenario,
        &spec,
        &weather,
        &responses,
        &cx.scenario.econ_params().unwrap(),
    )
    .unwrap();
    let mut th: BTreeMap<Key, f64> = BTreeMap::new();
    for r in &rows {
        let c = &r.cell;
        let v = r.outcome.as_ref().map(|e| e.econ.delta_fit_th).unwrap_or(f64::NAN);
        th.insert(
            (c.crop_plan.clone(), c.scheme.label(), c.a_lm.to_bits(), c.m_l.to_bits()),
            v,
        );
    }
    let get = |plan: &str, scheme: &str, a: f64, m: f64| {
        th[&(plan.to_string(), scheme.to_string(), a.to_bits(), m.to_bits())]
    };
    let (mut hv_below, mut at_above, mut non_increasing) = (true, true, true);
    for scheme in ["N/S", "ST", "AT"] {
        for &a in &spec.a_lm {
            for &m in &spec.m_l {
                hv_below &= get("HV", scheme, a, m) < get("LV", scheme, a, m);
            }
            for plan in ["LV", "HV"] {
                non_increasing &= spec
                    .m_l
                    .windows(2)
                    .all(|w| get(plan, scheme, a, w[1]) <= get(plan, scheme, a, w[0]));
            }
        }
    }
    for &a in &spec.a_lm {
        for &m in &spec.m_l {
            for plan in ["LV", "HV"] {
                at_above &= get(plan, "AT", a, m) > 5.0 * get(plan, "ST", a, m);
            }
        }
    }
    let hv: Vec<f64> = spec.a_lm.iter().map(|&a| get("HV", "ST", a, 10.0)).collect();
    let lv: Vec<f64> = spec.a_lm.iter().map(|&a| get("LV", "ST", a, 10.0)).collect();
    let bands = hv.iter().all(|&v| (-10.0..=30.0).contains(&v)) && lv.iter().all(|&v| (0.0..=40.0).contains(&v));
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join("/");
    check(
        "tariff threshold trends",
        hv_below && at_above && non_increasing && bands,
        format!(
            "HV < LV: {hv_below}, AT > 5x ST: {at_above}, non-increasing in M_L: {non_increasing}; ST at M_L 10, a_lm 2/4/6: HV {} %, LV {} %",
            fmt(&hv),
            fmt(&lv)
        ),
    )
}

fn threshold_vs_hours(cx: &Context) -> Check {
    let cache = cx.cache(3.0);
    let responses = cx.scenario.responses().unwrap();
    let econ = EconParams {
        m_l: 10.0,
        ..cx.scenario.econ_params().unwrap()
    };
    let grid = cx.scenario.grid().unwrap();
    let mut detail = Vec::new();
    let mut pass = true;
    for name in ["HV", "LV"] {
        let plan = builtin_plan(name).unwrap();
        let th: Vec<f64> = ct_economics(&cache, 3.0, &plan, &responses, &econ, &grid)
            .unwrap()
            .iter()
            .map(|e| e.econ.delta_fit_th)
            .collect();
        let (inside, beyond) = worst_reversal(&grid, &th, -1.0);
        pass &= inside <= 0.0;
        let at12 = th[grid.iter().position(|&n| n == TREND_MAX_HOURS).unwrap()];
        detail.push(format!(
            "{name} {:.2} % at 0 h to {at12:.2} % at 12 h, largest rise over 0-12 h {inside:.1e} (beyond 12 h {beyond:.1e})",
            th[0]
        ));
    }
    check("tariff threshold vs ST hours", pass, detail.join("; "))
}

fn run_cli(verb: Verb, scenario: &Path, out: &Path, threads: usize) -> (f64, BTreeMap<String, Vec<u8>>) {
    let start = Instant::now();
    let cli = Cli {
        verb,
        scenario: scenario.to_path_buf(),
        out: out.to_path_buf(),
        dump_timesteps: false,
        threads: Some(threads),
    };
    let (_, written) = execute(&cli).expect("command succeeds");
    let files = written
        .iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(p).unwrap(),
            )
        })
        .collect();
    (start.elapsed().as_secs_f64(), files)
}

fn determinism(cx: &Context) -> Check {
    let scenario = cx.fixture.scenario_path();
    let mut same = true;
    let mut slowest_table2: f64 = 0.0;
    for verb in [Verb::Sweep, Verb::Table2] {
        let runs: Vec<(f64, BTreeMap<String, Vec<u8>>)> = [1, 1, 2, 4]
            .iter()
            .enumerate()
            .map(|(i, &threads)| {
                run_cli(
                    verb,
                    &scenario,
                    &cx.fixture.path().join(format!("{verb:?}-{i}")),
                    threads,
                )
            })
            .collect();
        same &= runs.iter().all(|r| r.1 == runs[0].1) && !runs[0].1.is_empty();
        if verb == Verb::Table2 {
            slowest_table2 = runs.iter().map(|r| r.0).fold(0.0, f64::max);
        }
    }
    check(
        "determinism",
        same && slowest_table2 < 600.0,
        format!("sweep and table2 identical over runs with 1, 1, 2, 4 threads: {same}; slowest table2 {slowest_table2:.1} s"),
    )
}

fn main() {
    let cx = Context::new();
    let cache2 = cx.cache(2.0);
    let checks = [
        geometry_oracle(),
        economics_closed_forms(),
        scheme_orderings(&cx),
        saturation(&cache2),
        feasibility(&cx, &cache2),
        table2_trends(&cx),
        threshold_vs_hours(&cx),
        determinism(&cx),
    ];
    for c in &checks {
        println!("{}: {} ({})", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
    }
    if checks.iter().any(|c| !c.pass) {
        std::process::exit(1);
    }
}
