//! Parallel simulation and sweep execution. Work is split by record chunks or
//! sweep cells and reassembled in input order, so results do not depend on the
//! thread count.

use std::collections::BTreeMap;

use agrivolt_core::agronomy::ResponseSet;
use agrivolt_core::economics::EconParams;
use agrivolt_core::optics::{ArrayLayout, MIN_GROUND_POINTS};
use agrivolt_core::planner::{evaluate_cell, CtCache, SweepRow, SweepSpec};
use agrivolt_core::simulate::{reference_layout, reference_scheme, StepOutput, StepSimulator, YieldSeries};
use agrivolt_core::solar::TrackingScheme;
use agrivolt_core::weather::WeatherSeries;
use rayon::prelude::*;

use crate::error::{AppError, AppResult};
use crate::ingest::Scenario;

/// Records handled by one simulator; each chunk rebuilds its view-factor cache.
const CHUNK: usize = 24 * 14;

pub fn simulate_steps(
    weather: &WeatherSeries,
    layout: &ArrayLayout,
    scheme: &TrackingScheme,
    ground_points: usize,
) -> AppResult<Vec<StepOutput>> {
    let site = *weather.site();
    let chunks = weather
        .records()
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut sim = StepSimulator::new(site, *layout, *scheme, ground_points)?;
            Ok(chunk.iter().map(|r| sim.step(r)).collect::<Vec<_>>())
        })
        .collect::<AppResult<Vec<_>>>()?;
    Ok(chunks.concat())
}

/// Module irradiance of the ground-mounted reference for every record.
pub fn reference_irradiance(weather: &WeatherSeries, layout: &ArrayLayout) -> AppResult<Vec<f64>> {
    let reference = reference_layout(layout)?;
    Ok(
        simulate_steps(weather, &reference, &reference_scheme(), MIN_GROUND_POINTS)?
            .into_iter()
            .map(|s| s.module)
            .collect(),
    )
}

pub fn simulate_year(
    weather: &WeatherSeries,
    layout: &ArrayLayout,
    scheme: &TrackingScheme,
    ground_points: usize,
) -> AppResult<YieldSeries> {
    weather.require_full_year()?;
    let (steps, reference) = rayon::join(
        || simulate_steps(weather, layout, scheme, ground_points),
        || reference_irradiance(weather, layout),
    );
    Ok(YieldSeries::from_steps(steps?, reference?)?)
}

/// Standard- and anti-tracking runs from which every customized schedule is assembled.
pub fn ct_cache(weather: &WeatherSeries, layout: &ArrayLayout, limit: f64, ground_points: usize) -> AppResult<CtCache> {
    weather.require_full_year()?;
    let st = TrackingScheme::st().with_limit(limit);
    let at = TrackingScheme::at().with_limit(limit);
    let ((st, at), reference) = rayon::join(
        || {
            rayon::join(
                || simulate_steps(weather, layout, &st, ground_points),
                || simulate_steps(weather, layout, &at, ground_points),
            )
        },
        || reference_irradiance(weather, layout),
    );
    Ok(CtCache::new(st?, at?, reference?)?)
}

/// Identifies one simulated year shared by all sweep cells that differ only in economics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct SimKey {
    site: String,
    scheme: String,
    a_lm_bits: u64,
}

/// Runs every cell of `spec`. Each distinct (site, scheme, density) is simulated once;
/// per-cell failures are kept in the row and the sweep continues.
pub fn run_sweep(
    scenario: &Scenario,
    spec: &SweepSpec,
    weather: &BTreeMap<String, WeatherSeries>,
    responses: &ResponseSet,
    base: &EconParams,
) -> AppResult<Vec<SweepRow>> {
    spec.validate()?;
    let cells = spec.cells();
    let mut keys: Vec<(SimKey, TrackingScheme)> = cells
        .iter()
        .map(|c| {
            let key = SimKey {
                site: c.site.clone(),
                scheme: c.scheme.label(),
                a_lm_bits: c.a_lm.to_bits(),
            };
            (key, c.scheme)
        })
        .collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0));
    keys.dedup_by(|a, b| a.0 == b.0);

    let ground_points = scenario.layout.ground_points;
    let simulated: BTreeMap<SimKey, AppResult<YieldSeries>> = keys
        .into_par_iter()
        .map(|(key, scheme)| {
            let result = (|| {
                let w = weather
                    .get(&key.site)
                    .ok_or_else(|| AppError::config(format!("no weather loaded for site `{}`", key.site)))?;
                let layout = scenario.layout_for(&scheme, f64::from_bits(key.a_lm_bits))?;
                simulate_year(w, &layout, &scheme, ground_points)
            })();
            (key, result)
        })
        .collect();

    let mut plans = BTreeMap::new();
    for name in &spec.crop_plan {
        plans.insert(name.clone(), scenario.plan_named(name, responses)?);
    }

    Ok(cells
        .par_iter()
        .map(|cell| {
            let key = SimKey {
                site: cell.site.clone(),
                scheme: cell.scheme.label(),
                a_lm_bits: cell.a_lm.to_bits(),
            };
            match &simulated[&key] {
                Ok(series) => evaluate_cell(cell, series, &plans[&cell.crop_plan], responses, base),
                Err(e) => SweepRow {
                    cell: cell.clone(),
                    outcome: Err(agrivolt_core::Error::Invalid(e.to_string())),
                },
            }
        })
        .collect())
}

/// Runs `f` on a pool of `threads` workers, or the global pool when `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> AppResult<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(AppError::config("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| AppError::config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
