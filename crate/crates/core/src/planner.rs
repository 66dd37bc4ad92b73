//! Design-space search over customized tracking schedules and parameter sweeps.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::agronomy::{rotation_yield, y_crop, CropYieldResult, ResponseSet, ShadeResponse};
use crate::crops::CropPlan;
use crate::economics::{evaluate, EconInputs, EconParams, EconResult};
use crate::error::check_range;
use crate::optics::ArrayLayout;
use crate::simulate::{reference_module_irradiance, simulate_steps, y_pv, StepOutput, YieldSeries};
use crate::solar::{day_length, in_st_window, TrackingScheme, DEFAULT_ROTATION_LIMIT};
use crate::time::{days_in_month, CivilDateTime, Month, MonthSet, KHARIF, RABI};
use crate::weather::{SiteConfig, WeatherSeries};
use crate::{Error, Result};

pub const GRID_STEP: f64 = 0.5;
pub const GRID_MAX: f64 = 14.0;
pub const DEFAULT_CELL_CAP: usize = 10_000;

/// Daily standard-tracking hours `0, step, ..., max`.
pub fn n_grid(step: f64, max: f64) -> Result<Vec<f64>> {
    check_range("grid.step", step, step > 0.0, "> 0 h")?;
    check_range("grid.max", max, (0.0..=24.0).contains(&max), "[0, 24] h")?;
    let count = crate::math::floor(max / step + 1e-9) as usize;
    Ok((0..=count).map(|i| i as f64 * step).collect())
}

pub fn default_grid() -> Vec<f64> {
    n_grid(GRID_STEP, GRID_MAX).expect("valid default grid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Minimum relative energy yield.
    pub energy: f64,
    /// Minimum relative crop yield.
    pub crop: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { energy: 0.8, crop: 0.8 }
    }
}

impl Thresholds {
    pub fn new(energy: f64, crop: f64) -> Result<Self> {
        check_range("thresholds.energy", energy, (0.0..=1.0).contains(&energy), "[0, 1]")?;
        check_range("thresholds.crop", crop, (0.0..=1.0).contains(&crop), "[0, 1]")?;
        Ok(Self { energy, crop })
    }
}

/// How thresholds are checked across the evaluation period.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Enforcement {
    /// Every month on its own.
    #[default]
    Monthly,
    /// Aggregates over each season (months outside the evaluation period are dropped).
    Seasonal(Vec<MonthSet>),
}

impl Enforcement {
    /// Winter and summer cropping seasons of the Punjab.
    pub fn punjab_seasons() -> Self {
        Enforcement::Seasonal(alloc::vec![RABI, KHARIF])
    }

    /// One aggregate over the whole evaluation period.
    pub fn whole_period() -> Self {
        Enforcement::Seasonal(alloc::vec![MonthSet::ALL])
    }

    fn periods(&self, period: MonthSet) -> Vec<MonthSet> {
        match self {
            Enforcement::Monthly => period.iter().map(|m| MonthSet::EMPTY.with(m)).collect(),
            Enforcement::Seasonal(seasons) => seasons
                .iter()
                .map(|s| s.intersection(period))
                .filter(|s| !s.is_empty())
                .collect(),
        }
    }
}

/// The response curve governing each calendar month; `None` for fallow months.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyResponses([Option<ShadeResponse>; 12]);

impl MonthlyResponses {
    pub fn uniform(response: &ShadeResponse) -> Self {
        Self(core::array::from_fn(|_| Some(response.clone())))
    }

    pub fn for_plan(plan: &CropPlan, responses: &ResponseSet) -> Result<Self> {
        let mut out: [Option<ShadeResponse>; 12] = Default::default();
        for e in &plan.entries {
            let r = responses.get(&e.response)?;
            for m in e.months.iter() {
                out[m.index()] = Some(r.clone());
            }
        }
        Ok(Self(out))
    }

    pub fn get(&self, m: Month) -> Option<&ShadeResponse> {
        self.0[m.index()].as_ref()
    }
}

/// Threshold check over one month or season.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodCheck {
    pub months: MonthSet,
    pub y_pv: f64,
    /// Lowest crop yield among the crops of the period; `None` when all months are fallow.
    pub y_crop: Option<f64>,
    pub energy_ok: bool,
    pub crop_ok: bool,
}

fn check_period(
    series: &YieldSeries,
    months: MonthSet,
    responses: &MonthlyResponses,
    th: &Thresholds,
) -> Result<PeriodCheck> {
    let ypv = y_pv(series, months)?;
    // Group months by curve so a season spanning two crops checks each crop on its own light.
    let mut worst: Option<f64> = None;
    let mut done = MonthSet::EMPTY;
    for m in months.iter() {
        if done.contains(m) {
            continue;
        }
        let Some(resp) = responses.get(m) else {
            continue;
        };
        let group = months
            .iter()
            .filter(|k| responses.get(*k) == Some(resp))
            .fold(MonthSet::EMPTY, MonthSet::with);
        done = done.union(group);
        let y = y_crop(resp, series.par_fraction(group)?)?;
        worst = Some(worst.map_or(y, |w: f64| w.min(y)));
    }
    Ok(PeriodCheck {
        months,
        y_pv: ypv,
        y_crop: worst,
        energy_ok: ypv >= th.energy,
        crop_ok: worst.is_none_or(|y| y >= th.crop),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub n: f64,
    pub checks: Vec<PeriodCheck>,
}

impl GridPoint {
    pub fn energy_ok(&self) -> bool {
        self.checks.iter().all(|c| c.energy_ok)
    }

    pub fn crop_ok(&self) -> bool {
        self.checks.iter().all(|c| c.crop_ok)
    }

    pub fn passes(&self) -> bool {
        self.energy_ok() && self.crop_ok()
    }
}

/// Which requirement rules out every schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    Energy,
    Crop,
    Both,
    /// Each threshold is met somewhere on the grid, never together.
    Disjoint,
}

impl Binding {
    pub fn describe(&self) -> &'static str {
        match self {
            Binding::Energy => "energy threshold is not met at any ST hours",
            Binding::Crop => "crop threshold is not met at any ST hours",
            Binding::Both => "neither threshold is met at any ST hours",
            Binding::Disjoint => "energy and crop thresholds are met at different ST hours, never together",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub thresholds: Thresholds,
    pub points: Vec<GridPoint>,
}

impl FeasibilityReport {
    /// Grid values meeting both thresholds in every period.
    pub fn window(&self) -> Vec<f64> {
        self.points.iter().filter(|p| p.passes()).map(|p| p.n).collect()
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        let w = self.window();
        Some((*w.first()?, *w.last()?))
    }

    pub fn binding(&self) -> Option<Binding> {
        if self.points.iter().any(GridPoint::passes) {
            return None;
        }
        let energy = self.points.iter().any(GridPoint::energy_ok);
        let crop = self.points.iter().any(GridPoint::crop_ok);
        Some(match (energy, crop) {
            (false, true) => Binding::Energy,
            (true, false) => Binding::Crop,
            (false, false) => Binding::Both,
            (true, true) => Binding::Disjoint,
        })
    }
}

/// Standard- and anti-tracking results for every record, from which any
/// customized schedule is assembled without new geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct CtCache {
    pub st: Vec<StepOutput>,
    pub at: Vec<StepOutput>,
    pub reference: Vec<f64>,
}

impl CtCache {
    pub fn new(st: Vec<StepOutput>, at: Vec<StepOutput>, reference: Vec<f64>) -> Result<Self> {
        if st.len() != at.len() || st.len() != reference.len() {
            return Err(Error::Invalid("cached schedules differ in length".into()));
        }
        Ok(Self { st, at, reference })
    }

    pub fn simulate(weather: &WeatherSeries, layout: &ArrayLayout, limit: f64, ground_points: usize) -> Result<Self> {
        weather.require_full_year()?;
        let st = simulate_steps(weather, layout, &TrackingScheme::st().with_limit(limit), ground_points)?;
        let at = simulate_steps(weather, layout, &TrackingScheme::at().with_limit(limit), ground_points)?;
        Self::new(st, at, reference_module_irradiance(weather, layout)?)
    }

    pub fn simulate_default(weather: &WeatherSeries, layout: &ArrayLayout) -> Result<Self> {
        Self::simulate(
            weather,
            layout,
            DEFAULT_ROTATION_LIMIT,
            crate::optics::DEFAULT_GROUND_POINTS,
        )
    }

    /// Steps of the schedule with `n` hours of standard tracking around solar noon.
    pub fn steps(&self, n: f64) -> Vec<StepOutput> {
        self.st
            .iter()
            .zip(&self.at)
            .map(|(s, a)| if in_st_window(n, s.offset_from_noon) { *s } else { *a })
            .collect()
    }

    pub fn series(&self, n: f64) -> Result<YieldSeries> {
        YieldSeries::from_steps(self.steps(n), self.reference.clone())
    }
}

pub fn feasible_st_window(
    cache: &CtCache,
    responses: &MonthlyResponses,
    thresholds: &Thresholds,
    period: MonthSet,
    enforcement: &Enforcement,
    grid: &[f64],
) -> Result<FeasibilityReport> {
    if period.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    let periods = enforcement.periods(period);
    if periods.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    let points = grid
        .iter()
        .map(|&n| {
            let series = cache.series(n)?;
            let checks = periods
                .iter()
                .map(|&p| check_period(&series, p, responses, thresholds))
                .collect::<Result<Vec<_>>>()?;
            Ok(GridPoint { n, checks })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeasibilityReport {
        thresholds: *thresholds,
        points,
    })
}

/// Mean day length of each calendar month, hours.
pub fn monthly_day_length(site: &SiteConfig, year: i32) -> [f64; 12] {
    core::array::from_fn(|i| {
        let m = (i + 1) as u8;
        let days = days_in_month(year, m);
        let total: f64 = (1..=days)
            .map(|d| day_length(site, &CivilDateTime::date(year, m, d)))
            .sum();
        total / f64::from(days)
    })
}

/// Largest grid value meeting both thresholds in each month (0 if none), capped at the day length.
pub fn max_st_hours_per_month(
    cache: &CtCache,
    responses: &MonthlyResponses,
    thresholds: &Thresholds,
    grid: &[f64],
    day_lengths: &[f64; 12],
) -> Result<[f64; 12]> {
    let report = feasible_st_window(cache, responses, thresholds, MonthSet::ALL, &Enforcement::Monthly, grid)?;
    let mut out = [0.0; 12];
    for m in Month::all() {
        let best = report
            .points
            .iter()
            .filter(|p| p.checks[m.index()].energy_ok && p.checks[m.index()].crop_ok)
            .map(|p| p.n)
            .fold(None, |acc: Option<f64>, n| Some(acc.map_or(n, |a| a.max(n))));
        out[m.index()] = best.map_or(0.0, |n| n.min(day_lengths[m.index()]));
    }
    Ok(out)
}

/// Economics of one schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEconomics {
    pub n: f64,
    pub y_pv: f64,
    pub crop: CropYieldResult,
    pub econ: EconResult,
}

/// Reference electricity yield from cached reference irradiance, kWh/m²/yr.
pub fn reference_yield(reference: &[f64]) -> f64 {
    reference.iter().sum::<f64>() / 1000.0 * crate::simulate::MODULE_EFFICIENCY
}

pub fn schedule_economics(
    series: &YieldSeries,
    n: f64,
    a_lm: f64,
    tracked: bool,
    plan: &CropPlan,
    responses: &ResponseSet,
    econ: &EconParams,
) -> Result<ScheduleEconomics> {
    let ypv = y_pv(series, MonthSet::ALL)?;
    let crop = rotation_yield(plan, series, responses)?;
    let result = evaluate(
        econ,
        &EconInputs {
            a_lm,
            y_pv: ypv,
            crop_revenue: crop.revenue_realized,
            yy_ref: reference_yield(series.reference()),
            tracked,
        },
    )?;
    Ok(ScheduleEconomics {
        n,
        y_pv: ypv,
        crop,
        econ: result,
    })
}

/// Economics for every grid value of a customized schedule.
pub fn ct_economics(
    cache: &CtCache,
    a_lm: f64,
    plan: &CropPlan,
    responses: &ResponseSet,
    econ: &EconParams,
    grid: &[f64],
) -> Result<Vec<ScheduleEconomics>> {
    grid.iter()
        .map(|&n| schedule_economics(&cache.series(n)?, n, a_lm, true, plan, responses, econ))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Optimum {
    Optimal(ScheduleEconomics),
    Infeasible(Binding),
}

/// Lowest price-performance ratio within the feasible window, ties to more ST hours.
pub fn optimize_ct(report: &FeasibilityReport, economics: &[ScheduleEconomics]) -> Optimum {
    if let Some(binding) = report.binding() {
        return Optimum::Infeasible(binding);
    }
    let window = report.window();
    let best =
        economics
            .iter()
            .filter(|e| window.contains(&e.n))
            .fold(None::<&ScheduleEconomics>, |best, e| match best {
                Some(b) if e.econ.ppr > b.econ.ppr => Some(b),
                Some(b) if e.econ.ppr == b.econ.ppr && e.n < b.n => Some(b),
                _ => Some(e),
            });
    match best {
        Some(e) => Optimum::Optimal(e.clone()),
        None => Optimum::Infeasible(Binding::Disjoint),
    }
}

/// Axis values of a sweep. Cells are enumerated with `site` outermost and `delta_fit` innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub site: Vec<String>,
    pub scheme: Vec<TrackingScheme>,
    pub crop_plan: Vec<String>,
    pub a_lm: Vec<f64>,
    pub m_l: Vec<f64>,
    pub delta_fit: Vec<f64>,
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub index: usize,
    pub site: String,
    pub scheme: TrackingScheme,
    pub crop_plan: String,
    pub a_lm: f64,
    pub m_l: f64,
    pub delta_fit: f64,
}

impl SweepSpec {
    pub fn cell_count(&self) -> usize {
        [
            self.site.len(),
            self.scheme.len(),
            self.crop_plan.len(),
            self.a_lm.len(),
            self.m_l.len(),
            self.delta_fit.len(),
        ]
        .iter()
        .product()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, len) in [
            ("site", self.site.len()),
            ("scheme", self.scheme.len()),
            ("crop_plan", self.crop_plan.len()),
            ("a_lm", self.a_lm.len()),
            ("m_l", self.m_l.len()),
            ("delta_fit", self.delta_fit.len()),
        ] {
            if len == 0 {
                return Err(Error::Invalid(format!("sweep axis {name} has no values")));
            }
        }
        let n = self.cell_count();
        if n > self.cap {
            return Err(Error::Invalid(format!(
                "sweep has {n} cells, above the cap of {}",
                self.cap
            )));
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<SweepCell> {
        let mut out = Vec::with_capacity(self.cell_count());
        for site in &self.site {
            for scheme in &self.scheme {
                for plan in &self.crop_plan {
                    for &a_lm in &self.a_lm {
                        for &m_l in &self.m_l {
                            for &delta_fit in &self.delta_fit {
                                out.push(SweepCell {
                                    index: out.len(),
                                    site: site.clone(),
                                    scheme: *scheme,
                                    crop_plan: plan.clone(),
                                    a_lm,
                                    m_l,
                                    delta_fit,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// The standard threshold grid: soft-cost ratios 10..30, three densities, three schemes, both farms.
    pub fn table2(site: &str) -> Self {
        Self {
            site: alloc::vec![String::from(site)],
            scheme: alloc::vec![TrackingScheme::ns_fixed(), TrackingScheme::st(), TrackingScheme::at()],
            crop_plan: alloc::vec![String::from("LV"), String::from("HV")],
            a_lm: alloc::vec![2.0, 4.0, 6.0],
            m_l: alloc::vec![10.0, 15.0, 20.0, 25.0, 30.0],
            delta_fit: alloc::vec![0.0],
            cap: DEFAULT_CELL_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub cell: SweepCell,
    pub outcome: core::result::Result<ScheduleEconomics, Error>,
}

/// Evaluates one cell given the simulated year for its site, scheme and density.
pub fn evaluate_cell(
    cell: &SweepCell,
    series: &YieldSeries,
    plan: &CropPlan,
    responses: &ResponseSet,
    base: &EconParams,
) -> SweepRow {
    let econ = EconParams {
        m_l: cell.m_l,
        delta_fit: cell.delta_fit,
        ..*base
    };
    let n = match cell.scheme.mode {
        crate::solar::TrackingMode::Ct { st_hours } => st_hours,
        crate::solar::TrackingMode::St => 24.0,
        _ => 0.0,
    };
    SweepRow {
        cell: cell.clone(),
        outcome: schedule_economics(series, n, cell.a_lm, cell.scheme.is_tracked(), plan, responses, &econ),
    }
}
