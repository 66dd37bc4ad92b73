//! Hourly simulation of an array and its monthly aggregates.

use alloc::vec::Vec;

use crate::optics::{
    ground_profile_with_views, ground_sky_views, module_views, poa_with_ground, ArrayLayout, ModuleViews,
    DEFAULT_GROUND_POINTS, MIN_GROUND_POINTS,
};
use crate::solar::{hours_from_noon, rotation_for_sun, sun_position, RotationState, TrackingScheme};
use crate::time::{CivilDateTime, Month, MonthSet};
use crate::weather::{SiteConfig, WeatherRecord, WeatherSeries};
use crate::{Error, Result};

/// Nominal module efficiency used to express absolute yields.
pub const MODULE_EFFICIENCY: f64 = 0.20;

/// Land-to-module ratio of the ground-mounted reference array.
pub const REFERENCE_A_LM: f64 = 2.0;

/// Results for one hourly record. Irradiances are W/m², so an hour's value is also Wh/m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub timestamp: CivilDateTime,
    /// Module rotation in degrees, 0 when parked.
    pub rotation: f64,
    /// Hours between the record's midpoint and solar noon.
    pub offset_from_noon: f64,
    pub front: f64,
    pub rear: f64,
    /// Front plus weighted rear irradiance.
    pub module: f64,
    /// Pitch-averaged ground irradiance.
    pub ground: f64,
    /// Ground irradiance without modules.
    pub unshaded: f64,
}

impl StepOutput {
    pub fn is_daylight(&self) -> bool {
        self.unshaded > 0.0
    }

    pub fn shading_ratio(&self) -> Option<f64> {
        self.is_daylight().then(|| self.ground / self.unshaded)
    }

    pub fn month(&self) -> Month {
        self.timestamp.month()
    }
}

/// Evaluates records one at a time, reusing view factors while the rotation is unchanged.
#[derive(Debug, Clone)]
pub struct StepSimulator {
    site: SiteConfig,
    layout: ArrayLayout,
    scheme: TrackingScheme,
    ground_points: usize,
    cached: Option<(RotationState, Vec<f64>, ModuleViews)>,
}

impl StepSimulator {
    pub fn new(site: SiteConfig, layout: ArrayLayout, scheme: TrackingScheme, ground_points: usize) -> Result<Self> {
        site.validate()?;
        layout.validate()?;
        scheme.validate()?;
        Ok(Self {
            site,
            layout,
            scheme,
            ground_points: ground_points.max(MIN_GROUND_POINTS),
            cached: None,
        })
    }

    pub fn layout(&self) -> &ArrayLayout {
        &self.layout
    }

    pub fn scheme(&self) -> &TrackingScheme {
        &self.scheme
    }

    pub fn step(&mut self, record: &WeatherRecord) -> StepOutput {
        let t = record.midpoint();
        let sun = sun_position(&self.site, &t);
        let offset = hours_from_noon(&self.site, &t);
        let night = StepOutput {
            timestamp: record.timestamp,
            rotation: 0.0,
            offset_from_noon: offset,
            front: 0.0,
            rear: 0.0,
            module: 0.0,
            ground: 0.0,
            unshaded: 0.0,
        };
        let Ok(rotation) = rotation_for_sun(&self.scheme, &self.site, &sun, offset) else {
            return night;
        };
        let stale = !matches!(&self.cached, Some((r, _, _)) if *r == rotation);
        if stale {
            let sky = ground_sky_views(&self.layout, &rotation, self.ground_points);
            let views = module_views(&self.layout, &rotation);
            self.cached = Some((rotation, sky, views));
        }
        let (_, sky, views) = self.cached.as_ref().expect("cache filled");
        let profile = ground_profile_with_views(&self.layout, &rotation, record.dni, record.dhi, &sun, sky);
        let ground = profile.mean();
        let poa = poa_with_ground(
            &self.layout,
            &rotation,
            views,
            record.dni,
            record.dhi,
            self.site.albedo,
            &sun,
            ground,
        );
        StepOutput {
            rotation: rotation.rotation,
            front: poa.front,
            rear: poa.rear,
            module: poa.effective(&self.layout),
            ground,
            unshaded: profile.unshaded_ghi,
            ..night
        }
    }
}

/// Runs every record of `weather` through one array.
pub fn simulate_steps(
    weather: &WeatherSeries,
    layout: &ArrayLayout,
    scheme: &TrackingScheme,
    ground_points: usize,
) -> Result<Vec<StepOutput>> {
    let mut sim = StepSimulator::new(*weather.site(), *layout, *scheme, ground_points)?;
    Ok(weather.records().iter().map(|r| sim.step(r)).collect())
}

/// The ground-mounted reference: fixed equator-facing tilt at the site latitude, same module size.
pub fn reference_layout(layout: &ArrayLayout) -> Result<ArrayLayout> {
    ArrayLayout::new(REFERENCE_A_LM * layout.chord, layout.chord, layout.height, 0.0)
}

pub fn reference_scheme() -> TrackingScheme {
    TrackingScheme::ns_fixed()
}

/// Monthly sums and means over the steps of one calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MonthlyAggregate {
    /// Module energy per module area, Wh/m².
    pub module_energy: f64,
    /// Reference module energy per module area, Wh/m².
    pub reference_energy: f64,
    /// Ground energy per land area, Wh/m².
    pub ground_energy: f64,
    pub unshaded_energy: f64,
    /// Plain mean of the hourly shading ratios over daylight steps.
    pub mean_shading_ratio: f64,
    pub daylight_steps: usize,
    pub steps: usize,
}

impl MonthlyAggregate {
    pub fn y_pv(&self) -> Option<f64> {
        (self.reference_energy > 0.0).then(|| self.module_energy / self.reference_energy)
    }

    /// Irradiance-weighted fraction of light reaching the crops.
    pub fn par_fraction(&self) -> Option<f64> {
        (self.unshaded_energy > 0.0).then(|| self.ground_energy / self.unshaded_energy)
    }
}

/// A simulated year: per-step outputs for the array and its reference, plus monthly aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldSeries {
    steps: Vec<StepOutput>,
    reference: Vec<f64>,
    monthly: [MonthlyAggregate; 12],
}

impl YieldSeries {
    /// `reference` holds the reference array's module irradiance for the same records.
    pub fn from_steps(steps: Vec<StepOutput>, reference: Vec<f64>) -> Result<Self> {
        if steps.len() != reference.len() {
            return Err(Error::Invalid(alloc::format!(
                "{} array steps but {} reference steps",
                steps.len(),
                reference.len()
            )));
        }
        let mut monthly = [MonthlyAggregate::default(); 12];
        let mut ratio_sums = [0.0; 12];
        for (s, &r) in steps.iter().zip(&reference) {
            let m = &mut monthly[s.month().index()];
            m.steps += 1;
            m.module_energy += s.module;
            m.reference_energy += r;
            m.ground_energy += s.ground;
            m.unshaded_energy += s.unshaded;
            if let Some(ratio) = s.shading_ratio() {
                m.daylight_steps += 1;
                ratio_sums[s.month().index()] += ratio;
            }
        }
        for (m, sum) in monthly.iter_mut().zip(ratio_sums) {
            if m.daylight_steps > 0 {
                m.mean_shading_ratio = sum / m.daylight_steps as f64;
            }
        }
        Ok(Self {
            steps,
            reference,
            monthly,
        })
    }

    pub fn steps(&self) -> &[StepOutput] {
        &self.steps
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn monthly(&self) -> &[MonthlyAggregate; 12] {
        &self.monthly
    }

    pub fn month(&self, m: Month) -> &MonthlyAggregate {
        &self.monthly[m.index()]
    }

    pub fn months_present(&self) -> MonthSet {
        Month::all()
            .filter(|m| self.monthly[m.index()].steps > 0)
            .fold(MonthSet::EMPTY, MonthSet::with)
    }

    fn sum_over(&self, months: MonthSet, f: impl Fn(&MonthlyAggregate) -> f64) -> Result<f64> {
        if months.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        if !months.iter().all(|m| self.monthly[m.index()].steps > 0) {
            return Err(Error::Invalid(alloc::string::String::from(
                "requested months are not covered by the simulation",
            )));
        }
        Ok(months.iter().map(|m| f(&self.monthly[m.index()])).sum())
    }

    /// Module energy per module area over `months`, kWh/m².
    pub fn module_energy_kwh(&self, months: MonthSet) -> Result<f64> {
        Ok(self.sum_over(months, |m| m.module_energy)? / 1000.0)
    }

    /// Irradiance-weighted fraction of light reaching the ground over `months`.
    pub fn par_fraction(&self, months: MonthSet) -> Result<f64> {
        let unshaded = self.sum_over(months, |m| m.unshaded_energy)?;
        if unshaded <= 0.0 {
            return Err(Error::NoDaylight);
        }
        Ok(self.sum_over(months, |m| m.ground_energy)? / unshaded)
    }

    /// Annual electricity per module area of the reference array, kWh/m²/yr.
    pub fn reference_yield_kwh(&self) -> f64 {
        self.reference.iter().sum::<f64>() / 1000.0 * MODULE_EFFICIENCY
    }
}

/// Ratio of module energy per module area to the reference's over `months`.
pub fn y_pv(series: &YieldSeries, months: MonthSet) -> Result<f64> {
    let reference = series.sum_over(months, |m| m.reference_energy)?;
    if reference <= 0.0 {
        return Err(Error::NoDaylight);
    }
    Ok(series.sum_over(months, |m| m.module_energy)? / reference)
}

/// Simulates the array and its reference over a full year of weather.
pub fn simulate_year(weather: &WeatherSeries, layout: &ArrayLayout, scheme: &TrackingScheme) -> Result<YieldSeries> {
    weather.require_full_year()?;
    let steps = simulate_steps(weather, layout, scheme, DEFAULT_GROUND_POINTS)?;
    let reference = reference_module_irradiance(weather, layout)?;
    YieldSeries::from_steps(steps, reference)
}

/// Module irradiance of the reference array for every record.
pub fn reference_module_irradiance(weather: &WeatherSeries, layout: &ArrayLayout) -> Result<Vec<f64>> {
    let reference = reference_layout(layout)?;
    Ok(
        simulate_steps(weather, &reference, &reference_scheme(), MIN_GROUND_POINTS)?
            .into_iter()
            .map(|s| s.module)
            .collect(),
    )
}
