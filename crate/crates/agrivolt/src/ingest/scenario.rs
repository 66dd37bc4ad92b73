//! Scenario files: TOML with `site`, `layout`, `scheme`, `crops`, `econ`,
//! `thresholds` and optional `sweep` and `sites` sections.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use agrivolt_core::agronomy::{default_responses, ResponseSet, ShadeClass};
use agrivolt_core::crops::{builtin_plan, CropEntry, CropPlan};
use agrivolt_core::economics::{EconParams, PremiumMode};
use agrivolt_core::optics::{ArrayLayout, DEFAULT_CHORD, DEFAULT_GROUND_POINTS, DEFAULT_HEIGHT};
use agrivolt_core::planner::{n_grid, Enforcement, SweepSpec, Thresholds, DEFAULT_CELL_CAP, GRID_MAX, GRID_STEP};
use agrivolt_core::solar::{TrackingMode, TrackingScheme, DEFAULT_ROTATION_LIMIT};
use agrivolt_core::time::MonthSet;
use agrivolt_core::weather::{SiteConfig, WeatherSeries, DEFAULT_ALBEDO};
use serde::{Deserialize, Serialize};

use super::weather::{load_weather, WeatherFormat};
use crate::error::{AppError, AppResult};

/// Name given to the `[site]` section when it sets none.
pub const DEFAULT_SITE_NAME: &str = "site";
pub const DEFAULT_PLAN: &str = "HV";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub site: SiteSection,
    #[serde(default)]
    pub layout: LayoutSection,
    #[serde(default)]
    pub scheme: SchemeSection,
    #[serde(default)]
    pub crops: CropsSection,
    #[serde(default)]
    pub econ: EconSection,
    #[serde(default)]
    pub thresholds: ThresholdSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    /// Further sites addressable by name from `[sweep]`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sites: BTreeMap<String, SiteSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub latitude: f64,
    pub longitude: f64,
    pub utc_offset: f64,
    #[serde(default = "default_albedo")]
    pub albedo: f64,
    /// Relative paths are resolved against the scenario file's directory.
    pub weather: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<WeatherFormat>,
}

fn default_albedo() -> f64 {
    DEFAULT_ALBEDO
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSection {
    pub a_lm: f64,
    pub chord: f64,
    pub height: f64,
    /// Rear-side weight; defaults to 1 for vertical E/W modules and 0 otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bifaciality: Option<f64>,
    pub ground_points: usize,
}

impl Default for LayoutSection {
    fn default() -> Self {
        Self {
            a_lm: 2.0,
            chord: DEFAULT_CHORD,
            height: DEFAULT_HEIGHT,
            bifaciality: None,
            ground_points: DEFAULT_GROUND_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeMode {
    St,
    At,
    Ct,
    NsFixed,
    EwVertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeSection {
    pub mode: SchemeMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub st_hours: Option<f64>,
    pub rotation_limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_tilt: Option<f64>,
    /// Spacing of the ST-hour grid searched by the planner.
    pub grid_step: f64,
    pub grid_max: f64,
}

impl Default for SchemeSection {
    fn default() -> Self {
        Self {
            mode: SchemeMode::St,
            st_hours: None,
            rotation_limit: DEFAULT_ROTATION_LIMIT,
            fixed_tilt: None,
            grid_step: GRID_STEP,
            grid_max: GRID_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CropsSection {
    /// A built-in plan (`LV`, `HV`), or the name of the plan given by `entries`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<String>,
    /// Shade class applied to every entry, overriding the plan's own.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    /// CSV of `class,par,yield` control points, merged over the built-in curves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curves: Option<PathBuf>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<EntrySection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fallow: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySection {
    pub name: String,
    pub months: Vec<u8>,
    /// $/ha for the season under full sun.
    pub revenue: f64,
    #[serde(default = "default_class")]
    pub class: String,
}

fn default_class() -> String {
    "T".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PremiumSection {
    Multiplicative,
    Additive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EconSection {
    pub kappa_m: f64,
    pub tracker_premium: f64,
    pub premium_mode: PremiumSection,
    pub rho_l: f64,
    pub epsilon: f64,
    #[serde(rename = "M_L", alias = "m_l")]
    pub m_l: f64,
    pub a_lm_gmpv: f64,
    pub degradation: f64,
    pub discount_rate: f64,
    /// Years; omitted for an infinite horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lifetime_years: Option<u32>,
    pub c_m_gmpv: f64,
    pub fit_baseline: f64,
    /// Percent of the baseline tariff.
    pub delta_fit: f64,
}

impl Default for EconSection {
    fn default() -> Self {
        let p = EconParams::default();
        Self {
            kappa_m: p.kappa_m_fixed,
            tracker_premium: p.tracker_premium,
            premium_mode: PremiumSection::Multiplicative,
            rho_l: p.rho_l,
            epsilon: p.epsilon,
            m_l: p.m_l,
            a_lm_gmpv: p.a_lm_gmpv,
            degradation: p.d,
            discount_rate: p.r,
            lifetime_years: p.horizon,
            c_m_gmpv: p.c_m_gmpv,
            fit_baseline: p.fit_baseline,
            delta_fit: p.delta_fit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnforcementMode {
    /// Every month separately.
    Monthly,
    /// Rabi (Nov-Apr) and Kharif (May-Oct) aggregates.
    Seasonal,
    /// One aggregate over the evaluation period.
    Annual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSection {
    pub theta_energy: f64,
    pub theta_crop: f64,
    pub enforcement: EnforcementMode,
    /// Evaluation period; all months when empty.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub months: Vec<u8>,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        let t = Thresholds::default();
        Self {
            theta_energy: t.energy,
            theta_crop: t.crop,
            enforcement: EnforcementMode::Monthly,
            months: Vec::new(),
        }
    }
}

/// Sweep axes; each omitted axis holds the scenario's own value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub site: Vec<String>,
    /// Labels such as `ST`, `AT`, `CT6`, `N/S`, `E/W`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub scheme: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub crop_plan: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub a_lm: Vec<f64>,
    #[serde(rename = "M_L", alias = "m_l", skip_serializing_if = "Vec::is_empty")]
    pub m_l: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub delta_fit: Vec<f64>,
    pub cap: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            site: Vec::new(),
            scheme: Vec::new(),
            crop_plan: Vec::new(),
            a_lm: Vec::new(),
            m_l: Vec::new(),
            delta_fit: Vec::new(),
            cap: DEFAULT_CELL_CAP,
        }
    }
}

/// Parses scheme labels as printed in tables: `ST`, `AT`, `CT<n>`, `N/S`, `N/S<tilt>`, `E/W`.
pub fn parse_scheme_label(label: &str) -> AppResult<TrackingScheme> {
    let l = label.trim().to_ascii_uppercase();
    let number = |s: &str| {
        s.trim_start_matches(':')
            .parse::<f64>()
            .map_err(|_| AppError::config(format!("unknown scheme `{label}`")))
    };
    let scheme = match l.as_str() {
        "ST" => TrackingScheme::st(),
        "AT" => TrackingScheme::at(),
        "N/S" | "NS" | "NS_FIXED" => TrackingScheme::ns_fixed(),
        "E/W" | "EW" | "EW_VERTICAL" => TrackingScheme::ew_vertical(),
        _ if l.starts_with("CT") => TrackingScheme::ct(number(&l[2..])?),
        _ if l.starts_with("N/S") => TrackingScheme::new(TrackingMode::NsFixed {
            tilt: Some(number(&l[3..])?),
        }),
        _ => return Err(AppError::config(format!("unknown scheme `{label}`"))),
    };
    scheme.validate()?;
    Ok(scheme)
}

fn months(field: &str, list: &[u8]) -> AppResult<MonthSet> {
    MonthSet::from_months(list).map_err(|e| AppError::config(format!("{field}: {e}")))
}

impl SiteSection {
    pub fn site_config(&self) -> AppResult<SiteConfig> {
        SiteConfig::new(self.latitude, self.longitude, self.utc_offset, self.albedo).map_err(AppError::from)
    }

    pub fn weather_format(&self) -> WeatherFormat {
        self.format.unwrap_or_else(|| WeatherFormat::from_path(&self.weather))
    }

    /// Loads and validates a full year of weather for this site.
    pub fn load_weather(&self) -> AppResult<WeatherSeries> {
        let series = load_weather(&self.weather, self.weather_format(), self.site_config()?)?;
        if !series.is_full_year() {
            return Err(AppError::data(format!(
                "{}: {} records covering {} months; a full year of hourly data is required",
                self.weather.display(),
                series.len(),
                series.months_covered().len()
            )));
        }
        Ok(series)
    }
}

impl Scenario {
    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::config(format!("cannot read scenario {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml(&text, base)
    }

    /// Parses and validates a scenario, resolving relative paths against `base`.
    pub fn from_toml(text: &str, base: &Path) -> AppResult<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| AppError::config(format!("scenario: {e}")))?;
        let mut scenario: Scenario = serde_path_to_error::deserialize(de)
            .map_err(|e| AppError::config(format!("scenario key `{}`: {}", e.path(), e.inner().message())))?;
        scenario.resolve_paths(base);
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario fields are all representable in TOML")
    }

    fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut self.site.weather);
        for s in self.sites.values_mut() {
            resolve(&mut s.weather);
        }
        if let Some(c) = self.crops.curves.as_mut() {
            resolve(c);
        }
    }

    pub fn validate(&self) -> AppResult<()> {
        self.site.site_config()?;
        for (name, s) in &self.sites {
            if s.name.as_ref().is_some_and(|n| n != name) {
                return Err(AppError::config(format!("sites.{name}.name differs from its key")));
            }
            s.site_config()
                .map_err(|e| AppError::config(format!("sites.{name}: {e}")))?;
        }
        if self.sites.contains_key(self.site_name()) {
            return Err(AppError::config(format!(
                "sites.{} repeats the primary site",
                self.site_name()
            )));
        }
        self.layout()?;
        self.tracking_scheme()?;
        self.grid()?;
        self.econ_params()?;
        self.thresholds()?;
        self.period()?;
        self.crop_plan_shape()?;
        if self.sweep.is_some() {
            self.sweep_spec()?;
        }
        Ok(())
    }

    pub fn site_name(&self) -> &str {
        self.site.name.as_deref().unwrap_or(DEFAULT_SITE_NAME)
    }

    /// The named site: the primary `[site]` or an entry of `[sites]`.
    pub fn site_named(&self, name: &str) -> AppResult<&SiteSection> {
        if name == self.site_name() {
            return Ok(&self.site);
        }
        self.sites
            .get(name)
            .ok_or_else(|| AppError::config(format!("sweep site `{name}` is not defined under [sites]")))
    }

    pub fn layout(&self) -> AppResult<ArrayLayout> {
        self.layout_for(&self.tracking_scheme()?, self.layout.a_lm)
    }

    /// Layout at density `a_lm` with the rear-side weight that suits `scheme`.
    pub fn layout_for(&self, scheme: &TrackingScheme, a_lm: f64) -> AppResult<ArrayLayout> {
        let l = &self.layout;
        if l.ground_points == 0 {
            return Err(AppError::config("layout.ground_points must be positive"));
        }
        let rear = l.bifaciality.unwrap_or(match scheme.mode {
            TrackingMode::EwVertical => 1.0,
            _ => 0.0,
        });
        Ok(ArrayLayout::new(a_lm * l.chord, l.chord, l.height, rear)?)
    }

    pub fn tracking_scheme(&self) -> AppResult<TrackingScheme> {
        let s = &self.scheme;
        if s.st_hours.is_some() != (s.mode == SchemeMode::Ct) {
            return Err(AppError::config(
                "scheme.st_hours is required for mode `ct` and only allowed there",
            ));
        }
        if s.fixed_tilt.is_some() && s.mode != SchemeMode::NsFixed {
            return Err(AppError::config(
                "scheme.fixed_tilt is only allowed for mode `ns_fixed`",
            ));
        }
        let mode = match s.mode {
            SchemeMode::St => TrackingMode::St,
            SchemeMode::At => TrackingMode::At,
            SchemeMode::Ct => TrackingMode::Ct {
                st_hours: s.st_hours.unwrap_or_default(),
            },
            SchemeMode::NsFixed => TrackingMode::NsFixed { tilt: s.fixed_tilt },
            SchemeMode::EwVertical => TrackingMode::EwVertical,
        };
        let scheme = TrackingScheme::new(mode).with_limit(s.rotation_limit);
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn grid(&self) -> AppResult<Vec<f64>> {
        Ok(n_grid(self.scheme.grid_step, self.scheme.grid_max)?)
    }

    pub fn econ_params(&self) -> AppResult<EconParams> {
        let e = &self.econ;
        let p = EconParams {
            kappa_m_fixed: e.kappa_m,
            tracker_premium: e.tracker_premium,
            premium_mode: match e.premium_mode {
                PremiumSection::Multiplicative => PremiumMode::Multiplicative,
                PremiumSection::Additive => PremiumMode::Additive,
            },
            rho_l: e.rho_l,
            epsilon: e.epsilon,
            m_l: e.m_l,
            a_lm_gmpv: e.a_lm_gmpv,
            d: e.degradation,
            r: e.discount_rate,
            horizon: e.lifetime_years,
            c_m_gmpv: e.c_m_gmpv,
            fit_baseline: e.fit_baseline,
            delta_fit: e.delta_fit,
        };
        p.validate()?;
        p.chi()?;
        Ok(p)
    }

    /// Both thresholds must lie in `(0, 1]`.
    pub fn thresholds(&self) -> AppResult<Thresholds> {
        let t = &self.thresholds;
        for (name, v) in [
            ("thresholds.theta_energy", t.theta_energy),
            ("thresholds.theta_crop", t.theta_crop),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(AppError::config(format!("{name} = {v} is out of range: (0, 1]")));
            }
        }
        Ok(Thresholds::new(t.theta_energy, t.theta_crop)?)
    }

    pub fn period(&self) -> AppResult<MonthSet> {
        if self.thresholds.months.is_empty() {
            Ok(MonthSet::ALL)
        } else {
            months("thresholds.months", &self.thresholds.months)
        }
    }

    pub fn enforcement(&self) -> Enforcement {
        match self.thresholds.enforcement {
            EnforcementMode::Monthly => Enforcement::Monthly,
            EnforcementMode::Seasonal => Enforcement::punjab_seasons(),
            EnforcementMode::Annual => Enforcement::whole_period(),
        }
    }

    /// Built-in curves with any curve file merged over them.
    pub fn responses(&self) -> AppResult<ResponseSet> {
        match &self.crops.curves {
            Some(path) => Ok(default_responses().merged(super::load_curves(path)?)),
            None => Ok(default_responses()),
        }
    }

    pub fn plan_name(&self) -> String {
        self.crops.plan.clone().unwrap_or_else(|| {
            if self.crops.entries.is_empty() {
                DEFAULT_PLAN.into()
            } else {
                "custom".into()
            }
        })
    }

    fn crop_plan_shape(&self) -> AppResult<CropPlan> {
        let c = &self.crops;
        let plan = if c.entries.is_empty() {
            if !c.fallow.is_empty() {
                return Err(AppError::config("crops.fallow needs crops.entries"));
            }
            let name = self.plan_name();
            builtin_plan(&name)
                .ok_or_else(|| AppError::config(format!("crops.plan `{name}` is not a built-in plan")))?
        } else {
            let entries = c
                .entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let m = months(&format!("crops.entries[{i}].months"), &e.months)?;
                    CropEntry::new(&e.name, m, e.revenue, ShadeClass::parse(&e.class))
                        .map_err(|err| AppError::config(format!("crops.entries[{i}]: {err}")))
                })
                .collect::<AppResult<Vec<_>>>()?;
            let fallow = if c.fallow.is_empty() {
                MonthSet::EMPTY
            } else {
                months("crops.fallow", &c.fallow)?
            };
            CropPlan::new(&self.plan_name(), entries, fallow)?
        };
        Ok(match &c.class {
            Some(class) => plan.with_response(ShadeClass::parse(class)),
            None => plan,
        })
    }

    /// The crop plan, checked against the available response curves.
    pub fn crop_plan(&self, responses: &ResponseSet) -> AppResult<CropPlan> {
        let plan = self.crop_plan_shape()?;
        for e in &plan.entries {
            responses.get(&e.response)?;
        }
        Ok(plan)
    }

    /// Plan by name for sweeps: the scenario's own plan, or a built-in one with the class override.
    pub fn plan_named(&self, name: &str, responses: &ResponseSet) -> AppResult<CropPlan> {
        if name.eq_ignore_ascii_case(&self.plan_name()) {
            return self.crop_plan(responses);
        }
        let plan =
            builtin_plan(name).ok_or_else(|| AppError::config(format!("sweep crop_plan `{name}` is unknown")))?;
        let plan = match &self.crops.class {
            Some(class) => plan.with_response(ShadeClass::parse(class)),
            None => plan,
        };
        for e in &plan.entries {
            responses.get(&e.response)?;
        }
        Ok(plan)
    }

    /// The `[sweep]` grid, with omitted axes set to the scenario's own values.
    pub fn sweep_spec(&self) -> AppResult<SweepSpec> {
        let s = self.sweep.clone().unwrap_or_default();
        let or = |v: Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v };
        let spec = SweepSpec {
            site: if s.site.is_empty() {
                vec![self.site_name().to_string()]
            } else {
                s.site
            },
            scheme: if s.scheme.is_empty() {
                vec![self.tracking_scheme()?]
            } else {
                s.scheme
                    .iter()
                    .map(|l| Ok(parse_scheme_label(l)?.with_limit(self.scheme.rotation_limit)))
                    .collect::<AppResult<_>>()?
            },
            crop_plan: if s.crop_plan.is_empty() {
                vec![self.plan_name()]
            } else {
                s.crop_plan
            },
            a_lm: or(s.a_lm, self.layout.a_lm),
            m_l: or(s.m_l, self.econ.m_l),
            delta_fit: or(s.delta_fit, self.econ.delta_fit),
            cap: s.cap,
        };
        spec.validate()?;
        for site in &spec.site {
            self.site_named(site)?;
        }
        for scheme in &spec.scheme {
            for &a in &spec.a_lm {
                self.layout_for(scheme, a)?;
            }
        }
        Ok(spec)
    }
}
