//! Crop shade response and rotation revenue.
//!
//! A response curve maps the fraction of full-sun light reaching a crop to its
//! biomass yield relative to full sun. Curves are quadratic in the light
//! reduction `x = 1 - par`: `f(par) = 1 + a x + b x^2`, which pins `f(1) = 1`.
//! The coefficients are least-squares fits to tabulated control points.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::crops::{CropEntry, CropPlan};
use crate::simulate::YieldSeries;
use crate::time::{Month, MonthSet};
use crate::{Error, Result};

/// Default control points, `class,par,yield`.
pub const DEFAULT_CURVES_CSV: &str = include_str!("../data/shade_response.csv");

/// Minimum control points per fitted curve.
pub const MIN_CONTROL_POINTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShadeClass {
    Sensitive,
    Tolerant,
    Loving,
    Custom(String),
}

impl ShadeClass {
    pub fn parse(s: &str) -> Self {
        match s.trim() {
            "S" | "s" => ShadeClass::Sensitive,
            "T" | "t" => ShadeClass::Tolerant,
            "L" | "l" => ShadeClass::Loving,
            other => ShadeClass::Custom(other.to_string()),
        }
    }

    pub fn code(&self) -> &str {
        match self {
            ShadeClass::Sensitive => "S",
            ShadeClass::Tolerant => "T",
            ShadeClass::Loving => "L",
            ShadeClass::Custom(name) => name,
        }
    }

    /// Shade-sensitive and shade-tolerant curves must not rise as light falls.
    pub fn requires_monotone(&self) -> bool {
        matches!(self, ShadeClass::Sensitive | ShadeClass::Tolerant)
    }

    pub fn builtin() -> [ShadeClass; 3] {
        [ShadeClass::Sensitive, ShadeClass::Tolerant, ShadeClass::Loving]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadeResponse {
    pub class: ShadeClass,
    /// Linear coefficient in the light reduction.
    pub a: f64,
    /// Quadratic coefficient in the light reduction.
    pub b: f64,
}

impl ShadeResponse {
    pub fn new(class: ShadeClass, a: f64, b: f64) -> Result<Self> {
        let r = Self { class, a, b };
        r.validate()?;
        Ok(r)
    }

    /// Least-squares fit through `(par, yield)` control points.
    pub fn fit(class: ShadeClass, points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < MIN_CONTROL_POINTS {
            return Err(Error::Invalid(format!(
                "curve {} has {} control points, at least {MIN_CONTROL_POINTS} needed",
                class.code(),
                points.len()
            )));
        }
        let (mut s2, mut s3, mut s4, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(par, y) in points {
            if !(0.0..=1.0).contains(&par) || !(y >= 0.0 && y.is_finite()) {
                return Err(Error::Invalid(format!(
                    "curve {} control point ({par}, {y}) is outside par in [0, 1], yield >= 0",
                    class.code()
                )));
            }
            let x = 1.0 - par;
            let d = y - 1.0;
            s2 += x * x;
            s3 += x * x * x;
            s4 += x * x * x * x;
            t1 += x * d;
            t2 += x * x * d;
        }
        let det = s2 * s4 - s3 * s3;
        if det.abs() < 1e-12 {
            return Err(Error::Invalid(format!(
                "curve {} control points need at least two distinct par values below 1",
                class.code()
            )));
        }
        let a = (t1 * s4 - t2 * s3) / det;
        let b = (s2 * t2 - s3 * t1) / det;
        Self::new(class, a, b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::Invalid(format!(
                "curve {} has non-finite coefficients",
                self.class.code()
            )));
        }
        // f'(par) = -(a + 2 b x) must be >= 0 on x in [0, 1]; linear in x, so check the ends.
        if self.class.requires_monotone() && (self.a > 1e-12 || self.a + 2.0 * self.b > 1e-12) {
            return Err(Error::Invalid(format!(
                "curve {} must be non-decreasing in par (a = {}, b = {})",
                self.class.code(),
                self.a,
                self.b
            )));
        }
        Ok(())
    }

    /// Relative yield at a light fraction, clamped at zero. No range check.
    pub fn eval(&self, par: f64) -> f64 {
        let x = 1.0 - par;
        (1.0 + self.a * x + self.b * x * x).max(0.0)
    }
}

/// Relative biomass yield at light fraction `par` in `[0, 1]`.
pub fn y_crop(response: &ShadeResponse, par: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&par) {
        return Err(Error::Range {
            name: "par",
            value: par,
            expected: "[0, 1]",
        });
    }
    Ok(response.eval(par.clamp(0.0, 1.0)))
}

/// Curves indexed by class.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseSet {
    curves: Vec<ShadeResponse>,
}

impl ResponseSet {
    pub fn new(curves: Vec<ShadeResponse>) -> Self {
        Self { curves }
    }

    /// Fits one curve per class from `(class, par, yield)` rows, keeping first-seen class order.
    pub fn from_points<'a>(rows: impl IntoIterator<Item = (&'a str, f64, f64)>) -> Result<Self> {
        let mut groups: Vec<(ShadeClass, Vec<(f64, f64)>)> = Vec::new();
        for (class, par, y) in rows {
            let class = ShadeClass::parse(class);
            match groups.iter_mut().find(|(c, _)| *c == class) {
                Some((_, pts)) => pts.push((par, y)),
                None => groups.push((class, alloc::vec![(par, y)])),
            }
        }
        let curves = groups
            .into_iter()
            .map(|(c, pts)| ShadeResponse::fit(c, &pts))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { curves })
    }

    pub fn get(&self, class: &ShadeClass) -> Result<&ShadeResponse> {
        self.curves
            .iter()
            .find(|c| c.class == *class)
            .ok_or_else(|| Error::Invalid(format!("no shade response curve for class {}", class.code())))
    }

    pub fn curves(&self) -> &[ShadeResponse] {
        &self.curves
    }

    /// Replaces or adds curves from `other`.
    pub fn merged(mut self, other: ResponseSet) -> Self {
        for c in other.curves {
            match self.curves.iter_mut().find(|x| x.class == c.class) {
                Some(slot) => *slot = c,
                None => self.curves.push(c),
            }
        }
        self
    }
}

/// Parses the bundled `class,par,yield` table (header row required, no quoting).
pub fn parse_curve_table(text: &str) -> Result<Vec<(String, f64, f64)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next().map(|h| h.trim()) {
        Some("class,par,yield") => {}
        other => {
            return Err(Error::Invalid(format!(
                "curve table header {other:?}, expected class,par,yield"
            )))
        }
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let mut cols = line.split(',').map(str::trim);
            let (Some(c), Some(p), Some(y), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
                return Err(Error::Invalid(format!("curve table row {}: expected 3 columns", i + 1)));
            };
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Invalid(format!("curve table row {}: {s:?} is not a number", i + 1)))
            };
            Ok((c.to_string(), num(p)?, num(y)?))
        })
        .collect()
}

/// The calibrated shade-sensitive, shade-tolerant and shade-loving curves.
pub fn default_responses() -> ResponseSet {
    let rows = parse_curve_table(DEFAULT_CURVES_CSV).expect("bundled curve table parses");
    ResponseSet::from_points(rows.iter().map(|(c, p, y)| (c.as_str(), *p, *y))).expect("bundled curves fit")
}

/// Irradiance-weighted fraction of light reaching the ground over `months`.
pub fn seasonal_par_fraction(series: &YieldSeries, months: MonthSet) -> Result<f64> {
    series.par_fraction(months)
}

/// Yield for a single month's light fraction.
pub fn monthly_y_crop(response: &ShadeResponse, series: &YieldSeries, month: Month) -> Result<f64> {
    let par = series.month(month).par_fraction().ok_or(Error::NoDaylight)?;
    y_crop(response, par)
}

/// Yield from the light fraction of the whole year.
pub fn annual_y_crop(response: &ShadeResponse, series: &YieldSeries) -> Result<f64> {
    y_crop(response, series.par_fraction(MonthSet::ALL)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntryYield {
    pub name: String,
    pub months: MonthSet,
    pub par: f64,
    pub y_crop: f64,
    pub revenue_full_sun: f64,
    pub revenue_realized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CropYieldResult {
    pub entries: Vec<EntryYield>,
    /// $/ha/yr.
    pub revenue_full_sun: f64,
    /// $/ha/yr.
    pub revenue_realized: f64,
}

impl CropYieldResult {
    /// Revenue-weighted relative yield of the rotation; 1 for a rotation without revenue.
    pub fn y_crop(&self) -> f64 {
        if self.revenue_full_sun > 0.0 {
            self.revenue_realized / self.revenue_full_sun
        } else {
            1.0
        }
    }
}

fn rotation_with(plan: &CropPlan, mut eval: impl FnMut(&CropEntry) -> Result<(f64, f64)>) -> Result<CropYieldResult> {
    let entries = plan
        .entries
        .iter()
        .map(|e| {
            let (par, y) = eval(e)?;
            let full = e.revenue();
            Ok(EntryYield {
                name: e.name.clone(),
                months: e.months,
                par,
                y_crop: y,
                revenue_full_sun: full,
                revenue_realized: y * full,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CropYieldResult {
        revenue_full_sun: entries.iter().map(|e| e.revenue_full_sun).sum(),
        revenue_realized: entries.iter().map(|e| e.revenue_realized).sum(),
        entries,
    })
}

/// Per-crop yields from each crop's season light fraction, and the rotation revenue.
pub fn rotation_yield(plan: &CropPlan, series: &YieldSeries, responses: &ResponseSet) -> Result<CropYieldResult> {
    rotation_with(plan, |e| {
        let par = seasonal_par_fraction(series, e.months)?;
        Ok((par, y_crop(responses.get(&e.response)?, par)?))
    })
}

/// Rotation revenue with the same relative yield for every crop.
pub fn uniform_rotation_yield(plan: &CropPlan, y: f64) -> Result<CropYieldResult> {
    rotation_with(plan, |_| Ok((f64::NAN, y)))
}
