//! Sun position, solar time, and tracker rotation schedules.
//!
//! Sun geometry uses Spencer's Fourier series for declination and the equation
//! of time, evaluated at the UTC phase within the mean tropical year. Rotations follow a
//! single sign convention: a tracker turns about a horizontal north-south axis,
//! negative rotation tilts the module normal east, positive west.

use crate::error::check_range;
use crate::math::{acos, atan2, cos, sin, sqrt, tan, to_deg, to_rad, PI};
use crate::time::CivilDateTime;
use crate::weather::SiteConfig;
use crate::{Error, Result};

/// Unlimited rotation: the mechanical stop is never reached.
pub const DEFAULT_ROTATION_LIMIT: f64 = 90.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SunPosition {
    /// Degrees from the local vertical, `[0, 180]`.
    pub zenith: f64,
    /// Degrees clockwise from north, `[0, 360)`.
    pub azimuth: f64,
    pub is_up: bool,
}

impl SunPosition {
    pub fn from_angles(zenith: f64, azimuth: f64) -> Self {
        Self {
            zenith,
            azimuth: crate::math::rem_euclid(azimuth, 360.0),
            is_up: zenith < 90.0,
        }
    }

    /// Unit vector toward the sun as (east, north, up).
    pub fn direction(&self) -> [f64; 3] {
        let z = to_rad(self.zenith);
        let a = to_rad(self.azimuth);
        [sin(z) * sin(a), sin(z) * cos(a), cos(z)]
    }

    pub fn elevation(&self) -> f64 {
        90.0 - self.zenith
    }
}

/// Mean tropical year in days.
const TROPICAL_YEAR: f64 = 365.2422;
/// 2000-01-01 00:00 UTC, Unix seconds.
const J2000_MIDNIGHT: i64 = 946_684_800;
/// Mean lag of the calendar new year behind the tropical phase over a leap cycle, days.
const NEW_YEAR_PHASE: f64 = 0.387;

// Fractional year angle in radians, counted along the mean tropical year so the
// series does not drift through the leap cycle.
fn year_angle(t: &CivilDateTime, utc_offset: f64) -> f64 {
    let days = (t.epoch_seconds() - J2000_MIDNIGHT) as f64 / 86_400.0 - utc_offset / 24.0;
    let phase = crate::math::rem_euclid(days - NEW_YEAR_PHASE, TROPICAL_YEAR);
    2.0 * PI / TROPICAL_YEAR * (phase - 0.5)
}

/// Solar declination in degrees.
pub fn declination(t: &CivilDateTime, utc_offset: f64) -> f64 {
    let g = year_angle(t, utc_offset);
    to_deg(
        0.006918 - 0.399912 * cos(g) + 0.070257 * sin(g) - 0.006758 * cos(2.0 * g) + 0.000907 * sin(2.0 * g)
            - 0.002697 * cos(3.0 * g)
            + 0.00148 * sin(3.0 * g),
    )
}

/// Equation of time in minutes (apparent minus mean solar time).
pub fn equation_of_time(t: &CivilDateTime, utc_offset: f64) -> f64 {
    let g = year_angle(t, utc_offset);
    229.18 * (0.000075 + 0.001868 * cos(g) - 0.032077 * sin(g) - 0.014615 * cos(2.0 * g) - 0.040849 * sin(2.0 * g))
}

/// True solar time in hours (12.0 at the sun's meridian transit).
pub fn solar_time(site: &SiteConfig, t: &CivilDateTime) -> f64 {
    let correction_min = 4.0 * (site.longitude - 15.0 * site.utc_offset) + equation_of_time(t, site.utc_offset);
    t.hours_of_day() + correction_min / 60.0
}

/// Hour angle in degrees, negative in the morning.
pub fn hour_angle(site: &SiteConfig, t: &CivilDateTime) -> f64 {
    15.0 * (solar_time(site, t) - 12.0)
}

pub fn sun_position(site: &SiteConfig, t: &CivilDateTime) -> SunPosition {
    let phi = to_rad(site.latitude);
    let delta = to_rad(declination(t, site.utc_offset));
    let omega = to_rad(hour_angle(site, t));
    let up = sin(phi) * sin(delta) + cos(phi) * cos(delta) * cos(omega);
    let east = -cos(delta) * sin(omega);
    let north = cos(phi) * sin(delta) - sin(phi) * cos(delta) * cos(omega);
    let zenith = to_deg(acos(up));
    let azimuth = if east == 0.0 && north == 0.0 {
        0.0
    } else {
        to_deg(atan2(east, north))
    };
    SunPosition::from_angles(zenith, azimuth)
}

/// Local clock hours of solar noon on the given date.
pub fn solar_noon_hours(site: &SiteConfig, date: &CivilDateTime) -> f64 {
    let mut noon = 12.0;
    for _ in 0..3 {
        let t = date.with_hours(noon);
        noon -= solar_time(site, &t) - 12.0;
    }
    noon
}

/// Civil time of solar noon on the given date, to the nearest second.
pub fn solar_noon(site: &SiteConfig, date: &CivilDateTime) -> CivilDateTime {
    date.with_hours(solar_noon_hours(site, date))
}

/// Hours between sunrise and sunset on the given date (geometric horizon).
pub fn day_length(site: &SiteConfig, date: &CivilDateTime) -> f64 {
    let noon = date.with_hours(solar_noon_hours(site, date));
    let phi = to_rad(site.latitude);
    let delta = to_rad(declination(&noon, site.utc_offset));
    let x = -tan(phi) * tan(delta);
    if x >= 1.0 {
        0.0
    } else if x <= -1.0 {
        24.0
    } else {
        2.0 * to_deg(acos(x)) / 15.0
    }
}

/// Orientation of the module rows relative to the compass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowAxis {
    /// Rows run north-south; the cross-section plane points east.
    NorthSouth,
    /// Rows run east-west; the cross-section plane points toward the equator.
    EastWest { equator_south: bool },
}

impl RowAxis {
    /// Horizontal unit vector (east, north) of the cross-section's `u` axis.
    pub fn u_axis(&self) -> [f64; 2] {
        match self {
            RowAxis::NorthSouth => [1.0, 0.0],
            RowAxis::EastWest { equator_south: true } => [0.0, -1.0],
            RowAxis::EastWest { equator_south: false } => [0.0, 1.0],
        }
    }

    /// Sun direction projected into the cross-section as (u, up).
    pub fn project(&self, sun: &SunPosition) -> (f64, f64) {
        let [e, n, z] = sun.direction();
        let [ue, un] = self.u_axis();
        (e * ue + n * un, z)
    }
}

/// Module attitude within the row cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationState {
    /// Degrees; the module normal is `(-sin r, cos r)` in (u, up) coordinates.
    pub rotation: f64,
    pub axis: RowAxis,
    /// Parked flat because the sun is down.
    pub parked: bool,
}

impl RotationState {
    pub fn tracker(rotation: f64) -> Self {
        Self {
            rotation,
            axis: RowAxis::NorthSouth,
            parked: false,
        }
    }

    pub fn parked(axis: RowAxis) -> Self {
        Self {
            rotation: 0.0,
            axis,
            parked: true,
        }
    }

    /// Module front normal as (u, up).
    pub fn normal(&self) -> (f64, f64) {
        let r = to_rad(self.rotation);
        (-sin(r), cos(r))
    }

    /// Cosine of the beam incidence angle on the module front (negative: beam on the rear).
    pub fn cos_incidence(&self, sun: &SunPosition) -> f64 {
        let (nu, nz) = self.normal();
        let (su, sz) = self.axis.project(sun);
        nu * su + nz * sz
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrackingMode {
    /// Standard tracking all day.
    St,
    /// Anti-tracking all day.
    At,
    /// Standard tracking for `st_hours` centred on solar noon, anti-tracking otherwise.
    Ct { st_hours: f64 },
    /// Fixed tilt facing the equator; `None` means tilt equal to |latitude|.
    NsFixed { tilt: Option<f64> },
    /// Vertical modules facing east (front) and west (rear).
    EwVertical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingScheme {
    pub mode: TrackingMode,
    /// Degrees, `(0, 90]`.
    pub rotation_limit: f64,
}

impl TrackingScheme {
    pub fn new(mode: TrackingMode) -> Self {
        Self {
            mode,
            rotation_limit: DEFAULT_ROTATION_LIMIT,
        }
    }

    pub fn st() -> Self {
        Self::new(TrackingMode::St)
    }
    pub fn at() -> Self {
        Self::new(TrackingMode::At)
    }
    pub fn ct(st_hours: f64) -> Self {
        Self::new(TrackingMode::Ct { st_hours })
    }
    pub fn ns_fixed() -> Self {
        Self::new(TrackingMode::NsFixed { tilt: None })
    }
    pub fn ew_vertical() -> Self {
        Self::new(TrackingMode::EwVertical)
    }

    pub fn with_limit(mut self, limit: f64) -> Self {
        self.rotation_limit = limit;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_range(
            "scheme.rotation_limit",
            self.rotation_limit,
            self.rotation_limit > 0.0 && self.rotation_limit <= 90.0,
            "(0, 90] degrees",
        )?;
        match self.mode {
            TrackingMode::Ct { st_hours } => check_range(
                "scheme.st_hours",
                st_hours,
                (0.0..=24.0).contains(&st_hours),
                "[0, 24] hours",
            ),
            TrackingMode::NsFixed { tilt: Some(t) } => {
                check_range("scheme.fixed_tilt", t, (0.0..=90.0).contains(&t), "[0, 90] degrees")
            }
            _ => Ok(()),
        }
    }

    pub fn is_tracked(&self) -> bool {
        matches!(self.mode, TrackingMode::St | TrackingMode::At | TrackingMode::Ct { .. })
    }

    pub fn row_axis(&self, site: &SiteConfig) -> RowAxis {
        match self.mode {
            TrackingMode::NsFixed { .. } => RowAxis::EastWest {
                equator_south: site.latitude >= 0.0,
            },
            _ => RowAxis::NorthSouth,
        }
    }

    /// Short label used in tables: `ST`, `AT`, `CT6`, `N/S`, `E/W`.
    pub fn label(&self) -> alloc::string::String {
        use alloc::string::ToString;
        match self.mode {
            TrackingMode::St => "ST".to_string(),
            TrackingMode::At => "AT".to_string(),
            TrackingMode::Ct { st_hours } => alloc::format!("CT{st_hours}"),
            TrackingMode::NsFixed { tilt: None } => "N/S".to_string(),
            TrackingMode::NsFixed { tilt: Some(t) } => alloc::format!("N/S{t}"),
            TrackingMode::EwVertical => "E/W".to_string(),
        }
    }
}

/// Standard tracking: the module normal follows the sun's profile in the east-west plane.
pub fn st_rotation(sun: &SunPosition, limit: f64) -> Result<RotationState> {
    if !sun.is_up {
        return Err(Error::SunBelowHorizon);
    }
    let (su, sz) = RowAxis::NorthSouth.project(sun);
    let profile = -to_deg(atan2(su, sz));
    Ok(RotationState::tracker(profile.clamp(-limit, limit)))
}

/// Anti-tracking: the module plane contains the beam, rotated 90 degrees from standard tracking.
pub fn at_rotation(sun: &SunPosition, limit: f64) -> Result<RotationState> {
    if !sun.is_up {
        return Err(Error::SunBelowHorizon);
    }
    let (su, sz) = RowAxis::NorthSouth.project(sun);
    let st = -to_deg(atan2(su, sz));
    let at = if st < 0.0 { st + 90.0 } else { st - 90.0 };
    // at == -90 only when st == 0 exactly; the convention puts the face west.
    let at = if st == 0.0 { 90.0 } else { at };
    Ok(RotationState::tracker(at.clamp(-limit, limit)))
}

/// Hours between `t` and solar noon, in true solar time.
pub fn hours_from_noon(site: &SiteConfig, t: &CivilDateTime) -> f64 {
    (solar_time(site, t) - 12.0).abs()
}

/// Whether a customized schedule with `st_hours` of standard tracking uses the
/// standard branch `offset` hours from solar noon. `st_hours = 0` never does.
pub fn in_st_window(st_hours: f64, offset: f64) -> bool {
    st_hours > 0.0 && offset <= st_hours / 2.0
}

/// Module attitude for any scheme at time `t`.
pub fn scheme_rotation(scheme: &TrackingScheme, site: &SiteConfig, t: &CivilDateTime) -> Result<RotationState> {
    let sun = sun_position(site, t);
    rotation_for_sun(scheme, site, &sun, hours_from_noon(site, t))
}

/// As [`scheme_rotation`] with the sun already located.
pub fn rotation_for_sun(
    scheme: &TrackingScheme,
    site: &SiteConfig,
    sun: &SunPosition,
    offset_from_noon: f64,
) -> Result<RotationState> {
    let limit = scheme.rotation_limit;
    match scheme.mode {
        TrackingMode::St => st_rotation(sun, limit),
        TrackingMode::At => at_rotation(sun, limit),
        TrackingMode::Ct { st_hours } => {
            if in_st_window(st_hours, offset_from_noon) {
                st_rotation(sun, limit)
            } else {
                at_rotation(sun, limit)
            }
        }
        TrackingMode::NsFixed { tilt } => {
            if !sun.is_up {
                return Err(Error::SunBelowHorizon);
            }
            let tilt = tilt.unwrap_or(site.latitude.abs());
            Ok(RotationState {
                rotation: -tilt,
                axis: scheme.row_axis(site),
                parked: false,
            })
        }
        TrackingMode::EwVertical => {
            if !sun.is_up {
                return Err(Error::SunBelowHorizon);
            }
            Ok(RotationState::tracker(-90.0))
        }
    }
}

/// Length of the unit sun vector projected into the east-west plane, used by tests.
pub fn profile_magnitude(sun: &SunPosition) -> f64 {
    let (u, z) = RowAxis::NorthSouth.project(sun);
    sqrt(u * u + z * z)
}
