//! Site metadata and validated hourly irradiance series.

use alloc::format;
use alloc::vec::Vec;

use crate::error::check_range;
use crate::time::{CivilDateTime, Month, MonthSet};
use crate::{Error, Result};

/// Allowed excess of GHI over DNI + DHI before a record is rejected, W/m².
pub const COMPONENT_TOLERANCE: f64 = 50.0;

/// Records needed for one full (non-leap) year of hourly data.
pub const HOURS_PER_YEAR: usize = 8760;

/// Albedo of bare agricultural soil, used when none is configured.
pub const DEFAULT_ALBEDO: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteConfig {
    /// Degrees north.
    pub latitude: f64,
    /// Degrees east.
    pub longitude: f64,
    /// Hours ahead of UTC for the civil timestamps.
    pub utc_offset: f64,
    pub albedo: f64,
}

impl SiteConfig {
    pub fn new(latitude: f64, longitude: f64, utc_offset: f64, albedo: f64) -> Result<Self> {
        let site = Self {
            latitude,
            longitude,
            utc_offset,
            albedo,
        };
        site.validate()?;
        Ok(site)
    }

    /// Khanewal, Punjab, Pakistan (PKT, UTC+5).
    pub fn khanewal() -> Self {
        Self {
            latitude: 30.2864,
            longitude: 71.9320,
            utc_offset: 5.0,
            albedo: DEFAULT_ALBEDO,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range(
            "site.latitude",
            self.latitude,
            (-90.0..=90.0).contains(&self.latitude),
            "[-90, 90] degrees",
        )?;
        check_range(
            "site.longitude",
            self.longitude,
            (-180.0..=180.0).contains(&self.longitude),
            "[-180, 180] degrees",
        )?;
        check_range(
            "site.utc_offset",
            self.utc_offset,
            (-14.0..=14.0).contains(&self.utc_offset),
            "[-14, 14] hours",
        )?;
        check_range("site.albedo", self.albedo, (0.0..=1.0).contains(&self.albedo), "[0, 1]")
    }

    /// The same site mirrored across the equator.
    pub fn mirrored(&self) -> Self {
        Self {
            latitude: -self.latitude,
            ..*self
        }
    }
}

/// One hour of irradiance. The timestamp labels the start of the hour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherRecord {
    pub timestamp: CivilDateTime,
    pub ghi: f64,
    pub dni: f64,
    pub dhi: f64,
}

impl WeatherRecord {
    /// Instant at which sun geometry is evaluated: the middle of the hour.
    pub fn midpoint(&self) -> CivilDateTime {
        self.timestamp.add_seconds(1800)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    site: SiteConfig,
    records: Vec<WeatherRecord>,
}

impl WeatherSeries {
    /// Validates the site and every record. The first offending record is reported by index.
    pub fn new(site: SiteConfig, records: Vec<WeatherRecord>) -> Result<Self> {
        site.validate()?;
        for (index, r) in records.iter().enumerate() {
            validate_record(index, r)?;
            if index > 0 {
                let step = r.timestamp.epoch_seconds() - records[index - 1].timestamp.epoch_seconds();
                if step == 3600 {
                    continue;
                }
                if step > 3600 && step % 3600 == 0 {
                    return Err(Error::Weather {
                        index,
                        reason: format!("gap of {} hours after {}", step / 3600, records[index - 1].timestamp),
                    });
                }
                return Err(Error::Cadence {
                    index,
                    reason: format!("step of {step} s from {}", records[index - 1].timestamp),
                });
            }
        }
        Ok(Self { site, records })
    }

    pub fn site(&self) -> &SiteConfig {
        &self.site
    }

    pub fn records(&self) -> &[WeatherRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn months_covered(&self) -> MonthSet {
        self.records
            .iter()
            .fold(MonthSet::EMPTY, |s, r| s.with(r.timestamp.month()))
    }

    /// At least 8760 hourly records touching all twelve months.
    pub fn is_full_year(&self) -> bool {
        self.records.len() >= HOURS_PER_YEAR && self.months_covered() == MonthSet::ALL
    }

    pub fn require_full_year(&self) -> Result<()> {
        if self.is_full_year() {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "weather series has {} records covering {} months; a full year is required",
                self.records.len(),
                self.months_covered().len()
            )))
        }
    }

    /// Replace the site (coordinates only matter for sun geometry).
    pub fn with_site(mut self, site: SiteConfig) -> Result<Self> {
        site.validate()?;
        self.site = site;
        Ok(self)
    }

    pub fn annual_ghi(&self) -> f64 {
        self.records.iter().map(|r| r.ghi).sum()
    }

    pub fn month_of(&self, index: usize) -> Month {
        self.records[index].timestamp.month()
    }
}

fn validate_record(index: usize, r: &WeatherRecord) -> Result<()> {
    for (name, v) in [("ghi", r.ghi), ("dni", r.dni), ("dhi", r.dhi)] {
        if !v.is_finite() {
            return Err(Error::Weather {
                index,
                reason: format!("{name} is not a finite number"),
            });
        }
        if v < 0.0 {
            return Err(Error::Weather {
                index,
                reason: format!("negative irradiance {name} = {v}"),
            });
        }
    }
    if r.ghi > r.dni + r.dhi + COMPONENT_TOLERANCE {
        return Err(Error::Weather {
            index,
            reason: format!(
                "ghi {} exceeds dni + dhi + {COMPONENT_TOLERANCE} ({})",
                r.ghi,
                r.dni + r.dhi
            ),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hourly(n: usize, f: impl Fn(usize) -> (f64, f64, f64)) -> Vec<WeatherRecord> {
        let t0 = CivilDateTime::date(2018, 1, 1);
        (0..n)
            .map(|i| {
                let (ghi, dni, dhi) = f(i);
                WeatherRecord {
                    timestamp: t0.add_seconds(3600 * i as i64),
                    ghi,
                    dni,
                    dhi,
                }
            })
            .collect()
    }

    #[test]
    fn accepts_full_year() {
        let s = WeatherSeries::new(SiteConfig::khanewal(), hourly(8760, |_| (0.0, 0.0, 0.0))).unwrap();
        assert_eq!(s.len(), 8760);
        assert!(s.is_full_year());
    }

    #[test]
    fn negative_dni_names_the_record() {
        let recs = hourly(8760, |i| if i == 4000 { (10.0, -5.0, 10.0) } else { (0.0, 0.0, 0.0) });
        match WeatherSeries::new(SiteConfig::khanewal(), recs) {
            Err(Error::Weather { index, reason }) => {
                assert_eq!(index, 4000);
                assert!(reason.contains("dni"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gap_and_cadence_errors_differ() {
        let mut recs = hourly(10, |_| (0.0, 0.0, 0.0));
        recs[5].timestamp = recs[5].timestamp.add_seconds(3600);
        recs.truncate(6);
        assert!(matches!(
            WeatherSeries::new(SiteConfig::khanewal(), recs),
            Err(Error::Weather { index: 5, .. })
        ));
        let mut recs = hourly(10, |_| (0.0, 0.0, 0.0));
        recs[3].timestamp = recs[2].timestamp.add_seconds(1800);
        recs.truncate(4);
        assert!(matches!(
            WeatherSeries::new(SiteConfig::khanewal(), recs),
            Err(Error::Cadence { index: 3, .. })
        ));
    }

    #[test]
    fn component_consistency() {
        let recs = hourly(3, |i| if i == 2 { (500.0, 300.0, 100.0) } else { (0.0, 0.0, 0.0) });
        assert!(matches!(
            WeatherSeries::new(SiteConfig::khanewal(), recs),
            Err(Error::Weather { index: 2, .. })
        ));
        let recs = hourly(3, |_| (440.0, 300.0, 100.0));
        assert!(WeatherSeries::new(SiteConfig::khanewal(), recs).is_ok());
    }

    #[test]
    fn site_bounds() {
        assert!(SiteConfig::new(91.0, 0.0, 0.0, 0.2).is_err());
        assert!(SiteConfig::new(0.0, 181.0, 0.0, 0.2).is_err());
        assert!(SiteConfig::new(0.0, 0.0, 0.0, 1.2).is_err());
        assert!(SiteConfig::new(-33.87, 151.2, 10.0, 0.2).is_ok());
    }
}
