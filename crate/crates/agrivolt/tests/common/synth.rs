//! Synthetic hourly weather for tests, from the ASHRAE monthly beam/diffuse model.

use agrivolt_core::solar::sun_position;
use agrivolt_core::time::CivilDateTime;
use agrivolt_core::weather::{SiteConfig, WeatherRecord, WeatherSeries};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Apparent extraterrestrial irradiance A (W/m²), optical depth B and diffuse factor C per month.
const ASHRAE: [(f64, f64, f64); 12] = [
    (1230.0, 0.142, 0.058),
    (1215.0, 0.144, 0.060),
    (1186.0, 0.156, 0.071),
    (1136.0, 0.180, 0.097),
    (1104.0, 0.196, 0.121),
    (1088.0, 0.205, 0.134),
    (1085.0, 0.207, 0.136),
    (1107.0, 0.201, 0.122),
    (1151.0, 0.177, 0.092),
    (1192.0, 0.160, 0.073),
    (1221.0, 0.149, 0.063),
    (1233.0, 0.142, 0.057),
];

/// Chance of an overcast day per month, wetter in mid-summer.
const CLOUDY_DAY: [f64; 12] = [0.10, 0.10, 0.10, 0.05, 0.05, 0.15, 0.35, 0.35, 0.15, 0.05, 0.05, 0.10];

/// Fraction of the clear-sky beam scattered by haze and dust over the Punjab plains,
/// heaviest in the winter smog and monsoon months.
pub const PUNJAB_HAZE: [f64; 12] = [0.40, 0.35, 0.30, 0.30, 0.35, 0.40, 0.45, 0.45, 0.35, 0.30, 0.35, 0.40];

/// 8760 hourly records for `year` (non-leap) under a cloudless, clean sky.
pub fn clear_sky_records(site: &SiteConfig, year: i32, seed: Option<u64>) -> Vec<WeatherRecord> {
    sky_records(site, year, seed, &[0.0; 12])
}

/// Hourly records with monthly haze. A haze fraction `h` removes `h` of the beam and
/// adds 60% of it back as diffuse. With a seed, random days are overcast as well.
pub fn sky_records(site: &SiteConfig, year: i32, seed: Option<u64>, haze: &[f64; 12]) -> Vec<WeatherRecord> {
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let t0 = CivilDateTime::date(year, 1, 1);
    let mut clearness = 1.0;
    (0..8760)
        .map(|i| {
            let t = t0.add_seconds(3600 * i);
            if t.hour == 0 {
                clearness = 1.0;
                if let Some(r) = rng.as_mut() {
                    if r.random::<f64>() < CLOUDY_DAY[usize::from(t.month - 1)] {
                        clearness = r.random_range(0.2..0.7);
                    }
                }
            }
            let (a, b, c) = ASHRAE[usize::from(t.month - 1)];
            let cz = sun_position(site, &t.add_seconds(1800)).direction()[2];
            let (ghi, dni, dhi) = if cz > 0.01 {
                let beam = a * (-b / cz).exp();
                let h = haze[usize::from(t.month - 1)];
                let dni = beam * clearness * (1.0 - h);
                let dhi = c * beam + 0.6 * h * beam * cz + 0.4 * (1.0 - clearness) * (1.0 - h) * beam * cz;
                (dni * cz + dhi, dni, dhi)
            } else {
                (0.0, 0.0, 0.0)
            };
            WeatherRecord {
                timestamp: t,
                ghi,
                dni,
                dhi,
            }
        })
        .collect()
}

pub fn clear_sky_series(site: &SiteConfig, seed: Option<u64>) -> WeatherSeries {
    WeatherSeries::new(*site, clear_sky_records(site, 2018, seed)).expect("synthetic weather is valid")
}

/// A hazy, occasionally overcast year resembling the central Punjab.
pub fn punjab_like_series(site: &SiteConfig, seed: u64) -> WeatherSeries {
    WeatherSeries::new(*site, sky_records(site, 2018, Some(seed), &PUNJAB_HAZE)).expect("synthetic weather is valid")
}

/// Writes records in the weather CSV format.
pub fn write_csv(path: &std::path::Path, records: &[WeatherRecord]) -> std::io::Result<()> {
    use std::io::Write;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "timestamp,ghi,dni,dhi")?;
    for r in records {
        writeln!(f, "{},{},{},{}", r.timestamp, r.ghi, r.dni, r.dhi)?;
    }
    f.flush()
}

pub fn sydney() -> SiteConfig {
    SiteConfig::new(-33.87, 151.2, 10.0, 0.25).unwrap()
}
