//! Hourly weather from CSV or EnergyPlus weather (EPW) files.

use std::path::Path;

use agrivolt_core::time::CivilDateTime;
use agrivolt_core::weather::{SiteConfig, WeatherRecord, WeatherSeries};
use chrono::{DateTime, Datelike, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// Year given to typical-year EPW records, whose months come from different years.
pub const NOMINAL_TMY_YEAR: i32 = 2018;

const EPW_HEADER_LINES: usize = 8;
const EPW_GHI: usize = 13;
const EPW_DNI: usize = 14;
const EPW_DHI: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeatherFormat {
    Csv,
    Epw,
}

impl WeatherFormat {
    /// `.epw` files are EPW; anything else is read as CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("epw") => WeatherFormat::Epw,
            _ => WeatherFormat::Csv,
        }
    }
}

pub fn load_weather(path: &Path, format: WeatherFormat, site: SiteConfig) -> AppResult<WeatherSeries> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::data(format!("cannot read weather file {}: {e}", path.display())))?;
    let records = match format {
        WeatherFormat::Csv => parse_csv(&text),
        WeatherFormat::Epw => parse_epw(&text),
    }
    .map_err(|e| AppError::data(format!("{}: {e}", path.display())))?;
    WeatherSeries::new(site, records).map_err(|e| AppError::data(format!("{}: {e}", path.display())))
}

/// Reads the `timestamp,ghi,dni,dhi` table. Columns are found by name; extra columns are ignored.
pub fn parse_csv(text: &str) -> Result<Vec<WeatherRecord>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| format!("unreadable header: {e}"))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| format!("missing column `{name}`"))
    };
    let (ti, gi, ni, di) = (column("timestamp")?, column("ghi")?, column("dni")?, column("dhi")?);
    let mut out = Vec::new();
    for (index, row) in reader.records().enumerate() {
        let row = row.map_err(|e| format!("record {index}: {e}"))?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let number = |i: usize, name: &str| {
            field(i)
                .parse::<f64>()
                .map_err(|_| format!("record {index}: {name} `{}` is not a number", field(i)))
        };
        out.push(WeatherRecord {
            timestamp: parse_timestamp(field(ti)).map_err(|e| format!("record {index}: {e}"))?,
            ghi: number(gi, "ghi")?,
            dni: number(ni, "dni")?,
            dhi: number(di, "dhi")?,
        });
    }
    Ok(out)
}

/// ISO-8601 local time, with or without seconds or a UTC offset (the offset is dropped).
pub fn parse_timestamp(s: &str) -> Result<CivilDateTime, String> {
    const FORMATS: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%d %H:%M",
    ];
    let naive = FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .or_else(|| DateTime::parse_from_rfc3339(s).ok().map(|d| d.naive_local()))
        .ok_or_else(|| format!("timestamp `{s}` is not ISO-8601"))?;
    to_civil(&naive)
}

fn to_civil(t: &NaiveDateTime) -> Result<CivilDateTime, String> {
    CivilDateTime::new(
        t.year(),
        t.month() as u8,
        t.day() as u8,
        t.hour() as u8,
        t.minute() as u8,
        t.second() as u8,
    )
    .map_err(|e| e.to_string())
}

/// Location fields of an EPW header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpwLocation {
    pub latitude: f64,
    pub longitude: f64,
    pub utc_offset: f64,
}

pub fn parse_epw_location(text: &str) -> Option<EpwLocation> {
    let line = text.lines().next()?;
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if !fields.first()?.eq_ignore_ascii_case("LOCATION") || fields.len() < 9 {
        return None;
    }
    Some(EpwLocation {
        latitude: fields[6].parse().ok()?,
        longitude: fields[7].parse().ok()?,
        utc_offset: fields[8].parse().ok()?,
    })
}

/// EPW data rows. Hour `h` (1–24) covers the hour ending at `h`, so records are
/// stamped at `h - 1`. Files mixing source years are restamped to [`NOMINAL_TMY_YEAR`].
pub fn parse_epw(text: &str) -> Result<Vec<WeatherRecord>, String> {
    let rows: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .skip(EPW_HEADER_LINES)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i, l.split(',').map(str::trim).collect()))
        .collect();
    if rows.is_empty() {
        return Err("EPW file has no data rows".into());
    }
    let int = |line: usize, fields: &[&str], i: usize, name: &str| -> Result<i64, String> {
        fields
            .get(i)
            .and_then(|f| f.parse::<i64>().ok())
            .ok_or_else(|| format!("line {}: bad {name}", line + 1))
    };
    let years: Vec<i64> = rows
        .iter()
        .map(|(line, f)| int(*line, f, 0, "year"))
        .collect::<Result<_, _>>()?;
    let single_year = years.iter().all(|&y| y == years[0]);
    let mut out = Vec::with_capacity(rows.len());
    for ((line, f), year) in rows.iter().zip(years) {
        let year = if single_year { year as i32 } else { NOMINAL_TMY_YEAR };
        let month = int(*line, f, 1, "month")?;
        let day = int(*line, f, 2, "day")?;
        let hour = int(*line, f, 3, "hour")?;
        if !(1..=24).contains(&hour) {
            return Err(format!("line {}: hour {hour} outside 1-24", line + 1));
        }
        let start = CivilDateTime::new(year, month as u8, day as u8, (hour - 1) as u8, 0, 0)
            .map_err(|e| format!("line {}: {e}", line + 1))?;
        let value = |i: usize, name: &str| {
            f.get(i)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| format!("line {}: bad {name}", line + 1))
        };
        out.push(WeatherRecord {
            timestamp: start,
            ghi: value(EPW_GHI, "global horizontal radiation")?,
            dni: value(EPW_DNI, "direct normal radiation")?,
            dhi: value(EPW_DHI, "diffuse horizontal radiation")?,
        });
    }
    Ok(out)
}
