//! Input files: weather, scenarios, and crop response curves.

pub mod scenario;
pub mod weather;

use std::path::Path;

use agrivolt_core::agronomy::{parse_curve_table, ResponseSet};

use crate::error::{AppError, AppResult};

pub use scenario::Scenario;
pub use weather::{load_weather, WeatherFormat};

/// Reads a `class,par,yield` control-point table and fits one curve per class.
pub fn load_curves(path: &Path) -> AppResult<ResponseSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::data(format!("cannot read crop curves {}: {e}", path.display())))?;
    let rows = parse_curve_table(&text).map_err(|e| AppError::data(format!("{}: {e}", path.display())))?;
    ResponseSet::from_points(rows.iter().map(|(c, p, y)| (c.as_str(), *p, *y)))
        .map_err(|e| AppError::data(format!("{}: {e}", path.display())))
}
