//! Simulation, planning, and reporting for single-axis tracked agrivoltaic arrays.

pub mod cli;
pub mod commands;
pub mod error;
pub mod ingest;
pub mod output;
pub mod plot;
pub mod run;

pub use agrivolt_core as core;
pub use error::{AppError, AppResult};
