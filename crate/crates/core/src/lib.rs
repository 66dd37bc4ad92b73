//! Core models for single-axis tracked agrivoltaic systems.
//!
//! Everything in this crate is pure computation over in-memory data: sun
//! position and tracker schedules, a two-dimensional infinite-row irradiance
//! model, crop shade response, the price/performance economics, and the
//! design-space planner. File formats, the command line, and parallel
//! execution live in the `agrivolt` crate.
#![no_std]

extern crate alloc;

pub mod agronomy;
pub mod crops;
pub mod economics;
mod error;
mod math;
pub mod optics;
pub mod planner;
pub mod simulate;
pub mod solar;
pub mod time;
pub mod weather;

pub use error::{Error, Result};
