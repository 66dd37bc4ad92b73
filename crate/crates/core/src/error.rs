use alloc::string::String;

/// Errors raised by the core models.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A record in a weather series breaks an invariant; `index` is zero-based.
    #[error("weather record {index}: {reason}")]
    Weather { index: usize, reason: String },
    /// Records are not spaced at the one-hour cadence.
    #[error("weather record {index}: non-hourly cadence ({reason})")]
    Cadence { index: usize, reason: String },
    /// A parameter lies outside its admissible range.
    #[error("{name} = {value} is out of range: {expected}")]
    Range {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// A structural problem with an input (crop plan, curve table, period).
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("sun is below the horizon")]
    SunBelowHorizon,
    #[error("no daylight timesteps in the requested months")]
    NoDaylight,
    #[error("empty period")]
    EmptyPeriod,
    #[error("discount factor diverges: r + d = {0} <= 0 with an infinite horizon")]
    Divergent(f64),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Range { name, value, expected })
    }
}
