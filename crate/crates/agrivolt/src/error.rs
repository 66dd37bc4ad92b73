use std::path::PathBuf;

use agrivolt_core::Error as CoreError;

/// Failures surfaced by the command-line tool, split by what the user must fix.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// The scenario or its parameters are wrong.
    #[error("config error: {0}")]
    Config(String),
    /// An input file is missing, unreadable, or inconsistent.
    #[error("data error: {0}")]
    Data(String),
    /// Writing outputs failed.
    #[error("output error at {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Data(_) => 3,
            AppError::Output { .. } => 1,
        }
    }

    pub fn config(msg: impl std::fmt::Display) -> Self {
        AppError::Config(msg.to_string())
    }

    pub fn data(msg: impl std::fmt::Display) -> Self {
        AppError::Data(msg.to_string())
    }
}

/// Classifies a core error: weather and coverage problems are data errors, the rest configuration.
impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Weather { .. }
            | CoreError::Cadence { .. }
            | CoreError::NoDaylight
            | CoreError::SunBelowHorizon => AppError::Data(e.to_string()),
            _ => AppError::Config(e.to_string()),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
