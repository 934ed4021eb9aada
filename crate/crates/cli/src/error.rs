//! Error type for the command-line layer, classified by exit code.

use std::fmt;

use geist_core::backtest::BacktestError;
use geist_core::glm::FitError;
use geist_core::market::MarketError;
use geist_core::report::ReportError;
use geist_core::schedule::ScheduleError;

/// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or arguments.
    Usage(String),
    /// Broken or missing input data.
    Data(String),
    /// A fit or other numeric routine failed.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> CliError {
        CliError::Data(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<MarketError> for CliError {
    fn from(e: MarketError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<ScheduleError> for CliError {
    fn from(e: ScheduleError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<BacktestError> for CliError {
    fn from(e: BacktestError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> CliError {
        CliError::Numeric(e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> CliError {
        match e {
            ReportError::BadBinWidth(_) => CliError::Usage(e.to_string()),
            ReportError::NotModelOne => CliError::Usage(e.to_string()),
            ReportError::Market(m) => m.into(),
            ReportError::Fit(f) => f.into(),
        }
    }
}
