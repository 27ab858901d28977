use chrono::NaiveDate;
use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or non-contiguous input rows.
    #[error("ingestion error at row {row}: {message}")]
    Ingest { row: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    /// submitted != accepted + rejected + withdrawn on the listed dates.
    #[error("consistency error: submitted != accepted + rejected + withdrawn on {}", fmt_dates(.dates))]
    Consistency { dates: Vec<NaiveDate> },

    #[error("range error: {0}")]
    Range(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("insufficient data for {what}: need at least {needed}, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    /// Value outside the support of a distribution.
    #[error("domain error: {0}")]
    Domain(String),

    /// Sample without spread where one is required.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("singular design: column(s) {dependent_columns:?} linearly dependent on earlier columns")]
    Singular { dependent_columns: Vec<usize> },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// Operation invoked outside its contract (e.g. gapped data, zero lags).
    #[error("contract error: {0}")]
    Contract(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numeric,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) => ErrorClass::Io,
            Error::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => ErrorClass::Io,
            Error::Singular { .. } | Error::Numeric(_) | Error::Degenerate(_) => {
                ErrorClass::Numeric
            }
            _ => ErrorClass::Validation,
        }
    }
}

fn fmt_dates(dates: &[NaiveDate]) -> String {
    dates
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
