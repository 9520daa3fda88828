use crate::month::MonthIndex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gap in monthly series: missing {0}")]
    Gap(MonthIndex),

    #[error("cannot parse line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("series do not align: {0}")]
    Alignment(String),

    #[error("calendar starts must be strictly increasing (violation at {0})")]
    Order(MonthIndex),

    #[error("parameter off grid: {0}")]
    Grid(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("classifier is not perfect: {got} detections for {expected} events")]
    NotPerfect { got: usize, expected: usize },

    #[error("degenerate classifier: {0}")]
    Degenerate(String),

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 usage, 3 data, 4 empty result.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) | Error::Grid(_) => 2,
            Error::EmptyResult(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
