//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by construction, estimation and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Inconsistent dimensions between related inputs.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Grid values must be strictly increasing.
    #[error("unsorted grid at position {position}")]
    UnsortedGrid { position: usize },

    /// A value that must be finite was NaN or infinite.
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Not enough observations for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The input is degenerate (zero variance, all-zero eigenvalues, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A numerical routine failed to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Malformed CSV content.
    #[error("csv error: {0}")]
    Csv(String),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// A forecaster failed inside an expanding-window loop.
    #[error("forecaster failed at window ending at observation {window}: {source}")]
    ForecastWindow {
        window: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit code for the CLI: 2 for data problems, 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Degenerate(_) | Error::Numerical(_) => 3,
            Error::ForecastWindow { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
