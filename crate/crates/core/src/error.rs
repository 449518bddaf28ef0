use thiserror::Error;

use crate::field::Repr;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("representation mismatch: expected {expected:?} field, got {found:?}")]
    Representation { expected: Repr, found: Repr },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported box filter ratio {0}: only non-negative integers are supported")]
    UnsupportedWidth(f64),

    #[error("field mean {0:e} is not zero; inverse multiplier undefined at k = 0")]
    NonzeroMean(f64),

    /// A quantity cannot be formed because its input carries no information
    /// (zero variance, vanishing denominator, identity filter, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("solver produced non-finite values; last stable time {last_time}")]
    Blowup { last_time: f64 },

    #[error("invalid spectrum: {0}")]
    Spectrum(String),

    #[error("surrogate fit failed: {0}")]
    Fit(String),

    #[error("inconsistent surrogate samples: {0}")]
    Data(String),

    #[error("field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
