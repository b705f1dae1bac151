use thiserror::Error;

/// Errors produced by the carrier, codec, plausibility and bench layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("unsupported format: {0} (use raw mode for non-BMP carriers)")]
    UnsupportedFormat(String),

    #[error("message of {requested} bytes exceeds carrier capacity of {capacity} bytes")]
    CapacityExceeded { requested: usize, capacity: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input is empty")]
    EmptyInput,

    #[error("scan output with {workers} workers differs from the single-worker baseline")]
    OutputMismatch { workers: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
