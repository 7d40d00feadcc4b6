use thiserror::Error;

/// Errors shared across the solver modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown city id {0}")]
    UnknownCityId(u32),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cluster of {size} cities exceeds the exact-solver cap of {cap}")]
    ClusterTooLarge { size: usize, cap: usize },

    #[error("tour is missing city {0}")]
    IncompleteTour(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
