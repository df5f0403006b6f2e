use thiserror::Error;

/// Errors returned by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("n = {n} is outside the supported range 1..={max}")]
    Limit { n: u32, max: u32 },

    #[error("partitions of different totals: {0} vs {1}")]
    SizeMismatch(u32, u32),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("parameter {param} is outside the valid range of {family}")]
    Range { family: &'static str, param: String },

    #[error("level {0} is not attained")]
    Level(f64),

    #[error("level {0} is the extremal value f(bottom) and has no neighbour")]
    NoNeighbor(f64),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("transform {0} is not monotone")]
    NonMonotone(String),

    #[error("unsupported format: {0}")]
    Format(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("{what} has {n} qubits, cap is {cap}")]
    Cap { what: &'static str, n: u32, cap: u32 },

    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
