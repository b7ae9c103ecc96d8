use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{field} = {value} is not a probability in [0, 1]")]
    InvalidProbability { field: &'static str, value: f64 },
    #[error("bias is undefined when eps_nd = 0")]
    ZeroNonDiagonal,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("weight_blocks must be 2 or 3, got {0}")]
    InvalidWeight(u32),
    #[error("{kind} cannot be built for this configuration: {reason}")]
    InvalidKind { kind: &'static str, reason: String },
    #[error("no configuration in the search space reaches the target {target:e}")]
    NotAchievable { target: f64 },
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
