use thiserror::Error;

/// Errors shared across the shaping, FEC, framing, and channel modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside the documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No energy bound can reach the requested shaping rate.
    #[error("infeasible rate: {0}")]
    InfeasibleRate(String),

    /// A construction would exceed its configured memory budget.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Frame geometry closure equations do not hold.
    #[error("configuration error: {0}")]
    Config(String),

    /// A data file (base matrix, link parameters) is malformed.
    #[error("bad data: {0}")]
    BadData(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
