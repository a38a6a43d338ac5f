use thiserror::Error;

/// Errors raised by the bound formulas, the channel algebra and the Fock-space oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function being evaluated.
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),

    #[error("unphysical covariance matrix: {0}")]
    Unphysical(String),

    #[error("unphysical density matrix: {0}")]
    UnphysicalState(String),

    #[error("truncation budget violated: {0}")]
    Truncation(String),

    #[error("joint Fock dimension {joint} exceeds cap {cap}")]
    DimensionOverflow { joint: usize, cap: usize },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid quadrature grid: {0}")]
    Grid(String),

    #[error("invalid sweep specification: {0}")]
    Sweep(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
