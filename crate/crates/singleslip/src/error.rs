use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid resolution: {0}")]
    InvalidResolution(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("solver did not converge: {0}")]
    SolverDiverged(String),
    #[error("too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
