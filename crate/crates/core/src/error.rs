use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors must have at least one coordinate")]
    EmptyVector,

    #[error("the indifference preference has no canonical parameters")]
    ZeroParameters,

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("utility is not quadratic plus linear: residual {residual:e} exceeds {threshold:e}")]
    NotQuadLin { residual: f64, threshold: f64 },

    #[error("utility must vanish at the origin, found U(0) = {0}")]
    NonzeroAtOrigin(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
