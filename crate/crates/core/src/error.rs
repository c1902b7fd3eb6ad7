use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid support: {0}")]
    InvalidSupport(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("not integrable: {0}")]
    NonIntegrable(String),

    #[error("quadrature did not converge on [{lo}, {hi}] (error estimate {err:e})")]
    QuadratureDidNotConverge { lo: f64, hi: f64, err: f64 },

    #[error("factor not in the required space: {0}")]
    NotInSpace(String),

    #[error("left factor must carry a window")]
    UnwindowedLeftFactor,

    #[error("operators have different supports")]
    SupportMismatch,

    #[error("operation requires a pure kernel operator (scalar part is {0})")]
    ScalarPart(f64),

    #[error("inadmissible parameters: {0}")]
    InadmissibleParams(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
