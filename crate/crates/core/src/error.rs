use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time {t} outside the admissible range {range}")]
    TimeOutOfRange { t: f64, range: String },

    #[error("conditioning on an event with zero conditional mass (g={g}, x={x}, t={t})")]
    ZeroMass { g: u8, x: f64, t: f64 },

    #[error("operation is not defined for this kind of insider information: {0}")]
    UnsupportedInfo(String),

    #[error("inconsistent realized information: {0}")]
    InconsistentInfo(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{0}")]
    NotFound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
