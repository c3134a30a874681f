use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("failed to generate a simple {d}-regular graph on {n} vertices after {attempts} attempts")]
    GenerationFailure { n: usize, d: usize, attempts: usize },

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("degenerate topology: <d^2> = {d2} does not exceed <d> = {d1}")]
    DegenerateTopology { d1: f64, d2: f64 },

    #[error("degenerate correlation matrix: no nonzero off-diagonal entry")]
    DegenerateCorrelation,

    #[error("instance has {n} vertices, limit for this operation is {max}")]
    SizeLimit { n: usize, max: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
