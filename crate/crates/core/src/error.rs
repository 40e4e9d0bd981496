use thiserror::Error;

/// Errors raised by operator evaluation, transforms and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {x} lies outside the evaluation domain {domain}")]
    Domain { x: f64, domain: String },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("lambda schedule produced {value} outside [0,1] at n={n}, x={x}")]
    Schedule { value: f64, n: usize, x: f64 },

    #[error("family {0} has no exponential coefficient")]
    UnsupportedFamily(String),

    #[error("central moment of order {k} unsupported for {family}")]
    UnsupportedMoment { k: usize, family: String },

    #[error("non-finite sample of `{name}` at t={t}")]
    Evaluation { name: String, t: f64 },

    #[error("function `{0}` carries no derivative metadata")]
    MissingDerivative(String),

    #[error("modulus over an unbounded interval needs an explicit window")]
    NeedsWindow,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("growth check failed: {0}")]
    Growth(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
