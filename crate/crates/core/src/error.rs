use thiserror::Error;

/// Errors raised by the estimators, samplers and the benchmark harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a simplex point: {0}")]
    NotASimplexPoint(String),
    #[error("invalid grid step {0}: must lie in (0, 1/2)")]
    InvalidStep(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("stable tail function is undefined at the zero vector")]
    ZeroVector,
    #[error("invalid model parameters: {0}")]
    ParameterError(String),
    #[error("parameter out of domain: {0}")]
    DomainError(String),
    #[error("non-positive input {0} cannot be mapped to exponential margins")]
    NonPositiveInput(f64),
    #[error("point {0:?} lies outside the tabulated region")]
    OutsideTabulation(Vec<f64>),
    #[error("model {0} cannot be simulated")]
    UnsupportedModel(String),
    #[error("weight constraint violated: {0}")]
    WeightConstraintViolated(String),
    #[error("too few observations: need at least {needed}, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("singular regression design (condition number {0:e})")]
    SingularDesign(f64),
    #[error("singular covariance matrix (condition number {0:e})")]
    SingularSigma(f64),
    #[error("estimate is undefined: corrected reciprocal {0} is not positive")]
    NonPositiveEstimate(f64),
    #[error("quadrature did not converge: node doubling changed the value by {0:e}")]
    QuadratureNotConverged(f64),
    #[error("summary is empty")]
    EmptySummary,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
