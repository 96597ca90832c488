use thiserror::Error;

/// Errors raised by the library. Numeric payloads are reported as `f64`
/// regardless of the working scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("q must have zero mean, got q̂0 = {0}")]
    NonzeroQMean(f64),
    #[error("p must have zero mean for this operation, got p̂0 = {0}")]
    NonzeroPMean(f64),
    #[error("coefficient for mode {0} violates conjugate symmetry")]
    NonRealCoefficient(i64),
    #[error("mode {0} listed more than once")]
    DuplicateMode(i64),
    #[error("non-finite coefficient for mode {0}")]
    NonFiniteCoefficient(i64),
    #[error("integrator could not meet tolerance (t = {t}, steps = {steps})")]
    ToleranceNotMet { t: f64, steps: usize },
    #[error("operation undefined at lambda = 0")]
    ZeroLambda,
    #[error("operation requires real lambda, got imaginary part {0}")]
    NonRealLambda(f64),
    #[error("grid too coarse: step {step} exceeds limit {limit}; use a finer grid")]
    WindowTooCoarse { step: f64, limit: f64 },
    #[error("{what}: found {found}, expected {expected}")]
    CountMismatch { what: String, found: f64, expected: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("order {requested} not supported (max {max})")]
    UnsupportedOrder { requested: usize, max: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
