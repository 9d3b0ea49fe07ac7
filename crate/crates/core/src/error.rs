use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The denominator `1 + beta * z_prev` came within the guard of zero.
    #[error("step undefined: |1 + beta*z_prev| = {denominator:e} <= guard {guard_epsilon:e}")]
    Undefined { denominator: f64, guard_epsilon: f64 },

    #[error("iterate modulus {modulus:e} exceeds the overflow ceiling")]
    Overflow { modulus: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient data: need {needed} points, orbit has {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("orbit terminated early ({status}) before {needed} steps were available")]
    OrbitTerminated { status: String, needed: usize },

    #[error("tangent vector collapsed to zero at step {step}")]
    TangentCollapsed { step: usize },

    #[error("Newton refinement did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error(transparent)]
    Parse(#[from] crate::parse::ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
