//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received a value outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A tabulated rate law was asked for a value outside its sampled range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Iterative linear solve did not reach the residual contract.
    #[error("linear solver stalled after {iterations} iterations (relative residual {residual:.3e})")]
    SolverFailure { iterations: usize, residual: f64 },

    /// Nonlinear nodewise rate inversion did not converge.
    #[error("phase-field fixed point did not converge after {iterations} iterations (change {change:.3e})")]
    FixedPointDivergence { iterations: usize, change: f64 },

    /// Crack-tip series has no window of steady propagation.
    #[error("no steady propagation window found: {0}")]
    NoSteadyWindow(String),

    /// Scenario configuration rejected.
    #[error("config error: {0}")]
    Config(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
