use thiserror::Error;

use crate::solver::DiagnosticsRecord;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported background: {0}")]
    UnsupportedBackground(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("hypothesis fails: {0}")]
    Hypothesis(String),

    /// A grid point left the cone {sigma1 > 0, sigma2 > 0}.
    #[error("cone violation at grid index {index} (t = {t}): sigma1 = {sigma1}, sigma2 = {sigma2}")]
    ConeViolation {
        index: usize,
        t: f64,
        sigma1: f64,
        sigma2: f64,
    },

    #[error("newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// The continuation step fell below the minimum without reaching the target.
    #[error("path failure at t = {t_reached} (target {t_target}): {reason}")]
    PathFailure {
        t_reached: f64,
        t_target: f64,
        reason: String,
        trace: Vec<DiagnosticsRecord>,
    },

    #[error("state is stale: {0}")]
    StaleState(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
