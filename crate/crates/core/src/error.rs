use std::path::PathBuf;

use thiserror::Error;

/// A thermodynamic state that violates the EOS admissibility conditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("non-positive density {0}")]
    NonPositiveDensity(f64),
    #[error("pressure {pressure} Pa violates p + p_inf > 0 (p_inf = {p_inf} Pa)")]
    NegativeStiffenedPressure { pressure: f64, p_inf: f64 },
    #[error("non-finite state")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiemannError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("exact solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("velocity jump {du} m/s opens a vacuum (limit {limit} m/s)")]
    Vacuum { du: f64, limit: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("malformed configuration at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid state in cell (i = {i}, j = {j}) at step {step}: {source}")]
    Positivity { i: usize, j: usize, step: u64, source: StateError },
    #[error("Riemann solve failed at step {step}: {source}")]
    Riemann { step: u64, source: RiemannError },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io { path: path.into(), source }
    }
}
