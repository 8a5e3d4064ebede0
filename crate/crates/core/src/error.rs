use std::fmt;

/// Errors surfaced by the analytic kernels and oracles.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    /// Input outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series hit its term cap before meeting the stopping rule.
    #[error("series did not converge within {terms} terms (last relative term {last_rel:.3e})")]
    Convergence { terms: usize, last_rel: f64 },
    /// A map requested for inversion is constant (k = 1).
    #[error("non-invertible: {0}")]
    NonInvertible(String),
}

impl CoreError {
    pub fn domain(msg: impl fmt::Display) -> Self {
        CoreError::Domain(msg.to_string())
    }

    pub fn convergence(terms: usize, last_rel: f64) -> Self {
        CoreError::Convergence { terms, last_rel }
    }

    pub fn non_invertible(msg: impl fmt::Display) -> Self {
        CoreError::NonInvertible(msg.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
