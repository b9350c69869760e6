use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum JtdError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{solver} failed to converge after {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("degenerate geometry: ions {i} and {j} coincide")]
    DegenerateGeometry { i: usize, j: usize },

    #[error("coupling {lambda} is outside the {phase} phase (critical coupling {lambda_c})")]
    PhaseDomain {
        phase: &'static str,
        lambda: f64,
        lambda_c: f64,
    },

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("vector norm {norm} differs from 1")]
    NotNormalized { norm: f64 },

    #[error("charge sector C = {charge} is empty")]
    EmptySector { charge: f64 },

    #[error("ground-state minimum at C = {charge} sits on the edge of the sector window; widen the window")]
    WindowEdge { charge: f64 },
}

pub type Result<T> = std::result::Result<T, JtdError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> JtdError {
    JtdError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
