use thiserror::Error;

use crate::model::BasisKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: BasisKind, found: BasisKind },

    #[error("trace must equal 1 (found {trace})")]
    TraceNotUnity { trace: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("steady state is not unique (null-space dimension {null_dim})")]
    DegenerateSteadyState { null_dim: usize },

    #[error("steady-state residual {residual:e} exceeds tolerance {tolerance:e}")]
    SteadyStateResidual { residual: f64, tolerance: f64 },

    #[error("integration failed at t = {last_time}: {reason}")]
    IntegrationFailure { last_time: f64, reason: String },

    #[error(
        "negative eigenvalue {value:e} at t = {time} (trace {trace}, populations {populations:?})"
    )]
    NegativeEigenvalue {
        time: f64,
        value: f64,
        trace: f64,
        populations: [f64; 3],
    },
}
