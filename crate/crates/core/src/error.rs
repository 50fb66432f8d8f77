use thiserror::Error;

/// Errors surfaced by the workbench kernel and the layers above it.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite: {0}")]
    NonFiniteEntry(String),

    #[error("tolerance out of range: {0}")]
    BadTolerance(String),

    #[error("subspace is not *-closed (residual {residual:.3e})")]
    NotStarClosed { residual: f64 },

    #[error("set does not close under products: {0}")]
    NotAnAlgebra(String),

    #[error("not a projection: {0}")]
    NotAProjection(String),

    #[error("element lies outside the expected algebra: {0}")]
    NotInAlgebra(String),

    #[error("constraint set is not first class: the unit lies in the algebra it generates")]
    NotFirstClass,

    #[error("invariant violated: {check} (residual {residual:.3e})")]
    InvariantViolation { check: String, residual: f64 },

    #[error("no Dirac states: the constraint support projection is the identity")]
    NoDiracStates,

    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),

    #[error("group action is not by *-automorphisms: {0}")]
    ActionNotAutomorphic(String),

    #[error("charge function maps outside the Weyl radical: {0}")]
    RadicalViolation(String),

    #[error("witness state construction failed: {0}")]
    WitnessFailure(String),

    #[error("size guard tripped: {0}")]
    SizeGuard(String),

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("scenario schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub fn invariant(check: impl Into<String>, residual: f64) -> Self {
        CoreError::InvariantViolation {
            check: check.into(),
            residual,
        }
    }
}
