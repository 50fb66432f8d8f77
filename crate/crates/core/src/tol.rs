use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Numerical policy shared by every operation in the workbench.
///
/// `rank_tol` is the relative singular-value (and eigenvalue) cutoff used for
/// all rank decisions: a singular value counts as nonzero when it is at least
/// `rank_tol` times the largest one.  `eq_tol` governs tolerance-based
/// equality of matrices and subspaces.  Exact comparison of floating-point
/// matrices is never used.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ToleranceContext {
    pub rank_tol: f64,
    pub eq_tol: f64,
}

impl Default for ToleranceContext {
    fn default() -> Self {
        ToleranceContext {
            rank_tol: 1e-9,
            eq_tol: 1e-8,
        }
    }
}

impl ToleranceContext {
    pub fn new(rank_tol: f64, eq_tol: f64) -> Result<Self> {
        let ok = |t: f64| t.is_finite() && t > 0.0 && t < 1.0;
        if !ok(rank_tol) || !ok(eq_tol) {
            return Err(CoreError::BadTolerance(format!(
                "rank_tol {rank_tol} and eq_tol {eq_tol} must lie strictly between 0 and 1"
            )));
        }
        Ok(ToleranceContext { rank_tol, eq_tol })
    }

    /// Scale-aware equality bound for an object of the given magnitude.
    pub fn eq_bound(&self, scale: f64) -> f64 {
        self.eq_tol * (1.0 + scale)
    }
}
