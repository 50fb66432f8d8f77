//! Finite-dimensional operator-algebra workbench.
//!
//! Everything here works with concrete complex matrix algebras: *-subspaces
//! and subalgebras of the n x n matrices under the trace inner product,
//! Dirac-style constraint reduction of unital algebras, abelian gauge
//! symmetry realized through twisted crossed products, and the interplay of
//! the two (which gauge sectors survive a constraint reduction, and what
//! structure descends to the reduced algebra).
//!
//! The numerical policy is uniform: ranks come from Gram-matrix spectra with
//! a relative cutoff, equalities are tolerance-based, and every structural
//! claim an operation returns has been re-verified numerically against an
//! independent formulation wherever one exists.

pub mod algebra;
pub mod cocycle;
pub mod constraint;
pub mod crossed;
pub mod error;
pub mod group;
pub mod hilbert;
pub mod map;
pub mod mat;
pub mod report;
pub mod scenario;
pub mod subspace;
pub mod superselect;
pub mod tol;
pub mod toy;

pub use error::{CoreError, Result};
pub use mat::MatElem;
pub use subspace::Subspace;
pub use tol::ToleranceContext;
