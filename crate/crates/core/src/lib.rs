//! Numerical solvers for the one-dimensional local mean field game planning
//! problem with Dirac initial and terminal measures.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: grids, conservative discrete calculus, banded solves,
//!   mollified Dirac data and quadrature.
//! - [`explicit`]: the semi-analytic parabolic-profile solution of the
//!   first-order planning problem and its quadratic-penalty variant.
//! - [`viscous`]: the viscous forward-backward system solved by damped
//!   Picard iteration.
//! - [`variational`]: the convex action functionals, an explicit admissible
//!   upper-bound pair, and a primal-dual minimizer of the first-order problem.
//! - [`lab`]: parameter sweeps, convergence diagnostics and the KPZ rescaling
//!   record.

pub mod error;
pub mod explicit;
pub mod lab;
pub mod numerics;
pub mod output;
pub mod variational;
pub mod viscous;

pub use error::{Error, Result};
