//! Computational substrate shared by every solver: the space-time grid,
//! field containers, conservative difference operators, banded solves,
//! mollified Dirac data and quadrature.

mod calculus;
mod dirac;
mod field;
mod grid;
mod quadrature;
mod tridiag;

pub use calculus::{discrete_divergence, face_average, face_gradient};
pub use dirac::{dirac_slice, MollifiedDirac, MollifierKind};
pub use field::{FluxField, Quantity, ScalarField};
pub use grid::SpaceTimeGrid;
pub use quadrature::{gauss_legendre, l2_spacetime_norm, simpson_weights, slice_mass};
pub use tridiag::{tridiagonal_solve, Tridiagonal};
