//! Convex action functionals on discrete density-flux pairs.
//!
//! A pair is admissible for the viscous problem when
//! `rho_t + beta_x + eps rho_xx = 0` and for the first-order problem when
//! `rho_t + beta_x = 0`. The action is
//!
//! ```text
//! int rho(x, 0) x^2 / (2 eta) + int int (w_c rho^2 + w_k beta^2 / rho)
//! ```
//!
//! with the penalty present only when an `eta` is attached to the pair and
//! the weight pair `(w_c, w_k)` configurable (default `(1/2, 1/2)`).
//!
//! Discretization: `rho` is nodal on every time slice and `beta` lives on
//! faces, with flux level `n` driving the step from slice `n` to `n + 1`.
//! The congestion term uses the trapezoid rule in time; the kinetic term
//! divides by the four-point average of `rho` around the face and half step.

mod candidate;
mod functional;
mod minimize;
mod prox;

pub use candidate::{first_order_candidate, prop32_candidate, CandidateProfile};
pub use functional::{
    continuity_residual, eval_functional, sample_profile_pair, AdmissiblePair, Constraint,
    FunctionalValue, Weights,
};
pub use minimize::{minimize_first_order, MinimizerOptions, MinimizerReport};
pub use prox::perspective_prox;
