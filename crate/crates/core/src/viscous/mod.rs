//! Finite-difference solver for the viscous forward-backward system
//!
//! ```text
//! u_t - eps u_xx + (u_x)^2 / 2 = rho,        u(x, 0) = x^2 / (2 eta)
//! rho_t + eps rho_xx + (u_x rho)_x = 0,      rho(x, 1) = delta
//! ```
//!
//! by damped Picard iteration between a forward HJB sweep and a backward
//! Fokker-Planck sweep.

mod energy;
mod fp;
mod hjb;
mod params;
mod solver;

pub use energy::{energy_trace, EnergyTrace};
pub use fp::fp_backward;
pub use hjb::{comparison_function, hjb_forward};
pub use params::{Coupling, ViscousParams};
pub use solver::{flux_of, solve_fixed_point, SolverOptions, ViscousSolution};
