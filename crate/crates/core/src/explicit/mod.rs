//! The explicit parabolic-profile solution of the first-order planning
//! problem and of its quadratic-penalty variant.
//!
//! Inside its support the density is `r(t) (1 - (x / l(t))^2)_+` with
//! `r l = 3/4`, and the value function is `k(t) + a(t) x^2 / 2`. Substituting
//! this ansatz into the first-order system gives
//!
//! ```text
//! k' = r,   r' = -a r,   a' = -(a^2 + (32/9) r^3)
//! ```
//!
//! on the whole of `(0, 1)`. The first integral `a^2 = (64/9) r^2 (r - r_min)`
//! fixes the turning value: symmetric blow-up at `t = 0` and `t = 1` forces
//! `r_min = (3 pi / 8)^(2/3)` at `t = 1/2`. Outside the support the value
//! function is continued by straight characteristics tangent to the free
//! boundary `|x| = l(t)`, see [`CharacteristicFan`].

mod fan;
mod ode;
mod profile;
mod rate;

pub use fan::{eval_u_bar, CharacteristicFan};
pub use ode::{Phase, ProfileOde, StepControl, CONGESTION_COEFF};
pub use profile::{
    eval_rho_bar, integrate_eta_profile, integrate_eta_profile_with, integrate_limit_profile,
    limit_turning_density, MatchingData, ProfileKind, ProfileSample, ProfileSolution,
    DEFAULT_T_FLOOR, HALF_MASS_PRODUCT,
};
pub use rate::{rate_functional_of_profile, rate_parts_of_profile};

/// Integral of the leading-order blow-up density `(4 s)^(-2/3)` over `(0, tau)`.
pub(crate) fn singular_tail_mass(tau: f64) -> f64 {
    3.0 * tau.cbrt() / 4.0_f64.powf(2.0 / 3.0)
}
