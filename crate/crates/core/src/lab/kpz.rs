use serde::{Deserialize, Serialize};

use crate::numerics::{slice_mass, SpaceTimeGrid};
use crate::viscous::ViscousSolution;
use crate::{Error, Result};

/// Exponents of the rescaling `eps' = eps mu^alpha`, terminal mass
/// `mu^beta`, value `A mu^gamma`, and the power of `lambda = 1 / eps` applied
/// to the action in the rate proxy.
///
/// The defaults follow from the dilation `u_mu = mu^gamma u(mu^(-gamma/2) x, t)`,
/// `rho_mu = mu^gamma rho(mu^(-gamma/2) x, t)`, which maps the viscous system
/// to itself with `eps' = eps mu^gamma`, keeps `x^2 / (2 eta)` fixed and
/// multiplies the mass by `mu^(3 gamma / 2)`; with `gamma = 1` the action
/// `int int rho^2` scales like `lambda^(5/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KpzExponents {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub rate: f64,
}

impl Default for KpzExponents {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.5,
            gamma: 1.0,
            rate: 2.5,
        }
    }
}

impl KpzExponents {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "γ must be positive, got {}",
                self.gamma
            )));
        }
        if ![self.alpha, self.beta, self.rate]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidParameter(
                "KPZ exponents must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Rescaling diagnostics of one viscous solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpzRecord {
    /// `1 / eps`.
    pub lambda: f64,
    /// `A = u(0, 1)`.
    pub a_value: f64,
    /// `|A - k(1)|`.
    pub a_error: f64,
    /// `A^(-1/gamma)`.
    pub mu_raw: f64,
    /// `(A / k(1))^(-1/gamma)`: the factor after normalizing the limit value
    /// at the origin to 1.
    pub mu: f64,
    /// Terminal mass of the solution, 1 up to round-off.
    pub terminal_mass: f64,
    /// `lambda^(-3/2)` times the terminal mass.
    pub mass_three_halves: f64,
    /// `lambda^(-2/3)` times the terminal mass.
    pub mass_two_thirds: f64,
    /// `lambda^rate I`.
    pub rate_proxy: f64,
}

/// Diagnostics of `sol` against the limit value `k_terminal = k(1)`, given
/// the action `action` of the solution.
pub fn kpz_rescale_diagnostics(
    sol: &ViscousSolution,
    grid: &SpaceTimeGrid,
    action: f64,
    k_terminal: f64,
    exponents: &KpzExponents,
) -> Result<KpzRecord> {
    exponents.validate()?;
    if !sol.converged {
        return Err(Error::InvalidParameter(
            "KPZ diagnostics need a converged solution".into(),
        ));
    }
    let lambda = 1.0 / sol.params.eps;
    let a_value = sol.u.values[[grid.n_t(), grid.center()]];
    let terminal_mass = slice_mass(sol.rho.slice(grid.n_t()), grid.dx());
    let g = exponents.gamma;
    Ok(KpzRecord {
        lambda,
        a_value,
        a_error: (a_value - k_terminal).abs(),
        mu_raw: a_value.powf(-1.0 / g),
        mu: (a_value / k_terminal).powf(-1.0 / g),
        terminal_mass,
        mass_three_halves: lambda.powf(-1.5) * terminal_mass,
        mass_two_thirds: lambda.powf(-2.0 / 3.0) * terminal_mass,
        rate_proxy: lambda.powf(exponents.rate) * action,
    })
}
