use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The relation `eps <= c eta^alpha` under which viscous solutions are
/// compared with the first-order limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Coupling {
    pub c: f64,
    pub alpha: f64,
}

impl Coupling {
    /// `c eta^alpha`.
    pub fn eps(&self, eta: f64) -> f64 {
        self.c * eta.powf(self.alpha)
    }
}

impl Default for Coupling {
    fn default() -> Self {
        Self { c: 1.0, alpha: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViscousParams {
    pub eps: f64,
    pub eta: f64,
    pub coupling: Coupling,
}

impl ViscousParams {
    pub fn new(eps: f64, eta: f64) -> Result<Self> {
        Self::with_coupling(eps, eta, Coupling::default())
    }

    pub fn with_coupling(eps: f64, eta: f64, coupling: Coupling) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ε must be positive, got {eps}"
            )));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "η must be positive, got {eta}"
            )));
        }
        Ok(Self { eps, eta, coupling })
    }

    pub fn satisfies_coupling(&self) -> bool {
        self.eps <= self.coupling.eps(self.eta)
    }

    /// `eps |ln eta|`, which must vanish along a convergent sequence.
    pub fn eps_log_eta(&self) -> f64 {
        self.eps * self.eta.ln().abs()
    }
}
