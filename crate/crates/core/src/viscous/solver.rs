use serde::{Deserialize, Serialize};

use super::energy::{compute, EnergyTrace};
use super::fp::fp_backward_tracked;
use super::{hjb_forward, ViscousParams};
use crate::numerics::{
    dirac_slice, l2_spacetime_norm, FluxField, MollifiedDirac, ScalarField, SpaceTimeGrid,
};
use crate::{Error, Result};

const MIN_DAMPING: f64 = 1.0 / 256.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Initial relaxation weight for the density update.
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Halve the damping once the update norm has grown twice since the
    /// last adjustment.
    pub adaptive: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tol: 1e-6,
            max_iter: 200,
            adaptive: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ViscousSolution {
    pub params: ViscousParams,
    pub u: ScalarField,
    pub rho: ScalarField,
    /// `rho u_x` on faces, with `rho` averaged onto the face.
    pub beta: FluxField,
    pub iterations: usize,
    pub converged: bool,
    pub final_update_norm: f64,
    pub update_history: Vec<f64>,
    pub final_damping: f64,
    /// Smallest density produced by the last backward sweep before clamping.
    pub min_rho_before_clamp: f64,
    pub energy: EnergyTrace,
}

/// Staggered flux `rho u_x` from nodal fields.
pub fn flux_of(u: &ScalarField, rho: &ScalarField, grid: &SpaceTimeGrid) -> FluxField {
    let dx = grid.dx();
    let mut beta = FluxField::zeros(grid);
    for n in 0..=grid.n_t() {
        let (r, v) = (rho.slice(n), u.slice(n));
        for f in 0..grid.n_faces() {
            beta.values[[n, f]] = 0.5 * (r[f] + r[f + 1]) * (v[f + 1] - v[f]) / dx;
        }
    }
    beta
}

/// Damped Picard iteration `u = HJB(rho)`, `rho <- (1 - w) rho + w FP(u)`.
///
/// Stops when the space-time `L^2` size of the density update drops below
/// `tol`. Without convergence the iterate with the smallest update is
/// returned with `converged == false`.
pub fn solve_fixed_point(
    p: &ViscousParams,
    grid: &SpaceTimeGrid,
    d: &MollifiedDirac,
    opts: &SolverOptions,
) -> Result<ViscousSolution> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "damping must lie in (0, 1], got {}",
            opts.damping
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let terminal = dirac_slice(grid, d)?;
    let zero = ScalarField::zeros(grid, crate::numerics::Quantity::Density);
    let (mut rho, mut min_seen) =
        fp_backward_tracked(&hjb_forward(&zero, p, grid)?, p, grid, &terminal)?;

    let mut omega = opts.damping;
    let mut history = Vec::new();
    let mut best = (f64::INFINITY, rho.clone(), min_seen);
    let mut rises = 0;
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let u = hjb_forward(&rho, p, grid)?;
        let (fresh, m) = fp_backward_tracked(&u, p, grid, &terminal)?;
        let mut next = rho.clone();
        next.values
            .zip_mut_with(&fresh.values, |a, &b| *a = (1.0 - omega) * *a + omega * b);
        let update = l2_spacetime_norm((&next.values - &rho.values).view(), grid);
        if let Some(&last) = history.last() {
            if update > last {
                rises += 1;
            }
        }
        history.push(update);
        rho = next;
        min_seen = m;
        if update < best.0 {
            best = (update, rho.clone(), min_seen);
        }
        if update < opts.tol {
            converged = true;
            break;
        }
        if opts.adaptive && rises >= 2 && omega > MIN_DAMPING {
            omega *= 0.5;
            rises = 0;
        }
    }
    if !converged {
        rho = best.1;
        min_seen = best.2;
    }
    let u = hjb_forward(&rho, p, grid)?;
    let beta = flux_of(&u, &rho, grid);
    let energy = compute(&u.values.view(), &rho.values.view(), p.eta, grid);
    Ok(ViscousSolution {
        params: *p,
        u,
        rho,
        beta,
        iterations: history.len(),
        converged,
        final_update_norm: if converged {
            history[history.len() - 1]
        } else {
            best.0
        },
        update_history: history,
        final_damping: omega,
        min_rho_before_clamp: min_seen,
        energy,
    })
}
