use serde::{Deserialize, Serialize};

use super::ViscousSolution;
use crate::numerics::SpaceTimeGrid;

/// Per-slice integrals of a solution pair, and the defect in the identity
/// `d/dt int rho u = int (rho (u_x)^2 / 2 + rho^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub t: Vec<f64>,
    pub mass: Vec<f64>,
    pub rho_u: Vec<f64>,
    pub rho_sq: Vec<f64>,
    pub rho_ux_sq: Vec<f64>,
    pub second_moment: Vec<f64>,
    /// `int rho x^2 / (2 (eta + t))`.
    pub weighted_moment: Vec<f64>,
    /// Largest identity defect over time steps, relative to the largest
    /// right-hand side.
    pub identity_residual: f64,
    pub identity_residual_abs: f64,
    pub sup_rho_u: f64,
    /// `int_0^1 int rho^2`, right rectangle rule in time.
    pub congestion_total: f64,
}

impl EnergyTrace {
    pub fn to_rows(&self) -> Vec<[f64; 7]> {
        (0..self.t.len())
            .map(|n| {
                [
                    self.t[n],
                    self.mass[n],
                    self.rho_u[n],
                    self.rho_sq[n],
                    self.rho_ux_sq[n],
                    self.second_moment[n],
                    self.weighted_moment[n],
                ]
            })
            .collect()
    }

    pub const HEADER: [&'static str; 7] = [
        "t",
        "mass",
        "rho_u",
        "rho_sq",
        "rho_ux_sq",
        "second_moment",
        "weighted_moment",
    ];
}

pub fn energy_trace(sol: &ViscousSolution, grid: &SpaceTimeGrid) -> EnergyTrace {
    compute(
        &sol.u.values.view(),
        &sol.rho.values.view(),
        sol.params.eta,
        grid,
    )
}

pub(crate) fn compute(
    u: &ndarray::ArrayView2<'_, f64>,
    rho: &ndarray::ArrayView2<'_, f64>,
    eta: f64,
    grid: &SpaceTimeGrid,
) -> EnergyTrace {
    let (n_x, n_t, dx, dt) = (grid.n_x(), grid.n_t(), grid.dx(), grid.dt());
    let xs = grid.xs();
    let mut tr = EnergyTrace {
        t: grid.ts(),
        mass: Vec::with_capacity(n_t + 1),
        rho_u: Vec::with_capacity(n_t + 1),
        rho_sq: Vec::with_capacity(n_t + 1),
        rho_ux_sq: Vec::with_capacity(n_t + 1),
        second_moment: Vec::with_capacity(n_t + 1),
        weighted_moment: Vec::with_capacity(n_t + 1),
        identity_residual: 0.0,
        identity_residual_abs: 0.0,
        sup_rho_u: f64::NEG_INFINITY,
        congestion_total: 0.0,
    };
    for n in 0..=n_t {
        let (r, v) = (rho.row(n), u.row(n));
        let mut sums = [0.0; 4];
        for i in 0..n_x {
            sums[0] += r[i];
            sums[1] += r[i] * v[i];
            sums[2] += r[i] * r[i];
            sums[3] += r[i] * xs[i] * xs[i];
        }
        let kinetic: f64 = (0..n_x - 1)
            .map(|f| 0.5 * (r[f] + r[f + 1]) * ((v[f + 1] - v[f]) / dx).powi(2))
            .sum();
        tr.mass.push(sums[0] * dx);
        tr.rho_u.push(sums[1] * dx);
        tr.rho_sq.push(sums[2] * dx);
        tr.rho_ux_sq.push(kinetic * dx);
        tr.second_moment.push(sums[3] * dx);
        tr.weighted_moment
            .push(sums[3] * dx / (2.0 * (eta + grid.t(n))));
    }
    // Time levels as the scheme couples them: the HJB step into n + 1 sees
    // rho at n + 1, the Fokker-Planck step into n transports with u at n.
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for n in 0..n_t {
        let lhs = (tr.rho_u[n + 1] - tr.rho_u[n]) / dt;
        let rhs = 0.5 * tr.rho_ux_sq[n] + tr.rho_sq[n + 1];
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(rhs.abs());
    }
    tr.identity_residual_abs = worst;
    tr.identity_residual = if scale > 0.0 { worst / scale } else { worst };
    tr.sup_rho_u = tr.rho_u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    tr.congestion_total = tr.rho_sq[1..].iter().sum::<f64>() * dt;
    tr
}
