use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::explicit::ProfileSolution;
use crate::numerics::{
    dirac_slice, FluxField, MollifiedDirac, Quantity, ScalarField, SpaceTimeGrid,
};
use crate::{Error, Result};

/// Weights of the congestion and kinetic parts of the action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub congestion: f64,
    pub kinetic: f64,
}

impl Weights {
    /// `1/2 (rho^2 + beta^2 / rho)`.
    pub const HALF: Self = Self {
        congestion: 0.5,
        kinetic: 0.5,
    };
    /// `rho^2 + 1/2 beta^2 / rho`.
    pub const UNIT_CONGESTION: Self = Self {
        congestion: 1.0,
        kinetic: 0.5,
    };

    pub fn label(&self) -> String {
        format!("{} rho^2 + {} beta^2/rho", self.congestion, self.kinetic)
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self::HALF
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Constraint {
    Viscous { eps: f64 },
    FirstOrder,
}

impl Constraint {
    pub fn eps(&self) -> f64 {
        match *self {
            Constraint::Viscous { eps } => eps,
            Constraint::FirstOrder => 0.0,
        }
    }
}

/// Density-flux pair on a grid. `eta` attaches the initial penalty; without
/// it the initial slice is treated as prescribed data.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissiblePair {
    pub rho: ScalarField,
    pub beta: FluxField,
    pub constraint: Constraint,
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub total: f64,
    pub penalization: f64,
    pub congestion: f64,
    pub kinetic: f64,
    /// Space-time `L^2` norm of the discrete continuity defect.
    pub constraint_residual: f64,
    pub weights: Weights,
    /// False when some face carries flux without density; the total is then
    /// `+inf`.
    pub finite: bool,
}

/// Four-point average of `rho` around face `f` between slices `n`, `n + 1`.
pub(crate) fn face_mean(rho: &Array2<f64>, n: usize, f: usize) -> f64 {
    0.25 * (rho[[n, f]] + rho[[n, f + 1]] + rho[[n + 1, f]] + rho[[n + 1, f + 1]])
}

/// `(rho^{n+1} - rho^n) / dt + D beta^n + eps D2 rho^n` for every step, with
/// zero flux through the domain ends.
pub fn continuity_residual(
    rho: &Array2<f64>,
    beta: &Array2<f64>,
    eps: f64,
    grid: &SpaceTimeGrid,
) -> Array2<f64> {
    let (n_x, n_t, dx, dt) = (grid.n_x(), grid.n_t(), grid.dx(), grid.dt());
    let mut res = Array2::zeros((n_t, n_x));
    for n in 0..n_t {
        for i in 0..n_x {
            let right = if i + 1 < n_x { beta[[n, i]] } else { 0.0 };
            let left = if i > 0 { beta[[n, i - 1]] } else { 0.0 };
            let mut v = (rho[[n + 1, i]] - rho[[n, i]]) / dt + (right - left) / dx;
            if eps != 0.0 {
                let gr = if i + 1 < n_x {
                    rho[[n, i + 1]] - rho[[n, i]]
                } else {
                    0.0
                };
                let gl = if i > 0 {
                    rho[[n, i]] - rho[[n, i - 1]]
                } else {
                    0.0
                };
                v += eps * (gr - gl) / (dx * dx);
            }
            res[[n, i]] = v;
        }
    }
    res
}

pub fn eval_functional(
    pair: &AdmissiblePair,
    grid: &SpaceTimeGrid,
    weights: Weights,
) -> Result<FunctionalValue> {
    if !pair.rho.fits(grid) || !pair.beta.fits(grid) {
        return Err(Error::LengthMismatch {
            expected: (grid.n_t() + 1) * grid.n_x(),
            got: pair.rho.values.len(),
        });
    }
    if pair.rho.min() < 0.0 {
        return Err(Error::InvalidParameter(
            "density must be nonnegative".into(),
        ));
    }
    let (n_x, n_t, dx, dt) = (grid.n_x(), grid.n_t(), grid.dx(), grid.dt());
    let rho = &pair.rho.values;
    let beta = &pair.beta.values;

    let mut congestion = 0.0;
    for n in 0..=n_t {
        let w = if n == 0 || n == n_t { 0.5 } else { 1.0 };
        congestion += w * rho.row(n).iter().map(|r| r * r).sum::<f64>();
    }
    congestion *= weights.congestion * dx * dt;

    let mut kinetic = 0.0;
    let mut finite = true;
    for n in 0..n_t {
        for f in 0..n_x - 1 {
            let b = beta[[n, f]];
            if b == 0.0 {
                continue;
            }
            let m = face_mean(rho, n, f);
            if m > 0.0 {
                kinetic += b * b / m;
            } else {
                finite = false;
            }
        }
    }
    kinetic *= weights.kinetic * dx * dt;

    let penalization = match pair.eta {
        Some(eta) => {
            grid.xs()
                .iter()
                .zip(rho.row(0))
                .map(|(x, r)| r * x * x / (2.0 * eta))
                .sum::<f64>()
                * dx
        }
        None => 0.0,
    };

    let res = continuity_residual(rho, beta, pair.constraint.eps(), grid);
    let constraint_residual = (res.iter().map(|r| r * r).sum::<f64>() * dx * dt).sqrt();
    let total = if finite {
        penalization + congestion + kinetic
    } else {
        f64::INFINITY
    };
    Ok(FunctionalValue {
        total,
        penalization,
        congestion,
        kinetic: if finite { kinetic } else { f64::INFINITY },
        constraint_residual,
        weights,
        finite,
    })
}

/// Samples an explicit profile on the grid: `rho` at the nodes, with the
/// Dirac slices replaced by the mollifier, and `beta = rho a x` at the faces
/// at half steps. The penalized kind keeps its parabolic initial slice and
/// carries its `eta`.
pub fn sample_profile_pair(
    p: &ProfileSolution,
    grid: &SpaceTimeGrid,
    d: &MollifiedDirac,
) -> Result<AdmissiblePair> {
    let (n_t, dt) = (grid.n_t(), grid.dt());
    let dirac = dirac_slice(grid, d)?;
    let mut rho = ScalarField::zeros(grid, Quantity::Density);
    for n in 0..=n_t {
        let t = grid.t(n);
        let singular = n == n_t || (n == 0 && p.eta().is_none());
        if singular {
            rho.slice_mut(n).assign(&ndarray::ArrayView1::from(&dirac));
        } else {
            let s = p.at(t)?;
            for (i, x) in grid.xs().into_iter().enumerate() {
                rho.values[[n, i]] = s.rho(x);
            }
        }
    }
    let mut beta = FluxField::zeros(grid);
    for n in 0..n_t {
        let s = p.at((n as f64 + 0.5) * dt)?;
        for (f, x) in grid.face_xs().into_iter().enumerate() {
            beta.values[[n, f]] = s.rho(x) * s.a * x;
        }
    }
    Ok(AdmissiblePair {
        rho,
        beta,
        constraint: Constraint::FirstOrder,
        eta: p.eta(),
    })
}
