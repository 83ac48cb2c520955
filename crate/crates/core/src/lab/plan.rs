use serde::{Deserialize, Serialize};

use crate::numerics::SpaceTimeGrid;
use crate::variational::Weights;
use crate::viscous::{Coupling, SolverOptions};
use crate::{Error, Result};

use super::diagnostics::UWindow;
use super::kpz::KpzExponents;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub x_max: f64,
    pub n_x: usize,
    pub n_t: usize,
    /// Width of the terminal gaussian in units of `dx`.
    pub dirac_multiple: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_max: 3.0,
            n_x: 401,
            n_t: 400,
            dirac_multiple: 2.0,
        }
    }
}

impl GridSpec {
    pub fn grid(&self) -> Result<SpaceTimeGrid> {
        SpaceTimeGrid::new(self.x_max, self.n_x, self.n_t)
    }

    /// Grid with `dx` and `dt` scaled by `factor`, keeping an odd node count.
    pub fn scaled(&self, factor: f64) -> Self {
        let cells = (((self.n_x - 1) as f64 / factor / 2.0).round() as usize).max(2) * 2;
        Self {
            n_x: cells + 1,
            n_t: ((self.n_t as f64 / factor).round() as usize).max(2),
            ..*self
        }
    }
}

/// Fixed grid for every point, or `dx` and `dt` proportional to
/// `eta^(1/2)` relative to the first point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridMode {
    #[default]
    Fixed,
    CoRefined,
}

/// Resolution of the explicit reference profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReferenceSpec {
    pub n_steps: usize,
    pub t_floor: f64,
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        Self {
            n_steps: 2000,
            t_floor: crate::explicit::DEFAULT_T_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    /// `(eps, eta)` points, `eta` strictly decreasing.
    pub points: Vec<(f64, f64)>,
    pub coupling: Coupling,
    pub grid: GridSpec,
    #[serde(default)]
    pub grid_mode: GridMode,
    #[serde(default)]
    pub reference: ReferenceSpec,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub weights: Weights,
    #[serde(default)]
    pub window: UWindow,
    /// Margin `theta` of the comparison-identity form on `[theta, 1 - theta]`.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub kpz: KpzExponents,
    /// Relative slack allowed in each step of a decreasing trend.
    #[serde(default = "default_slack")]
    pub trend_slack: f64,
    /// Worker threads for independent points; 0 uses the global pool.
    #[serde(default)]
    pub workers: usize,
    /// Record wall-clock times. Off by default so that reports are
    /// reproducible bit for bit.
    #[serde(default)]
    pub record_timing: bool,
}

fn default_margin() -> f64 {
    0.05
}

fn default_slack() -> f64 {
    0.01
}

impl SweepPlan {
    /// Points `(c eta^alpha, eta)` for the given `eta` values, with defaults
    /// elsewhere.
    pub fn coupled(etas: &[f64], coupling: Coupling, grid: GridSpec) -> Result<Self> {
        let plan = Self {
            points: etas.iter().map(|&eta| (coupling.eps(eta), eta)).collect(),
            coupling,
            grid,
            grid_mode: GridMode::Fixed,
            reference: ReferenceSpec::default(),
            solver: SolverOptions::default(),
            weights: Weights::HALF,
            window: UWindow::default(),
            margin: default_margin(),
            kpz: KpzExponents::default(),
            trend_slack: default_slack(),
            workers: 0,
            record_timing: false,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.points.is_empty() {
            return bad("a sweep needs at least one point".into());
        }
        for &(eps, eta) in &self.points {
            if !(eps > 0.0 && eta > 0.0 && eta <= 0.5) {
                return bad(format!("sweep point (ε = {eps}, η = {eta}) out of range"));
            }
            let target = self.coupling.eps(eta);
            if (eps - target).abs() > 1e-12 * target {
                return bad(format!(
                    "ε = {eps} does not follow the coupling rule (expected {target} at η = {eta})"
                ));
            }
        }
        if self.points.windows(2).any(|w| w[1].1 >= w[0].1) {
            return bad("η must decrease strictly along the sweep".into());
        }
        self.grid.grid()?;
        if !(self.grid.dirac_multiple > 0.0) {
            return bad("dirac_multiple must be positive".into());
        }
        self.window.validate()?;
        if !(self.margin > 0.0 && self.margin < 0.4) {
            return bad(format!("margin must lie in (0, 0.4), got {}", self.margin));
        }
        if !(self.trend_slack >= 0.0) {
            return bad("trend slack must be nonnegative".into());
        }
        self.kpz.validate()
    }

    /// Grid for point `k`.
    pub fn grid_for(&self, k: usize) -> GridSpec {
        match self.grid_mode {
            GridMode::Fixed => self.grid,
            GridMode::CoRefined => self
                .grid
                .scaled((self.points[k].1 / self.points[0].1).sqrt()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupled_plan_is_valid() {
        let plan = SweepPlan::coupled(&[0.2, 0.1, 0.05], Coupling::default(), GridSpec::default())
            .unwrap();
        assert_eq!(plan.points[1], (0.1, 0.1));
    }

    #[test]
    fn rejects_increasing_eta_and_broken_coupling() {
        assert!(SweepPlan::coupled(&[0.1, 0.2], Coupling::default(), GridSpec::default()).is_err());
        let mut plan =
            SweepPlan::coupled(&[0.2, 0.1], Coupling::default(), GridSpec::default()).unwrap();
        plan.points[0].0 = 0.3;
        assert!(plan.validate().is_err());
    }

    #[test]
    fn co_refined_grids_keep_odd_nodes() {
        let mut plan =
            SweepPlan::coupled(&[0.2, 0.05], Coupling::default(), GridSpec::default()).unwrap();
        plan.grid_mode = GridMode::CoRefined;
        let g = plan.grid_for(1);
        assert_eq!(g.n_x, 801);
        assert_eq!(g.n_t, 800);
        assert_eq!(plan.grid_for(0), plan.grid);
    }
}
