//! TOML run configuration. Every table rejects unknown keys and every key
//! has a default, so an empty file is a valid configuration.

use std::path::PathBuf;

use mfg_planning::explicit::DEFAULT_T_FLOOR;
use mfg_planning::lab::{GridMode, GridSpec, KpzExponents, ReferenceSpec, SweepPlan, UWindow};
use mfg_planning::variational::{MinimizerOptions, Weights};
use mfg_planning::viscous::{Coupling, SolverOptions, ViscousParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub out_dir: PathBuf,
    /// Grid of the viscous solves and sweeps.
    pub grid: GridSpec,
    pub weights: Weights,
    /// Worker threads for sweep points; 0 uses every core.
    pub workers: usize,
    pub explicit: ExplicitConfig,
    pub solve: SolveConfig,
    pub minimize: MinimizeConfig,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("out"),
            grid: GridSpec::default(),
            weights: Weights::HALF,
            workers: 0,
            explicit: ExplicitConfig::default(),
            solve: SolveConfig::default(),
            minimize: MinimizeConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExplicitConfig {
    /// Penalized profile when set, the limit profile otherwise.
    pub eta: Option<f64>,
    pub n_steps: usize,
    pub t_floor: f64,
}

impl Default for ExplicitConfig {
    fn default() -> Self {
        Self {
            eta: None,
            n_steps: 2000,
            t_floor: DEFAULT_T_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub eps: f64,
    pub eta: f64,
    pub solver: SolverOptions,
    /// Times of the density and value snapshots.
    pub snapshot_times: [f64; 5],
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            eps: 0.05,
            eta: 0.1,
            solver: SolverOptions::default(),
            snapshot_times: [0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizeConfig {
    pub grid: GridSpec,
    pub options: MinimizerOptions,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec {
                x_max: 3.0,
                n_x: 201,
                n_t: 200,
                dirac_multiple: 4.0,
            },
            options: MinimizerOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Strictly decreasing penalty scales; `eps` follows the coupling rule.
    pub etas: Vec<f64>,
    pub coupling: Coupling,
    pub grid_mode: GridMode,
    pub reference: ReferenceSpec,
    pub solver: SolverOptions,
    pub window: UWindow,
    pub margin: f64,
    pub kpz: KpzExponents,
    pub trend_slack: f64,
    pub record_timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            etas: vec![0.2, 0.1, 0.05, 0.025],
            coupling: Coupling::default(),
            grid_mode: GridMode::Fixed,
            reference: ReferenceSpec::default(),
            solver: SolverOptions::default(),
            window: UWindow::default(),
            margin: 0.05,
            kpz: KpzExponents::default(),
            trend_slack: 0.01,
            record_timing: false,
        }
    }
}

impl RunConfig {
    pub fn plan(&self) -> mfg_planning::Result<SweepPlan> {
        let s = &self.sweep;
        let mut plan = SweepPlan::coupled(&s.etas, s.coupling, self.grid)?;
        plan.grid_mode = s.grid_mode;
        plan.reference = s.reference;
        plan.solver = s.solver;
        plan.weights = self.weights;
        plan.window = s.window;
        plan.margin = s.margin;
        plan.kpz = s.kpz;
        plan.trend_slack = s.trend_slack;
        plan.workers = self.workers;
        plan.record_timing = s.record_timing;
        plan.validate()?;
        Ok(plan)
    }

    pub fn solve_params(&self) -> mfg_planning::Result<ViscousParams> {
        ViscousParams::new(self.solve.eps, self.solve.eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(
            toml::from_str::<RunConfig>("").unwrap(),
            RunConfig::default()
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("epsilon = 0.1").is_err());
        assert!(toml::from_str::<RunConfig>("[solve]\nesp = 0.1").is_err());
        assert!(toml::from_str::<RunConfig>("[grid]\nnx = 11").is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let c = RunConfig::default();
        let s = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<RunConfig>(&s).unwrap(), c);
    }
}
