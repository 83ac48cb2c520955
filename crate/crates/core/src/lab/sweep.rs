use std::time::Instant;

use rayon::prelude::*;

use super::diagnostics::{
    cross_terms, local_uniform_u_error, uniqueness_identity_check, PlanningState,
};
use super::kpz::kpz_rescale_diagnostics;
use super::plan::SweepPlan;
use super::report::{
    ExperimentReport, LimitReference, PointMetrics, PointRecord, PointStatus, Verdicts,
};
use crate::explicit::{
    integrate_eta_profile_with, integrate_limit_profile, limit_turning_density,
    rate_parts_of_profile, CharacteristicFan, ProfileSolution,
};
use crate::numerics::{l2_spacetime_norm, MollifiedDirac};
use crate::variational::{eval_functional, sample_profile_pair, AdmissiblePair, Constraint};
use crate::viscous::{solve_fixed_point, ViscousParams};
use crate::{Error, Result};

/// The limit profile with its fan and reference values.
pub struct LimitData {
    pub profile: ProfileSolution,
    pub fan: CharacteristicFan,
    pub reference: LimitReference,
}

impl LimitData {
    pub fn new(plan: &SweepPlan) -> Result<Self> {
        let profile = integrate_limit_profile(plan.reference.n_steps, plan.reference.t_floor)?;
        let fan = CharacteristicFan::new(&profile);
        let (cong, kin) = rate_parts_of_profile(&profile);
        // The parts are computed with weight 1/2 each.
        let action = 2.0 * (plan.weights.congestion * cong + plan.weights.kinetic * kin);
        let reference = LimitReference {
            k_terminal: profile.k_terminal,
            action,
            r_turn: limit_turning_density(),
        };
        Ok(Self {
            profile,
            fan,
            reference,
        })
    }
}

fn measure(plan: &SweepPlan, k: usize, limit: &LimitData) -> Result<(PointStatus, PointMetrics)> {
    let (eps, eta) = plan.points[k];
    let spec = plan.grid_for(k);
    let grid = spec.grid()?;
    let d = MollifiedDirac::grid_gaussian(&grid, spec.dirac_multiple);
    let params = ViscousParams::with_coupling(eps, eta, plan.coupling)?;
    let sol = solve_fixed_point(&params, &grid, &d, &plan.solver)?;

    let eta_profile =
        integrate_eta_profile_with(eta, plan.reference.n_steps, plan.reference.t_floor)?;
    let eta_state = PlanningState::from_profile(&eta_profile, &grid, &d)?;
    let limit_rho = sample_profile_pair(&limit.profile, &grid, &d)?.rho.values;
    let l2_to_eta_profile = l2_spacetime_norm((&sol.rho.values - &eta_state.rho).view(), &grid);
    let l2_to_limit = l2_spacetime_norm((&sol.rho.values - &limit_rho).view(), &grid);

    let pair = AdmissiblePair {
        rho: sol.rho.clone(),
        beta: sol.beta.clone(),
        constraint: Constraint::Viscous { eps },
        eta: Some(eta),
    };
    let action = eval_functional(&pair, &grid, plan.weights)?;
    let u_error = local_uniform_u_error(&sol, &grid, &limit.profile, &limit.fan, &plan.window)?;
    let cross = cross_terms(&sol, &eta_state, &grid)?;
    let uniqueness_form = uniqueness_identity_check(
        &PlanningState::from_solution(&sol),
        &eta_state,
        &grid,
        plan.margin,
    )?;
    let kpz = if sol.converged {
        Some(kpz_rescale_diagnostics(
            &sol,
            &grid,
            action.total,
            limit.reference.k_terminal,
            &plan.kpz,
        )?)
    } else {
        None
    };
    let status = if sol.converged {
        PointStatus::Ok
    } else {
        PointStatus::NonConverged
    };
    Ok((
        status,
        PointMetrics {
            iterations: sol.iterations,
            final_update_norm: sol.final_update_norm,
            l2_to_eta_profile,
            l2_to_limit,
            action,
            action_error: (action.total - limit.reference.action).abs(),
            u_error,
            cross,
            uniqueness_form,
            kpz,
        },
    ))
}

/// Solve and measure point `k` of the plan. Failures are recorded in the
/// returned status.
pub fn run_point(plan: &SweepPlan, k: usize, limit: &LimitData) -> PointRecord {
    let start = Instant::now();
    let (status, metrics) = match measure(plan, k, limit) {
        Ok((status, m)) => (status, Some(m)),
        Err(e) => (PointStatus::Failed(e.to_string()), None),
    };
    let (eps, eta) = plan.points[k];
    PointRecord {
        index: k,
        eps,
        eta,
        grid: plan.grid_for(k),
        status,
        metrics,
        wall_time_s: plan.record_timing.then(|| start.elapsed().as_secs_f64()),
    }
}

/// Run every point of the plan, concurrently when more than one worker is
/// available, and aggregate the trend verdicts. Points are computed
/// independently, so the report does not depend on the worker count.
pub fn run_sweep(plan: &SweepPlan) -> Result<ExperimentReport> {
    plan.validate()?;
    let limit = LimitData::new(plan)?;
    let run = || -> Vec<PointRecord> {
        (0..plan.points.len())
            .into_par_iter()
            .map(|k| run_point(plan, k, &limit))
            .collect()
    };
    let records = if plan.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(plan.workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
            .install(run)
    } else {
        run()
    };
    let verdicts = Verdicts::from_records(&records, plan.trend_slack);
    Ok(ExperimentReport {
        plan: plan.clone(),
        limit: limit.reference,
        records,
        verdicts,
    })
}
