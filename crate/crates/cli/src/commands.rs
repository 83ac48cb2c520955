use std::fmt;
use std::fs;
use std::path::Path;

use mfg_planning::explicit::{
    integrate_eta_profile_with, integrate_limit_profile, rate_functional_of_profile,
    rate_parts_of_profile, ProfileSolution,
};
use mfg_planning::lab::{run_sweep, ExperimentReport, TrendVerdict};
use mfg_planning::numerics::{simpson_weights, slice_mass, MollifiedDirac, SpaceTimeGrid};
use mfg_planning::output::write_csv_file;
use mfg_planning::variational::{
    eval_functional, first_order_candidate, minimize_first_order, AdmissiblePair, Constraint,
    Weights,
};
use mfg_planning::viscous::{comparison_function, solve_fixed_point, EnergyTrace};
use mfg_planning::Error;
use serde_json::json;

use crate::config::RunConfig;

/// Tolerance of the mass and positivity checks on a viscous solution.
const MASS_TOL: f64 = 1e-10;

#[derive(Debug)]
pub enum Failure {
    /// Bad configuration or arguments.
    Usage(String),
    /// Non-convergence, a violated invariant or a failed trend.
    Check(String),
    /// Numerical or I/O failure.
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Check(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::InvalidGrid(_) | Error::UnderResolved { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn out_dir(cfg: &RunConfig) -> Result<&Path, Failure> {
    fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", cfg.out_dir.display())))?;
    Ok(&cfg.out_dir)
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<(), Failure> {
    fs::write(dir.join(name), serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// Action of a profile under `w`; the parts are computed with weight 1/2.
fn profile_action(p: &ProfileSolution, w: Weights) -> f64 {
    let (cong, kin) = rate_parts_of_profile(p);
    let penalty = rate_functional_of_profile(p) - cong - kin;
    2.0 * (w.congestion * cong + w.kinetic * kin) + penalty
}

fn checks_passed(failures: &[String]) -> Result<(), Failure> {
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}

pub fn explicit(cfg: &RunConfig) -> Result<(), Failure> {
    let e = &cfg.explicit;
    let profile = match e.eta {
        Some(eta) => integrate_eta_profile_with(eta, e.n_steps, e.t_floor)?,
        None => integrate_limit_profile(e.n_steps, e.t_floor)?,
    };
    let action = profile_action(&profile, cfg.weights);
    let dir = out_dir(cfg)?;
    profile.write_csv(fs::File::create(dir.join("profile.csv"))?)?;
    write_json(
        dir,
        "explicit.json",
        &json!({
            "config": cfg,
            "kind": profile.kind,
            "matching": profile.matching,
            "k_terminal": profile.k_terminal,
            "action": action,
            "convention": cfg.weights.label(),
            "samples": profile.samples.len(),
        }),
    )?;
    println!("t1 = {:.10}", profile.matching.t_turn);
    println!("r1 = {:.10}", profile.matching.r_turn);
    if let Some(r0) = profile.matching.r_start {
        println!("r0 = {r0:.10}");
    }
    println!("k(1) = {:.10}", profile.k_terminal);
    println!("I_bar = {action:.10} ({})", cfg.weights.label());
    Ok(())
}

pub fn solve(cfg: &RunConfig) -> Result<(), Failure> {
    let params = cfg.solve_params()?;
    let grid = cfg.grid.grid()?;
    let d = MollifiedDirac::grid_gaussian(&grid, cfg.grid.dirac_multiple);
    let snapshots: Vec<usize> = cfg
        .solve
        .snapshot_times
        .iter()
        .map(|&t| grid.nearest_slice(t))
        .collect();
    let sol = solve_fixed_point(&params, &grid, &d, &cfg.solve.solver)?;

    let mass_drift = sol
        .energy
        .mass
        .iter()
        .map(|m| (m - 1.0).abs())
        .fold(0.0, f64::max);
    let min_rho = sol.rho.min();
    let mut below_comparison = 0.0_f64;
    for n in 0..=grid.n_t() {
        for i in 0..grid.n_x() {
            let w = comparison_function(grid.x(i), grid.t(n), &params);
            below_comparison = below_comparison.max(w - sol.u.values[[n, i]]);
        }
    }
    let pair = AdmissiblePair {
        rho: sol.rho.clone(),
        beta: sol.beta.clone(),
        constraint: Constraint::Viscous { eps: params.eps },
        eta: Some(params.eta),
    };
    let action = eval_functional(&pair, &grid, cfg.weights)?;

    let mut failures = Vec::new();
    if !sol.converged {
        failures.push(format!(
            "non-converged after {} iterations (update norm {:e})",
            sol.iterations, sol.final_update_norm
        ));
    }
    if mass_drift > MASS_TOL {
        failures.push(format!("mass drift {mass_drift:e}"));
    }
    if min_rho < 0.0 {
        failures.push(format!("negative density {min_rho:e}"));
    }

    let dir = out_dir(cfg)?;
    write_csv_file(
        dir.join("energy.csv"),
        &EnergyTrace::HEADER,
        sol.energy.to_rows(),
    )?;
    let mut header = vec!["x".to_string()];
    for &n in &snapshots {
        header.push(format!("rho_t{}", grid.t(n)));
    }
    for &n in &snapshots {
        header.push(format!("u_t{}", grid.t(n)));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..grid.n_x()).map(|i| {
        let mut row = vec![grid.x(i)];
        row.extend(snapshots.iter().map(|&n| sol.rho.values[[n, i]]));
        row.extend(snapshots.iter().map(|&n| sol.u.values[[n, i]]));
        row
    });
    write_csv_file(dir.join("snapshots.csv"), &header, rows)?;
    write_json(
        dir,
        "solve.json",
        &json!({
            "config": cfg,
            "status": if sol.converged { "converged" } else { "non-converged" },
            "iterations": sol.iterations,
            "final_update_norm": sol.final_update_norm,
            "final_damping": sol.final_damping,
            "update_history": sol.update_history,
            "mass_drift": mass_drift,
            "min_rho": min_rho,
            "min_rho_before_clamp": sol.min_rho_before_clamp,
            "max_below_comparison": below_comparison,
            "energy_identity_residual": sol.energy.identity_residual,
            "a_value": sol.u.values[[grid.n_t(), grid.center()]],
            "action": action,
            "failures": failures,
        }),
    )?;
    println!(
        "{} after {} iterations, update norm {:e}",
        if sol.converged {
            "converged"
        } else {
            "non-converged"
        },
        sol.iterations,
        sol.final_update_norm
    );
    println!(
        "mass drift {mass_drift:e}, energy identity residual {:e}",
        sol.energy.identity_residual
    );
    println!("I = {:.8} ({})", action.total, cfg.weights.label());
    checks_passed(&failures)
}

/// Relative `L^2` distance of two slices with Simpson weights.
fn relative_l2(a: &[f64], b: &[f64], grid: &SpaceTimeGrid) -> f64 {
    let w = simpson_weights(grid.n_x(), grid.dx());
    let diff: f64 = a
        .iter()
        .zip(b)
        .zip(&w)
        .map(|((a, b), w)| w * (a - b).powi(2))
        .sum();
    let norm: f64 = b.iter().zip(&w).map(|(b, w)| w * b * b).sum();
    (diff / norm).sqrt()
}

pub fn minimize(cfg: &RunConfig) -> Result<(), Failure> {
    let m = &cfg.minimize;
    let grid = m.grid.grid()?;
    let d = MollifiedDirac::grid_gaussian(&grid, m.grid.dirac_multiple);
    let opts = mfg_planning::variational::MinimizerOptions {
        weights: cfg.weights,
        ..m.options
    };
    let limit = integrate_limit_profile(2000, mfg_planning::explicit::DEFAULT_T_FLOOR)?;
    let candidate = eval_functional(&first_order_candidate(1.5, &grid, &d)?, &grid, cfg.weights)?;
    let (pair, rep) = minimize_first_order(&grid, &d, &opts)?;

    let reference = profile_action(&limit, cfg.weights);
    let half = grid.nearest_slice(0.5);
    let rho_half: Vec<f64> = pair.rho.slice(half).to_vec();
    let rho_bar: Vec<f64> = grid
        .xs()
        .iter()
        .map(|&x| limit.rho(x, grid.t(half)))
        .collect::<Result<_, _>>()?;
    let rho_half_error = relative_l2(&rho_half, &rho_bar, &grid);

    let dir = out_dir(cfg)?;
    let rows = (0..grid.n_x()).map(|i| [grid.x(i), rho_half[i], rho_bar[i]]);
    write_csv_file(dir.join("rho_half.csv"), &["x", "rho", "rho_bar"], rows)?;
    let gaps = rep.gap_history.iter().map(|&(k, g)| [k as f64, g]);
    write_csv_file(
        dir.join("gap_history.csv"),
        &["iteration", "relative_gap"],
        gaps,
    )?;
    write_json(
        dir,
        "minimize.json",
        &json!({
            "config": cfg,
            "report": rep,
            "reference_action": reference,
            "relative_difference": (rep.total - reference) / reference,
            "rho_half_relative_l2": rho_half_error,
            "rho_half_mass": slice_mass(pair.rho.slice(half), grid.dx()),
            "candidate_total": candidate.total,
        }),
    )?;
    println!(
        "duality gap = {:e} after {} iterations",
        rep.relative_gap, rep.iterations
    );
    println!("constraint residual = {:e}", rep.constraint_residual);
    println!(
        "total = {:.8}, explicit value = {reference:.8}, candidate = {:.8}",
        rep.total, candidate.total
    );
    println!("rho(1/2) relative L2 distance = {rho_half_error:.4}");
    if rep.converged {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "duality gap {:e} above tolerance {:e}",
            rep.relative_gap, opts.tol
        )))
    }
}

fn run_plan(cfg: &RunConfig) -> Result<ExperimentReport, Failure> {
    let plan = cfg.plan()?;
    let report = run_sweep(&plan)?;
    for r in report.failed_points() {
        eprintln!(
            "point {} (eps = {}, eta = {}): {:?}",
            r.index, r.eps, r.eta, r.status
        );
    }
    if report.records.len() < 3 {
        eprintln!("warning: insufficient points for trend verdicts (need at least 3)");
    }
    Ok(report)
}

fn verdict_name(v: TrendVerdict) -> &'static str {
    match v {
        TrendVerdict::Decreasing => "decreasing",
        TrendVerdict::NotDecreasing => "NOT decreasing",
        TrendVerdict::InsufficientPoints => "insufficient points",
    }
}

pub fn sweep(cfg: &RunConfig) -> Result<(), Failure> {
    let report = run_plan(cfg)?;
    let dir = out_dir(cfg)?;
    report.write_csv(fs::File::create(dir.join("sweep.csv"))?)?;
    write_json(
        dir,
        "sweep.json",
        &json!({ "config": cfg, "report": report }),
    )?;
    for r in &report.records {
        if let Some(m) = &r.metrics {
            println!(
                "eta = {:<8} eps = {:<8} |rho - rho_bar| = {:.5}  |I - I_bar| = {:.5}  |u - u_bar| = {:.5}",
                r.eta, r.eps, m.l2_to_limit, m.action_error, m.u_error
            );
        }
    }
    let mut failures: Vec<String> = report
        .failed_points()
        .iter()
        .map(|r| format!("point {} failed", r.index))
        .collect();
    for (name, v) in report.verdicts.all() {
        println!("{name}: {}", verdict_name(v));
        if v.failed() {
            failures.push(format!("{name} not decreasing"));
        }
    }
    checks_passed(&failures)
}

pub fn kpz(cfg: &RunConfig) -> Result<(), Failure> {
    let report = run_plan(cfg)?;
    let records: Vec<_> = report
        .records
        .iter()
        .map(|r| json!({ "eps": r.eps, "eta": r.eta, "kpz": r.metrics.as_ref().and_then(|m| m.kpz) }))
        .collect();
    let dir = out_dir(cfg)?;
    let rows = report.records.iter().filter_map(|r| {
        let k = r.metrics.as_ref()?.kpz?;
        Some([
            r.eps,
            r.eta,
            k.lambda,
            k.a_value,
            k.a_error,
            k.mu_raw,
            k.mu,
            k.mass_three_halves,
            k.mass_two_thirds,
            k.rate_proxy,
        ])
    });
    write_csv_file(
        dir.join("kpz.csv"),
        &[
            "eps",
            "eta",
            "lambda",
            "a_value",
            "a_error",
            "mu_raw",
            "mu",
            "mass_three_halves",
            "mass_two_thirds",
            "rate_proxy",
        ],
        rows,
    )?;
    let v = report.verdicts;
    write_json(
        dir,
        "kpz.json",
        &json!({
            "config": cfg,
            "k_terminal": report.limit.k_terminal,
            "records": records,
            "a_error": v.a_error,
            "mu_error": v.mu_error,
        }),
    )?;
    println!("k(1) = {:.10}", report.limit.k_terminal);
    for r in &report.records {
        if let Some(k) = r.metrics.as_ref().and_then(|m| m.kpz) {
            println!(
                "eta = {:<8} A = {:.6}  |A - k(1)| = {:.6}  mu = {:.6}",
                r.eta, k.a_value, k.a_error, k.mu
            );
        }
    }
    println!("a_error: {}", verdict_name(v.a_error));
    println!("mu_error: {}", verdict_name(v.mu_error));
    let mut failures: Vec<String> = report
        .failed_points()
        .iter()
        .map(|r| format!("point {} failed", r.index))
        .collect();
    for (name, v) in [("a_error", v.a_error), ("mu_error", v.mu_error)] {
        if v.failed() {
            failures.push(format!("{name} not decreasing"));
        }
    }
    checks_passed(&failures)
}
