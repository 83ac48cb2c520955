//! `mfg`: explicit profiles, viscous solves, the first-order minimizer,
//! convergence sweeps and KPZ diagnostics from one binary.
//!
//! Exit status: 0 on success, 1 when a solve does not converge or an
//! invariant or trend check fails, 2 on a usage or configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "mfg",
    version,
    about = "Planning problem solvers with Dirac endpoints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the explicit limit or penalized profile.
    Explicit(ExplicitArgs),
    /// Solve the viscous system at one `(eps, eta)` point.
    Solve(SolveArgs),
    /// Minimize the first-order action between mollified Dirac masses.
    Minimize(MinimizeArgs),
    /// Run a convergence sweep along the coupling curve.
    Sweep(SweepArgs),
    /// Run a sweep and report the KPZ rescaling diagnostics.
    Kpz(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    n_x: Option<usize>,
    #[arg(long)]
    n_t: Option<usize>,
}

#[derive(Args)]
struct ExplicitArgs {
    #[command(flatten)]
    common: Common,
    /// Penalty scale; the limit profile when omitted.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    n_steps: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    damping: Option<f64>,
}

#[derive(Args)]
struct MinimizeArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated, strictly decreasing penalty scales.
    #[arg(long, value_delimiter = ',')]
    etas: Option<Vec<f64>>,
    #[arg(long)]
    workers: Option<usize>,
}

fn load(common: &Common) -> Result<RunConfig, commands::Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                commands::Failure::Usage(format!("cannot read {}: {e}", path.display()))
            })?;
            toml::from_str(&text)
                .map_err(|e| commands::Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn apply_grid(spec: &mut mfg_planning::lab::GridSpec, g: GridArgs) {
    set(&mut spec.x_max, g.x_max);
    set(&mut spec.n_x, g.n_x);
    set(&mut spec.n_t, g.n_t);
}

fn run(command: Command) -> Result<(), commands::Failure> {
    match command {
        Command::Explicit(a) => {
            let mut cfg = load(&a.common)?;
            if a.eta.is_some() {
                cfg.explicit.eta = a.eta;
            }
            set(&mut cfg.explicit.n_steps, a.n_steps);
            commands::explicit(&cfg)
        }
        Command::Solve(a) => {
            let mut cfg = load(&a.common)?;
            apply_grid(&mut cfg.grid, a.grid);
            set(&mut cfg.solve.eps, a.eps);
            set(&mut cfg.solve.eta, a.eta);
            set(&mut cfg.solve.solver.tol, a.tol);
            set(&mut cfg.solve.solver.max_iter, a.max_iter);
            set(&mut cfg.solve.solver.damping, a.damping);
            commands::solve(&cfg)
        }
        Command::Minimize(a) => {
            let mut cfg = load(&a.common)?;
            apply_grid(&mut cfg.minimize.grid, a.grid);
            set(&mut cfg.minimize.options.tol, a.tol);
            set(&mut cfg.minimize.options.max_iter, a.max_iter);
            commands::minimize(&cfg)
        }
        Command::Sweep(a) => {
            let cfg = sweep_config(a)?;
            commands::sweep(&cfg)
        }
        Command::Kpz(a) => {
            let cfg = sweep_config(a)?;
            commands::kpz(&cfg)
        }
    }
}

fn sweep_config(a: SweepArgs) -> Result<RunConfig, commands::Failure> {
    let mut cfg = load(&a.common)?;
    apply_grid(&mut cfg.grid, a.grid);
    set(&mut cfg.sweep.etas, a.etas);
    set(&mut cfg.workers, a.workers);
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
