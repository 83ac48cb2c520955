//! Python bindings: explicit profiles, viscous solves, the first-order
//! minimizer and convergence sweeps. Fields cross the boundary as nested
//! lists indexed `[time slice][node]`; reports as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use mfg_planning::explicit::{
    eval_u_bar, integrate_eta_profile, integrate_limit_profile, rate_functional_of_profile,
    CharacteristicFan, ProfileKind,
};
use mfg_planning::lab::{run_sweep as lab_run_sweep, GridSpec, SweepPlan};
use mfg_planning::numerics::{MollifiedDirac, SpaceTimeGrid};
use mfg_planning::variational::{
    eval_functional, minimize_first_order as core_minimize, AdmissiblePair, Constraint,
    MinimizerOptions, Weights,
};
use mfg_planning::viscous::{solve_fixed_point, Coupling, SolverOptions, ViscousParams};
use mfg_planning::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::InvalidGrid(_) | Error::UnderResolved { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn rows(a: &ndarray::Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

#[pyclass(name = "Grid", frozen)]
struct PyGrid {
    inner: SpaceTimeGrid,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (x_max = 3.0, n_x = 401, n_t = 400))]
    fn new(x_max: f64, n_x: usize, n_t: usize) -> PyResult<Self> {
        Ok(Self {
            inner: SpaceTimeGrid::new(x_max, n_x, n_t).map_err(to_py)?,
        })
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.inner.dx()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt()
    }

    #[getter]
    fn n_x(&self) -> usize {
        self.inner.n_x()
    }

    #[getter]
    fn n_t(&self) -> usize {
        self.inner.n_t()
    }

    fn xs(&self) -> Vec<f64> {
        self.inner.xs()
    }

    fn ts(&self) -> Vec<f64> {
        self.inner.ts()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(x_max={}, n_x={}, n_t={})",
            self.inner.x_max(),
            self.inner.n_x(),
            self.inner.n_t()
        )
    }
}

/// Explicit parabolic profile with its characteristic fan.
#[pyclass(name = "Profile", frozen)]
struct PyProfile {
    inner: mfg_planning::explicit::ProfileSolution,
    fan: CharacteristicFan,
}

impl PyProfile {
    fn wrap(inner: mfg_planning::explicit::ProfileSolution) -> Self {
        let fan = CharacteristicFan::new(&inner);
        Self { inner, fan }
    }
}

#[pymethods]
impl PyProfile {
    #[getter]
    fn eta(&self) -> Option<f64> {
        self.inner.eta()
    }

    #[getter]
    fn is_limit(&self) -> bool {
        self.inner.kind == ProfileKind::Limit
    }

    #[getter]
    fn t_turn(&self) -> f64 {
        self.inner.matching.t_turn
    }

    #[getter]
    fn r_turn(&self) -> f64 {
        self.inner.matching.r_turn
    }

    #[getter]
    fn r_start(&self) -> Option<f64> {
        self.inner.matching.r_start
    }

    #[getter]
    fn k_terminal(&self) -> f64 {
        self.inner.k_terminal
    }

    /// `(t, k, r, l, a)` per ODE sample.
    fn samples(&self) -> Vec<(f64, f64, f64, f64, f64)> {
        self.inner
            .samples
            .iter()
            .map(|s| (s.t, s.k, s.r, s.l, s.a))
            .collect()
    }

    fn rho(&self, x: f64, t: f64) -> PyResult<f64> {
        self.inner.rho(x, t).map_err(to_py)
    }

    fn u_bar(&self, x: f64, t: f64) -> PyResult<f64> {
        eval_u_bar(&self.inner, &self.fan, x, t).map_err(to_py)
    }

    /// `int int 1/2 (rho^2 + beta^2 / rho)`, plus the initial penalty for
    /// the penalized kind.
    fn action(&self) -> f64 {
        rate_functional_of_profile(&self.inner)
    }
}

#[pyfunction]
#[pyo3(signature = (n_steps = 2000, t_floor = 1e-6))]
fn limit_profile(n_steps: usize, t_floor: f64) -> PyResult<PyProfile> {
    Ok(PyProfile::wrap(
        integrate_limit_profile(n_steps, t_floor).map_err(to_py)?,
    ))
}

#[pyfunction]
#[pyo3(signature = (eta, n_steps = 2000))]
fn eta_profile(eta: f64, n_steps: usize) -> PyResult<PyProfile> {
    Ok(PyProfile::wrap(
        integrate_eta_profile(eta, n_steps).map_err(to_py)?,
    ))
}

#[pyclass(name = "ViscousSolution", frozen)]
struct PySolution {
    inner: mfg_planning::viscous::ViscousSolution,
    grid: SpaceTimeGrid,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn final_update_norm(&self) -> f64 {
        self.inner.final_update_norm
    }

    #[getter]
    fn energy_identity_residual(&self) -> f64 {
        self.inner.energy.identity_residual
    }

    /// Discrete mass of every time slice.
    fn masses(&self) -> Vec<f64> {
        self.inner.energy.mass.clone()
    }

    fn u(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.u.values)
    }

    fn rho(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.rho.values)
    }

    /// `u(0, 1)`.
    fn value_at_origin(&self) -> f64 {
        self.inner.u.values[[self.grid.n_t(), self.grid.center()]]
    }

    #[pyo3(signature = (congestion = 0.5, kinetic = 0.5))]
    fn action(&self, congestion: f64, kinetic: f64) -> PyResult<f64> {
        let pair = AdmissiblePair {
            rho: self.inner.rho.clone(),
            beta: self.inner.beta.clone(),
            constraint: Constraint::Viscous {
                eps: self.inner.params.eps,
            },
            eta: Some(self.inner.params.eta),
        };
        let w = Weights {
            congestion,
            kinetic,
        };
        Ok(eval_functional(&pair, &self.grid, w).map_err(to_py)?.total)
    }
}

#[pyfunction]
#[pyo3(signature = (eps, eta, grid, dirac_multiple = 2.0, damping = 0.5, tol = 1e-6, max_iter = 200))]
fn solve(
    py: Python<'_>,
    eps: f64,
    eta: f64,
    grid: &PyGrid,
    dirac_multiple: f64,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> PyResult<PySolution> {
    let p = ViscousParams::new(eps, eta).map_err(to_py)?;
    let g = grid.inner.clone();
    let d = MollifiedDirac::grid_gaussian(&g, dirac_multiple);
    let opts = SolverOptions {
        damping,
        tol,
        max_iter,
        ..SolverOptions::default()
    };
    let inner = py
        .detach(|| solve_fixed_point(&p, &g, &d, &opts))
        .map_err(to_py)?;
    Ok(PySolution { inner, grid: g })
}

/// Minimize the first-order action between gaussian endpoint masses of
/// width `dirac_multiple * dx`. Returns the report as JSON and the density.
#[pyfunction]
#[pyo3(signature = (grid, dirac_multiple = 4.0, tol = 1e-4, max_iter = 20000))]
fn minimize_first_order(
    py: Python<'_>,
    grid: &PyGrid,
    dirac_multiple: f64,
    tol: f64,
    max_iter: usize,
) -> PyResult<(String, Vec<Vec<f64>>)> {
    let g = grid.inner.clone();
    let d = MollifiedDirac::grid_gaussian(&g, dirac_multiple);
    let opts = MinimizerOptions {
        tol,
        max_iter,
        ..MinimizerOptions::default()
    };
    let (pair, rep) = py.detach(|| core_minimize(&g, &d, &opts)).map_err(to_py)?;
    let json = serde_json::to_string(&rep).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((json, rows(&pair.rho.values)))
}

/// Sweep along `eps = c eta^alpha` on a fixed grid; returns the report as
/// JSON.
#[pyfunction]
#[pyo3(signature = (etas, c = 1.0, alpha = 1.0, n_x = 401, n_t = 400, workers = 0))]
fn run_sweep(
    py: Python<'_>,
    etas: Vec<f64>,
    c: f64,
    alpha: f64,
    n_x: usize,
    n_t: usize,
    workers: usize,
) -> PyResult<String> {
    let grid = GridSpec {
        n_x,
        n_t,
        ..GridSpec::default()
    };
    let mut plan = SweepPlan::coupled(&etas, Coupling { c, alpha }, grid).map_err(to_py)?;
    plan.workers = workers;
    let report = py.detach(|| lab_run_sweep(&plan)).map_err(to_py)?;
    report.to_json().map_err(to_py)
}

#[pymodule]
#[pyo3(name = "_native")]
fn mfg_planning_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyProfile>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(limit_profile, m)?)?;
    m.add_function(wrap_pyfunction!(eta_profile, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_first_order, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
