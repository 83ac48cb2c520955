use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use super::functional::{face_mean, AdmissiblePair, Constraint, Weights};
use super::prox::perspective_prox;
use crate::numerics::{
    dirac_slice, FluxField, MollifiedDirac, Quantity, ScalarField, SpaceTimeGrid,
};
use crate::{Error, Result};

/// Face densities below this fraction of the peak count as vacuum in the
/// returned pair.
const VACUUM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizerOptions {
    pub max_iter: usize,
    /// Target relative duality gap.
    pub tol: f64,
    /// Target space-time `L^2` norm of the continuity defect.
    pub feasibility_tol: f64,
    pub weights: Weights,
    /// Iterations between gap evaluations.
    pub check_every: usize,
    /// Ratio `tau / sigma` of the primal and dual step sizes.
    pub step_ratio: f64,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            tol: 1e-4,
            feasibility_tol: 1e-3,
            weights: Weights::HALF,
            check_every: 50,
            step_ratio: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerReport {
    pub iterations: usize,
    pub converged: bool,
    /// Primal value minus dual value, relative to `max(1, |primal|)`.
    pub relative_gap: f64,
    pub constraint_residual: f64,
    /// Action of the returned pair in the functional's own units.
    pub total: f64,
    pub operator_norm: f64,
    pub gap_history: Vec<(usize, f64)>,
}

/// Discrete first-order planning problem between two fixed slices, in the
/// scaled form used by the iteration: the action divided by `dx dt` and the
/// continuity equation multiplied by `dt`.
struct Problem {
    n_x: usize,
    n_t: usize,
    kappa: f64,
    w_c: f64,
    w_k: f64,
}

/// Density on all `n_t + 1` slices (the end rows stay fixed) and flux on
/// the faces of the first `n_t` levels.
struct Primal {
    rho: Array2<f64>,
    beta: Array2<f64>,
}

/// Multipliers of the face means, the fluxes and the density sign.
struct Dual {
    mean: Array2<f64>,
    flux: Array2<f64>,
    sign: Array2<f64>,
}

impl Problem {
    fn primal_zeros(&self) -> Primal {
        Primal {
            rho: Array2::zeros((self.n_t + 1, self.n_x)),
            beta: Array2::zeros((self.n_t, self.n_x - 1)),
        }
    }

    fn dual_zeros(&self) -> Dual {
        Dual {
            mean: Array2::zeros((self.n_t, self.n_x - 1)),
            flux: Array2::zeros((self.n_t, self.n_x - 1)),
            sign: Array2::zeros((self.n_t + 1, self.n_x)),
        }
    }

    /// Scaled continuity defect `rho^{n+1} - rho^n + kappa (D beta)^n`.
    fn continuity(&self, rho: &Array2<f64>, beta: &Array2<f64>, out: &mut Array2<f64>) {
        let n_x = self.n_x;
        for n in 0..self.n_t {
            let (r0, r1, b) = (rho.row(n), rho.row(n + 1), beta.row(n));
            let mut row = out.row_mut(n);
            for i in 0..n_x {
                let right = if i + 1 < n_x { b[i] } else { 0.0 };
                let left = if i > 0 { b[i - 1] } else { 0.0 };
                row[i] = r1[i] - r0[i] + self.kappa * (right - left);
            }
        }
    }

    /// `K x`: face means, fluxes and the density itself.
    fn forward(&self, x: &Primal, out: &mut Dual) {
        for n in 0..self.n_t {
            let (r0, r1) = (x.rho.row(n), x.rho.row(n + 1));
            let mut mean = out.mean.row_mut(n);
            for f in 0..self.n_x - 1 {
                mean[f] = 0.25 * (r0[f] + r0[f + 1] + r1[f] + r1[f + 1]);
            }
        }
        out.flux.assign(&x.beta);
        out.sign.assign(&x.rho);
    }

    /// `K^T y` on the free variables; the end rows of the density are zero.
    fn adjoint(&self, y: &Dual, out: &mut Primal) {
        let n_x = self.n_x;
        for m in 1..self.n_t {
            let (a0, a1, s) = (y.mean.row(m - 1), y.mean.row(m), y.sign.row(m));
            let mut row = out.rho.row_mut(m);
            for i in 0..n_x {
                let mut v = s[i];
                if i > 0 {
                    v += 0.25 * (a0[i - 1] + a1[i - 1]);
                }
                if i + 1 < n_x {
                    v += 0.25 * (a0[i] + a1[i]);
                }
                row[i] = v;
            }
        }
        out.beta.assign(&y.flux);
    }

    /// Scaled interior congestion.
    fn congestion(&self, x: &Primal) -> f64 {
        (1..self.n_t)
            .map(|n| self.w_c * x.rho.row(n).iter().map(|r| r * r).sum::<f64>())
            .sum()
    }

    /// Lagrangian dual value at the continuity multiplier `cont` and the mean
    /// multiplier `mean`. The flux multiplier is chosen so that the flux
    /// drops out and the mean multiplier is lowered into the domain of the
    /// conjugate perspective, so the value is a true lower bound.
    fn dual_value(
        &self,
        cont: &Array2<f64>,
        mean: &Array2<f64>,
        rho0: &[f64],
        rho1: &[f64],
    ) -> f64 {
        let (n_x, n_t) = (self.n_x, self.n_t);
        let mut capped = mean.clone();
        for n in 0..n_t {
            for f in 0..n_x - 1 {
                let q = -self.kappa * (cont[[n, f]] - cont[[n, f + 1]]);
                let cap = -q * q / (4.0 * self.w_k);
                if capped[[n, f]] > cap {
                    capped[[n, f]] = cap;
                }
            }
        }
        let mut value = 0.0;
        for m in 1..n_t {
            for i in 0..n_x {
                let mut v = cont[[m - 1, i]] - cont[[m, i]];
                if i > 0 {
                    v += 0.25 * (capped[[m - 1, i - 1]] + capped[[m, i - 1]]);
                }
                if i + 1 < n_x {
                    v += 0.25 * (capped[[m - 1, i]] + capped[[m, i]]);
                }
                let v = (-v).max(0.0);
                value -= v * v / (4.0 * self.w_c);
            }
        }
        // The continuity rows see -rho0 at step 0 and +rho1 at the last step.
        for i in 0..n_x {
            value -= cont[[0, i]] * rho0[i];
            value += cont[[n_t - 1, i]] * rho1[i];
        }
        for f in 0..n_x - 1 {
            value += capped[[0, f]] * 0.25 * (rho0[f] + rho0[f + 1]);
            value += capped[[n_t - 1, f]] * 0.25 * (rho1[f] + rho1[f + 1]);
        }
        value
    }
}

/// Orthonormal eigenvectors (as columns) and eigenvalues of the Neumann
/// second-difference matrix of size `n`.
fn neumann_basis(n: usize) -> (Array2<f64>, Vec<f64>) {
    let pi = std::f64::consts::PI;
    let basis = Array2::from_shape_fn((n, n), |(j, k)| {
        let scale = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        scale * (pi * k as f64 * (j as f64 + 0.5) / n as f64).cos()
    });
    let eig = (0..n)
        .map(|k| 2.0 - 2.0 * (pi * k as f64 / n as f64).cos())
        .collect();
    (basis, eig)
}

/// Solver for `A D^-1 A^T mu = r`, where `A` is the scaled continuity
/// operator on the free variables and `D` weights the density by `d`. The
/// matrix is `T_t / d + kappa^2 T_x` with Neumann second differences in both
/// directions, diagonal in the tensor cosine basis. The constant mode is set
/// to zero; right-hand sides from mass-preserving data have none.
struct ContinuitySolver {
    basis_t: Array2<f64>,
    basis_x: Array2<f64>,
    inv_eig: Array2<f64>,
}

impl ContinuitySolver {
    fn new(prob: &Problem, d: f64) -> Self {
        let (basis_t, eig_t) = neumann_basis(prob.n_t);
        let (basis_x, eig_x) = neumann_basis(prob.n_x);
        let k2 = prob.kappa * prob.kappa;
        let inv_eig = Array2::from_shape_fn((prob.n_t, prob.n_x), |(k, j)| {
            if k == 0 && j == 0 {
                0.0
            } else {
                1.0 / (eig_t[k] / d + k2 * eig_x[j])
            }
        });
        Self {
            basis_t,
            basis_x,
            inv_eig,
        }
    }

    fn solve(&self, r: &Array2<f64>) -> Array2<f64> {
        let mut hat = self.basis_t.t().dot(r).dot(&self.basis_x);
        hat *= &self.inv_eig;
        self.basis_t.dot(&hat).dot(&self.basis_x.t())
    }
}

/// Minimizes the first-order action between two mollified Dirac slices by
/// the Chambolle-Pock primal-dual iteration.
///
/// The primal step is the exact proximal map of the congestion term
/// restricted to the continuity constraint, computed by a cosine-transform
/// solve. The dual step handles the perspective kinetic term on face means
/// through [`perspective_prox`] and the sign of the density. The returned
/// pair always carries the report; `converged` is false if `max_iter` was
/// reached first.
pub fn minimize_first_order(
    grid: &SpaceTimeGrid,
    d: &MollifiedDirac,
    opts: &MinimizerOptions,
) -> Result<(AdmissiblePair, MinimizerReport)> {
    if !(opts.tol > 0.0) || opts.check_every == 0 || !(opts.step_ratio > 0.0) {
        return Err(Error::InvalidParameter(
            "minimizer tolerances and step ratio must be positive".into(),
        ));
    }
    let (n_x, n_t, dx, dt) = (grid.n_x(), grid.n_t(), grid.dx(), grid.dt());
    let endpoint = dirac_slice(grid, d)?;
    let prob = Problem {
        n_x,
        n_t,
        kappa: dt / dx,
        w_c: opts.weights.congestion,
        w_k: opts.weights.kinetic,
    };
    // |K x|^2 = |M rho|^2 + |beta|^2 + |rho|^2 with the averaging M of norm 1.
    let norm = std::f64::consts::SQRT_2;
    let tau = opts.step_ratio.sqrt() * 0.99 / norm;
    let sigma = 0.99 / (opts.step_ratio.sqrt() * norm);
    let shrink = 1.0 + 2.0 * tau * prob.w_c;
    let solver = ContinuitySolver::new(&prob, shrink);
    let lambda = prob.w_k / sigma;

    let mut x = Primal {
        rho: Array2::from_shape_fn((n_t + 1, n_x), |(_, i)| endpoint[i]),
        beta: Array2::zeros((n_t, n_x - 1)),
    };
    let mut x_prev = prob.primal_zeros();
    let mut x_bar = Primal {
        rho: x.rho.clone(),
        beta: x.beta.clone(),
    };
    let mut y = prob.dual_zeros();
    let mut kx = prob.dual_zeros();
    let mut kt = prob.primal_zeros();
    let mut defect = Array2::zeros((n_t, n_x));
    let mut mu = Array2::zeros((n_t, n_x));

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut gap = f64::INFINITY;
    while iterations < opts.max_iter {
        iterations += 1;
        let check = iterations % opts.check_every == 0 || iterations == opts.max_iter;
        prob.forward(&x_bar, &mut kx);
        let mut kinetic = 0.0;
        Zip::from(&mut y.mean)
            .and(&mut y.flux)
            .and(&kx.mean)
            .and(&kx.flux)
            .for_each(|ya, yq, &ka, &kq| {
                let p_hat = *ya / sigma + ka;
                let q_hat = *yq / sigma + kq;
                let (p, q) = perspective_prox(p_hat, q_hat, lambda);
                *ya = sigma * (p_hat - p);
                *yq = sigma * (q_hat - q);
                if check && p > 0.0 {
                    kinetic += prob.w_k * q * q / p;
                }
            });
        Zip::from(&mut y.sign)
            .and(&kx.sign)
            .for_each(|ys, &ks| *ys = (*ys + sigma * ks).min(0.0));

        // Primal step: shrink towards zero density on the constraint set.
        prob.adjoint(&y, &mut kt);
        std::mem::swap(&mut x, &mut x_prev);
        for m in 1..n_t {
            for i in 0..n_x {
                x.rho[[m, i]] = (x_prev.rho[[m, i]] - tau * kt.rho[[m, i]]) / shrink;
            }
        }
        x.rho.row_mut(0).assign(&x_prev.rho.row(0));
        x.rho.row_mut(n_t).assign(&x_prev.rho.row(n_t));
        Zip::from(&mut x.beta)
            .and(&x_prev.beta)
            .and(&kt.beta)
            .for_each(|b, &old, &k| *b = old - tau * k);
        prob.continuity(&x.rho, &x.beta, &mut defect);
        mu.assign(&solver.solve(&defect));
        for m in 1..n_t {
            for i in 0..n_x {
                x.rho[[m, i]] -= (mu[[m - 1, i]] - mu[[m, i]]) / shrink;
            }
        }
        for n in 0..n_t {
            for f in 0..n_x - 1 {
                x.beta[[n, f]] -= prob.kappa * (mu[[n, f]] - mu[[n, f + 1]]);
            }
        }

        Zip::from(&mut x_bar.rho)
            .and(&x.rho)
            .and(&x_prev.rho)
            .for_each(|bar, &new, &old| *bar = 2.0 * new - old);
        Zip::from(&mut x_bar.beta)
            .and(&x.beta)
            .and(&x_prev.beta)
            .for_each(|bar, &new, &old| *bar = 2.0 * new - old);

        if check {
            let primal = prob.congestion(&x) + kinetic;
            let cont = mu.mapv(|v| v / tau);
            let dual = prob.dual_value(&cont, &y.mean, &endpoint, &endpoint);
            gap = (primal - dual).abs() / primal.abs().max(1.0);
            history.push((iterations, gap));
            if gap < opts.tol {
                converged = true;
                break;
            }
        }
    }

    // The constraint holds up to round-off; clear the small negative
    // densities the sign multiplier has not yet removed, and flux on faces
    // whose density is negligible.
    x.rho.mapv_inplace(|r| r.max(0.0));
    let floor = VACUUM * x.rho.iter().fold(0.0f64, |m, &r| m.max(r));
    for n in 0..n_t {
        for f in 0..n_x - 1 {
            if face_mean(&x.rho, n, f) <= floor {
                x.beta[[n, f]] = 0.0;
            }
        }
    }
    prob.continuity(&x.rho, &x.beta, &mut defect);
    let residual = defect.iter().map(|r| r * r).sum::<f64>().sqrt() * (dx * dt).sqrt() / dt;
    let mut rho = ScalarField::zeros(grid, Quantity::Density);
    rho.values.assign(&x.rho);
    let mut beta = FluxField::zeros(grid);
    beta.values
        .slice_mut(ndarray::s![..n_t, ..])
        .assign(&x.beta);
    let pair = AdmissiblePair {
        rho,
        beta,
        constraint: Constraint::FirstOrder,
        eta: None,
    };
    let total = super::eval_functional(&pair, grid, opts.weights)?.total;
    Ok((
        pair,
        MinimizerReport {
            iterations,
            converged,
            relative_gap: gap,
            constraint_residual: residual,
            total,
            operator_norm: norm,
            gap_history: history,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Problem {
        Problem {
            n_x: 7,
            n_t: 4,
            kappa: 0.3,
            w_c: 0.5,
            w_k: 0.5,
        }
    }

    #[test]
    fn adjoint_matches_forward() {
        let prob = small();
        let x = Primal {
            rho: Array2::from_shape_fn((5, 7), |(n, i)| {
                if n == 0 || n == 4 {
                    0.0
                } else {
                    ((n * 3 + i) % 5) as f64 - 1.5
                }
            }),
            beta: Array2::from_shape_fn((4, 6), |(n, f)| ((n + 2 * f) % 7) as f64 * 0.1),
        };
        let y = Dual {
            mean: Array2::from_shape_fn((4, 6), |(n, f)| ((n * f) % 3) as f64),
            flux: Array2::from_shape_fn((4, 6), |(n, f)| (n + f) as f64 * 0.05),
            sign: Array2::from_shape_fn((5, 7), |(n, i)| (n as f64 - i as f64) * 0.2),
        };
        let mut kx = prob.dual_zeros();
        prob.forward(&x, &mut kx);
        let mut kty = prob.primal_zeros();
        prob.adjoint(&y, &mut kty);
        let lhs =
            (&kx.mean * &y.mean).sum() + (&kx.flux * &y.flux).sum() + (&kx.sign * &y.sign).sum();
        let rhs = (&x.rho * &kty.rho).sum() + (&x.beta * &kty.beta).sum();
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn projection_restores_continuity() {
        let prob = small();
        let d = 1.3;
        let solver = ContinuitySolver::new(&prob, d);
        let mut rho = Array2::from_shape_fn((5, 7), |(n, i)| ((n * 5 + i * 3) % 7) as f64 * 0.1);
        let first = rho.row(0).to_owned();
        rho.row_mut(4).assign(&first);
        let mut beta = Array2::from_shape_fn((4, 6), |(n, f)| ((n * 2 + f) % 5) as f64 * 0.2 - 0.3);
        let mut defect = Array2::zeros((4, 7));
        prob.continuity(&rho, &beta, &mut defect);
        let mu = solver.solve(&defect);
        for m in 1..4 {
            for i in 0..7 {
                rho[[m, i]] -= (mu[[m - 1, i]] - mu[[m, i]]) / d;
            }
        }
        for n in 0..4 {
            for f in 0..6 {
                beta[[n, f]] -= prob.kappa * (mu[[n, f]] - mu[[n, f + 1]]);
            }
        }
        prob.continuity(&rho, &beta, &mut defect);
        assert!(defect.iter().all(|v| v.abs() < 1e-12), "{defect}");
    }
}
