use ndarray::{ArrayView1, ArrayView2};

use super::SpaceTimeGrid;

/// Five-point Gauss-Legendre rule on `[-1, 1]`, exact up to degree 9.
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Five-point Gauss-Legendre approximation of `int_a^b f`.
pub fn gauss_legendre(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .map(|(&y, w)| w * f(mid + half * y))
        .sum::<f64>()
        * half
}

/// Composite Simpson weights (including the factor `dx`) for an odd number
/// of equally spaced nodes.
pub fn simpson_weights(n: usize, dx: f64) -> Vec<f64> {
    debug_assert!(n % 2 == 1 && n >= 3);
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * dx / 3.0
        })
        .collect()
}

/// Discrete mass `dx * sum` of a nodal slice.
pub fn slice_mass(slice: ArrayView1<'_, f64>, dx: f64) -> f64 {
    slice.sum() * dx
}

/// `L^2(R x (0,1))` norm of a nodal field.
///
/// Simpson in `x` (the node count is odd by construction) and the right
/// rectangle rule in `t`, i.e. slices `1..=n_t` with weight `dt`. Slice 0
/// carries the initial data and is not sampled.
pub fn l2_spacetime_norm(f: ArrayView2<'_, f64>, grid: &SpaceTimeGrid) -> f64 {
    let w = simpson_weights(grid.n_x(), grid.dx());
    let mut total = 0.0;
    for n in 1..=grid.n_t() {
        let row = f.row(n);
        total += row.iter().zip(&w).map(|(v, w)| w * v * v).sum::<f64>();
    }
    (total * grid.dt()).sqrt()
}
