/// Proximal map of `(p, q) -> lambda q^2 / p` (with `0 / 0 = 0` and
/// `+inf` for `p <= 0`, `q != 0`) at `(p_hat, q_hat)`.
///
/// The minimizer has `q = q_hat p / (p + 2 lambda)`, where `p` is the positive
/// root of `(p - p_hat) (p + 2 lambda)^2 = lambda q_hat^2`, or `(0, 0)` when
/// `4 lambda p_hat + q_hat^2 <= 0`. The cubic is increasing and convex to the
/// right of `max(p_hat, 0)`, so Newton started to the right of the root
/// decreases monotonically onto it.
pub fn perspective_prox(p_hat: f64, q_hat: f64, lambda: f64) -> (f64, f64) {
    if 4.0 * lambda * p_hat + q_hat * q_hat <= 0.0 {
        return (0.0, 0.0);
    }
    if q_hat == 0.0 {
        return (p_hat.max(0.0), 0.0);
    }
    let g = 2.0 * lambda;
    let c = lambda * q_hat * q_hat;
    let f = |p: f64| (p - p_hat) * (p + g) * (p + g) - c;
    let lo_bound = p_hat.max(0.0);
    let mut lo = lo_bound;
    let mut hi = lo_bound + c.cbrt();
    let mut p = hi;
    for _ in 0..100 {
        let fp = f(p);
        if fp.abs() <= 1e-15 * c.max(1e-300) {
            break;
        }
        if fp > 0.0 {
            hi = p;
        } else {
            lo = p;
        }
        let d = (p + g) * (p + g) + 2.0 * (p - p_hat) * (p + g);
        let mut next = p - fp / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - p).abs() <= 1e-12 * p.abs().max(1e-300) {
            p = next;
            break;
        }
        p = next;
    }
    (p, q_hat * p / (p + g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn objective(p: f64, q: f64, ph: f64, qh: f64, lambda: f64) -> f64 {
        let persp = if p > 0.0 {
            q * q / p
        } else if q == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        lambda * persp + 0.5 * ((p - ph).powi(2) + (q - qh).powi(2))
    }

    #[test]
    fn prox_beats_perturbations() {
        for &(ph, qh, l) in &[
            (1.0, 0.5, 0.3),
            (-0.2, 2.0, 0.1),
            (0.01, -3.0, 2.0),
            (5.0, 1e-6, 1e-3),
        ] {
            let (p, q) = perspective_prox(ph, qh, l);
            let best = objective(p, q, ph, qh, l);
            for &(dp, dq) in &[
                (1e-4, 0.0),
                (-1e-4, 0.0),
                (0.0, 1e-4),
                (0.0, -1e-4),
                (1e-4, 1e-4),
            ] {
                assert!(
                    objective(p + dp, q + dq, ph, qh, l) >= best - 1e-12,
                    "({ph}, {qh}, {l})"
                );
            }
        }
    }

    #[test]
    fn collapses_to_origin() {
        assert_eq!(perspective_prox(-1.0, 0.1, 1.0), (0.0, 0.0));
        assert_eq!(perspective_prox(2.0, 0.0, 1.0), (2.0, 0.0));
    }
}
