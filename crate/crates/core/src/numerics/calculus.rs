use crate::{Error, Result};

/// Nodal divergence of a face flux with zero-flux closure at both ends.
///
/// `out[i] = (flux[i] - flux[i - 1]) / dx`, where the missing boundary faces
/// carry zero flux, so `dx * sum(out) == 0` up to rounding.
pub fn discrete_divergence(flux: &[f64], n_x: usize, dx: f64) -> Result<Vec<f64>> {
    if flux.len() + 1 != n_x {
        return Err(Error::LengthMismatch {
            expected: n_x.saturating_sub(1),
            got: flux.len(),
        });
    }
    let mut out = vec![0.0; n_x];
    for (i, o) in out.iter_mut().enumerate() {
        let right = if i < n_x - 1 { flux[i] } else { 0.0 };
        let left = if i > 0 { flux[i - 1] } else { 0.0 };
        *o = (right - left) / dx;
    }
    Ok(out)
}

/// Forward difference of nodal values onto faces.
pub fn face_gradient(u: &[f64], dx: f64) -> Vec<f64> {
    u.windows(2).map(|w| (w[1] - w[0]) / dx).collect()
}

/// Arithmetic mean of nodal values onto faces.
pub fn face_average(u: &[f64]) -> Vec<f64> {
    u.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_flux_has_no_interior_divergence() {
        let flux = vec![2.5; 10];
        let div = discrete_divergence(&flux, 11, 0.1).unwrap();
        for v in &div[1..10] {
            assert_eq!(*v, 0.0);
        }
        // closure terms appear only at the boundary nodes
        assert!((div[0] - 25.0).abs() < 1e-12);
        assert!((div[10] + 25.0).abs() < 1e-12);
    }

    #[test]
    fn single_face_flux_hits_adjacent_nodes() {
        let dx = 0.25;
        let mut flux = vec![0.0; 8];
        flux[4] = 1.0;
        let div = discrete_divergence(&flux, 9, dx).unwrap();
        assert_eq!(div[4], 1.0 / dx);
        assert_eq!(div[5], -1.0 / dx);
        assert_eq!(div.iter().filter(|v| **v != 0.0).count(), 2);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(matches!(
            discrete_divergence(&[1.0, 2.0], 5, 1.0),
            Err(Error::LengthMismatch {
                expected: 4,
                got: 2
            })
        ));
    }

    #[test]
    fn gradient_and_average_of_linear_data() {
        let u = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(face_gradient(&u, 0.5), vec![2.0, 2.0, 2.0]);
        assert_eq!(face_average(&u), vec![0.5, 1.5, 2.5]);
    }
}
