use crate::{Error, Result};

/// Banded matrix with one sub- and one super-diagonal.
///
/// Row `i` reads `lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1]`;
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Thomas elimination without pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: self.lower.len().min(self.upper.len()),
            });
        }
        if rhs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let scale = self
            .diag
            .iter()
            .chain(&self.lower)
            .chain(&self.upper)
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let tiny = 1e-14 * scale.max(f64::MIN_POSITIVE);

        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        if pivot.abs() <= tiny {
            return Err(Error::SingularPivot { row: 0, pivot });
        }
        c[0] = self.upper[0] / pivot;
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * c[i - 1];
            if pivot.abs() <= tiny || !pivot.is_finite() {
                return Err(Error::SingularPivot { row: i, pivot });
            }
            c[i] = if i + 1 < n {
                self.upper[i] / pivot
            } else {
                0.0
            };
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

/// Solves the tridiagonal system given by its three bands.
pub fn tridiagonal_solve(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    Tridiagonal {
        lower: lower.to_vec(),
        diag: diag.to_vec(),
        upper: upper.to_vec(),
    }
    .solve(rhs)
}
