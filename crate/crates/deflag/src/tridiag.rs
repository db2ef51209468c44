//! Thomas algorithm for the tridiagonal systems of the 1D scheme.

use crate::{Error, Result};

/// Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`;
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal { lower: vec![0.0; n], diag: vec![0.0; n], upper: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
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

    /// No pivoting: intended for diagonally dominant or M-matrices.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::Linear(format!("rhs length {} != {}", rhs.len(), n)));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut b = self.diag[0];
        if b == 0.0 || !b.is_finite() {
            return Err(Error::Linear("zero pivot in row 0".into()));
        }
        c[0] = self.upper[0] / b;
        d[0] = rhs[0] / b;
        for i in 1..n {
            b = self.diag[i] - self.lower[i] * c[i - 1];
            if b == 0.0 || !b.is_finite() {
                return Err(Error::Linear(format!("zero pivot in row {i}")));
            }
            c[i] = if i + 1 < n { self.upper[i] / b } else { 0.0 };
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / b;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Linear("non-finite solution".into()));
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_known_system() {
        let mut m = Tridiagonal::zeros(4);
        for i in 0..4 {
            m.diag[i] = 4.0;
            m.lower[i] = -1.0;
            m.upper[i] = -1.0;
        }
        let x = vec![1.0, -2.0, 3.0, 0.5];
        let b = m.apply(&x);
        let y = m.solve(&b).unwrap();
        for i in 0..4 {
            assert!((x[i] - y[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_pivot() {
        let m = Tridiagonal::zeros(3);
        assert!(m.solve(&[1.0, 1.0, 1.0]).is_err());
    }
}
