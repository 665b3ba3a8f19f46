//! Uniformly sampled 1D fields.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::trapezoid;

/// A complex-valued field sampled on a uniform 1D grid.
#[derive(Debug, Clone)]
pub struct ComplexGrid1D {
    pub x: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl ComplexGrid1D {
    pub fn new(x: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if x.len() != values.len() {
            return Err(Error::Domain(format!(
                "grid has {} points but {} values",
                x.len(),
                values.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::Domain("grid needs at least two points".into()));
        }
        check_uniform(&x)?;
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("field contains non-finite values".into()));
        }
        Ok(Self { x, values })
    }

    pub fn spacing(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    /// |psi|^2 per point.
    pub fn abs_squared(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Trapezoidal integral of |psi|^2 over the grid.
    pub fn total_probability(&self) -> f64 {
        trapezoid(&self.x, &self.abs_squared())
    }
}

/// `n` evenly spaced points covering [lo, hi] inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Ensure grid spacing is uniform to within a small relative tolerance.
pub fn check_uniform(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::Domain("grid needs at least two points".into()));
    }
    let h = x[1] - x[0];
    if h <= 0.0 {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    for i in 2..x.len() {
        let hi = x[i] - x[i - 1];
        if (hi - h).abs() > 1e-9 * h.abs().max(1e-300) {
            return Err(Error::Domain(format!(
                "grid is not uniform: spacing {hi} at index {i} vs {h}"
            )));
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-1.0, 1.0, 5);
        assert_eq!(g.first(), Some(&-1.0));
        assert_eq!(g.last(), Some(&1.0));
        assert_eq!(g.len(), 5);
    }

    #[test]
    fn rejects_non_uniform() {
        assert!(check_uniform(&[0.0, 1.0, 3.0]).is_err());
        assert!(check_uniform(&[0.0, 1.0, 2.0]).is_ok());
    }

    #[test]
    fn unit_plane_wave_probability() {
        let x = linspace(0.0, 1.0, 101);
        let values = x
            .iter()
            .map(|&xi| Complex64::from_polar(1.0, 3.0 * xi))
            .collect();
        let f = ComplexGrid1D::new(x, values).unwrap();
        assert!((f.total_probability() - 1.0).abs() < 1e-12);
    }
}
