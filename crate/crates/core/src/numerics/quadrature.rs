use alloc::vec;
use alloc::vec::Vec;

use super::Grid;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum QuadratureRule {
    Trapezoid,
    /// Composite Simpson; an even node count closes with a 3/8 panel.
    Simpson,
}

/// Trapezoid weights on a uniform grid.
pub fn trapezoid_weights(grid: &Grid) -> Vec<f64> {
    let h = grid.spacing();
    let mut w = vec![h; grid.len()];
    w[0] *= 0.5;
    let last = w.len() - 1;
    w[last] *= 0.5;
    w
}

fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
    let mut i = 0;
    while i + 2 <= simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if n.is_multiple_of(2) {
        let s = n - 4;
        for (k, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[s + k] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// Integrates equally spaced samples with spacing `h`.
pub fn quadrature(values: &[f64], h: f64, rule: QuadratureRule) -> Result<f64> {
    let n = values.len();
    if n == 0 {
        return Err(Error::InvalidInput("quadrature of an empty sample".into()));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let w = match rule {
        QuadratureRule::Simpson if n >= 4 => simpson_weights(n, h),
        _ => {
            let mut w = vec![h; n];
            w[0] *= 0.5;
            w[n - 1] *= 0.5;
            w
        }
    };
    Ok(values.iter().zip(&w).map(|(v, w)| v * w).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrates_to_length() {
        let g = Grid::new(7.0, 101).unwrap();
        let v = vec![1.0; 101];
        for r in [QuadratureRule::Trapezoid, QuadratureRule::Simpson] {
            assert!((quadrature(&v, g.spacing(), r).unwrap() - 14.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sech_squared_mass() {
        let g = Grid::new(40.0, 2001).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|x| 0.5 / (x / 2.0).cosh().powi(2)).collect();
        let s = quadrature(&v, g.spacing(), QuadratureRule::Simpson).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_exact_on_cubics() {
        for n in [7usize, 8] {
            let h = 0.3;
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3)).collect();
            let exact = ((n - 1) as f64 * h).powi(4) / 4.0;
            assert!((quadrature(&v, h, QuadratureRule::Simpson).unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_is_error() {
        assert!(quadrature(&[], 0.1, QuadratureRule::Trapezoid).is_err());
    }
}
