use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Uniform grid on `[-X, X]` with `m` nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    half_width: f64,
    nodes: usize,
}

impl Grid {
    pub fn new(half_width: f64, nodes: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidInput(format!("grid half width {half_width} must be positive")));
        }
        if nodes < 5 {
            return Err(Error::InvalidInput(format!("grid needs at least 5 nodes, got {nodes}")));
        }
        Ok(Self { half_width, nodes })
    }

    /// Default half width `max(20, 10/θ)` for a profile decaying at rate θ.
    pub fn default_half_width(theta: f64) -> f64 {
        if theta > 0.0 {
            (10.0 / theta).max(20.0)
        } else {
            20.0
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        // symmetric evaluation keeps x(m-1-i) == -x(i) exactly
        let c = (self.nodes - 1) as f64 / 2.0;
        (i as f64 - c) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.x(i)).collect()
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let r = ((x + self.half_width) / self.spacing()).round();
        (r.max(0.0) as usize).min(self.nodes - 1)
    }

    /// Grid with the same half width and `2m-1` nodes (spacing halved).
    pub fn refined(&self) -> Self {
        Self { half_width: self.half_width, nodes: 2 * self.nodes - 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_symmetry() {
        let g = Grid::new(20.0, 1601).unwrap();
        assert!((g.spacing() - 0.025).abs() < 1e-15);
        assert_eq!(g.x(0), -20.0);
        assert_eq!(g.x(800), 0.0);
        for i in 0..1601 {
            assert_eq!(g.x(i), -g.x(1600 - i));
        }
        assert_eq!(g.nearest(0.01), 800);
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(Grid::new(1.0, 4).is_err());
        assert!(Grid::new(-1.0, 10).is_err());
    }
}
