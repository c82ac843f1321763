use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{diff_matrix, trapezoid_weights, Grid};
use crate::error::ensure_finite;
use crate::{Error, Result};

/// Nodal values of an `n`-component field on a grid, stored node-major
/// (`values[i * n + k]` is component `k` at node `i`).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscreteField {
    grid: Grid,
    n: usize,
    values: Vec<f64>,
}

impl DiscreteField {
    pub fn new(grid: Grid, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() * n {
            return Err(Error::Dimension { expected: grid.len() * n, got: values.len() });
        }
        ensure_finite(&values, "field")?;
        Ok(Self { grid, n, values })
    }

    pub fn zeros(grid: Grid, n: usize) -> Self {
        Self { grid, n, values: vec![0.0; grid.len() * n] }
    }

    /// Samples `f(x)` (returning `n` components) at every node.
    pub fn from_fn(grid: Grid, n: usize, mut f: impl FnMut(f64) -> Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * n);
        for x in grid.nodes() {
            let v = f(x);
            if v.len() != n {
                return Err(Error::Dimension { expected: n, got: v.len() });
            }
            values.extend(v);
        }
        Self::new(grid, n, values)
    }

    pub fn scalar(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self { grid, n: 1, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        self.values.iter().skip(k).step_by(self.n).copied().collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, n: self.n, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.values.len(), other.values.len());
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid, n: self.n, values }
    }

    /// Pointwise Euclidean magnitude of the components.
    pub fn magnitude(&self) -> Vec<f64> {
        self.values.chunks(self.n).map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect()
    }

    /// Component-wise derivative of `order` (1..=4) at fourth-order accuracy.
    pub fn derivative(&self, order: usize) -> Result<Self> {
        let d1 = diff_matrix(&self.grid, 1, 4)?;
        let d2 = diff_matrix(&self.grid, 2, 4)?;
        let v = match order {
            0 => self.values.clone(),
            1 => d1.apply_strided(&self.values, self.n),
            2 => d2.apply_strided(&self.values, self.n),
            3 => d1.apply_strided(&d2.apply_strided(&self.values, self.n), self.n),
            4 => {
                let s = d2.apply_strided(&self.values, self.n);
                d2.apply_strided(&s, self.n)
            }
            _ => return Err(Error::InvalidInput(format!("derivative order {order} > 4"))),
        };
        Ok(Self { grid: self.grid, n: self.n, values: v })
    }

    /// Discrete `L^p` norm (trapezoid rule); `p = ∞` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let mag = self.magnitude();
        if p.is_infinite() {
            return mag.iter().cloned().fold(0.0, f64::max);
        }
        let w = trapezoid_weights(&self.grid);
        let s: f64 = mag.iter().zip(&w).map(|(m, w)| w * m.powf(p)).sum();
        s.powf(1.0 / p)
    }

    pub fn l1_norm(&self) -> f64 {
        self.lp_norm(1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.lp_norm(f64::INFINITY)
    }

    /// `H^s` norm, `s <= 4`: `sqrt(Σ_{j≤s} |∂^j f|²_{L²})`.
    pub fn hs_norm(&self, s: usize) -> Result<f64> {
        if s > 4 {
            return Err(Error::InvalidInput(format!("H^{s} norm not supported")));
        }
        let mut acc = 0.0;
        for j in 0..=s {
            acc += self.derivative(j)?.l2_norm().powi(2);
        }
        Ok(acc.sqrt())
    }

    /// `|(1+|x|²)^{3/4} f|_{H⁴}`.
    pub fn weighted_h4_norm(&self) -> Result<f64> {
        let mut g = self.clone();
        for i in 0..self.grid.len() {
            let w = (1.0 + self.grid.x(i).powi(2)).powf(0.75);
            for v in &mut g.values[i * self.n..(i + 1) * self.n] {
                *v *= w;
            }
        }
        g.hs_norm(4)
    }

    /// `sup_x e^{rate |x|} |f(x)|`.
    pub fn exp_weighted_sup(&self, rate: f64) -> f64 {
        self.magnitude()
            .iter()
            .enumerate()
            .map(|(i, m)| (rate * self.grid.x(i).abs()).exp() * m)
            .fold(0.0, f64::max)
    }

    /// Trapezoid integral of each component.
    pub fn integral(&self) -> Vec<f64> {
        let w = trapezoid_weights(&self.grid);
        let mut out = vec![0.0; self.n];
        for (i, wi) in w.iter().enumerate() {
            for k in 0..self.n {
                out[k] += wi * self.values[i * self.n + k];
            }
        }
        out
    }
}
