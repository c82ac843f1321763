use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use nalgebra::DMatrix;

use super::Grid;
use crate::linalg::fd_weights;
use crate::{Error, Result};

/// Sparse finite-difference operator on a [`Grid`], stored row by row.
#[derive(Clone, Debug)]
pub struct DiffOp {
    order: usize,
    accuracy: usize,
    m: usize,
    rows: Vec<(usize, Vec<f64>)>,
}

/// Differentiation matrix of the given derivative `order` (1 or 2) and
/// `accuracy` (2 or 4): central stencils inside, one-sided near the ends.
pub fn diff_matrix(grid: &Grid, order: usize, accuracy: usize) -> Result<DiffOp> {
    if !(1..=2).contains(&order) || !(accuracy == 2 || accuracy == 4) {
        return Err(Error::InvalidInput(format!(
            "unsupported derivative order {order} / accuracy {accuracy}"
        )));
    }
    let m = grid.len();
    let half = (order + accuracy - 1) / 2;
    let one_sided = order + accuracy;
    if m < one_sided {
        return Err(Error::InvalidInput(format!("{m} nodes too few for a {one_sided}-point stencil")));
    }
    let h = grid.spacing();
    let scale = h.powi(order as i32);
    let central: Vec<f64> = {
        let pts: Vec<f64> = (0..2 * half + 1).map(|k| k as f64 - half as f64).collect();
        fd_weights(0.0, &pts, order).into_iter().map(|w| w / scale).collect()
    };
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        if i >= half && i + half < m {
            rows.push((i - half, central.clone()));
        } else {
            let start = if i < half { 0 } else { m - one_sided };
            let pts: Vec<f64> = (0..one_sided).map(|k| (start + k) as f64 - i as f64).collect();
            let w = fd_weights(0.0, &pts, order).into_iter().map(|w| w / scale).collect();
            rows.push((start, w));
        }
    }
    Ok(DiffOp { order, accuracy, m, rows })
}

impl DiffOp {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn accuracy(&self) -> usize {
        self.accuracy
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Stencil of row `i`: first column and weights.
    pub fn row(&self, i: usize) -> (usize, &[f64]) {
        let (s, w) = &self.rows[i];
        (*s, w)
    }

    /// Largest `|j - i|` over all stencil entries.
    pub fn reach(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, (s, w))| {
                let a = i.saturating_sub(*s);
                let b = (s + w.len() - 1).saturating_sub(i);
                a.max(b)
            })
            .max()
            .unwrap_or(0)
    }

    /// Applies the operator to a scalar nodal array.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.m);
        self.rows
            .iter()
            .map(|(s, w)| w.iter().zip(&u[*s..]).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Applies the operator component-wise to node-major data with `n` components.
    pub fn apply_strided(&self, u: &[f64], n: usize) -> Vec<f64> {
        assert_eq!(u.len(), self.m * n);
        let mut out = vec![0.0; u.len()];
        for (i, (s, w)) in self.rows.iter().enumerate() {
            for (k, wk) in w.iter().enumerate() {
                let j = s + k;
                for c in 0..n {
                    out[i * n + c] += wk * u[j * n + c];
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.m, self.m);
        for (i, (s, w)) in self.rows.iter().enumerate() {
            for (k, wk) in w.iter().enumerate() {
                d[(i, s + k)] = *wk;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_derivative_of_constant_and_linear() {
        let g = Grid::new(3.0, 31).unwrap();
        for acc in [2, 4] {
            let d = diff_matrix(&g, 1, acc).unwrap();
            let c = d.apply(&vec![2.5; 31]);
            assert!(c.iter().all(|v| v.abs() < 1e-12));
            let lin = d.apply(&g.nodes());
            assert!(lin.iter().all(|v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn second_derivative_of_sine() {
        let g = Grid::new(8.0 * core::f64::consts::PI, 801).unwrap();
        let d = diff_matrix(&g, 2, 4).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|x| x.sin()).collect();
        let err = d
            .apply(&u)
            .iter()
            .zip(&u)
            .map(|(a, s)| (a + s).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "err {err}");
    }

    #[test]
    fn fourth_order_converges() {
        let mut errs = vec![];
        for m in [101, 201] {
            let g = Grid::new(2.0, m).unwrap();
            let d = diff_matrix(&g, 2, 4).unwrap();
            let u: Vec<f64> = g.nodes().iter().map(|x| x.exp()).collect();
            let e = d.apply(&u).iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            errs.push(e);
        }
        let rate = (errs[0] / errs[1]).log2();
        assert!(rate > 3.5, "rate {rate}");
    }

    #[test]
    fn rejects_bad_order() {
        let g = Grid::new(1.0, 11).unwrap();
        assert!(diff_matrix(&g, 3, 2).is_err());
        assert!(diff_matrix(&g, 1, 3).is_err());
    }

    proptest! {
        #[test]
        fn exact_on_polynomials(deg in 0usize..=4, acc in prop::sample::select(vec![2usize, 4]), order in 1usize..=2) {
            prop_assume!(deg <= acc);
            let g = Grid::new(1.5, 21).unwrap();
            let d = diff_matrix(&g, order, acc).unwrap();
            let xs = g.nodes();
            let u: Vec<f64> = xs.iter().map(|x| x.powi(deg as i32)).collect();
            let du = d.apply(&u);
            for (x, v) in xs.iter().zip(du) {
                let exact = match (order, deg) {
                    (_, 0) => 0.0,
                    (1, k) => k as f64 * x.powi(k as i32 - 1),
                    (2, 1) => 0.0,
                    (2, k) => (k * (k - 1)) as f64 * x.powi(k as i32 - 2),
                    _ => unreachable!(),
                };
                prop_assert!((v - exact).abs() < 1e-8);
            }
        }
    }
}
