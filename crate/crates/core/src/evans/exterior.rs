//! Exterior powers `∧^k ℂ^d` in the lexicographic basis of `k`-subsets.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::Complex;

#[derive(Clone, Debug)]
pub(super) struct Exterior {
    d: usize,
    subsets: Vec<Vec<usize>>,
}

fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

/// Sign of the permutation sorting `seq` (entries distinct).
fn parity(seq: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Exterior {
    pub(super) fn new(d: usize, k: usize) -> Self {
        Self { d, subsets: subsets(d, k) }
    }

    fn index(&self, set: &[usize]) -> usize {
        self.subsets.iter().position(|s| s.as_slice() == set).expect("subset")
    }

    /// Plücker coordinates of the span of the columns (`k×k` minors).
    pub(super) fn wedge_columns(&self, m: &DMatrix<Complex>) -> DVector<Complex> {
        DVector::from_iterator(
            self.subsets.len(),
            self.subsets.iter().map(|s| {
                let rows: Vec<_> = s.iter().map(|&r| m.row(r).into_owned()).collect();
                DMatrix::from_rows(&rows).determinant()
            }),
        )
    }

    /// Matrix of the derivation induced by `a` on `∧^k`.
    pub(super) fn induced(&self, a: &DMatrix<Complex>) -> DMatrix<Complex> {
        let n = self.subsets.len();
        let mut out = DMatrix::zeros(n, n);
        let mut seq = Vec::new();
        for (ci, set) in self.subsets.iter().enumerate() {
            for (r, &ir) in set.iter().enumerate() {
                for j in 0..self.d {
                    let coef = a[(j, ir)];
                    if coef == Complex::new(0.0, 0.0) {
                        continue;
                    }
                    if j != ir && set.contains(&j) {
                        continue;
                    }
                    seq.clear();
                    seq.extend_from_slice(set);
                    seq[r] = j;
                    let sign = parity(&seq);
                    let mut sorted = seq.clone();
                    sorted.sort_unstable();
                    out[(self.index(&sorted), ci)] += coef * sign;
                }
            }
        }
        out
    }

    /// `α ∧ β` for complementary degrees, as a scalar.
    pub(super) fn pair(&self, a: &DVector<Complex>, b: &DVector<Complex>) -> Complex {
        let mut total = Complex::new(0.0, 0.0);
        for (i, s) in self.subsets.iter().enumerate() {
            let comp: Vec<usize> = (0..self.d).filter(|x| !s.contains(x)).collect();
            let j = self.index(&comp);
            let mut seq = s.clone();
            seq.extend_from_slice(&comp);
            total += a[i] * b[j] * parity(&seq);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex {
        Complex::new(v, 0.0)
    }

    #[test]
    fn pair_of_columns_is_determinant() {
        let ext = Exterior::new(4, 2);
        let m = DMatrix::from_fn(4, 4, |i, j| c(((i * 7 + j * 3) % 5) as f64 + 0.1 * (i as f64) - 0.3 * j as f64));
        let a = ext.wedge_columns(&m.columns(0, 2).into_owned());
        let b = ext.wedge_columns(&m.columns(2, 2).into_owned());
        assert!((ext.pair(&a, &b) - m.determinant()).norm() < 1e-10);
    }

    #[test]
    fn induced_matches_derivative_of_wedge() {
        let ext = Exterior::new(4, 2);
        let a = DMatrix::from_fn(4, 4, |i, j| c(((i + 2 * j) % 3) as f64 - 0.5 * (i == j) as u8 as f64));
        let x = DMatrix::from_fn(4, 2, |i, j| c((i as f64 + 1.0) * (j as f64 - 0.7)));
        let eps = 1e-6;
        let xp = &x + &a * &x * c(eps);
        let xm = &x - &a * &x * c(eps);
        let fd = (ext.wedge_columns(&xp) - ext.wedge_columns(&xm)) / c(2.0 * eps);
        let exact = ext.induced(&a) * ext.wedge_columns(&x);
        assert!((fd - exact).norm() < 1e-6);
    }
}
