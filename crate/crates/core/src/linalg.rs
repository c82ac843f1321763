//! Banded LU with partial pivoting and a few small dense helpers.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{ComplexField, DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Complex, Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Storage keeps `kl` extra super-diagonals so that an LU factorization with
/// row pivoting can be done in place.
#[derive(Clone, Debug)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: ComplexField + Copy> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![T::zero(); n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            T::zero()
        }
    }

    /// Adds `v` at `(i, j)`. Panics if the entry is outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "entry ({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "entry ({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn scale(&mut self, s: T) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    /// `self + s * other`, both with identical shape.
    pub fn axpy(&mut self, s: T, other: &Self) {
        assert_eq!((self.n, self.kl, self.ku), (other.n, other.kl, other.ku));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * *b;
        }
    }

    pub fn add_identity(&mut self, s: T) {
        for i in 0..self.n {
            self.add(i, i, s);
        }
    }

    pub fn row_range(&self, i: usize) -> core::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for j in self.row_range(i) {
                acc += self.data[self.idx(i, j)] * x[j];
            }
            *yi = acc;
        }
    }

    /// `y = Aᵀ x`.
    pub fn matvec_transpose(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![T::zero(); self.n];
        for (i, &xi) in x.iter().enumerate() {
            for j in self.row_range(i) {
                y[j] += self.data[self.idx(i, j)] * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            for j in self.row_range(i) {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in self.row_range(i) {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }

    pub fn map<U: ComplexField + Copy>(&self, f: impl Fn(T) -> U) -> BandMatrix<U> {
        BandMatrix {
            n: self.n,
            kl: self.kl,
            ku: self.ku,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// LU factorization with partial pivoting.
    pub fn factor(mut self) -> Result<BandLu<T>> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let uw = ku + kl;
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].norm1();
            for r in k + 1..=last {
                let v = self.data[self.idx(r, k)].norm1();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            piv[k] = p;
            if best == num_traits::Zero::zero() {
                return Err(Error::Singular { row: k });
            }
            let jmax = (k + uw).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(k, k)];
            for r in k + 1..=last {
                let ir = self.idx(r, k);
                let l = self.data[ir] / pivot;
                self.data[ir] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=jmax {
                    let ukj = self.data[self.idx(k, j)];
                    let irj = self.idx(r, j);
                    self.data[irj] -= l * ukj;
                }
            }
        }
        Ok(BandLu { a: self, piv })
    }
}

/// Factored band matrix; reusable for many right-hand sides.
#[derive(Clone, Debug)]
pub struct BandLu<T> {
    a: BandMatrix<T>,
    piv: Vec<usize>,
}

impl<T: ComplexField + Copy> BandLu<T> {
    pub fn dim(&self) -> usize {
        self.a.n
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let a = &self.a;
        let (n, kl) = (a.n, a.kl);
        let uw = a.ku + a.kl;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                b[r] -= a.data[a.idx(r, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..=(k + uw).min(n - 1) {
                acc -= a.data[a.idx(k, j)] * b[j];
            }
            b[k] = acc / a.data[a.idx(k, k)];
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Fornberg finite-difference weights for derivative `order` at `x0`.
pub fn fd_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

pub fn real_to_complex(m: &DMatrix<f64>) -> DMatrix<Complex> {
    m.map(|v| Complex::new(v, 0.0))
}

pub fn cvec(v: &[f64]) -> DVector<Complex> {
    DVector::from_iterator(v.len(), v.iter().map(|&x| Complex::new(x, 0.0)))
}

/// Matrix sign function by the scaled Newton iteration.
pub fn matrix_sign(a: &DMatrix<Complex>) -> Result<DMatrix<Complex>> {
    let n = a.nrows();
    let mut s = a.clone();
    for _ in 0..100 {
        let inv = s.clone().try_inverse().ok_or(Error::Singular { row: 0 })?;
        let det = s.determinant().norm();
        let mu = if det > 0.0 { Float::powf(det, -1.0 / n as f64) } else { 1.0 };
        let next = (s.clone() * Complex::new(mu, 0.0) + inv * Complex::new(1.0 / mu, 0.0))
            * Complex::new(0.5, 0.0);
        let diff = (&next - &s).norm();
        s = next;
        if diff <= 1e-14 * s.norm().max(1.0) {
            return Ok(s);
        }
    }
    Ok(s)
}

/// Eigenvalues of a small complex matrix.
pub fn complex_eigenvalues(a: &DMatrix<Complex>) -> Vec<Complex> {
    let schur = nalgebra::Schur::new(a.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Numerical rank by singular values relative to `tol`.
pub fn numerical_rank(a: &DMatrix<Complex>, tol: f64) -> usize {
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax.max(1.0)).count()
}

/// Modified Gram–Schmidt on the columns of `x` (in place), Hermitian product.
pub fn orthonormalize(x: &mut DMatrix<Complex>) {
    for j in 0..x.ncols() {
        for _ in 0..2 {
            for i in 0..j {
                let qi = x.column(i).into_owned();
                let r = qi.dotc(&x.column(j));
                let mut cj = x.column_mut(j);
                cj.axpy(-r, &qi, Complex::new(1.0, 0.0));
            }
        }
        let nrm = x.column(j).norm();
        if nrm > 0.0 {
            x.column_mut(j).scale_mut(1.0 / nrm);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_band(n: usize, kl: usize, ku: usize, seed: u64) -> (BandMatrix<f64>, DMatrix<f64>) {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut b = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in b.row_range(i) {
                b.set(i, j, next());
            }
        }
        let d = b.to_dense();
        (b, d)
    }

    #[test]
    fn band_solve_matches_dense() {
        let (b, d) = dense_band(40, 3, 2, 7);
        let rhs: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let x = b.clone().factor().unwrap().solve(&rhs);
        let r = &d * DVector::from_vec(x) - DVector::from_vec(rhs);
        assert!(r.norm() < 1e-10);
    }

    #[test]
    fn complex_band_solve() {
        let (b, d) = dense_band(25, 2, 4, 3);
        let mut bc = b.map(|v| Complex::new(v, 0.0));
        bc.add_identity(Complex::new(0.0, 2.0));
        let dc = real_to_complex(&d) + DMatrix::identity(25, 25) * Complex::new(0.0, 2.0);
        let rhs: Vec<Complex> = (0..25).map(|i| Complex::new(1.0, i as f64)).collect();
        let x = bc.factor().unwrap().solve(&rhs);
        let r = dc * DVector::from_vec(x) - DVector::from_vec(rhs);
        assert!(r.norm() < 1e-10);
    }

    #[test]
    fn singular_band_is_reported() {
        let b = BandMatrix::<f64>::zeros(4, 1, 1);
        assert!(matches!(b.factor(), Err(Error::Singular { .. })));
    }

    #[test]
    fn fornberg_central_second_derivative() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn sign_function_splits_spectrum() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, -3.0]);
        let s = matrix_sign(&real_to_complex(&a)).unwrap();
        let p = (DMatrix::identity(2, 2) + s) * Complex::new(0.5, 0.0);
        assert!((&p * &p - &p).norm() < 1e-12);
        assert!((p.trace().re - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn transpose_matvec_is_adjoint(seed in 0u64..1000) {
            let (b, _) = dense_band(15, 2, 3, seed);
            let x: Vec<f64> = (0..15).map(|i| (i as f64 * 0.3).cos()).collect();
            let y: Vec<f64> = (0..15).map(|i| (i as f64 * 0.7).sin()).collect();
            let ax = b.matvec(&x);
            let aty = b.matvec_transpose(&y);
            let l: f64 = ax.iter().zip(&y).map(|(a, b)| a * b).sum();
            let r: f64 = x.iter().zip(&aty).map(|(a, b)| a * b).sum();
            prop_assert!((l - r).abs() < 1e-12);
        }
    }
}
