use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::DiscretizedOperator;
use crate::linalg::{BandLu, BandMatrix};
use crate::models::Form;
use crate::numerics::Grid;
use crate::{Complex, Error, Result};

#[derive(Clone, Debug)]
pub struct SpectralOptions {
    /// Eigenvalues with `Re λ > cutoff_re` are unstable.
    pub cutoff_re: f64,
    /// Eigenvalues within this distance of the cutoff make the split ambiguous.
    pub split_tol: f64,
    /// Relative distance under which eigenvalues form one cluster.
    pub cluster_tol: f64,
    /// Largest interior size handed to the dense eigensolver.
    pub dense_limit: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { cutoff_re: 0.05, split_tol: 1e-3, cluster_tol: 1e-5, dense_limit: 2000 }
    }
}

/// A simple eigenvalue with right and left eigenvectors (interior values),
/// normalized so that `h Σ left_i right_i = 1`.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: Complex,
    pub right: Vec<Complex>,
    pub left: Vec<Complex>,
    /// `‖L r - λ r‖ / ‖r‖`.
    pub residual: f64,
}

/// The translational mode `φ = ū_x` and its dual.
#[derive(Clone, Debug)]
pub struct ZeroMode {
    pub value: f64,
    /// Computed null vector scaled to best match `ū_x`.
    pub right: Vec<f64>,
    /// Dual vector with `⟨left, right⟩ = 1`.
    pub left: Vec<f64>,
    /// `|cos|` of the angle between the computed null vector and `ū_x`.
    pub alignment: f64,
}

/// Unstable eigendata `{λ_j, φ_j, φ̃_j}` of a discretized operator.
///
/// `right` holds the `φ_j` as columns, `left` the duals `φ̃_j` normalized to
/// `⟨φ̃_i, φ_j⟩ = δ_ij` in the pairing `⟨a, b⟩ = h Σ a_i b_i`; `lambda` is the
/// `p×p` matrix of `L` on the unstable subspace (diagonal unless there are
/// Jordan chains).
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub grid: Grid,
    pub components: usize,
    pub form: Form,
    pub cutoff_re: f64,
    pub eigenvalues: Vec<Complex>,
    /// Jordan chain length of the cluster each column belongs to.
    pub ranks: Vec<usize>,
    pub right: DMatrix<Complex>,
    pub left: DMatrix<Complex>,
    pub lambda: DMatrix<Complex>,
    pub zero_mode: Option<ZeroMode>,
}

impl SpectralDecomposition {
    /// Number of unstable eigenvalues, with multiplicity.
    pub fn p(&self) -> usize {
        self.right.ncols()
    }

    /// `β`: half the smallest unstable real part, `None` when `p = 0`.
    pub fn beta(&self) -> Option<f64> {
        self.eigenvalues.iter().map(|l| l.re).fold(None, |a: Option<f64>, r| Some(a.map_or(r, |a| a.min(r)))).map(|r| 0.5 * r)
    }

    /// `ω = β/8`, leaving room for `3ω < η < β`.
    pub fn omega(&self) -> Option<f64> {
        self.beta().map(|b| b / 8.0)
    }

    /// Builds a decomposition directly from modes; used for synthetic checks.
    pub fn from_modes(
        grid: Grid,
        components: usize,
        form: Form,
        eigenvalues: Vec<Complex>,
        right: DMatrix<Complex>,
        left: DMatrix<Complex>,
    ) -> Result<Self> {
        let p = eigenvalues.len();
        if right.ncols() != p || left.ncols() != p || right.nrows() != left.nrows() {
            return Err(Error::Dimension { expected: p, got: right.ncols() });
        }
        let h = grid.spacing();
        let gram = left.transpose() * &right * Complex::new(h, 0.0);
        let inv = gram.try_inverse().ok_or(Error::Singular { row: 0 })?;
        let left = left * inv.transpose();
        Ok(Self {
            grid,
            components,
            form,
            cutoff_re: f64::NEG_INFINITY,
            lambda: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eigenvalues.clone())),
            ranks: vec![1; p],
            eigenvalues,
            right,
            left,
            zero_mode: None,
        })
    }

    /// Borrowed splitting data for [`crate::numerics::semigroup_apply`].
    pub fn unstable_part(&self) -> crate::numerics::UnstablePart<'_> {
        crate::numerics::UnstablePart {
            right: &self.right,
            left: &self.left,
            lambda: &self.lambda,
            weight: self.grid.spacing(),
        }
    }

    /// Coordinates `c_j = ⟨φ̃_j, f⟩` of an interior vector.
    pub fn coordinates(&self, f: &[f64]) -> Vec<Complex> {
        let h = self.grid.spacing();
        (0..self.p())
            .map(|j| {
                let col = self.left.column(j);
                col.iter().zip(f).map(|(a, b)| a * *b).sum::<Complex>() * h
            })
            .collect()
    }

    /// `Re Σ c_j φ_j` as an interior vector.
    pub fn synthesize(&self, c: &[Complex]) -> Vec<f64> {
        let rows = self.right.nrows();
        let mut out = vec![0.0; rows];
        for (j, cj) in c.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.right.column(j).iter()) {
                *o += (v * cj).re;
            }
        }
        out
    }
}

fn complex_band(a: &BandMatrix<f64>, shift: Complex) -> BandMatrix<Complex> {
    let mut c = a.map(|v| Complex::new(v, 0.0));
    c.add_identity(-shift);
    c
}

/// Deterministic, well-spread start block.
fn start_block(rows: usize, cols: usize) -> DMatrix<Complex> {
    DMatrix::from_fn(rows, cols, |i, j| {
        let x = (i as f64 + 0.5) / rows as f64;
        let s = Float::sin(core::f64::consts::PI * x * (j as f64 + 1.0) + 0.3 * j as f64);
        Complex::new(s + 0.01 * Float::cos(7.0 * i as f64 + j as f64), 0.0)
    })
}

/// Shift-invert subspace iteration for the invariant subspace belonging to
/// the `k` eigenvalues nearest `shift`.
fn invariant_subspace(lu: &BandLu<Complex>, rows: usize, k: usize) -> DMatrix<Complex> {
    let mut x = start_block(rows, k);
    crate::linalg::orthonormalize(&mut x);
    for _ in 0..12 {
        for j in 0..k {
            let col: Vec<Complex> = x.column(j).iter().cloned().collect();
            let y = lu.solve(&col);
            x.column_mut(j).copy_from_slice(&y);
        }
        crate::linalg::orthonormalize(&mut x);
    }
    x
}

fn matvec_block(a: &BandMatrix<f64>, x: &DMatrix<Complex>) -> DMatrix<Complex> {
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    for j in 0..x.ncols() {
        let re: Vec<f64> = x.column(j).iter().map(|c| c.re).collect();
        let im: Vec<f64> = x.column(j).iter().map(|c| c.im).collect();
        let (ar, ai) = (a.matvec(&re), a.matvec(&im));
        for i in 0..x.nrows() {
            out[(i, j)] = Complex::new(ar[i], ai[i]);
        }
    }
    out
}

/// All eigenvalues of the discretized operator by a dense real Schur form.
pub fn dense_eigenvalues(op: &DiscretizedOperator, dense_limit: usize) -> Result<Vec<Complex>> {
    if op.len() > dense_limit {
        return Err(Error::Unsupported(alloc::format!(
            "dense eigensolve of size {} exceeds the limit {dense_limit}",
            op.len()
        )));
    }
    let dense = op.matrix().to_dense();
    let schur = nalgebra::Schur::try_new(dense, 1e-14, 100_000).ok_or_else(|| Error::Inconclusive("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().cloned().collect())
}

/// Jordan chain length of `Λ - μ` (nilpotent part) on a small block.
fn chain_length(lambda: &DMatrix<Complex>, mu: Complex, tol: f64) -> usize {
    let k = lambda.nrows();
    let a = lambda - DMatrix::identity(k, k) * mu;
    let mut pow = DMatrix::identity(k, k);
    for len in 1..=k {
        pow = &pow * &a;
        if pow.norm() <= tol {
            return len;
        }
    }
    k + 1
}

/// Unstable spectrum (Re λ > cutoff) with right/left eigenvectors.
pub fn unstable_spectrum(op: &DiscretizedOperator, opts: &SpectralOptions) -> Result<SpectralDecomposition> {
    let all = dense_eigenvalues(op, opts.dense_limit)?;
    let scale = all.iter().map(|l| l.norm()).fold(1.0, f64::max);
    for l in &all {
        if (l.re - opts.cutoff_re).abs() < opts.split_tol {
            return Err(Error::AmbiguousSplitting { re: l.re, tol: opts.split_tol });
        }
    }
    let mut unstable: Vec<Complex> = all.into_iter().filter(|l| l.re > opts.cutoff_re).collect();
    unstable.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    // clusters: (center, count)
    let mut clusters: Vec<(Complex, usize)> = Vec::new();
    for l in unstable {
        let ctol = opts.cluster_tol * (1.0 + l.norm());
        match clusters.iter_mut().find(|(c, _)| (*c - l).norm() < ctol) {
            Some(c) => {
                c.0 = (c.0 * c.1 as f64 + l) / (c.1 as f64 + 1.0);
                c.1 += 1;
            }
            None => clusters.push((l, 1)),
        }
    }
    let rows = op.len();
    let h = op.grid().spacing();
    let lt = op.matrix().transpose();
    let mut vcols: Vec<DMatrix<Complex>> = Vec::new();
    let mut wcols: Vec<DMatrix<Complex>> = Vec::new();
    let mut cluster_of = Vec::new();
    for (ci, (mu, k)) in clusters.iter().enumerate() {
        let off = 1e-3 * (1.0 + mu.norm()) * Complex::from_polar(1.0, 0.7);
        let sigma = mu + off;
        let lu_r = complex_band(op.matrix(), sigma).factor()?;
        let lu_l = complex_band(&lt, sigma).factor()?;
        vcols.push(invariant_subspace(&lu_r, rows, *k));
        wcols.push(invariant_subspace(&lu_l, rows, *k));
        cluster_of.extend(core::iter::repeat_n(ci, *k));
    }
    let p = cluster_of.len();
    let mut v = DMatrix::<Complex>::zeros(rows, p);
    let mut w = DMatrix::<Complex>::zeros(rows, p);
    let mut c0 = 0;
    for (vb, wb) in vcols.iter().zip(&wcols) {
        v.columns_mut(c0, vb.ncols()).copy_from(vb);
        w.columns_mut(c0, wb.ncols()).copy_from(wb);
        c0 += vb.ncols();
    }
    let (lambda, left) = if p > 0 {
        let gram = w.transpose() * &v * Complex::new(h, 0.0);
        let inv = gram.try_inverse().ok_or(Error::Singular { row: 0 })?;
        // rows of Y = inv·Wᵀ·h; φ̃ = Yᵀ / h
        let left = &w * inv.transpose();
        let lv = matvec_block(op.matrix(), &v);
        let lambda = left.transpose() * lv * Complex::new(h, 0.0);
        (lambda, left)
    } else {
        (DMatrix::zeros(0, 0), DMatrix::zeros(rows, 0))
    };
    let mut eigenvalues = vec![Complex::new(0.0, 0.0); p];
    let mut ranks = vec![1; p];
    let mut c0 = 0;
    for (mu, k) in &clusters {
        let block = lambda.view((c0, c0), (*k, *k)).into_owned();
        let len = chain_length(&block, *mu, 1e-6 * scale);
        if len > 3 {
            return Err(Error::JordanTooLong(len));
        }
        let ev = crate::linalg::complex_eigenvalues(&block);
        for j in 0..*k {
            eigenvalues[c0 + j] = ev[j];
            ranks[c0 + j] = len;
        }
        c0 += k;
    }
    let zero_mode = zero_mode(op).ok();
    Ok(SpectralDecomposition {
        grid: *op.grid(),
        components: op.components(),
        form: op.form(),
        cutoff_re: opts.cutoff_re,
        eigenvalues,
        ranks,
        right: v,
        left,
        lambda,
        zero_mode,
    })
}

/// Simple eigenvalue nearest `sigma` by shift-invert iteration on `L` and `Lᵀ`.
pub fn eigenpair_near(op: &DiscretizedOperator, sigma: Complex) -> Result<EigenPair> {
    let rows = op.len();
    let h = op.grid().spacing();
    let lu_r = complex_band(op.matrix(), sigma).factor()?;
    let lu_l = complex_band(&op.matrix().transpose(), sigma).factor()?;
    let mut r = invariant_subspace(&lu_r, rows, 1);
    let mut l = invariant_subspace(&lu_l, rows, 1);
    for _ in 0..20 {
        let col: Vec<Complex> = r.column(0).iter().cloned().collect();
        r.column_mut(0).copy_from_slice(&lu_r.solve(&col));
        crate::linalg::orthonormalize(&mut r);
        let col: Vec<Complex> = l.column(0).iter().cloned().collect();
        l.column_mut(0).copy_from_slice(&lu_l.solve(&col));
        crate::linalg::orthonormalize(&mut l);
    }
    let lr = matvec_block(op.matrix(), &r);
    let value = r.column(0).dotc(&lr.column(0));
    let residual = (lr - &r * value).norm() / r.norm();
    let mut right: Vec<Complex> = r.column(0).iter().cloned().collect();
    // fix the phase so that the largest entry is real and positive
    let (imax, _) = right.iter().enumerate().fold((0, 0.0), |a, (i, v)| if v.norm() > a.1 { (i, v.norm()) } else { a });
    let ph = right[imax].conj() / right[imax].norm();
    right.iter_mut().for_each(|v| *v *= ph);
    let pair: Complex = l.column(0).iter().zip(&right).map(|(a, b)| a * b).sum::<Complex>() * h;
    if pair.norm() < 1e-300 {
        return Err(Error::Singular { row: 0 });
    }
    let left = l.column(0).iter().map(|a| a / pair).collect();
    Ok(EigenPair { value, right, left, residual })
}

/// Null vector of `L` matched against `ū_x`, with its dual.
pub fn zero_mode(op: &DiscretizedOperator) -> Result<ZeroMode> {
    let pair = eigenpair_near(op, Complex::new(0.0, 0.0))?;
    let phi = op.zero_mode();
    let r: Vec<f64> = pair.right.iter().map(|c| c.re).collect();
    let num = op.dot(&r, phi);
    let den = op.dot(&r, &r);
    let alignment = num.abs() / (den * op.dot(phi, phi)).sqrt();
    if den == 0.0 || num == 0.0 {
        return Err(Error::Singular { row: 0 });
    }
    let s = num / den;
    let right: Vec<f64> = r.iter().map(|v| v * s).collect();
    let l: Vec<f64> = pair.left.iter().map(|c| c.re).collect();
    let pl = op.dot(&l, &right);
    let left = l.iter().map(|v| v / pl).collect();
    Ok(ZeroMode { value: pair.value.re, right, left, alignment })
}
