use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::BandMatrix;
use crate::models::{Form, ParabolicSystem};
use crate::numerics::{diff_matrix, trapezoid_weights, DiffOp, DiscreteField, Grid};
use crate::profile::ShockProfile;
use crate::{Error, Result};

/// How the nonlinear residual `F_h` is discretized; `L` is its exact Jacobian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Recipe {
    /// Compact conservative flux differences (conservation form only):
    /// `[B_{i+1/2}(u_{i+1}-u_i) - B_{i-1/2}(u_i-u_{i-1})]/h² - (f_{i+1}-f_{i-1})/2h`
    /// with `B_{i+1/2} = b((u_i+u_{i+1})/2)`. Second order.
    Flux,
    /// Pointwise `b(u)D₂u - h(u, D₁u)` with central differences.
    Collocation { accuracy: usize },
}

impl Recipe {
    pub fn default_for(form: Form) -> Self {
        match form {
            Form::Conservation => Recipe::Flux,
            Form::General => Recipe::Collocation { accuracy: 2 },
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Recipe::Flux => "flux".into(),
            Recipe::Collocation { accuracy } => alloc::format!("collocation-{accuracy}"),
        }
    }
}

/// The linearization about a profile acting on interior values, with
/// Dirichlet zero at `±X`. Interior node `i` (grid index `i+1`) component `k`
/// sits at `i*n + k`.
#[derive(Clone, Debug)]
pub struct DiscretizedOperator {
    system: Arc<dyn ParabolicSystem>,
    grid: Grid,
    n: usize,
    recipe: Recipe,
    base: Vec<f64>,
    base_residual: Vec<f64>,
    matrix: BandMatrix<f64>,
    diffusion: BandMatrix<f64>,
    zero_mode: Vec<f64>,
    ops: Option<(DiffOp, DiffOp)>,
    norm_ops: (DiffOp, DiffOp),
}

impl DiscretizedOperator {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.n
    }

    pub fn recipe(&self) -> Recipe {
        self.recipe
    }

    pub fn system(&self) -> &Arc<dyn ParabolicSystem> {
        &self.system
    }

    pub fn form(&self) -> Form {
        self.system.form()
    }

    pub fn len(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The banded matrix of `L`.
    pub fn matrix(&self) -> &BandMatrix<f64> {
        &self.matrix
    }

    /// Principal part `v ↦ b(ū)v_xx` with the same stencil as `L`.
    pub fn diffusion(&self) -> &BandMatrix<f64> {
        &self.diffusion
    }

    /// Interior values of the profile.
    pub fn base(&self) -> Vec<f64> {
        self.restrict(&self.base)
    }

    /// Interior samples of `ū_x`.
    pub fn zero_mode(&self) -> &[f64] {
        &self.zero_mode
    }

    /// `F_h(ū)`: the profile residual on this stencil.
    pub fn base_residual(&self) -> &[f64] {
        &self.base_residual
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        let n = self.n;
        full[n..full.len() - n].to_vec()
    }

    pub fn extend(&self, interior: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut v = vec![0.0; interior.len() + 2 * n];
        v[n..n + interior.len()].copy_from_slice(interior);
        v
    }

    pub fn to_field(&self, interior: &[f64]) -> DiscreteField {
        DiscreteField::new(self.grid, self.n, self.extend(interior)).expect("interior length")
    }

    pub fn from_field(&self, f: &DiscreteField) -> Result<Vec<f64>> {
        if f.grid() != &self.grid || f.components() != self.n {
            return Err(Error::Dimension { expected: self.len() + 2 * self.n, got: f.values().len() });
        }
        Ok(self.restrict(f.values()))
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.matvec(v)
    }

    /// Weighted inner product `h Σ a_i b_i` on interior vectors.
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.grid.spacing() * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn l2(&self, a: &[f64]) -> f64 {
        self.dot(a, a).sqrt()
    }

    /// Discrete `H²` norm of an interior vector (boundary values zero).
    pub fn h2(&self, a: &[f64]) -> f64 {
        let full = self.extend(a);
        let (d1, d2) = &self.norm_ops;
        let w = trapezoid_weights(&self.grid);
        let sq = |v: &[f64]| -> f64 {
            v.chunks(self.n).zip(&w).map(|(c, w)| w * c.iter().map(|x| x * x).sum::<f64>()).sum()
        };
        (sq(&full) + sq(&d1.apply_strided(&full, self.n)) + sq(&d2.apply_strided(&full, self.n))).sqrt()
    }

    /// `F_h(u)` at interior nodes for interior values `u`; end values are
    /// those of the profile.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let mut full = self.base.clone();
        full[self.n..self.n + u.len()].copy_from_slice(u);
        residual_full(&*self.system, &self.grid, self.n, self.recipe, self.ops.as_ref(), &full)
    }

    /// `N(v) = F_h(ū+v) - F_h(ū) - Lv`.
    pub fn nonlinear(&self, v: &[f64]) -> Vec<f64> {
        let u: Vec<f64> = self.base().iter().zip(v).map(|(a, b)| a + b).collect();
        let f = self.residual(&u);
        let lv = self.apply(v);
        f.iter().zip(&self.base_residual).zip(&lv).map(|((a, b), c)| a - b - c).collect()
    }

    /// `F_h(ū+v) - F_h(ū)`, the right side of the perturbation equation.
    pub fn perturbation_rhs(&self, v: &[f64]) -> Vec<f64> {
        let u: Vec<f64> = self.base().iter().zip(v).map(|(a, b)| a + b).collect();
        let f = self.residual(&u);
        f.iter().zip(&self.base_residual).map(|(a, b)| a - b).collect()
    }

    /// `‖L ū_x‖_{L²}`.
    pub fn zero_mode_residual(&self) -> f64 {
        self.l2(&self.apply(&self.zero_mode))
    }
}

fn residual_full(
    system: &dyn ParabolicSystem,
    grid: &Grid,
    n: usize,
    recipe: Recipe,
    ops: Option<&(DiffOp, DiffOp)>,
    u: &[f64],
) -> Vec<f64> {
    let m = grid.len();
    let h = grid.spacing();
    let mut out = vec![0.0; (m - 2) * n];
    match recipe {
        Recipe::Flux => {
            let mut q = vec![0.0; (m - 1) * n];
            let mut mid = vec![0.0; n];
            for j in 0..m - 1 {
                for k in 0..n {
                    mid[k] = 0.5 * (u[j * n + k] + u[(j + 1) * n + k]);
                }
                let d = DVector::from_iterator(n, (0..n).map(|k| (u[(j + 1) * n + k] - u[j * n + k]) / h));
                let qj = system.viscosity(&mid) * d;
                q[j * n..(j + 1) * n].copy_from_slice(qj.as_slice());
            }
            let flux: Vec<DVector<f64>> = (0..m).map(|i| system.flux(&u[i * n..(i + 1) * n])).collect();
            for i in 1..m - 1 {
                for k in 0..n {
                    out[(i - 1) * n + k] = (q[i * n + k] - q[(i - 1) * n + k]) / h
                        - (flux[i + 1][k] - flux[i - 1][k]) / (2.0 * h);
                }
            }
        }
        Recipe::Collocation { .. } => {
            let (d1, d2) = ops.expect("collocation operators");
            let du = d1.apply_strided(u, n);
            let d2u = d2.apply_strided(u, n);
            for i in 1..m - 1 {
                let ui = &u[i * n..(i + 1) * n];
                let g = system.viscosity(ui) * DVector::from_column_slice(&d2u[i * n..(i + 1) * n])
                    - system.source(ui, &du[i * n..(i + 1) * n]);
                out[(i - 1) * n..i * n].copy_from_slice(g.as_slice());
            }
        }
    }
    out
}

/// Assembles `L` with the default recipe for the model's form.
pub fn assemble_l(system: Arc<dyn ParabolicSystem>, profile: &ShockProfile) -> Result<DiscretizedOperator> {
    let recipe = Recipe::default_for(system.form());
    assemble_l_with(system, profile, recipe)
}

pub fn assemble_l_with(
    system: Arc<dyn ParabolicSystem>,
    profile: &ShockProfile,
    recipe: Recipe,
) -> Result<DiscretizedOperator> {
    let grid = *profile.grid();
    let n = system.dim();
    if profile.dim() != n {
        return Err(Error::Dimension { expected: n, got: profile.dim() });
    }
    let m = grid.len();
    let h = grid.spacing();
    let big = (m - 2) * n;
    let u = profile.field.values().to_vec();
    let col = |node: usize, k: usize| (node - 1) * n + k;
    let interior = |node: usize| node >= 1 && node <= m - 2;
    let (matrix, diffusion, ops) = match recipe {
        Recipe::Flux => {
            if system.form() != Form::Conservation {
                return Err(Error::Unsupported("flux recipe needs a conservation-form model".into()));
            }
            let bw = 2 * n - 1;
            let mut a = BandMatrix::zeros(big, bw, bw);
            let mut d = BandMatrix::zeros(big, bw, bw);
            let mut e = vec![0.0; n];
            // face j couples nodes j and j+1
            for j in 0..m - 1 {
                let mid: Vec<f64> = (0..n).map(|k| 0.5 * (u[j * n + k] + u[(j + 1) * n + k])).collect();
                let delta = DVector::from_iterator(n, (0..n).map(|k| u[(j + 1) * n + k] - u[j * n + k]));
                let b = system.viscosity(&mid);
                // dq/du_j and dq/du_{j+1}, each n×n, scaled by 1/h
                let mut dql = DMatrix::zeros(n, n);
                let mut dqr = DMatrix::zeros(n, n);
                for c in 0..n {
                    e.iter_mut().for_each(|v| *v = 0.0);
                    e[c] = 1.0;
                    let t = system.viscosity_derivative(&mid, &e) * &delta * 0.5;
                    for r in 0..n {
                        dql[(r, c)] = (t[r] - b[(r, c)]) / h;
                        dqr[(r, c)] = (t[r] + b[(r, c)]) / h;
                    }
                }
                // F_i gets +q_i/h (i = j) and -q_{i-1}/h (i = j+1)
                for (row_node, sign) in [(j, 1.0), (j + 1, -1.0)] {
                    if !interior(row_node) {
                        continue;
                    }
                    for (col_node, blk) in [(j, &dql), (j + 1, &dqr)] {
                        if !interior(col_node) {
                            continue;
                        }
                        let bsign = if col_node == j { -1.0 } else { 1.0 };
                        for r in 0..n {
                            for c in 0..n {
                                a.add(col(row_node, r), col(col_node, c), sign * blk[(r, c)] / h);
                                d.add(col(row_node, r), col(col_node, c), sign * bsign * b[(r, c)] / (h * h));
                            }
                        }
                    }
                }
            }
            for i in 1..m - 1 {
                for (nb, sign) in [(i + 1, -1.0), (i - 1, 1.0)] {
                    if !interior(nb) {
                        continue;
                    }
                    let df = system.flux_jacobian(&u[nb * n..(nb + 1) * n]);
                    for r in 0..n {
                        for c in 0..n {
                            a.add(col(i, r), col(nb, c), sign * df[(r, c)] / (2.0 * h));
                        }
                    }
                }
            }
            (a, d, None)
        }
        Recipe::Collocation { accuracy } => {
            let d1 = diff_matrix(&grid, 1, accuracy)?;
            let d2 = diff_matrix(&grid, 2, accuracy)?;
            let reach = d1.reach().max(d2.reach());
            let bw = (reach + 1) * n - 1;
            let mut a = BandMatrix::zeros(big, bw, bw);
            let mut d = BandMatrix::zeros(big, bw, bw);
            let du = d1.apply_strided(&u, n);
            let d2u = d2.apply_strided(&u, n);
            let mut e = vec![0.0; n];
            for i in 1..m - 1 {
                let ui = &u[i * n..(i + 1) * n];
                let pi = &du[i * n..(i + 1) * n];
                let b = system.viscosity(ui);
                let hu = system.source_du(ui, pi);
                let hp = system.source_dux(ui, pi);
                let (st, w) = d2.row(i);
                for (kk, wk) in w.iter().enumerate() {
                    if !interior(st + kk) {
                        continue;
                    }
                    for r in 0..n {
                        for c in 0..n {
                            a.add(col(i, r), col(st + kk, c), b[(r, c)] * wk);
                            d.add(col(i, r), col(st + kk, c), b[(r, c)] * wk);
                        }
                    }
                }
                let (st, w) = d1.row(i);
                for (kk, wk) in w.iter().enumerate() {
                    if !interior(st + kk) {
                        continue;
                    }
                    for r in 0..n {
                        for c in 0..n {
                            a.add(col(i, r), col(st + kk, c), -hp[(r, c)] * wk);
                        }
                    }
                }
                let q = DVector::from_column_slice(&d2u[i * n..(i + 1) * n]);
                for c in 0..n {
                    e.iter_mut().for_each(|v| *v = 0.0);
                    e[c] = 1.0;
                    let dbq = system.viscosity_derivative(ui, &e) * &q;
                    for r in 0..n {
                        a.add(col(i, r), col(i, c), dbq[r] - hu[(r, c)]);
                    }
                }
            }
            (a, d, Some((d1, d2)))
        }
    };
    let base_residual = residual_full(&*system, &grid, n, recipe, ops.as_ref(), &u);
    let zero_mode = profile.derivative(1).values()[n..m * n - n].to_vec();
    Ok(DiscretizedOperator {
        system,
        grid,
        n,
        recipe,
        base: u,
        base_residual,
        matrix,
        diffusion,
        zero_mode,
        ops,
        norm_ops: (diff_matrix(&grid, 1, 4)?, diff_matrix(&grid, 2, 4)?),
    })
}
