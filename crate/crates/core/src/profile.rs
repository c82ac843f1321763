//! Standing-wave profiles: Newton solve of the connection problem, tail
//! decay measurement and translates.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::BandMatrix;
use crate::models::{EndStates, Form, ParabolicSystem};
use crate::numerics::{diff_matrix, interpolate, DiffOp, DiscreteField, Grid};
use crate::{Error, Result};

/// Initial guess recipe for the Newton solve.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ProfileGuess {
    /// `u- + (u+ - u-)(1 + tanh(x/width))/2`.
    Tanh { width: f64 },
    /// `u± + amplitude·sech²(x/width)` in every component.
    Bump { amplitude: f64, width: f64 },
}

impl ProfileGuess {
    pub fn sample(&self, grid: &Grid, end_states: &EndStates) -> DiscreteField {
        let (um, up) = (&end_states.u_minus, &end_states.u_plus);
        let n = um.len();
        let mut v = Vec::with_capacity(grid.len() * n);
        for x in grid.nodes() {
            for k in 0..n {
                v.push(match *self {
                    ProfileGuess::Tanh { width } => {
                        um[k] + (up[k] - um[k]) * 0.5 * (1.0 + (x / width).tanh())
                    }
                    ProfileGuess::Bump { amplitude, width } => {
                        let base = if x < 0.0 { um[k] } else { up[k] };
                        base + amplitude / (x / width).cosh().powi(2)
                    }
                });
            }
        }
        DiscreteField::new(*grid, n, v).expect("finite guess")
    }
}

/// Condition removing the translation degeneracy.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PhaseCondition {
    /// `ū_c(x0) = value`, defaulting to the mean of the end states.
    Value { component: usize, x0: f64, value: Option<f64> },
    /// `ū_c'(x0) = 0` (pulses).
    Derivative { component: usize, x0: f64 },
}

impl PhaseCondition {
    fn anchor(&self) -> (usize, f64) {
        match *self {
            PhaseCondition::Value { component, x0, .. } => (component, x0),
            PhaseCondition::Derivative { component, x0 } => (component, x0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProfileOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub tail_tol: f64,
    pub guess: ProfileGuess,
    /// Overrides `guess` when present.
    pub initial: Option<DiscreteField>,
}

impl ProfileOptions {
    pub fn with_guess(guess: ProfileGuess) -> Self {
        Self { tol: 1e-10, max_iter: 60, tail_tol: 1e-6, guess, initial: None }
    }
}

/// A converged standing wave `ū` sampled on a grid.
#[derive(Clone, Debug)]
pub struct ShockProfile {
    pub model: String,
    pub form: Form,
    pub field: DiscreteField,
    /// `ū_x, ū_xx, ū_xxx, ū_xxxx`.
    pub derivatives: Vec<DiscreteField>,
    pub end_states: EndStates,
    /// Decay rate θ (filled by [`measure_decay`]; NaN if not measured).
    pub theta: f64,
    pub phase: PhaseCondition,
    /// Residual speed of the bordered solve (zero for a standing wave).
    pub speed: f64,
    /// Discrete L² norm of the profile-equation residual.
    pub residual: f64,
    pub newton_history: Vec<f64>,
}

impl ShockProfile {
    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn dim(&self) -> usize {
        self.field.components()
    }

    /// `∂^j ū` for `j = 0..=4`.
    pub fn derivative(&self, j: usize) -> &DiscreteField {
        if j == 0 {
            &self.field
        } else {
            &self.derivatives[j - 1]
        }
    }

    /// Interpolated `∂^j ū(x)`, using end states (or zero) off the grid.
    pub fn eval(&self, j: usize, x: f64) -> Vec<f64> {
        let n = self.dim();
        let zero = vec![0.0; n];
        let ends = if j == 0 {
            (self.end_states.u_minus.as_slice(), self.end_states.u_plus.as_slice())
        } else {
            (zero.as_slice(), zero.as_slice())
        };
        interpolate(self.grid(), self.derivative(j).values(), n, x, 8, Some(ends))
    }
}

/// A discretized connection problem for damped Newton iteration. The
/// residual vector ends with the phase equation.
trait Connection {
    fn residual(&self, x: &[f64]) -> Vec<f64>;
    fn correction(&self, x: &[f64], r: &[f64]) -> Result<Vec<f64>>;
}

fn residual_norm(r: &[f64], h: f64) -> f64 {
    let (body, last) = r.split_at(r.len() - 1);
    (h * body.iter().map(|v| v * v).sum::<f64>() + last[0] * last[0]).sqrt()
}

fn phase_row(phase: &PhaseCondition, d1: &DiffOp, i0: usize, n: usize) -> Vec<(usize, f64)> {
    match *phase {
        PhaseCondition::Value { component, .. } => vec![(i0 * n + component, 1.0)],
        PhaseCondition::Derivative { component, .. } => {
            let (s, w) = d1.row(i0);
            w.iter().enumerate().map(|(k, &wk)| ((s + k) * n + component, wk)).collect()
        }
    }
}

/// Conservation form: the integrated equation `ū' = g(ū) := b(ū)⁻¹(f(ū) - f(u-))`
/// by Hermite–Simpson collocation, with projection conditions at `±X`.
struct Integrated<'a> {
    system: &'a dyn ParabolicSystem,
    n: usize,
    m: usize,
    h: f64,
    f_minus: DVector<f64>,
    um: Vec<f64>,
    up: Vec<f64>,
    left: DMatrix<f64>,
    right: DMatrix<f64>,
    phase: Vec<(usize, f64)>,
    phase_value: f64,
    i0: usize,
}

impl Integrated<'_> {
    fn g(&self, u: &[f64]) -> DVector<f64> {
        let rhs = self.system.flux(u) - &self.f_minus;
        self.system.viscosity(u).lu().solve(&rhs).unwrap_or_else(|| DVector::from_element(self.n, f64::NAN))
    }

    fn jac_g(&self, u: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let b = self.system.viscosity(u);
        let g = self.g(u);
        let mut a = self.system.flux_jacobian(u);
        let mut e = vec![0.0; n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[c] = 1.0;
            let col = self.system.viscosity_derivative(u, &e) * &g;
            for r in 0..n {
                a[(r, c)] -= col[r];
            }
        }
        b.lu().solve(&a).unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN))
    }

    fn midpoint(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let (ga, gb) = (self.g(a), self.g(b));
        (0..self.n).map(|k| 0.5 * (a[k] + b[k]) + self.h / 8.0 * (ga[k] - gb[k])).collect()
    }

    /// Row of the banded system for interval `k`, left/right conditions and phase.
    fn interval_row(&self, k: usize) -> usize {
        self.left.nrows() + k * self.n + usize::from(k >= self.i0)
    }
}

impl Connection for Integrated<'_> {
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let (n, h) = (self.n, self.h);
        let mut r = Vec::with_capacity(self.m * n);
        for k in 0..self.m - 1 {
            let a = &x[k * n..(k + 1) * n];
            let b = &x[(k + 1) * n..(k + 2) * n];
            let gm = self.g(&self.midpoint(a, b));
            let (ga, gb) = (self.g(a), self.g(b));
            for c in 0..n {
                r.push((b[c] - a[c]) / h - (ga[c] + 4.0 * gm[c] + gb[c]) / 6.0);
            }
        }
        let last = (self.m - 1) * n;
        for row in self.left.row_iter() {
            r.push((0..n).map(|c| row[c] * (x[c] - self.um[c])).sum());
        }
        for row in self.right.row_iter() {
            r.push((0..n).map(|c| row[c] * (x[last + c] - self.up[c])).sum());
        }
        r.push(self.phase.iter().map(|(j, w)| w * x[*j]).sum::<f64>() - self.phase_value);
        r
    }

    fn correction(&self, x: &[f64], r: &[f64]) -> Result<Vec<f64>> {
        let (n, m, h) = (self.n, self.m, self.h);
        let size = m * n;
        let mut j = BandMatrix::zeros(size, 3 * n, 3 * n);
        let mut rhs = vec![0.0; size];
        let id = DMatrix::<f64>::identity(n, n);
        for k in 0..m - 1 {
            let a = &x[k * n..(k + 1) * n];
            let b = &x[(k + 1) * n..(k + 2) * n];
            let (ja, jb) = (self.jac_g(a), self.jac_g(b));
            let jm = self.jac_g(&self.midpoint(a, b));
            let da = -&id / h - (&ja + &jm * (&id * 2.0 + &ja * h / 2.0)) / 6.0;
            let db = &id / h - (&jm * (&id * 2.0 - &jb * h / 2.0) + &jb) / 6.0;
            let row = self.interval_row(k);
            for p in 0..n {
                rhs[row + p] = -r[k * n + p];
                for c in 0..n {
                    j.add(row + p, k * n + c, da[(p, c)]);
                    j.add(row + p, (k + 1) * n + c, db[(p, c)]);
                }
            }
        }
        let mut idx = (m - 1) * n;
        for (q, lrow) in self.left.row_iter().enumerate() {
            rhs[q] = -r[idx];
            idx += 1;
            for c in 0..n {
                j.add(q, c, lrow[c]);
            }
        }
        let nr = self.right.nrows();
        for (q, rrow) in self.right.row_iter().enumerate() {
            let row = size - nr + q;
            rhs[row] = -r[idx];
            idx += 1;
            for c in 0..n {
                j.add(row, (m - 1) * n + c, rrow[c]);
            }
        }
        let prow = self.interval_row(self.i0) - 1;
        rhs[prow] = -r[idx];
        for (col, w) in &self.phase {
            j.add(prow, *col, *w);
        }
        let lu = j.factor()?;
        Ok(lu.solve(&rhs))
    }
}

/// Left eigenvectors of `b⁻¹df` at a rest state whose eigenvalues satisfy `keep`.
fn projection_rows(
    system: &dyn ParabolicSystem,
    u: &[f64],
    keep: impl Fn(f64) -> bool,
) -> Result<DMatrix<f64>> {
    let n = system.dim();
    let a = system
        .viscosity(u)
        .lu()
        .solve(&system.flux_jacobian(u))
        .ok_or(Error::Singular { row: 0 })?;
    let at = a.transpose();
    let ev = at.clone().complex_eigenvalues();
    let mut rows = Vec::new();
    for l in ev.iter() {
        if l.im.abs() > 1e-10 || !keep(l.re) {
            continue;
        }
        // null vector of (Aᵀ - λ) by SVD
        let shifted = &at - DMatrix::identity(n, n) * l.re;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.ok_or(Error::Singular { row: 0 })?;
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
        rows.push(vt.row(imin).into_owned());
    }
    Ok(if rows.is_empty() { DMatrix::zeros(0, n) } else { DMatrix::from_rows(&rows) })
}

/// General form: second-order collocation with Dirichlet end values and a
/// bordering speed `s` (last unknown) that must vanish.
struct Collocated<'a> {
    system: &'a dyn ParabolicSystem,
    n: usize,
    m: usize,
    d1: DiffOp,
    d2: DiffOp,
    um: Vec<f64>,
    up: Vec<f64>,
    phase: Vec<(usize, f64)>,
    phase_value: f64,
    anchor_row: usize,
}

impl Collocated<'_> {
    fn jacobian(&self, u: &[f64], s: f64) -> (BandMatrix<f64>, Vec<f64>) {
        let (n, m) = (self.n, self.m);
        let reach = self.d1.reach().max(self.d2.reach());
        let bw = (reach + 1) * n - 1;
        let mut j = BandMatrix::zeros(m * n, bw, bw);
        let mut col = vec![0.0; m * n];
        let du = self.d1.apply_strided(u, n);
        let d2u = self.d2.apply_strided(u, n);
        let mut e = vec![0.0; n];
        for k in 0..n {
            j.add(k, k, 1.0);
            j.add((m - 1) * n + k, (m - 1) * n + k, 1.0);
        }
        for i in 1..m - 1 {
            let ui = &u[i * n..(i + 1) * n];
            let pi = &du[i * n..(i + 1) * n];
            let b = self.system.viscosity(ui);
            let hu = self.system.source_du(ui, pi);
            let hp = self.system.source_dux(ui, pi);
            let (st, w) = self.d2.row(i);
            for (kk, wk) in w.iter().enumerate() {
                for a in 0..n {
                    for c in 0..n {
                        j.add(i * n + a, (st + kk) * n + c, b[(a, c)] * wk);
                    }
                }
            }
            let (st, w) = self.d1.row(i);
            for (kk, wk) in w.iter().enumerate() {
                for a in 0..n {
                    for c in 0..n {
                        let sd = if a == c { s } else { 0.0 };
                        j.add(i * n + a, (st + kk) * n + c, (sd - hp[(a, c)]) * wk);
                    }
                }
            }
            let q = DVector::from_column_slice(&d2u[i * n..(i + 1) * n]);
            for c in 0..n {
                e.iter_mut().for_each(|v| *v = 0.0);
                e[c] = 1.0;
                let dbq = self.system.viscosity_derivative(ui, &e) * &q;
                for a in 0..n {
                    j.add(i * n + a, i * n + c, dbq[a] - hu[(a, c)]);
                }
            }
            col[i * n..(i + 1) * n].copy_from_slice(pi);
        }
        (j, col)
    }
}

impl Connection for Collocated<'_> {
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let (u, s) = (&x[..m * n], x[m * n]);
        let du = self.d1.apply_strided(u, n);
        let d2u = self.d2.apply_strided(u, n);
        let mut r = vec![0.0; m * n + 1];
        for k in 0..n {
            r[k] = u[k] - self.um[k];
            r[(m - 1) * n + k] = u[(m - 1) * n + k] - self.up[k];
        }
        for i in 1..m - 1 {
            let ui = &u[i * n..(i + 1) * n];
            let pi = &du[i * n..(i + 1) * n];
            let g = self.system.viscosity(ui) * DVector::from_column_slice(&d2u[i * n..(i + 1) * n])
                - self.system.source(ui, pi);
            for k in 0..n {
                r[i * n + k] = g[k] + s * pi[k];
            }
        }
        r[m * n] = self.phase.iter().map(|(j, w)| w * u[*j]).sum::<f64>() - self.phase_value;
        r
    }

    /// The phase row replaces the equation at the anchor so the matrix stays
    /// banded; the displaced equation closes the system for `δs`.
    fn correction(&self, x: &[f64], r: &[f64]) -> Result<Vec<f64>> {
        let (n, m) = (self.n, self.m);
        let (u, s) = (&x[..m * n], x[m * n]);
        let row = self.anchor_row;
        let (mut j, mut col) = self.jacobian(u, s);
        let removed: Vec<(usize, f64)> = j.row_range(row).map(|k| (k, j.get(row, k))).collect();
        let c_removed = col[row];
        for k in j.row_range(row) {
            j.set(row, k, 0.0);
        }
        for (k, v) in &self.phase {
            j.add(row, *k, *v);
        }
        col[row] = 0.0;
        let mut rt = r[..m * n].to_vec();
        let r_removed = rt[row];
        rt[row] = r[m * n];
        let lu = j.factor()?;
        let y1 = lu.solve(&rt);
        let y2 = lu.solve(&col);
        let dot = |y: &[f64]| removed.iter().map(|(k, v)| v * y[*k]).sum::<f64>();
        let denom = c_removed - dot(&y2);
        if denom.abs() < 1e-300 {
            return Err(Error::Singular { row });
        }
        let ds = (dot(&y1) - r_removed) / denom;
        let mut dx: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| -a - ds * b).collect();
        dx.push(ds);
        Ok(dx)
    }
}

fn damped_newton(
    problem: &dyn Connection,
    mut x: Vec<f64>,
    h: f64,
    opts: &ProfileOptions,
) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    let mut r = problem.residual(&x);
    let mut norm = residual_norm(&r, h);
    let mut history = vec![norm];
    let mut converged = norm <= opts.tol;
    for _ in 0..opts.max_iter {
        if converged {
            break;
        }
        let dx = problem.correction(&x, &r)?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + lambda * b).collect();
            let tr = problem.residual(&trial);
            let tn = residual_norm(&tr, h);
            if tn.is_finite() && (tn < norm * (1.0 - 1e-4 * lambda) || tn <= opts.tol) {
                x = trial;
                r = tr;
                norm = tn;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(Error::NoConnection { history });
            }
        }
        history.push(norm);
        converged = norm <= opts.tol;
    }
    if !converged {
        return Err(Error::NoConnection { history });
    }
    Ok((x, norm, history))
}

/// Solves the standing-wave problem by damped Newton iteration.
///
/// Conservation form uses the once-integrated first-order equation
/// `b(ū)ū' = f(ū) - f(u-)` (Hermite–Simpson collocation, projection
/// conditions at `±X`). General form uses second-order collocation with
/// Dirichlet end values and a free speed `s` that must vanish at a genuine
/// standing connection.
pub fn solve_profile(
    system: &dyn ParabolicSystem,
    end_states: &EndStates,
    grid: &Grid,
    phase: &PhaseCondition,
    opts: &ProfileOptions,
) -> Result<ShockProfile> {
    let n = system.dim();
    if end_states.dim() != n {
        return Err(Error::Dimension { expected: n, got: end_states.dim() });
    }
    let (um, up) = (end_states.u_minus.clone(), end_states.u_plus.clone());
    let (comp, x0) = phase.anchor();
    if comp >= n || x0.abs() >= grid.half_width() {
        return Err(Error::InvalidInput("phase anchor outside the state or grid".into()));
    }
    let jump: f64 = um.iter().zip(&up).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if system.form() == Form::Conservation && jump < 1e-12 {
        return Err(Error::NoConnection { history: vec![] });
    }
    let phase_value = match phase {
        PhaseCondition::Value { value: Some(v), .. } => *v,
        _ => 0.5 * (um[comp] + up[comp]),
    };
    let (m, h) = (grid.len(), grid.spacing());
    let d1 = diff_matrix(grid, 1, 4)?;
    let i0 = grid.nearest(x0);
    let prow = phase_row(phase, &d1, i0, n);
    let u0 = match &opts.initial {
        Some(f) => f.values().to_vec(),
        None => opts.guess.sample(grid, end_states).into_values(),
    };
    let f_minus = system.flux(&um);
    let (u, s, norm, history) = match system.form() {
        Form::Conservation => {
            let left = projection_rows(system, &um, |re| re <= 0.0)?;
            let right = projection_rows(system, &up, |re| re >= 0.0)?;
            if left.nrows() + right.nrows() + 1 != n {
                return Err(Error::Unsupported(alloc::format!(
                    "end-state dimension count {} + {} + 1 != {n}: no isolated standing connection",
                    left.nrows(),
                    right.nrows()
                )));
            }
            if i0 == 0 {
                return Err(Error::InvalidInput("phase anchor at the left boundary".into()));
            }
            let p = Integrated {
                system,
                n,
                m,
                h,
                f_minus: f_minus.clone(),
                um: um.clone(),
                up: up.clone(),
                left,
                right,
                phase: prow,
                phase_value,
                i0,
            };
            let (x, norm, hist) = damped_newton(&p, u0, h, opts)?;
            (x, 0.0, norm, hist)
        }
        Form::General => {
            let p = Collocated {
                system,
                n,
                m,
                d1: d1.clone(),
                d2: diff_matrix(grid, 2, 4)?,
                um: um.clone(),
                up: up.clone(),
                phase: prow,
                phase_value,
                anchor_row: i0 * n + comp,
            };
            let mut x0v = u0;
            x0v.push(0.0);
            let (mut x, norm, hist) = damped_newton(&p, x0v, h, opts)?;
            let s = x.pop().unwrap_or(0.0);
            (x, s, norm, hist)
        }
    };
    let field = DiscreteField::new(*grid, n, u)?;
    let tail = (0..n)
        .map(|k| (field.at(0)[k] - um[k]).abs().max((field.at(m - 1)[k] - up[k]).abs()))
        .fold(0.0, f64::max);
    let excursion = (0..m)
        .map(|i| (0..n).map(|k| (field.at(i)[k] - um[k]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    if s.abs() > 1e-6 || tail > opts.tail_tol || excursion < 1e-8 {
        return Err(Error::NoConnection { history });
    }
    let derivatives = profile_derivatives(system, &field, &d1, &f_minus, s)?;
    Ok(ShockProfile {
        model: system.name().into(),
        form: system.form(),
        field,
        derivatives,
        end_states: end_states.clone(),
        theta: f64::NAN,
        phase: phase.clone(),
        speed: s,
        residual: norm,
        newton_history: history,
    })
}

fn profile_derivatives(
    system: &dyn ParabolicSystem,
    field: &DiscreteField,
    d1: &DiffOp,
    f_minus: &DVector<f64>,
    s: f64,
) -> Result<Vec<DiscreteField>> {
    let n = field.components();
    let grid = *field.grid();
    let u = field.values();
    let m = grid.len();
    let solve_b = |ui: &[f64], rhs: DVector<f64>| -> Result<DVector<f64>> {
        system.viscosity(ui).lu().solve(&rhs).ok_or(Error::Singular { row: 0 })
    };
    let mut ux = vec![0.0; m * n];
    let mut uxx = vec![0.0; m * n];
    match system.form() {
        Form::Conservation => {
            for i in 0..m {
                let ui = &u[i * n..(i + 1) * n];
                let v = solve_b(ui, system.flux(ui) - f_minus)?;
                ux[i * n..(i + 1) * n].copy_from_slice(v.as_slice());
            }
            uxx = d1.apply_strided(&ux, n);
        }
        Form::General => {
            ux = d1.apply_strided(u, n);
            for i in 0..m {
                let ui = &u[i * n..(i + 1) * n];
                let pi = &ux[i * n..(i + 1) * n];
                let rhs = system.source(ui, pi) - DVector::from_column_slice(pi) * s;
                let v = solve_b(ui, rhs)?;
                uxx[i * n..(i + 1) * n].copy_from_slice(v.as_slice());
            }
        }
    }
    let u3 = d1.apply_strided(&uxx, n);
    let u4 = d1.apply_strided(&u3, n);
    [ux, uxx, u3, u4].into_iter().map(|v| DiscreteField::new(grid, n, v)).collect()
}

/// Tail decay fit for one derivative order.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailFit {
    pub order: usize,
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub r2_minus: f64,
    pub r2_plus: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayReport {
    pub fits: Vec<TailFit>,
    /// Minimum rate over tails and orders.
    pub theta: f64,
    /// False if some tail was too short or too noisy (R² < 0.99).
    pub conclusive: bool,
}

/// Least-squares line `y = a + b x`; returns `(b, r²)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Fits `|∂^j ū| ~ C e^{-θ|x|}` on both tails for `j = 1..=4`.
pub fn measure_decay(profile: &ShockProfile) -> DecayReport {
    let grid = profile.grid();
    let xw = grid.half_width();
    let mut fits = Vec::new();
    let mut conclusive = true;
    let mut theta = f64::INFINITY;
    for j in 1..=4 {
        let mag = profile.derivative(j).magnitude();
        let peak = mag.iter().cloned().fold(0.0, f64::max);
        let floor = 1e-7 * peak;
        let side = |sign: f64| -> Option<(f64, f64)> {
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for (i, &v) in mag.iter().enumerate() {
                let x = grid.x(i) * sign;
                if x >= 0.3 * xw && x <= 0.9 * xw && v > floor && peak > 0.0 {
                    xs.push(x);
                    ys.push(v.ln());
                }
            }
            if xs.len() < 10 {
                return None;
            }
            let (slope, _, r2) = linear_fit(&xs, &ys);
            Some((-slope, r2))
        };
        match (side(-1.0), side(1.0)) {
            (Some((tm, rm)), Some((tp, rp))) => {
                if rm < 0.99 || rp < 0.99 {
                    conclusive = false;
                }
                theta = theta.min(tm).min(tp);
                fits.push(TailFit { order: j, theta_minus: tm, theta_plus: tp, r2_minus: rm, r2_plus: rp });
            }
            _ => conclusive = false,
        }
    }
    if fits.is_empty() {
        theta = f64::NAN;
    }
    DecayReport { fits, theta, conclusive }
}

/// Translate `ū^α(x) = ū(x - α)` by local interpolation.
pub fn translate(profile: &ShockProfile, alpha: f64) -> Result<ShockProfile> {
    let grid = *profile.grid();
    if alpha.abs() >= grid.half_width() / 2.0 {
        return Err(Error::Domain(format!("translate by {alpha} exceeds X/2")));
    }
    if alpha == 0.0 {
        return Ok(profile.clone());
    }
    let n = profile.dim();
    let shift = |j: usize| -> Result<DiscreteField> {
        let mut v = Vec::with_capacity(grid.len() * n);
        for x in grid.nodes() {
            v.extend(profile.eval(j, x - alpha));
        }
        DiscreteField::new(grid, n, v)
    };
    let field = shift(0)?;
    let derivatives = (1..=4).map(shift).collect::<Result<Vec<_>>>()?;
    let phase = match profile.phase.clone() {
        PhaseCondition::Value { component, x0, value } => PhaseCondition::Value { component, x0: x0 + alpha, value },
        PhaseCondition::Derivative { component, x0 } => PhaseCondition::Derivative { component, x0: x0 + alpha },
    };
    Ok(ShockProfile { field, derivatives, phase, ..profile.clone() })
}

#[cfg(test)]
mod tests;
