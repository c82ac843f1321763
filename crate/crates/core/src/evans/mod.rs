//! Evans function of the eigenvalue ODE `(L - λ)w = 0`, winding numbers by
//! the argument principle and the order of the zero at the origin.
//!
//! The ODE is written as a first-order system of size `2n`: `(w, w')` in
//! general form and `(w, b w' + (db w)ū_x - df w)` in conservation form. The
//! decaying subspaces at `∓X` are spanned by `P(λ)R`, where `P` is the
//! spectral projector onto the `n` eigenvalues of the limiting matrix with
//! largest (left) or smallest (right) real parts and `R` a fixed real basis;
//! they are propagated to `x = 0` as exterior `n`-vectors with trace scaling.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{matrix_sign, real_to_complex};
use crate::models::{Form, ParabolicSystem};
use crate::profile::ShockProfile;
use crate::{Complex, Error, Result};

mod exterior;
use exterior::Exterior;

#[cfg(test)]
mod tests;

#[derive(Clone, Debug)]
pub struct EvansOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Real λ at which the reference bases are fixed.
    pub lambda_ref: f64,
    /// Smallest admissible real-part gap of the limiting splitting.
    pub min_gap: f64,
    pub max_steps: usize,
}

impl Default for EvansOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, lambda_ref: 5.0, min_gap: 1e-3, max_steps: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvansEvaluation {
    pub lambda: Complex,
    pub value: Complex,
    /// Net log-growth of the scaled exterior vectors on `[-X, 0]` and `[0, X]`.
    pub growth: (f64, f64),
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Minus,
    Plus,
}

/// Evans function evaluator for one model and profile.
#[derive(Debug)]
pub struct EvansSystem<'a> {
    system: &'a dyn ParabolicSystem,
    profile: &'a ShockProfile,
    n: usize,
    half_width: f64,
    ext: Exterior,
    reference: [DMatrix<Complex>; 2],
    opts: EvansOptions,
}

impl<'a> EvansSystem<'a> {
    pub fn new(system: &'a dyn ParabolicSystem, profile: &'a ShockProfile, opts: EvansOptions) -> Result<Self> {
        let n = system.dim();
        if profile.dim() != n {
            return Err(Error::Dimension { expected: n, got: profile.dim() });
        }
        let mut me = Self {
            system,
            profile,
            n,
            half_width: profile.grid().half_width(),
            ext: Exterior::new(2 * n, n),
            reference: [DMatrix::zeros(0, 0), DMatrix::zeros(0, 0)],
            opts,
        };
        let lr = Complex::new(me.opts.lambda_ref, 0.0);
        for (k, side) in [Side::Minus, Side::Plus].into_iter().enumerate() {
            let (p, _) = me.projector(side, lr)?;
            // orthonormal real basis of range(P(λ_ref))
            let pr = p.map(|c| c.re);
            let svd = pr.svd(true, false);
            let u = svd.u.ok_or(Error::Singular { row: 0 })?;
            let mut idx: Vec<usize> = (0..2 * n).collect();
            idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
            let cols: Vec<_> = idx[..n].iter().map(|&i| u.column(i).into_owned()).collect();
            me.reference[k] = real_to_complex(&DMatrix::from_columns(&cols));
        }
        Ok(me)
    }

    pub fn options(&self) -> &EvansOptions {
        &self.opts
    }

    /// First-order coefficient matrix at `x` (`None` for the limit at the side).
    fn coefficient(&self, x: Option<f64>, side: Side, lambda: Complex) -> DMatrix<Complex> {
        let n = self.n;
        let (u, ux, uxx) = match x {
            Some(x) => (self.profile.eval(0, x), self.profile.eval(1, x), self.profile.eval(2, x)),
            None => {
                let es = &self.profile.end_states;
                let u = if side == Side::Minus { es.u_minus.clone() } else { es.u_plus.clone() };
                (u, vec![0.0; n], vec![0.0; n])
            }
        };
        let sys = self.system;
        let binv = sys.viscosity(&u).try_inverse().unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN));
        let mut a = DMatrix::<Complex>::zeros(2 * n, 2 * n);
        let mut e = vec![0.0; n];
        match sys.form() {
            Form::Conservation => {
                // w' = b⁻¹(ψ - (db w)ū_x + df w), ψ' = λ w
                let mut k = sys.flux_jacobian(&u);
                let uxv = DVector::from_column_slice(&ux);
                for c in 0..n {
                    e.iter_mut().for_each(|v| *v = 0.0);
                    e[c] = 1.0;
                    let col = sys.viscosity_derivative(&u, &e) * &uxv;
                    for r in 0..n {
                        k[(r, c)] -= col[r];
                    }
                }
                let top = &binv * k;
                for r in 0..n {
                    for c in 0..n {
                        a[(r, c)] = Complex::new(top[(r, c)], 0.0);
                        a[(r, n + c)] = Complex::new(binv[(r, c)], 0.0);
                    }
                    a[(n + r, r)] = lambda;
                }
            }
            Form::General => {
                // w'' = b⁻¹[(λ + h_u - (db ·)ū_xx) w + h_{u_x} w']
                let hu = sys.source_du(&u, &ux);
                let hp = sys.source_dux(&u, &ux);
                let q = DVector::from_column_slice(&uxx);
                let mut k = hu;
                for c in 0..n {
                    e.iter_mut().for_each(|v| *v = 0.0);
                    e[c] = 1.0;
                    let col = sys.viscosity_derivative(&u, &e) * &q;
                    for r in 0..n {
                        k[(r, c)] -= col[r];
                    }
                }
                let k = &binv * k;
                let kp = &binv * hp;
                for r in 0..n {
                    a[(r, n + r)] = Complex::new(1.0, 0.0);
                    for c in 0..n {
                        let bl = Complex::new(binv[(r, c)], 0.0) * lambda;
                        a[(n + r, c)] = bl + Complex::new(k[(r, c)], 0.0);
                        a[(n + r, n + c)] = Complex::new(kp[(r, c)], 0.0);
                    }
                }
            }
        }
        a
    }

    /// Projector onto the decaying group at `side` and the trace of `A` on it.
    fn projector(&self, side: Side, lambda: Complex) -> Result<(DMatrix<Complex>, Complex)> {
        let n = self.n;
        let a = self.coefficient(None, side, lambda);
        let mut ev = crate::linalg::complex_eigenvalues(&a);
        ev.sort_by(|x, y| y.re.total_cmp(&x.re));
        // left: n largest real parts; right: n smallest
        let gap = ev[n - 1].re - ev[n].re;
        if !(gap > self.opts.min_gap) {
            return Err(Error::EssentialSpectrum { re: lambda.re, im: lambda.im });
        }
        let c = 0.5 * (ev[n - 1].re + ev[n].re);
        let shifted = &a - DMatrix::identity(2 * n, 2 * n) * Complex::new(c, 0.0);
        let s = matrix_sign(&shifted)?;
        let id = DMatrix::<Complex>::identity(2 * n, 2 * n);
        let half = Complex::new(0.5, 0.0);
        let p = match side {
            Side::Minus => (&id + &s) * half,
            Side::Plus => (&id - &s) * half,
        };
        let mu: Complex = match side {
            Side::Minus => ev[..n].iter().sum(),
            Side::Plus => ev[n..].iter().sum(),
        };
        Ok((p, mu))
    }

    /// `D(λ)`.
    pub fn eval(&self, lambda: Complex) -> Result<EvansEvaluation> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::Domain("non-finite λ".into()));
        }
        let mut out = [DVector::zeros(0), DVector::zeros(0)];
        let mut growth = [0.0; 2];
        let mut steps = 0;
        for (k, side) in [Side::Minus, Side::Plus].into_iter().enumerate() {
            let (p, mu) = self.projector(side, lambda)?;
            let basis = p * &self.reference[k];
            let start = self.ext.wedge_columns(&basis);
            let x0 = if side == Side::Minus { -self.half_width } else { self.half_width };
            let rhs = |x: f64, z: &DVector<Complex>| -> DVector<Complex> {
                let a = self.coefficient(Some(x), side, lambda);
                let mut dz = self.ext.induced(&a) * z;
                dz.axpy(-mu, z, Complex::new(1.0, 0.0));
                dz
            };
            let (z, nsteps) = rk45(rhs, x0, 0.0, start.clone(), &self.opts)?;
            growth[k] = Float::ln(z.norm() / start.norm());
            out[k] = z;
            steps += nsteps;
        }
        let value = self.ext.pair(&out[0], &out[1]);
        Ok(EvansEvaluation { lambda, value, growth: (growth[0], growth[1]), steps })
    }
}

/// One-shot evaluation with default options.
pub fn evans_eval(system: &dyn ParabolicSystem, profile: &ShockProfile, lambda: Complex) -> Result<EvansEvaluation> {
    EvansSystem::new(system, profile, EvansOptions::default())?.eval(lambda)
}

/// Dormand–Prince 5(4) from `x0` to `x1` (either direction).
fn rk45<F>(f: F, x0: f64, x1: f64, y0: DVector<Complex>, opts: &EvansOptions) -> Result<(DVector<Complex>, usize)>
where
    F: Fn(f64, &DVector<Complex>) -> DVector<Complex>,
{
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut h = 0.05 * dir;
    let mut steps = 0;
    let mut k: Vec<DVector<Complex>> = Vec::with_capacity(7);
    while (x - x0).abs() < span {
        if steps >= opts.max_steps {
            return Err(Error::StepSize { x });
        }
        if ((x + h) - x0).abs() > span {
            h = x1 - x;
        }
        k.clear();
        k.push(f(x, &y));
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[s][j] != 0.0 {
                    ys.axpy(Complex::new(h * A[s][j], 0.0), kj, Complex::new(1.0, 0.0));
                }
            }
            k.push(f(x + C[s] * h, &ys));
        }
        let mut y5 = y.clone();
        let mut err = DVector::<Complex>::zeros(y.len());
        for s in 0..7 {
            y5.axpy(Complex::new(h * B5[s], 0.0), &k[s], Complex::new(1.0, 0.0));
            err.axpy(Complex::new(h * (B5[s] - B4[s]), 0.0), &k[s], Complex::new(1.0, 0.0));
        }
        let scale = opts.atol + opts.rtol * y.norm().max(y5.norm());
        let ratio = err.norm() / scale;
        if !ratio.is_finite() {
            return Err(Error::StepSize { x });
        }
        if ratio <= 1.0 {
            x += h;
            y = y5;
            steps += 1;
        }
        let fac = if ratio == 0.0 { 5.0 } else { (0.9 * Float::powf(ratio, -0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h.abs() < 1e-12 * (1.0 + x.abs()) {
            return Err(Error::StepSize { x });
        }
    }
    Ok((y, steps))
}

/// Closed contour in the λ-plane, parametrized counterclockwise by `s ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Contour {
    Circle { center: (f64, f64), radius: f64 },
    Rectangle { re: (f64, f64), im: (f64, f64) },
}

impl Contour {
    pub fn point(&self, s: f64) -> Complex {
        match *self {
            Contour::Circle { center, radius } => {
                Complex::new(center.0, center.1) + Complex::from_polar(radius, 2.0 * core::f64::consts::PI * s)
            }
            Contour::Rectangle { re, im } => {
                let (w, h) = (re.1 - re.0, im.1 - im.0);
                let per = 2.0 * (w + h);
                let mut d = num_traits::Euclid::rem_euclid(&s, &1.0) * per;
                if d < w {
                    return Complex::new(re.0 + d, im.0);
                }
                d -= w;
                if d < h {
                    return Complex::new(re.1, im.0 + d);
                }
                d -= h;
                if d < w {
                    return Complex::new(re.1 - d, im.1);
                }
                d -= w;
                Complex::new(re.0, im.1 - d)
            }
        }
    }

    /// Rectangle `[re_min, R] × [-R, R]`: everything with `Re λ ≥ re_min`
    /// up to the a-priori spectral bound `R`.
    pub fn right_half(re_min: f64, bound: f64) -> Self {
        Contour::Rectangle { re: (re_min, bound), im: (-bound, bound) }
    }

    pub fn contains(&self, z: Complex) -> bool {
        match *self {
            Contour::Circle { center, radius } => (z - Complex::new(center.0, center.1)).norm() < radius,
            Contour::Rectangle { re, im } => z.re > re.0 && z.re < re.1 && z.im > im.0 && z.im < im.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContourResult {
    pub contour: Contour,
    pub samples: usize,
    pub winding: i64,
    /// Raw phase sum divided by 2π.
    pub raw: f64,
    pub min_abs: f64,
    pub max_abs: f64,
    /// `(λ, D(λ))` in contour order.
    pub values: Vec<(Complex, Complex)>,
}

fn wrap(a: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut r = num_traits::Euclid::rem_euclid(&a, &two_pi);
    if r > core::f64::consts::PI {
        r -= two_pi;
    }
    r
}

const MAX_SAMPLES: usize = 40_000;
const SAFETY: f64 = 1e-6;

/// Argument-principle root count inside `contour`.
pub fn winding_number(evans: &EvansSystem<'_>, contour: Contour, n_samples: usize) -> Result<ContourResult> {
    let n0 = n_samples.max(8);
    let mut pts: Vec<(f64, Complex)> = Vec::with_capacity(n0 + 1);
    for k in 0..n0 {
        let s = k as f64 / n0 as f64;
        pts.push((s, evans.eval(contour.point(s))?.value));
    }
    loop {
        let len = pts.len();
        let mut refined: Vec<(f64, Complex)> = Vec::with_capacity(2 * len);
        let mut changed = false;
        for k in 0..len {
            let (s0, d0) = pts[k];
            let (s1, d1) = if k + 1 < len { pts[k + 1] } else { (1.0, pts[0].1) };
            refined.push((s0, d0));
            let jump = wrap(d1.arg() - d0.arg()).abs();
            if jump >= core::f64::consts::FRAC_PI_2 && s1 - s0 > 1e-9 {
                let sm = 0.5 * (s0 + s1);
                refined.push((sm, evans.eval(contour.point(sm))?.value));
                changed = true;
            }
        }
        pts = refined;
        if !changed || pts.len() > MAX_SAMPLES {
            break;
        }
    }
    let len = pts.len();
    let mut total = 0.0;
    for k in 0..len {
        let d1 = if k + 1 < len { pts[k + 1].1 } else { pts[0].1 };
        total += wrap(d1.arg() - pts[k].1.arg());
    }
    let raw = total / (2.0 * core::f64::consts::PI);
    let min_abs = pts.iter().map(|p| p.1.norm()).fold(f64::INFINITY, f64::min);
    let max_abs = pts.iter().map(|p| p.1.norm()).fold(0.0, f64::max);
    if !(min_abs > SAFETY * max_abs) {
        return Err(Error::ContourTooClose { min_abs });
    }
    let winding = Float::round(raw) as i64;
    if (raw - winding as f64).abs() > 1e-2 {
        return Err(Error::Inconclusive(alloc::format!("phase sum {raw} is not an integer")));
    }
    let values = pts.iter().map(|(s, d)| (contour.point(*s), *d)).collect();
    Ok(ContourResult { contour, samples: len, winding, raw, min_abs, max_abs, values })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OriginOrder {
    pub order: i64,
    pub radius: f64,
    /// Winding on the inner circle of radius `radius/2`.
    pub inner: i64,
}

/// Order of the zero of `D` at `λ = 0`: the winding around `|λ| = radius`,
/// accepted only if the circle of half the radius gives the same count.
pub fn zero_order_at_origin(evans: &EvansSystem<'_>, radius: f64) -> Result<OriginOrder> {
    if !(radius > 0.0) {
        return Err(Error::Radius("radius must be positive".into()));
    }
    let outer = winding_number(evans, Contour::Circle { center: (0.0, 0.0), radius }, 32)?;
    let inner = winding_number(evans, Contour::Circle { center: (0.0, 0.0), radius: 0.5 * radius }, 32)?;
    if outer.winding != inner.winding {
        return Err(Error::Radius(alloc::format!(
            "winding {} on |λ| = {radius} but {} on |λ| = {}",
            outer.winding,
            inner.winding,
            0.5 * radius
        )));
    }
    Ok(OriginOrder { order: outer.winding, radius, inner: inner.winding })
}

/// Roots inside a contour: power sums `s_k = Σ λ_j^k` from the argument
/// principle give initial guesses (Newton identities), refined by secant.
pub fn evans_roots(evans: &EvansSystem<'_>, result: &ContourResult) -> Result<Vec<Complex>> {
    let w = result.winding;
    if w < 0 {
        return Err(Error::Inconclusive("negative winding".into()));
    }
    let w = w as usize;
    if w == 0 {
        return Ok(Vec::new());
    }
    // s_k = (1/2πi)∮ λ^k d log D, midpoint rule on unwrapped log increments
    let vals = &result.values;
    let len = vals.len();
    let mut s = vec![Complex::new(0.0, 0.0); w + 1];
    for k in 0..len {
        let (l0, d0) = vals[k];
        let (l1, d1) = vals[(k + 1) % len];
        let dlog = Complex::new(Float::ln(d1.norm() / d0.norm()), wrap(d1.arg() - d0.arg()));
        let lm = (l0 + l1) * 0.5;
        let mut pw = Complex::new(1.0, 0.0);
        for sk in s.iter_mut() {
            *sk += pw * dlog;
            pw *= lm;
        }
    }
    let two_pi_i = Complex::new(0.0, 2.0 * core::f64::consts::PI);
    let s: Vec<Complex> = s.iter().map(|v| v / two_pi_i).collect();
    // Newton identities: e_k from power sums, then companion eigenvalues
    let mut e = vec![Complex::new(1.0, 0.0); w + 1];
    for k in 1..=w {
        let mut acc = Complex::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[k - i] * s[i] * sign;
        }
        e[k] = acc / k as f64;
    }
    let mut comp = DMatrix::<Complex>::zeros(w, w);
    for k in 0..w {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        comp[(0, k)] = e[k + 1] * sign;
        if k + 1 < w {
            comp[(k + 1, k)] = Complex::new(1.0, 0.0);
        }
    }
    let guesses = crate::linalg::complex_eigenvalues(&comp);
    guesses.into_iter().map(|g| secant(evans, g)).collect()
}

fn secant(evans: &EvansSystem<'_>, guess: Complex) -> Result<Complex> {
    let mut x0 = guess;
    let mut x1 = guess + Complex::new(1e-4 * (1.0 + guess.norm()), 0.0);
    let mut f0 = evans.eval(x0)?.value;
    let mut f1 = evans.eval(x1)?.value;
    for _ in 0..50 {
        let den = f1 - f0;
        if den.norm() == 0.0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / den;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = evans.eval(x1)?.value;
        if (x1 - x0).norm() < 1e-12 * (1.0 + x1.norm()) {
            break;
        }
    }
    Ok(x1)
}
