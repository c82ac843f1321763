use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::{interior_mass, EvolutionTrace, Frame, Norms};
use crate::models::{convection_matrix, Form};
use crate::numerics::interpolate;
use crate::profile::ShockProfile;
use crate::spectral::DiscretizedOperator;
use crate::templates::{excited_kernel, null_vector, TemplateParams};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PhaseMethod {
    LeastSquares,
    Kernel,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseOptions {
    /// Half-width of the first scan.
    pub window: f64,
    /// Half-width of later scans, centred on the previous phase.
    pub follow: f64,
    pub scan_step: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self { window: 3.0, follow: 0.5, scan_step: 0.05, tol: 1e-12, max_iter: 50 }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseTrack {
    pub method: PhaseMethod,
    pub times: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_dot: Vec<f64>,
}

pub(crate) fn full_state(op: &DiscretizedOperator, profile: &ShockProfile, v: &[f64]) -> Vec<f64> {
    let mut u = profile.field.values().to_vec();
    let n = op.components();
    for (a, b) in u[n..n + v.len()].iter_mut().zip(v) {
        *a += b;
    }
    u
}

/// `J(a) = h Σ |u_i - ū(x_i - a)|²` and, on request, the Gauss–Newton step.
fn objective(profile: &ShockProfile, xs: &[f64], u: &[f64], a: f64, newton: bool, range: (usize, usize)) -> (f64, f64) {
    let n = profile.dim();
    let (mut j, mut g, mut hess) = (0.0, 0.0, 0.0);
    for (i, &x) in xs.iter().enumerate().take(range.1).skip(range.0) {
        let ub = profile.eval(0, x - a);
        let d = if newton { profile.eval(1, x - a) } else { vec![0.0; n] };
        for k in 0..n {
            let r = u[i * n + k] - ub[k];
            j += r * r;
            g += r * d[k];
            hess += d[k] * d[k];
        }
    }
    (j, if hess > 0.0 { -g / hess } else { 0.0 })
}

/// Node range outside of which `ū(x - a)` is constant to round-off for every
/// `a` in `[lo, hi]`; those nodes add the same amount to every `J(a)`.
fn active_range(profile: &ShockProfile, lo: f64, hi: f64) -> (usize, usize) {
    let d = profile.derivative(1).magnitude();
    let peak = d.iter().cloned().fold(0.0, f64::max);
    let grid = profile.grid();
    let m = grid.len();
    if peak == 0.0 {
        return (0, m);
    }
    let first = d.iter().position(|&x| x > 1e-15 * peak).unwrap_or(0);
    let last = d.iter().rposition(|&x| x > 1e-15 * peak).unwrap_or(m - 1);
    let h = grid.spacing();
    let pad = |s: f64| Float::ceil(s.abs() / h) as usize + 8;
    let i0 = first.saturating_sub(pad(lo.min(0.0)));
    let i1 = (last + pad(hi.max(0.0)) + 1).min(m);
    (i0, i1)
}

pub(crate) fn least_squares_phase(
    profile: &ShockProfile,
    xs: &[f64],
    u: &[f64],
    center: f64,
    half_width: f64,
    opts: &PhaseOptions,
) -> Result<f64> {
    let k = Float::ceil(half_width / opts.scan_step) as i64;
    let range = active_range(profile, center - half_width - 1.0, center + half_width + 1.0);
    let scan: Vec<(f64, f64)> = (-k..=k)
        .map(|i| {
            let a = center + i as f64 * opts.scan_step;
            (a, objective(profile, xs, u, a, false, range).0)
        })
        .collect();
    let minima: Vec<usize> = (1..scan.len() - 1)
        .filter(|&i| scan[i].1 < scan[i - 1].1 && scan[i].1 < scan[i + 1].1)
        .collect();
    let best = match minima.len() {
        1 => minima[0],
        0 => {
            // monotone in the window: accept only a minimum at the edge
            let (i, _) = scan.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, s)| if s.1 < acc.1 { (i, s.1) } else { acc });
            if i == 0 || i + 1 == scan.len() {
                return Err(Error::PhaseAmbiguity(0));
            }
            i
        }
        m => return Err(Error::PhaseAmbiguity(m)),
    };
    let mut a = scan[best].0;
    for _ in 0..opts.max_iter {
        let (_, step) = objective(profile, xs, u, a, true, range);
        a += step;
        if step.abs() <= opts.tol * (1.0 + a.abs()) {
            return Ok(a);
        }
    }
    Err(Error::Inconclusive(format!("phase Newton did not settle near a = {a}")))
}

/// Second-order derivative of a series on nonuniform nodes.
pub(crate) fn differentiate(t: &[f64], a: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n < 2 {
        return vec![0.0; n];
    }
    if n == 2 {
        let d = (a[1] - a[0]) / (t[1] - t[0]);
        return vec![d, d];
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        out[i] = -h2 / (h1 * (h1 + h2)) * a[i - 1] + (h2 - h1) / (h1 * h2) * a[i] + h1 / (h2 * (h1 + h2)) * a[i + 1];
    }
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    out[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * a[0] + (h1 + h2) / (h1 * h2) * a[1] - h1 / (h2 * (h1 + h2)) * a[2];
    let (h1, h2) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
    out[n - 1] = h2 / (h1 * (h1 + h2)) * a[n - 3] - (h1 + h2) / (h1 * h2) * a[n - 2] + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * a[n - 1];
    out
}

/// Least-squares phase `α(t) = argmin_a ‖u(·, t) - ū(· - a)‖` for every
/// snapshot of a raw-frame trace, with `α̇` by differentiation.
pub fn track_phase(
    trace: &EvolutionTrace,
    op: &DiscretizedOperator,
    profile: &ShockProfile,
    opts: &PhaseOptions,
) -> Result<PhaseTrack> {
    if trace.frame != Frame::Raw {
        return Err(Error::InvalidInput("phase tracking needs a raw-frame trace".into()));
    }
    let xs = op.grid().nodes();
    let mut alpha = Vec::with_capacity(trace.len());
    let mut center = 0.0;
    for (k, v) in trace.snapshots.iter().enumerate() {
        let u = full_state(op, profile, v);
        let half = if k == 0 { opts.window } else { opts.follow };
        let a = least_squares_phase(profile, &xs, &u, center, half, opts)?;
        alpha.push(a);
        center = a;
    }
    let alpha_dot = differentiate(&trace.times, &alpha);
    Ok(PhaseTrack { method: PhaseMethod::LeastSquares, times: trace.times.clone(), alpha, alpha_dot })
}

/// `v(x) = u(x + α) - ū(x)` at interior nodes.
pub(crate) fn shift_snapshot(op: &DiscretizedOperator, profile: &ShockProfile, v: &[f64], alpha: f64) -> Vec<f64> {
    let n = op.components();
    let grid = op.grid();
    let u = full_state(op, profile, v);
    let ends = (profile.end_states.u_minus.as_slice(), profile.end_states.u_plus.as_slice());
    let mut out = Vec::with_capacity(v.len());
    for i in 1..grid.len() - 1 {
        let x = grid.x(i);
        let ui = interpolate(grid, &u, n, x + alpha, 8, Some(ends));
        let ub = &profile.field.values()[i * n..(i + 1) * n];
        out.extend(ui.iter().zip(ub).map(|(a, b)| a - b));
    }
    out
}

/// Re-expresses a raw trace in the frame moving with `track`.
pub fn reframe(
    trace: &EvolutionTrace,
    op: &DiscretizedOperator,
    profile: &ShockProfile,
    track: &PhaseTrack,
) -> Result<EvolutionTrace> {
    if trace.frame != Frame::Raw || track.alpha.len() != trace.len() {
        return Err(Error::InvalidInput("reframe needs a raw trace and a matching phase track".into()));
    }
    let snapshots: Vec<Vec<f64>> =
        trace.snapshots.iter().zip(&track.alpha).map(|(v, &a)| shift_snapshot(op, profile, v, a)).collect();
    let norms = snapshots.iter().map(|v| Norms::of(&op.to_field(v))).collect::<Result<Vec<_>>>()?;
    Ok(EvolutionTrace {
        frame: Frame::Shifted,
        dt: trace.dt,
        times: trace.times.clone(),
        mass: snapshots.iter().map(|v| interior_mass(op, v)).collect(),
        snapshots,
        alpha: track.alpha.clone(),
        alpha_dot: track.alpha_dot.clone(),
        norms,
        conservation_defect: trace.conservation_defect.clone(),
        template_ratio: Vec::new(),
        zeta: Vec::new(),
        divergence: trace.divergence,
    })
}

/// Limit of the phase for conservation-form data of total mass `mass`: the
/// coefficient of `u- - u+` when the mass is split along the shift direction
/// and the outgoing characteristic directions.
pub fn limiting_phase(op: &DiscretizedOperator, profile: &ShockProfile, mass: &[f64]) -> Result<f64> {
    if op.form() != Form::Conservation {
        return Err(Error::Unsupported("limiting phase needs conservation form".into()));
    }
    let es = &profile.end_states;
    let n = es.dim();
    let mut cols: Vec<DVector<f64>> = vec![DVector::from_iterator(n, es.u_minus.iter().zip(&es.u_plus).map(|(a, b)| a - b))];
    let sys = &**op.system();
    for (u, speeds, outgoing) in [(&es.u_minus, &es.a_minus, -1.0), (&es.u_plus, &es.a_plus, 1.0)] {
        let a = convection_matrix(sys, u);
        for &s in speeds.iter().filter(|&&s| s * outgoing > 0.0) {
            cols.push(null_vector(&a - DMatrix::identity(n, n) * s));
        }
    }
    let m = DMatrix::from_columns(&cols);
    let rhs = DVector::from_column_slice(mass);
    let sol = m.svd(true, true).solve(&rhs, 1e-12).map_err(|e| Error::Domain(e.into()))?;
    Ok(sol[0])
}

/// Phase from the kernel formula with the `l` table rescaled to fit a
/// reference track.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelPhase {
    pub times: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_dot: Vec<f64>,
    /// Fitted multiplier of the supplied `l` table.
    pub l_scale: f64,
    /// RMS difference to the reference phase.
    pub rms: f64,
}

/// `N(v) = -(f(ū+v) - f(ū) - df(ū) v)` at interior nodes.
fn flux_remainder(op: &DiscretizedOperator, v: &[f64]) -> Vec<f64> {
    let n = op.components();
    let sys = &**op.system();
    let base = op.base();
    let mut out = Vec::with_capacity(v.len());
    for (ub, vi) in base.chunks(n).zip(v.chunks(n)) {
        let u: Vec<f64> = ub.iter().zip(vi).map(|(a, b)| a + b).collect();
        let f1 = sys.flux(&u);
        let f0 = sys.flux(ub);
        let lin = sys.flux_jacobian(ub) * DVector::from_column_slice(vi);
        out.extend((0..n).map(|k| -(f1[k] - f0[k] - lin[k])));
    }
    out
}

/// Quadrature of the phase formula
/// `α(t) = -∫ e(y,t) v₀ dy + ∫₀ᵗ ∫ e_y(y,t-s) (N(v) + α̇v)(y,s) dy ds`
/// over every `stride`-th snapshot of a shifted-frame trace (scalar
/// characteristic families per mode, ℓ = 1). `α̇` is taken from the trace.
/// The kernel is linear in `l`; a common multiplier of the table is fitted
/// to the trace's phase by least squares.
pub fn kernel_phase(
    trace: &EvolutionTrace,
    op: &DiscretizedOperator,
    params: &TemplateParams,
    stride: usize,
) -> Result<KernelPhase> {
    if trace.frame != Frame::Shifted {
        return Err(Error::InvalidInput("kernel phase needs a shifted-frame trace".into()));
    }
    if op.form() != Form::Conservation || op.components() != 1 || params.ell() != 1 || params.gamma != 0.0 {
        return Err(Error::Unsupported("kernel phase is implemented for scalar conservation laws with ℓ = 1".into()));
    }
    if stride == 0 || trace.len() < 3 {
        return Err(Error::InvalidInput("need a positive stride and at least three snapshots".into()));
    }
    let idx: Vec<usize> = (0..trace.len()).step_by(stride).collect();
    let times: Vec<f64> = idx.iter().map(|&i| trace.times[i]).collect();
    let ys: Vec<f64> = (1..op.grid().len() - 1).map(|i| op.grid().x(i)).collect();
    let h = op.grid().spacing();
    let sources: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| {
            let v = &trace.snapshots[i];
            let nv = flux_remainder(op, v);
            nv.iter().zip(v).map(|(a, b)| a + trace.alpha_dot[i] * b).collect()
        })
        .collect();
    let v0 = &trace.snapshots[0];
    let mut raw = vec![0.0; times.len()];
    for (k, &t) in times.iter().enumerate() {
        let mut acc = 0.0;
        for (y, v) in ys.iter().zip(v0) {
            acc -= h * excited_kernel(*y, t, params)?.e[0] * v;
        }
        // trapezoid in s over the subsampled snapshots
        for j in 0..k {
            let w = if j == 0 { 0.5 * (times[1] - times[0]) } else { 0.5 * (times[j + 1] - times[j - 1]) };
            let mut inner = 0.0;
            for (y, s) in ys.iter().zip(&sources[j]) {
                if *s != 0.0 {
                    inner += excited_kernel(*y, t - times[j], params)?.e_y[0] * s;
                }
            }
            acc += w * h * inner;
        }
        if k > 0 {
            // the s = t end: e_y(·, 0) weighted by half the last interval
            let w = 0.5 * (times[k] - times[k - 1]);
            let mut inner = 0.0;
            for (y, s) in ys.iter().zip(&sources[k]) {
                inner += excited_kernel(*y, 0.0, params)?.e_y[0] * s;
            }
            acc += w * h * inner;
        }
        raw[k] = acc;
    }
    // the formula starts from α(0) = 0 with v₀ taken in the shifted frame
    let a0 = trace.alpha[0];
    let target: Vec<f64> = idx.iter().map(|&i| trace.alpha[i] - a0).collect();
    let den: f64 = raw.iter().map(|x| x * x).sum();
    let l_scale = if den > 0.0 { raw.iter().zip(&target).map(|(a, b)| a * b).sum::<f64>() / den } else { 0.0 };
    let alpha: Vec<f64> = raw.iter().map(|x| a0 + l_scale * x).collect();
    let rms = Float::sqrt(alpha.iter().zip(&target).map(|(x, y)| (x - a0 - y).powi(2)).sum::<f64>() / alpha.len() as f64);
    let alpha_dot = differentiate(&times, &alpha);
    Ok(KernelPhase { times, alpha, alpha_dot, l_scale, rms })
}
