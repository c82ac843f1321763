//! Pointwise decay templates `θ`, `ψ₁`, `ψ₂`, the excited kernels `e_j` and
//! their derivatives, the nonlinear source template `Ψ`, a majorant for the
//! center-stable Green kernel `G̃`, and quadrature checks of the convolution
//! estimates built from them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::models::{convection_matrix, EndStates, ParabolicSystem};
use crate::{Error, Result};

mod convolution;

pub use convolution::{
    convolution_check, convolution_lhs, kernel_bounds, ConvolutionKind, ConvolutionReport, GaussLegendre, KernelBound,
    KernelBoundReport, SampleSet,
};

/// `l(y) = c0 + c1 e^{-η|y|}`: bounded, with derivative bounded by `c1 η e^{-η|y|}`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LCoefficient {
    pub c0: f64,
    pub c1: f64,
}

/// Coefficients `l_{jk}^±`: one row per translate direction `j`, one column per
/// incoming mode on that side (`a_k^- > 0` on the left, `a_k^+ < 0` on the right).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LTable {
    pub minus: Vec<Vec<LCoefficient>>,
    pub plus: Vec<Vec<LCoefficient>>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TemplateParams {
    pub a_minus: Vec<f64>,
    pub a_plus: Vec<f64>,
    pub beta_minus: Vec<f64>,
    pub beta_plus: Vec<f64>,
    /// Gaussian width constant `M`.
    pub m: f64,
    /// Localization rate `η` of the kernel bounds.
    pub eta: f64,
    /// Spatial rate `θ` of the `e^{-θ|x|}` factors.
    pub theta: f64,
    /// 1 for undercompressive waves, 0 otherwise.
    pub gamma: f64,
    pub l: LTable,
}

impl TemplateParams {
    /// Builds the parameters with `M = 16 max β`, `η = θ = 1` and the default
    /// table `l = 1` (plus `γ/2 · e^{-η|y|}`).
    pub fn new(a_minus: Vec<f64>, a_plus: Vec<f64>, beta_minus: Vec<f64>, beta_plus: Vec<f64>, gamma: f64, ell: usize) -> Result<Self> {
        let m = 16.0 * beta_minus.iter().chain(&beta_plus).cloned().fold(0.0, f64::max);
        let cell = LCoefficient { c0: 1.0, c1: 0.5 * gamma };
        let left = a_minus.iter().filter(|&&a| a > 0.0).count();
        let right = a_plus.iter().filter(|&&a| a < 0.0).count();
        let l = LTable { minus: vec![vec![cell; left]; ell], plus: vec![vec![cell; right]; ell] };
        let p = Self { a_minus, a_plus, beta_minus, beta_plus, m, eta: 1.0, theta: 1.0, gamma, l };
        p.validate()?;
        Ok(p)
    }

    /// Characteristic speeds from the end states; `β_k^± = l_k b(u±) r_k` for
    /// the left and right eigenvectors of the convection matrix.
    pub fn from_end_states(system: &dyn ParabolicSystem, es: &EndStates) -> Result<Self> {
        let beta = |u: &[f64], speeds: &[f64]| -> Result<Vec<f64>> {
            let a = convection_matrix(system, u);
            let b = system.viscosity(u);
            let n = a.nrows();
            speeds
                .iter()
                .map(|&s| {
                    let shifted = &a - nalgebra::DMatrix::identity(n, n) * s;
                    let r = null_vector(shifted.clone());
                    let l = null_vector(shifted.transpose());
                    let v = l.dot(&(&b * &r)) / l.dot(&r);
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(Error::Domain(format!("projected viscosity {v} at speed {s} is not positive")));
                    }
                    Ok(v)
                })
                .collect()
        };
        let bm = beta(&es.u_minus, &es.a_minus)?;
        let bp = beta(&es.u_plus, &es.a_plus)?;
        Self::new(es.a_minus.clone(), es.a_plus.clone(), bm, bp, es.classification.gamma(), es.classification.ell())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a_minus.len();
        if n == 0 || self.a_plus.len() != n || self.beta_minus.len() != n || self.beta_plus.len() != n {
            return Err(Error::InvalidInput("speeds and rates must share one nonzero length".into()));
        }
        let sorted = |a: &[f64]| a.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&self.a_minus) || !sorted(&self.a_plus) {
            return Err(Error::InvalidInput("characteristic speeds must be strictly increasing".into()));
        }
        if self.beta_minus.iter().chain(&self.beta_plus).any(|b| !(*b > 0.0)) {
            return Err(Error::InvalidInput("diffusion rates must be positive".into()));
        }
        if !(self.m > 0.0 && self.eta > 0.0 && self.theta > 0.0) {
            return Err(Error::InvalidInput("M, η and θ must be positive".into()));
        }
        if self.gamma != 0.0 && self.gamma != 1.0 {
            return Err(Error::InvalidInput("γ must be 0 or 1".into()));
        }
        let left = self.a_minus.iter().filter(|&&a| a > 0.0).count();
        let right = self.a_plus.iter().filter(|&&a| a < 0.0).count();
        if self.l.minus.len() != self.l.plus.len()
            || self.l.minus.iter().any(|r| r.len() != left)
            || self.l.plus.iter().any(|r| r.len() != right)
        {
            return Err(Error::InvalidInput("l table does not match the incoming modes".into()));
        }
        if self.gamma == 0.0 && self.l.minus.iter().chain(&self.l.plus).flatten().any(|c| c.c1 != 0.0) {
            return Err(Error::InvalidInput("l must be constant when γ = 0".into()));
        }
        Ok(())
    }

    pub fn ell(&self) -> usize {
        self.l.minus.len()
    }

    /// Reflection `x ↦ -x`: speeds negate and the two sides swap.
    pub fn mirrored(&self) -> Self {
        let neg = |a: &[f64]| a.iter().rev().map(|v| -v).collect::<Vec<_>>();
        let rev = |b: &[f64]| b.iter().rev().cloned().collect::<Vec<_>>();
        // incoming columns keep their order by |a|
        let flip = |t: &Vec<Vec<LCoefficient>>| t.iter().map(|r| r.iter().rev().cloned().collect()).collect();
        Self {
            a_minus: neg(&self.a_plus),
            a_plus: neg(&self.a_minus),
            beta_minus: rev(&self.beta_plus),
            beta_plus: rev(&self.beta_minus),
            l: LTable { minus: flip(&self.l.plus), plus: flip(&self.l.minus) },
            ..self.clone()
        }
    }

    /// Incoming modes on the side of `y` as `(|a|, β, column)`, seen from `y ≤ 0`.
    fn incoming(&self, y: f64) -> Vec<(f64, f64, usize)> {
        let (speeds, rates, sign) = if y <= 0.0 {
            (&self.a_minus, &self.beta_minus, 1.0)
        } else {
            (&self.a_plus, &self.beta_plus, -1.0)
        };
        speeds
            .iter()
            .zip(rates)
            .filter(|(a, _)| sign * **a > 0.0)
            .enumerate()
            .map(|(c, (a, b))| (a.abs(), *b, c))
            .collect()
    }

    fn l_row(&self, y: f64, j: usize) -> &[LCoefficient] {
        if y <= 0.0 {
            &self.l.minus[j]
        } else {
            &self.l.plus[j]
        }
    }
}

pub(crate) fn null_vector(m: nalgebra::DMatrix<f64>) -> nalgebra::DVector<f64> {
    let n = m.ncols();
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    nalgebra::DVector::from_iterator(n, vt.row(k).iter().cloned())
}

fn gauss(d: f64, m: f64, t: f64) -> f64 {
    Float::exp(-d * d / (m * t))
}

/// Cumulative error function `(1 + erf z)/2`.
pub fn erf_fn(z: f64) -> f64 {
    0.5 * libm::erfc(-z)
}

fn erf_fn_prime(z: f64) -> f64 {
    Float::exp(-z * z) / Float::sqrt(core::f64::consts::PI)
}

/// `θ(x, t)`: Gaussians along the outgoing characteristics, amplitude `(1+t)^{-1/2}`.
pub fn theta(x: f64, t: f64, p: &TemplateParams) -> Result<f64> {
    let speeds = p.a_minus.iter().filter(|&&a| a < 0.0).chain(p.a_plus.iter().filter(|&&a| a > 0.0));
    if t < 0.0 {
        return Err(Error::Domain(format!("θ needs t ≥ 0, got {t}")));
    }
    if t == 0.0 {
        // the limit is 0 off the characteristic origin
        if x == 0.0 && speeds.clone().next().is_some() {
            return Err(Error::Domain("θ(0, 0) is singular".into()));
        }
        return Ok(0.0);
    }
    let amp = Float::powf(1.0 + t, -0.5);
    Ok(speeds.map(|a| amp * gauss(x - a * t, p.m, t)).sum())
}

/// `χ(x, t) = 1` on `[a_1^- t, a_n^+ t]`.
pub fn chi(x: f64, t: f64, p: &TemplateParams) -> f64 {
    let lo = p.a_minus[0] * t;
    let hi = p.a_plus[p.a_plus.len() - 1] * t;
    if lo <= x && x <= hi {
        1.0
    } else {
        0.0
    }
}

pub fn psi1(x: f64, t: f64, p: &TemplateParams) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain(format!("ψ₁ needs t ≥ 0, got {t}")));
    }
    if chi(x, t, p) == 0.0 {
        return Ok(0.0);
    }
    let speeds = p.a_minus.iter().filter(|&&a| a < 0.0).chain(p.a_plus.iter().filter(|&&a| a > 0.0));
    let lead = Float::powf(1.0 + x.abs() + t, -0.5);
    Ok(speeds.map(|a| lead * Float::powf(1.0 + (x - a * t).abs(), -0.5)).sum())
}

pub fn psi2(x: f64, t: f64, p: &TemplateParams) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain(format!("ψ₂ needs t ≥ 0, got {t}")));
    }
    let off = 1.0 - chi(x, t, p);
    if off == 0.0 {
        return Ok(0.0);
    }
    let a1 = p.a_minus[0];
    let an = p.a_plus[p.a_plus.len() - 1];
    let rt = Float::sqrt(t);
    let term = |a: f64| Float::powf(1.0 + (x - a * t).abs() + rt, -1.5);
    Ok(off * (term(a1) + term(an)))
}

/// `θ + ψ₁ + ψ₂`.
pub fn template(x: f64, t: f64, p: &TemplateParams) -> Result<f64> {
    Ok(theta(x, t, p)? + psi1(x, t, p)? + psi2(x, t, p)?)
}

/// `Ψ(y, s) = (1+s)^{1/2} s^{-1/2} T² + (1+s)^{-1} T` with `T = θ + ψ₁ + ψ₂`.
pub fn psi_source(y: f64, s: f64, p: &TemplateParams) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::Domain(format!("Ψ needs s ≥ 0, got {s}")));
    }
    if s == 0.0 {
        if template(y, 0.0, p)? == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Domain("Ψ is singular at s = 0".into()));
    }
    let t = template(y, s, p)?;
    Ok(Float::sqrt((1.0 + s) / s) * t * t + t / (1.0 + s))
}

/// The excited kernel `e_j(y, t)` with its derivatives and `t → ∞` limits.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelValue {
    pub e: Vec<f64>,
    pub e_t: Vec<f64>,
    pub e_y: Vec<f64>,
    pub e_yt: Vec<f64>,
    pub e_inf: Vec<f64>,
    pub e_y_inf: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    Float::sqrt(v.iter().map(|x| x * x).sum::<f64>())
}

impl KernelValue {
    pub fn abs_e(&self) -> f64 {
        norm(&self.e)
    }

    pub fn abs_e_t(&self) -> f64 {
        norm(&self.e_t)
    }

    pub fn abs_e_y(&self) -> f64 {
        norm(&self.e_y)
    }

    pub fn abs_e_yt(&self) -> f64 {
        norm(&self.e_yt)
    }

    pub fn abs_e_minus_inf(&self) -> f64 {
        Float::sqrt(self.e.iter().zip(&self.e_inf).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
    }

    pub fn abs_e_y_minus_inf(&self) -> f64 {
        Float::sqrt(self.e_y.iter().zip(&self.e_y_inf).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
    }
}

/// `e_j(y, t)` for `t ≥ 0`: differences of cumulative error functions along
/// the incoming characteristics on the side of `y`.
pub fn excited_kernel(y: f64, t: f64, p: &TemplateParams) -> Result<KernelValue> {
    if t < 0.0 {
        return Err(Error::Domain(format!("e needs t ≥ 0, got {t}")));
    }
    let ell = p.ell();
    // work in the left frame: y' = -|y|, ∂_y = sign ∂_{y'}
    let sign = if y <= 0.0 { 1.0 } else { -1.0 };
    let yl = -y.abs();
    let mut out = KernelValue {
        e: vec![0.0; ell],
        e_t: vec![0.0; ell],
        e_y: vec![0.0; ell],
        e_yt: vec![0.0; ell],
        e_inf: vec![0.0; ell],
        e_y_inf: vec![0.0; ell],
    };
    let decay = Float::exp(p.eta * yl);
    for (a, beta, col) in p.incoming(y) {
        let s = Float::sqrt(4.0 * beta * (t + 1.0));
        let ds = 2.0 * beta / s;
        let z1 = (yl + a * (t + 1.0)) / s;
        let z2 = (yl - a * t) / s;
        let (f1, f2) = (erf_fn_prime(z1), erf_fn_prime(z2));
        let z1t = a / s - z1 * ds / s;
        let z2t = -a / s - z2 * ds / s;
        let d = erf_fn(z1) - erf_fn(z2);
        let dy = (f1 - f2) / s;
        let dt = f1 * z1t - f2 * z2t;
        let dyt = (-2.0 * z1 * f1 * z1t + 2.0 * z2 * f2 * z2t) / s - (f1 - f2) * ds / (s * s);
        for j in 0..ell {
            let c = p.l_row(y, j)[col];
            let l = c.c0 + c.c1 * decay;
            let ly = c.c1 * p.eta * decay;
            out.e[j] += d * l;
            out.e_t[j] += dt * l;
            out.e_y[j] += sign * (dy * l + d * ly);
            out.e_yt[j] += sign * (dyt * l + dt * ly);
            out.e_inf[j] += l;
            out.e_y_inf[j] += sign * ly;
        }
    }
    Ok(out)
}

/// Which bound of the `G̃` majorant to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Derivatives {
    /// `s ∈ {0, 1}` x-derivatives.
    pub x: u8,
    /// one y-derivative.
    pub y: bool,
}

/// Majorant of `|∂_x^s (∂_y) G̃(x, t; y)|` with unit constants.
pub fn g_tilde_majorant(x: f64, t: f64, y: f64, d: Derivatives, p: &TemplateParams) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if y > 0.0 {
        return g_left(-x, t, -y, d, &p.mirrored());
    }
    g_left(x, t, y, d, p)
}

fn g_left(x: f64, t: f64, y: f64, d: Derivatives, p: &TemplateParams) -> f64 {
    let m = p.m;
    let rt = Float::sqrt(t);
    let xp = x.max(0.0);
    let xm = (-x).max(0.0);
    let mut bracket = 0.0;
    for &a in &p.a_minus {
        bracket += gauss(x - y - a * t, m, t) / rt * Float::exp(-p.eta * xp);
    }
    for &ak in p.a_minus.iter().filter(|&&a| a > 0.0) {
        if ak * t < y.abs() {
            continue;
        }
        let lag = t - y.abs() / ak;
        for &aj in p.a_minus.iter().filter(|&&a| a < 0.0) {
            bracket += gauss(x - aj * lag, m, t) / rt * Float::exp(-p.eta * xp);
        }
        for &aj in p.a_plus.iter().filter(|&&a| a > 0.0) {
            bracket += gauss(x - aj * lag, m, t) / rt * Float::exp(-p.eta * xm);
        }
    }
    let short = Float::exp(-p.eta * ((x - y).abs() + t));
    let tx = if d.x == 0 { 1.0 } else { 1.0 / rt };
    let factor = if d.y {
        (tx + Float::exp(-p.theta * x.abs()) + p.gamma * Float::exp(-p.theta * y.abs())) / rt
    } else {
        tx + Float::exp(-p.theta * x.abs())
    };
    short + factor * bracket
}
