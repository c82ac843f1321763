//! Quadrature checks of the convolution estimates and of the pointwise
//! bounds on the excited kernels.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{
    erf_fn, excited_kernel, g_tilde_majorant, psi_source, template, Derivatives, KernelValue, TemplateParams,
};
use crate::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = Float::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 0 { 1.0 } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Self { nodes, weights }
    }

    /// Composite rule with `panels` equal panels on `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += w * f(mid + 0.5 * h * x);
            }
        }
        0.5 * h * acc
    }

    /// `(node, weight)` pairs of the composite rule on `[a, b]`.
    fn points(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.nodes.len());
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + 0.5 * h * x, 0.5 * h * w));
            }
        }
        out
    }
}

/// Breakpoints clustered geometrically around features of the integrand.
struct Breaks(Vec<f64>);

impl Breaks {
    fn feature(&mut self, c: f64, w: f64) {
        self.0.push(c);
        for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
            self.0.push(c - k * w);
            self.0.push(c + k * w);
        }
    }

    fn nodes(mut self, lo: f64, hi: f64, rule: &GaussLegendre, panels: usize) -> Vec<(f64, f64)> {
        self.0.push(lo);
        self.0.push(hi);
        self.0.retain(|v| v.is_finite() && *v >= lo && *v <= hi);
        self.0.sort_by(|a, b| a.partial_cmp(b).unwrap());
        self.0.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut out = Vec::new();
        for w in self.0.windows(2) {
            out.extend(rule.points(w[0], w[1], panels));
        }
        out
    }
}

/// Time nodes on `[a, b]` with square-root grading at the flagged ends.
fn time_nodes(a: f64, b: f64, left: bool, right: bool, rule: &GaussLegendre, panels: usize) -> Vec<(f64, f64)> {
    if b <= a {
        return Vec::new();
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = Vec::new();
    for (u, w) in rule.points(0.0, 1.0, 2 * panels) {
        // s = a + half u² on the left half, s = b - half u² on the right
        if left {
            out.push((a + half * u * u, w * 2.0 * half * u));
        } else {
            out.push((a + half * u, w * half));
        }
        if right {
            out.push((b - half * u * u, w * 2.0 * half * u));
        } else {
            out.push((mid + half * u, w * half));
        }
    }
    out
}

/// The estimates checked by [`convolution_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ConvolutionKind {
    /// `∫|G̃|(1+|y|)^{-3/2} ≤ C T`.
    LinearG,
    /// `∫|G̃_x|(1+|y|)^{-3/2} ≤ C(t^{-1/2}+1) T`.
    LinearGx,
    /// `∫|e_t|(1+|y|)^{-3/2} ≤ C(1+t)^{-3/2}`.
    LinearEt,
    /// `∫|e|(1+|y|)^{-3/2} ≤ C`.
    LinearE,
    /// `∫|e - e(∞)|(1+|y|)^{-3/2} ≤ C(1+t)^{-1/2}`.
    LinearEConvergence,
    /// `∫₀ᵗ∫|G̃_y|Ψ ≤ C T`.
    NonlinearGy,
    /// `∫₀^{t-1}∫|G̃_{yx}|Ψ ≤ C T`.
    NonlinearGyx,
    /// `∫_{t-1}^t∫|G̃_x| T ≤ C T`.
    NonlinearGxShort,
    /// `∫₀ᵗ∫|e_{yt}|Ψ ≤ C(1+t)^{-1}`.
    NonlinearEyt,
    /// `∫_t^∞∫|e_y(·,∞)|Ψ ≤ Cγ(1+t)^{-1/2}`.
    NonlinearEyInfinity,
    /// `∫₀ᵗ∫|e_y - e_y(·,∞)|Ψ ≤ C(1+t)^{-1/2}`.
    NonlinearEyConvergence,
    /// `∫|G̃_x + G̃_y|(1+|y|)^{-3/2} ≤ C T` for `t ≤ 1`.
    Commutator,
}

impl ConvolutionKind {
    pub const ALL: [ConvolutionKind; 12] = [
        Self::LinearG,
        Self::LinearGx,
        Self::LinearEt,
        Self::LinearE,
        Self::LinearEConvergence,
        Self::NonlinearGy,
        Self::NonlinearGyx,
        Self::NonlinearGxShort,
        Self::NonlinearEyt,
        Self::NonlinearEyInfinity,
        Self::NonlinearEyConvergence,
        Self::Commutator,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::LinearG => "linear_g",
            Self::LinearGx => "linear_gx",
            Self::LinearEt => "linear_et",
            Self::LinearE => "linear_e",
            Self::LinearEConvergence => "linear_e_convergence",
            Self::NonlinearGy => "nonlinear_gy",
            Self::NonlinearGyx => "nonlinear_gyx",
            Self::NonlinearGxShort => "nonlinear_gx_short",
            Self::NonlinearEyt => "nonlinear_eyt",
            Self::NonlinearEyInfinity => "nonlinear_ey_infinity",
            Self::NonlinearEyConvergence => "nonlinear_ey_convergence",
            Self::Commutator => "commutator",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.tag() == tag)
    }

    /// Whether the estimate depends on `x` (it does for the `G̃` kinds).
    pub fn uses_x(self) -> bool {
        matches!(
            self,
            Self::LinearG | Self::LinearGx | Self::NonlinearGy | Self::NonlinearGyx | Self::NonlinearGxShort | Self::Commutator
        )
    }

    /// Right side with unit constant.
    pub fn rhs(self, x: f64, t: f64, p: &TemplateParams) -> Result<f64> {
        Ok(match self {
            Self::LinearG | Self::NonlinearGy | Self::NonlinearGyx | Self::NonlinearGxShort | Self::Commutator => {
                template(x, t, p)?
            }
            Self::LinearGx => (Float::powf(t, -0.5) + 1.0) * template(x, t, p)?,
            Self::LinearEt => Float::powf(1.0 + t, -1.5),
            Self::LinearE => 1.0,
            Self::LinearEConvergence | Self::NonlinearEyConvergence => Float::powf(1.0 + t, -0.5),
            Self::NonlinearEyt => 1.0 / (1.0 + t),
            Self::NonlinearEyInfinity => p.gamma * Float::powf(1.0 + t, -0.5),
        })
    }
}

/// Sample points `(x, t)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleSet {
    pub points: Vec<(f64, f64)>,
}

impl SampleSet {
    pub fn lattice(xs: &[f64], ts: &[f64]) -> Self {
        let points = ts.iter().flat_map(|&t| xs.iter().map(move |&x| (x, t))).collect();
        Self { points }
    }

    /// `n` geometrically spaced times in `[t0, t1]`.
    pub fn geometric_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
        let r = Float::ln(t1 / t0);
        (0..n).map(|k| t0 * Float::exp(r * k as f64 / (n.max(2) - 1) as f64)).collect()
    }

    pub fn default_for(kind: ConvolutionKind) -> Self {
        let xs = [-30.0, -10.0, -3.0, 0.0, 3.0, 10.0, 30.0];
        match kind {
            ConvolutionKind::Commutator => Self::lattice(&xs, &[0.1, 0.25, 0.5, 1.0]),
            k if k.uses_x() => Self::lattice(&xs, &[0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0]),
            _ => Self::lattice(&[0.0], &Self::geometric_times(1.0, 100.0, 9)),
        }
    }
}

/// Quadrature resolution: Gauss–Legendre order and panels per interval.
const ORDER: usize = 8;

fn weight(y: f64) -> f64 {
    Float::powf(1.0 + y.abs(), -1.5)
}

fn speeds_max(p: &TemplateParams) -> f64 {
    p.a_minus.iter().chain(&p.a_plus).fold(0.0, |m, a| m.max(a.abs()))
}

fn kernel_features(b: &mut Breaks, t: f64, p: &TemplateParams) {
    b.feature(0.0, 1.0);
    for (a, beta) in p.a_minus.iter().zip(&p.beta_minus).filter(|(a, _)| **a > 0.0) {
        b.feature(-a * (t + 1.0), Float::sqrt(4.0 * beta * (t + 1.0)));
        b.feature(-a * t, Float::sqrt(p.m * t.max(1e-3)));
    }
    for (a, beta) in p.a_plus.iter().zip(&p.beta_plus).filter(|(a, _)| **a < 0.0) {
        b.feature(-a * (t + 1.0), Float::sqrt(4.0 * beta * (t + 1.0)));
        b.feature(-a * t, Float::sqrt(p.m * t.max(1e-3)));
    }
}

fn green_features(b: &mut Breaks, x: f64, tau: f64, p: &TemplateParams) {
    let w = 0.5 * Float::sqrt(p.m * tau);
    b.feature(x, 1.0);
    b.feature(0.0, 1.0);
    for &a in p.a_minus.iter().chain(&p.a_plus) {
        b.feature(x - a * tau, w);
        b.0.push(a * tau);
        b.0.push(-a * tau);
    }
    for &ak in p.a_minus.iter().chain(&p.a_plus) {
        for &aj in p.a_minus.iter().chain(&p.a_plus) {
            if aj != 0.0 && ak != 0.0 {
                let c = ak.abs() * (tau - x / aj);
                b.feature(-c, w * ak.abs() / aj.abs());
                b.feature(c, w * ak.abs() / aj.abs());
            }
        }
    }
}

fn template_features(b: &mut Breaks, s: f64, p: &TemplateParams) {
    let w = 0.5 * Float::sqrt(p.m * s) + 1.0;
    for &a in p.a_minus.iter().chain(&p.a_plus) {
        b.feature(a * s, w);
    }
}

fn extent(x: f64, t: f64, p: &TemplateParams) -> f64 {
    x.abs() + (speeds_max(p) + 1.0) * (t + 2.0) + 30.0 * Float::sqrt(p.m * (t + 1.0)) + 100.0
}

fn dx(s: u8, y: bool) -> Derivatives {
    Derivatives { x: s, y }
}

/// Left side of one estimate at `(x, t)` with `panels` Gauss panels per interval.
pub fn convolution_lhs(kind: ConvolutionKind, x: f64, t: f64, p: &TemplateParams, panels: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("convolution estimates need t > 0, got {t}")));
    }
    let rule = GaussLegendre::new(ORDER);
    use ConvolutionKind::*;
    let linear = |f: &dyn Fn(f64) -> f64, green: bool| -> f64 {
        let r = extent(x, t, p);
        let mut b = Breaks(Vec::new());
        if green {
            green_features(&mut b, x, t, p);
        } else {
            kernel_features(&mut b, t, p);
        }
        b.nodes(-r, r, &rule, panels).iter().map(|(y, w)| w * f(*y) * weight(*y)).sum()
    };
    let kernel = |y: f64, tau: f64| -> KernelValue { excited_kernel(y, tau, p).expect("tau ≥ 0") };
    // ∫∫ over s of ∫ over y of k(y, t-s) src(y, s)
    let double = |nodes: Vec<(f64, f64)>, green: bool, k: &dyn Fn(f64, f64) -> f64, src: &dyn Fn(f64, f64) -> f64| -> f64 {
        let mut acc = 0.0;
        for (s, ws) in nodes {
            let tau = t - s;
            let r = extent(x, t.max(s), p);
            let mut b = Breaks(Vec::new());
            template_features(&mut b, s, p);
            if green {
                green_features(&mut b, x, tau, p);
            } else {
                kernel_features(&mut b, tau.max(0.0), p);
            }
            let inner: f64 = b.nodes(-r, r, &rule, panels).iter().map(|(y, w)| w * k(*y, tau) * src(*y, s)).sum();
            acc += ws * inner;
        }
        acc
    };
    let psi = |y: f64, s: f64| psi_source(y, s, p).unwrap_or(0.0);
    let tmpl = |y: f64, s: f64| template(y, s, p).unwrap_or(0.0);
    let v = match kind {
        LinearG => linear(&|y| g_tilde_majorant(x, t, y, dx(0, false), p), true),
        LinearGx => linear(&|y| g_tilde_majorant(x, t, y, dx(1, false), p), true),
        LinearEt => linear(&|y| kernel(y, t).abs_e_t(), false),
        LinearE => linear(&|y| kernel(y, t).abs_e(), false),
        LinearEConvergence => linear(&|y| kernel(y, t).abs_e_minus_inf(), false),
        Commutator => linear(
            &|y| g_tilde_majorant(x, t, y, dx(1, false), p) + g_tilde_majorant(x, t, y, dx(0, true), p),
            true,
        ),
        NonlinearGy => double(
            time_nodes(0.0, t, true, true, &rule, panels),
            true,
            &|y, tau| g_tilde_majorant(x, tau, y, dx(0, true), p),
            &psi,
        ),
        NonlinearGyx => {
            if t <= 1.0 {
                0.0
            } else {
                double(
                    time_nodes(0.0, t - 1.0, true, false, &rule, panels),
                    true,
                    &|y, tau| g_tilde_majorant(x, tau, y, dx(1, true), p),
                    &psi,
                )
            }
        }
        NonlinearGxShort => double(
            time_nodes((t - 1.0).max(0.0), t, false, true, &rule, panels),
            true,
            &|y, tau| g_tilde_majorant(x, tau, y, dx(1, false), p),
            &tmpl,
        ),
        NonlinearEyt => double(
            time_nodes(0.0, t, true, false, &rule, panels),
            false,
            &|y, tau| kernel(y, tau).abs_e_yt(),
            &psi,
        ),
        NonlinearEyConvergence => double(
            time_nodes(0.0, t, true, false, &rule, panels),
            false,
            &|y, tau| kernel(y, tau).abs_e_y_minus_inf(),
            &psi,
        ),
        NonlinearEyInfinity => {
            // s = t + (1+t)(e^v - 1), v ∈ [0, ln 10⁴]
            let vmax = Float::ln(1e4);
            let nodes: Vec<(f64, f64)> = rule
                .points(0.0, vmax, 4 * panels)
                .into_iter()
                .map(|(v, w)| (t + (1.0 + t) * (Float::exp(v) - 1.0), w * (1.0 + t) * Float::exp(v)))
                .collect();
            let mut acc = 0.0;
            for (s, ws) in nodes {
                let r = extent(0.0, s, p);
                let mut b = Breaks(Vec::new());
                template_features(&mut b, s, p);
                b.feature(0.0, 1.0 / p.eta);
                let inner: f64 = b
                    .nodes(-r, r, &rule, panels)
                    .iter()
                    .map(|(y, w)| w * norm_inf(&kernel(*y, 0.0).e_y_inf) * psi(*y, s))
                    .sum();
                acc += ws * inner;
            }
            acc
        }
    };
    if !v.is_finite() {
        return Err(Error::Quadrature(format!("{} is not finite at ({x}, {t})", kind.tag())));
    }
    Ok(v)
}

fn norm_inf(v: &[f64]) -> f64 {
    Float::sqrt(v.iter().map(|a| a * a).sum::<f64>())
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvolutionReport {
    pub kind: ConvolutionKind,
    /// Fitted constant `max lhs/rhs` at the finest resolution.
    pub constant: f64,
    /// The same at half the resolution.
    pub constant_coarse: f64,
    pub relative_change: f64,
    /// Panels per interval at the finest resolution.
    pub panels: usize,
    /// Sample attaining the constant.
    pub worst: (f64, f64),
    /// `(x, t, lhs, rhs)` at the finest resolution.
    pub samples: Vec<(f64, f64, f64, f64)>,
    pub stable: bool,
}

fn fit_constant(rows: &[(f64, f64, f64, f64)]) -> (f64, (f64, f64)) {
    let mut best = (0.0, (f64::NAN, f64::NAN));
    for &(x, t, l, r) in rows {
        let ratio = if l == 0.0 {
            0.0
        } else if r == 0.0 {
            f64::INFINITY
        } else {
            l / r
        };
        if ratio > best.0 || best.1 .0.is_nan() {
            best = (ratio, (x, t));
        }
    }
    best
}

/// Fits the constant of one estimate over `samples` and checks it under
/// quadrature refinement: the resolution doubles until two successive
/// constants agree within `tol` (at most three levels).
pub fn convolution_check(
    kind: ConvolutionKind,
    p: &TemplateParams,
    samples: &SampleSet,
    panels: usize,
    tol: f64,
) -> Result<ConvolutionReport> {
    p.validate()?;
    let eval = |panels: usize| -> Result<Vec<(f64, f64, f64, f64)>> {
        samples
            .points
            .iter()
            .map(|&(x, t)| Ok((x, t, convolution_lhs(kind, x, t, p, panels)?, kind.rhs(x, t, p)?)))
            .collect()
    };
    let mut level = panels.max(1);
    let mut prev = fit_constant(&eval(level)?).0;
    for _ in 0..2 {
        level *= 2;
        let rows = eval(level)?;
        let (c, worst) = fit_constant(&rows);
        let change = if c == prev { 0.0 } else { (c - prev).abs() / c.abs().max(prev.abs()) };
        if change <= tol {
            return Ok(ConvolutionReport {
                kind,
                constant: c,
                constant_coarse: prev,
                relative_change: change,
                panels: level,
                worst,
                samples: rows,
                stable: c.is_finite(),
            });
        }
        prev = c;
    }
    Err(Error::Quadrature(format!("{}: constants did not settle within {tol} after refinement", kind.tag())))
}

/// The pointwise bounds on `e` and its derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KernelBound {
    E,
    EConvergence,
    Et,
    Ey,
    EyConvergence,
    Eyt,
}

impl KernelBound {
    pub const ALL: [KernelBound; 6] =
        [Self::E, Self::EConvergence, Self::Et, Self::Ey, Self::EyConvergence, Self::Eyt];

    pub fn tag(self) -> &'static str {
        match self {
            Self::E => "e",
            Self::EConvergence => "e_convergence",
            Self::Et => "e_t",
            Self::Ey => "e_y",
            Self::EyConvergence => "e_y_convergence",
            Self::Eyt => "e_yt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelBoundReport {
    pub bound: KernelBound,
    pub constant: f64,
    pub constant_coarse: f64,
    pub relative_change: f64,
    pub worst: (f64, f64),
    /// `M` used in the Gaussian factors.
    pub m: f64,
    /// Rate `a` of the convergence bound.
    pub rate: f64,
}

/// Fits the constant of each pointwise bound on `e` over the lattice
/// `[-y_max, 0] × [t0, t1]` (`n × n` points, geometric in `t`) and over the
/// lattice with `2n - 1` points per axis. Bounds with Gaussian factors need
/// `M t > 4β(t+1)` down to `t0`; `M` is raised to `1.1 · 4β(t0+1)/t0` if the
/// template value is smaller. With `γ = 1` the convergence bound on `e_y`
/// carries the extra term `γ e^{-η|y|}` times the tail of the `e` bound.
pub fn kernel_bounds(p: &TemplateParams, y_max: f64, t0: f64, t1: f64, n: usize) -> Result<Vec<KernelBoundReport>> {
    p.validate()?;
    let beta = p.beta_minus.iter().chain(&p.beta_plus).cloned().fold(0.0, f64::max);
    let m = p.m.max(1.1 * 4.0 * beta * (t0 + 1.0) / t0);
    let incoming: Vec<(f64, f64)> =
        p.a_minus.iter().zip(&p.beta_minus).filter(|(a, _)| **a > 0.0).map(|(a, b)| (*a, *b)).collect();
    let rate = 0.5 * incoming.iter().map(|(a, _)| *a).fold(f64::INFINITY, f64::min);
    let gauss_sum = |y: f64, t: f64| -> f64 {
        incoming.iter().map(|(a, _)| Float::exp(-(y + a * t) * (y + a * t) / (m * t))).sum::<f64>()
    };
    // the leading edge sits at a(t+1) as in the kernel itself
    let band = |y: f64, t: f64| -> f64 {
        incoming
            .iter()
            .map(|(a, b)| {
                let s = Float::sqrt(4.0 * b * (t + 1.0));
                erf_fn((y + a * (t + 1.0)) / s) - erf_fn((y - a * t) / s)
            })
            .sum::<f64>()
    };
    let tail = |y: f64, t: f64| erf_fn((y.abs() - rate * t) / (m * Float::sqrt(t)));
    let pair = |bound: KernelBound, y: f64, t: f64| -> (f64, f64) {
        let k = excited_kernel(y, t, p).expect("t > 0");
        let rt = Float::sqrt(t);
        let decay = p.gamma * Float::exp(-p.eta * y.abs());
        match bound {
            KernelBound::E => (k.abs_e(), band(y, t)),
            KernelBound::EConvergence => (k.abs_e_minus_inf(), tail(y, t)),
            KernelBound::Et => (k.abs_e_t(), gauss_sum(y, t) / rt),
            KernelBound::Ey => (k.abs_e_y(), gauss_sum(y, t) / rt + decay * band(y, t)),
            KernelBound::EyConvergence => (k.abs_e_y_minus_inf(), gauss_sum(y, t) / rt + decay * tail(y, t)),
            KernelBound::Eyt => (k.abs_e_yt(), (1.0 / t + decay / rt) * gauss_sum(y, t)),
        }
    };
    let lattice = |n: usize| -> Vec<(f64, f64)> {
        let ts = SampleSet::geometric_times(t0, t1, n);
        let ys: Vec<f64> = (0..n).map(|i| -y_max * i as f64 / (n - 1) as f64).collect();
        SampleSet::lattice(&ys, &ts).points
    };
    let fit = |bound: KernelBound, pts: &[(f64, f64)]| -> (f64, (f64, f64)) {
        let rows: Vec<(f64, f64, f64, f64)> = pts
            .iter()
            .map(|&(y, t)| {
                let (l, r) = pair(bound, y, t);
                // both sides below the floating-point range carry no information
                if l < 1e-280 && r < 1e-280 {
                    (y, t, 0.0, 1.0)
                } else {
                    (y, t, l, r)
                }
            })
            .collect();
        fit_constant(&rows)
    };
    let (coarse, fine) = (lattice(n), lattice(2 * n - 1));
    Ok(KernelBound::ALL
        .iter()
        .map(|&bound| {
            let (c0, _) = fit(bound, &coarse);
            let (c1, worst) = fit(bound, &fine);
            let relative_change = if c1 == c0 { 0.0 } else { (c1 - c0).abs() / c1.abs().max(c0.abs()) };
            KernelBoundReport { bound, constant: c1, constant_coarse: c0, relative_change, worst, m, rate }
        })
        .collect())
}
