//! Center-stable manifold: the cutoff nonlinearity, the implicit fixed-point
//! scheme `z = T(z, W(z, w₀))`, the map `Φ(w₀) = z(0)` and its certificates,
//! and the reduced (phase-shifted) equations.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{expm, ImexScheme, ImexStepper};
use crate::spectral::{DiscretizedOperator, SpectralDecomposition};
use crate::{Complex, Error, Result};

#[cfg(test)]
mod tests;

/// Smooth step: 1 on `[0, 1]`, 0 on `[2, ∞)`.
pub fn cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let g = |s: f64| Float::exp(-1.0 / s);
    let (a, b) = (g(2.0 - r), g(r - 1.0));
    a / (a + b)
}

/// `N^δ(v) = ρ(|v|_{H²}/δ) N(v)` on interior values.
pub fn cutoff_nonlinearity(op: &DiscretizedOperator, delta: f64, v: &[f64]) -> Vec<f64> {
    let r = cutoff(op.h2(v) / delta);
    if r == 0.0 {
        return vec![0.0; v.len()];
    }
    let mut n = op.nonlinear(v);
    if r != 1.0 {
        n.iter_mut().for_each(|x| *x *= r);
    }
    n
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ManifoldParams {
    pub delta: f64,
    pub omega: f64,
    pub eta: f64,
    pub beta: f64,
    pub horizon: f64,
    pub dt: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub tail_tol: f64,
}

impl ManifoldParams {
    /// Defaults from the spectral gap: `ω = β/8`, `η = (3ω + β)/2` and the
    /// shortest horizon meeting `tail_tol`, rounded up to a multiple of `dt`.
    pub fn from_spectrum(spec: &SpectralDecomposition, delta: f64, dt: f64) -> Result<Self> {
        let beta = spec.beta().ok_or_else(|| Error::InvalidInput("no unstable spectrum: Φ ≡ 0".into()))?;
        let omega = beta / 8.0;
        let eta = 0.5 * (3.0 * omega + beta);
        let tail_tol = 1e-3;
        let horizon = Float::ceil(-Float::ln(tail_tol) / (beta - eta) / dt * 1.05) * dt;
        Ok(Self { delta, omega, eta, beta, horizon, dt, tol: 1e-10, max_iter: 40, tail_tol })
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [self.delta, self.dt, self.horizon, self.tol, self.tail_tol];
        if pos.iter().any(|v| !(*v > 0.0 && v.is_finite())) || self.max_iter == 0 {
            return Err(Error::InvalidInput("manifold parameters must be positive and finite".into()));
        }
        if !(3.0 * self.omega < self.eta && self.eta < self.beta) {
            return Err(Error::InvalidInput(alloc::format!(
                "need 3ω < η < β, got ω = {}, η = {}, β = {}",
                self.omega,
                self.eta,
                self.beta
            )));
        }
        let bound = Float::exp(-(self.beta - self.eta) * self.horizon);
        if bound >= self.tail_tol {
            return Err(Error::HorizonTooShort { bound, tol: self.tail_tol });
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        Float::round(self.horizon / self.dt) as usize
    }
}

/// Time-indexed `w` fields (interior values) and `z` eigen-coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PathPair {
    pub times: Vec<f64>,
    pub w: Vec<Vec<f64>>,
    pub z: Vec<Vec<Complex>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub paths: PathPair,
    /// Eigen-coordinates of `Φ(w₀) = z(0)`.
    pub phi: Vec<Complex>,
    /// `Φ(w₀)` as interior values.
    pub phi_field: Vec<f64>,
    pub iterations: usize,
    /// `‖z^{j+1} - z^j‖_{-η}` per iteration.
    pub increments: Vec<f64>,
    /// Successive increment ratios.
    pub ratios: Vec<f64>,
    /// Largest ratio measured above the round-off floor (0 if none).
    pub contraction: f64,
}

/// The manifold map `w₀ ↦ Φ(w₀)` for one operator and decomposition.
#[derive(Clone, Debug)]
pub struct ManifoldMap<'a> {
    op: &'a DiscretizedOperator,
    spec: &'a SpectralDecomposition,
    params: ManifoldParams,
    stepper: ImexStepper,
    /// `L - B`: the part of `L` treated explicitly.
    lower: crate::linalg::BandMatrix<f64>,
    /// `e^{-Λdt}`, `Λ⁻¹(I - E)`, `Λ⁻¹(Q₀ - dt E)`.
    propagators: (DMatrix<Complex>, DMatrix<Complex>, DMatrix<Complex>),
}

impl<'a> ManifoldMap<'a> {
    pub fn new(op: &'a DiscretizedOperator, spec: &'a SpectralDecomposition, params: ManifoldParams) -> Result<Self> {
        params.validate()?;
        if spec.p() == 0 {
            return Err(Error::InvalidInput("no unstable spectrum: Φ ≡ 0".into()));
        }
        if spec.right.nrows() != op.len() {
            return Err(Error::Dimension { expected: op.len(), got: spec.right.nrows() });
        }
        let stepper = ImexStepper::new(op.diffusion().clone(), params.dt, ImexScheme::Ars222)?;
        let mut lower = op.matrix().clone();
        lower.axpy(-1.0, op.diffusion());
        let dt = params.dt;
        let p = spec.p();
        let id = DMatrix::<Complex>::identity(p, p);
        let e = expm(&(&spec.lambda * Complex::new(-dt, 0.0)))?;
        let linv = spec.lambda.clone().try_inverse().ok_or(Error::Singular { row: 0 })?;
        let q0 = &linv * (&id - &e);
        let q1 = &linv * (&q0 - &e * Complex::new(dt, 0.0));
        Ok(Self { op, spec, params, stepper, lower, propagators: (e, q0, q1) })
    }

    pub fn params(&self) -> &ManifoldParams {
        &self.params
    }

    pub fn operator(&self) -> &DiscretizedOperator {
        self.op
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        self.spec
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.params.steps()).map(|k| k as f64 * self.params.dt).collect()
    }

    pub fn project_cs(&self, f: &[f64]) -> Vec<f64> {
        let pu = self.spec.synthesize(&self.spec.coordinates(f));
        f.iter().zip(&pu).map(|(a, b)| a - b).collect()
    }

    fn project_u(&self, f: &[f64]) -> Vec<f64> {
        self.spec.synthesize(&self.spec.coordinates(f))
    }

    /// `sup_k e^{-η t_k} |z_k|_{H²}`.
    pub fn weighted_norm(&self, z: &[Vec<Complex>]) -> f64 {
        let dt = self.params.dt;
        z.iter()
            .enumerate()
            .map(|(k, c)| Float::exp(-self.params.eta * k as f64 * dt) * self.op.h2(&self.spec.synthesize(c)))
            .fold(0.0, f64::max)
    }

    /// `W(z, w₀)`: steps (2.11) with the principal part implicit.
    pub fn solve_w_cauchy(&self, z: &[Vec<Complex>], w0: &[f64]) -> Result<Vec<Vec<f64>>> {
        let steps = self.params.steps();
        if z.len() != steps + 1 {
            return Err(Error::Dimension { expected: steps + 1, got: z.len() });
        }
        let dt = self.params.dt;
        let delta = self.params.delta;
        let zf: Vec<Vec<f64>> = z.iter().map(|c| self.spec.synthesize(c)).collect();
        let diffusion = self.op.diffusion();
        let mut w = self.project_cs(w0);
        let mut out = Vec::with_capacity(steps + 1);
        out.push(w.clone());
        for k in 0..steps {
            let t0 = k as f64 * dt;
            let explicit = |t: f64, w: &[f64]| -> Result<Vec<f64>> {
                // z at stage time by linear interpolation
                let s = ((t - t0) / dt).clamp(0.0, 1.0);
                let zt: Vec<f64> = zf[k].iter().zip(&zf[k + 1]).map(|(a, b)| a + s * (b - a)).collect();
                let v: Vec<f64> = w.iter().zip(&zt).map(|(a, b)| a + b).collect();
                let mut rhs = self.lower.matvec(&v);
                let nd = cutoff_nonlinearity(self.op, delta, &v);
                rhs.iter_mut().zip(&nd).for_each(|(a, b)| *a += b);
                rhs.iter_mut().zip(&diffusion.matvec(&zt)).for_each(|(a, b)| *a += b);
                let mut rhs = self.project_cs(&rhs);
                let puw = self.project_u(&diffusion.matvec(w));
                rhs.iter_mut().zip(&puw).for_each(|(a, b)| *a -= b);
                Ok(rhs)
            };
            w = self.stepper.step(t0, &w, explicit)?;
            w = self.project_cs(&w);
            if w.iter().any(|x| !x.is_finite()) {
                return Err(Error::Divergence { t: t0 + dt, norm: f64::INFINITY });
            }
            out.push(w.clone());
        }
        Ok(out)
    }

    /// `T(z, w)(t_k) = -∫_{t_k}^{T} e^{L(t_k-s)} Π_u g(s) ds` in eigen-coordinates
    /// for the forcing coordinates `g_k` (piecewise linear in time).
    pub fn apply_tail_integral(&self, forcing: &[Vec<Complex>]) -> Result<Vec<Vec<Complex>>> {
        let steps = self.params.steps();
        if forcing.len() != steps + 1 {
            return Err(Error::Dimension { expected: steps + 1, got: forcing.len() });
        }
        let p = self.spec.p();
        let (e, q0, q1) = &self.propagators;
        let dt = self.params.dt;
        let mut out = vec![vec![Complex::new(0.0, 0.0); p]; steps + 1];
        let mut c = nalgebra::DVector::<Complex>::zeros(p);
        for k in (0..steps).rev() {
            let gk = nalgebra::DVector::from_column_slice(&forcing[k]);
            let gk1 = nalgebra::DVector::from_column_slice(&forcing[k + 1]);
            let slope = (&gk1 - &gk) / Complex::new(dt, 0.0);
            c = e * &c - (q0 * &gk + q1 * slope);
            out[k] = c.iter().cloned().collect();
        }
        Ok(out)
    }

    /// Forcing coordinates `⟨φ̃_j, N^δ(w + z)⟩` along a path.
    pub fn forcing(&self, w: &[Vec<f64>], z: &[Vec<Complex>]) -> Vec<Vec<Complex>> {
        w.iter()
            .zip(z)
            .map(|(wk, zk)| {
                let zf = self.spec.synthesize(zk);
                let v: Vec<f64> = wk.iter().zip(&zf).map(|(a, b)| a + b).collect();
                self.spec.coordinates(&cutoff_nonlinearity(self.op, self.params.delta, &v))
            })
            .collect()
    }

    /// Fixed-point iteration from `z ≡ 0`.
    pub fn evaluate(&self, w0: &[f64]) -> Result<FixedPoint> {
        self.evaluate_from(w0, None)
    }

    /// Fixed-point iteration from a given seed path.
    pub fn evaluate_from(&self, w0: &[f64], seed: Option<Vec<Vec<Complex>>>) -> Result<FixedPoint> {
        if w0.len() != self.op.len() {
            return Err(Error::Dimension { expected: self.op.len(), got: w0.len() });
        }
        let steps = self.params.steps();
        let p = self.spec.p();
        let mut z = seed.unwrap_or_else(|| vec![vec![Complex::new(0.0, 0.0); p]; steps + 1]);
        let mut increments = Vec::new();
        let mut ratios = Vec::new();
        let mut contraction: f64 = 0.0;
        let mut w = Vec::new();
        let mut iterations = 0;
        // N(v) is a difference of O(1) residuals, so increments bottom out
        // at an absolute round-off level
        let noise = 1e-14;
        for it in 0..self.params.max_iter {
            iterations = it + 1;
            w = self.solve_w_cauchy(&z, w0)?;
            let g = self.forcing(&w, &z);
            let next = self.apply_tail_integral(&g)?;
            let diff: Vec<Vec<Complex>> =
                next.iter().zip(&z).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
            let inc = self.weighted_norm(&diff);
            let size = self.weighted_norm(&next);
            z = next;
            if let Some(prev) = increments.last().copied() {
                if prev > 0.0 {
                    let r = inc / prev;
                    ratios.push(r);
                    if prev > 100.0 * noise && inc > noise {
                        contraction = contraction.max(r);
                        if r >= 1.0 {
                            return Err(Error::NonContraction { factor: r });
                        }
                    }
                }
            }
            increments.push(inc);
            if inc <= (self.params.tol * size).max(noise) {
                break;
            }
            if it + 1 == self.params.max_iter {
                return Err(Error::NonContraction { factor: ratios.last().copied().unwrap_or(f64::NAN) });
            }
        }
        let phi = z[0].clone();
        let phi_field = self.spec.synthesize(&phi);
        Ok(FixedPoint {
            paths: PathPair { times: self.times(), w, z },
            phi,
            phi_field,
            iterations,
            increments,
            ratios,
            contraction,
        })
    }

    /// `|z(τ) - Φ(w(τ))|_{H²}` after evolving `v₀ = w₀ + Φ(w₀)` under the
    /// truncated equation for time `tau`.
    pub fn invariance_defect(&self, w0: &[f64], tau: f64) -> Result<InvarianceDefect> {
        let fp = self.evaluate(w0)?;
        let w0cs = self.project_cs(w0);
        let mut v: Vec<f64> = w0cs.iter().zip(&fp.phi_field).map(|(a, b)| a + b).collect();
        let steps = Float::round(tau / self.params.dt) as usize;
        for k in 0..steps {
            let explicit = |_t: f64, v: &[f64]| -> Result<Vec<f64>> {
                let mut r = self.lower.matvec(v);
                let nd = cutoff_nonlinearity(self.op, self.params.delta, v);
                r.iter_mut().zip(&nd).for_each(|(a, b)| *a += b);
                Ok(r)
            };
            v = self.stepper.step(k as f64 * self.params.dt, &v, explicit)?;
        }
        let w_tau = self.project_cs(&v);
        let z_tau = self.project_u(&v);
        let phi_tau = self.evaluate(&w_tau)?.phi_field;
        let d: Vec<f64> = z_tau.iter().zip(&phi_tau).map(|(a, b)| a - b).collect();
        Ok(InvarianceDefect {
            defect: self.op.h2(&d),
            z_norm: self.op.h2(&z_tau),
            w_norm: self.op.h2(&w_tau),
            tau: steps as f64 * self.params.dt,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvarianceDefect {
    pub defect: f64,
    pub z_norm: f64,
    pub w_norm: f64,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LipschitzReport {
    pub constant: f64,
    pub pairs: usize,
    /// Largest `|a|_{H²}` over the probes.
    pub radius: f64,
}

/// `max |Φ(a) - Φ(b)|_{H²} / |a - b|_{H²}` over probe pairs (identical pairs skipped).
pub fn lipschitz_certificate(map: &ManifoldMap<'_>, probes: &[(Vec<f64>, Vec<f64>)]) -> Result<LipschitzReport> {
    let op = map.operator();
    let mut constant: f64 = 0.0;
    let mut pairs = 0;
    let mut radius: f64 = 0.0;
    for (a, b) in probes {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let dn = op.h2(&d);
        if dn == 0.0 {
            continue;
        }
        radius = radius.max(op.h2(a)).max(op.h2(b));
        let pa = map.evaluate(a)?.phi_field;
        let pb = map.evaluate(b)?.phi_field;
        let dp: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x - y).collect();
        constant = constant.max(op.h2(&dp) / dn);
        pairs += 1;
    }
    Ok(LipschitzReport { constant, pairs, radius })
}

/// Mergeable table of evaluated `Φ` coordinates keyed by a checksum of `w₀`.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ManifoldCache {
    pub entries: BTreeMap<u64, Vec<(f64, f64)>>,
}

/// FNV-1a over the bit patterns of the values.
pub fn checksum(values: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for byte in v.to_bits().to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

impl ManifoldCache {
    pub fn get(&self, w0: &[f64]) -> Option<Vec<Complex>> {
        self.entries.get(&checksum(w0)).map(|v| v.iter().map(|(a, b)| Complex::new(*a, *b)).collect())
    }

    pub fn insert(&mut self, w0: &[f64], phi: &[Complex]) {
        self.entries.insert(checksum(w0), phi.iter().map(|c| (c.re, c.im)).collect());
    }

    pub fn merge(&mut self, other: ManifoldCache) {
        self.entries.extend(other.entries);
    }
}

/// Right side of the reduced equations.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedRhs {
    pub v_dot: Vec<f64>,
    pub alpha_dot: f64,
    pub denominator: f64,
}

/// `α̇ = -π₂(Lv + N)/(1 + π₂ v_x)`, `v̇ = Π₁(Lv + N) + α̇ Π₁ v_x`, with
/// `π₂ f = ⟨φ, f⟩/|φ|²` and `φ = ū_x`.
pub fn reduced_rhs(op: &DiscretizedOperator, v: &[f64]) -> Result<ReducedRhs> {
    if v.len() != op.len() {
        return Err(Error::Dimension { expected: op.len(), got: v.len() });
    }
    let phi = op.zero_mode();
    let pp = op.dot(phi, phi);
    let pi2 = |f: &[f64]| op.dot(phi, f) / pp;
    let f = op.perturbation_rhs(v);
    let vx = op.restrict(op.to_field(v).derivative(1)?.values());
    let denominator = 1.0 + pi2(&vx);
    if denominator < 0.5 {
        return Err(Error::FrameBreakdown(denominator));
    }
    let alpha_dot = -pi2(&f) / denominator;
    let raw: Vec<f64> = f.iter().zip(&vx).map(|(a, b)| a + alpha_dot * b).collect();
    let c = pi2(&raw);
    let v_dot = raw.iter().zip(phi).map(|(a, b)| a - c * b).collect();
    Ok(ReducedRhs { v_dot, alpha_dot, denominator })
}
