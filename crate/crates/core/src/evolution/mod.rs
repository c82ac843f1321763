//! Nonlinear evolution about a profile: IMEX runs of the perturbation
//! equation, phase tracking, the `(w, z)` splitting, decay monitors and
//! exponent fits, and the conditional-stability experiments.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{DiscreteField, ImexScheme, ImexStepper};
use crate::profile::ShockProfile;
use crate::spectral::{DiscretizedOperator, SpectralDecomposition};
use crate::{Complex, Error, Result};

mod experiments;
mod fit;
mod monitors;
mod phase;
#[cfg(test)]
mod tests;

pub use experiments::{conditional_run, escape_run, ConditionalReport, EscapeReport, RunSample};
pub use fit::{fit_exponent, fit_growth_rate, ExponentFit, FitWindow};
pub use monitors::{
    damping_monitor, template_ratio, template_ratio_series, weighted_monitor, zeta_monitor, DampingReport,
    WeightedReport, ZetaReport,
};
pub use phase::{kernel_phase, limiting_phase, reframe, track_phase, KernelPhase, PhaseMethod, PhaseOptions, PhaseTrack};

/// Blow-up threshold relative to the initial `H²` norm.
pub const BLOWUP_FACTOR: f64 = 1e3;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvolveOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Steps between stored snapshots.
    pub snapshot_every: usize,
    pub scheme: ImexScheme,
}

impl EvolveOptions {
    pub fn new(t_final: f64, dt: f64, snapshot_every: usize) -> Self {
        Self { t_final, dt, snapshot_every, scheme: ImexScheme::Ars222 }
    }

    pub fn steps(&self) -> usize {
        Float::round(self.t_final / self.dt) as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.t_final >= 0.0 && self.t_final.is_finite()) || self.snapshot_every == 0 {
            return Err(Error::InvalidInput("need dt > 0, T ≥ 0 and a positive snapshot cadence".into()));
        }
        Ok(())
    }
}

/// Norms of one snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub h2: f64,
    pub h4: f64,
    /// `|(1+|x|²)^{3/4} v|_{H⁴}`.
    pub weighted_h4: f64,
}

impl Norms {
    pub fn of(field: &DiscreteField) -> Result<Self> {
        Ok(Self {
            l1: field.l1_norm(),
            l2: field.l2_norm(),
            linf: field.sup_norm(),
            h2: field.hs_norm(2)?,
            h4: field.hs_norm(4)?,
            weighted_h4: field.weighted_h4_norm()?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Frame {
    /// `v = u - ū`, `α ≡ 0`.
    Raw,
    /// `v = u(· + α) - ū`.
    Shifted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Divergence {
    pub t: f64,
    pub norm: f64,
    pub initial: f64,
}

/// Time series of one run. `snapshots` hold interior values.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvolutionTrace {
    pub frame: Frame,
    pub dt: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub alpha_dot: Vec<f64>,
    pub norms: Vec<Norms>,
    /// `∫ v dx` per component.
    pub mass: Vec<Vec<f64>>,
    /// `mass(t) - mass(0) - ∫₀ᵗ (boundary flux)`, per component.
    pub conservation_defect: Vec<Vec<f64>>,
    pub template_ratio: Vec<f64>,
    pub zeta: Vec<f64>,
    pub divergence: Option<Divergence>,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// A named scalar series (`l1`, `l2`, `linf`, `h2`, `h4`, `weighted_h4`).
    pub fn norm_series(&self, which: &str) -> Option<Vec<f64>> {
        let pick: fn(&Norms) -> f64 = match which {
            "l1" => |n| n.l1,
            "l2" => |n| n.l2,
            "linf" => |n| n.linf,
            "h2" => |n| n.h2,
            "h4" => |n| n.h4,
            "weighted_h4" => |n| n.weighted_h4,
            _ => return None,
        };
        Some(self.norms.iter().map(pick).collect())
    }
}

/// Perturbation equation `v' = F_h(ū+v) - F_h(ū)` with the principal part
/// implicit.
pub(crate) struct Integrator<'a> {
    op: &'a DiscretizedOperator,
    stepper: ImexStepper,
}

impl<'a> Integrator<'a> {
    pub(crate) fn new(op: &'a DiscretizedOperator, dt: f64, scheme: ImexScheme) -> Result<Self> {
        Ok(Self { op, stepper: ImexStepper::new(op.diffusion().clone(), dt, scheme)? })
    }

    /// One step; also returns `h Σ (F_h(ū+v) - F_h(ū))` at the start point per component.
    pub(crate) fn step(&self, t: f64, v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.op.components();
        let h = self.op.grid().spacing();
        let mut flux = vec![0.0; n];
        let mut first = true;
        let diffusion = self.op.diffusion();
        let next = self.stepper.step(t, v, |_, v| {
            let mut r = self.op.perturbation_rhs(v);
            if first {
                for (i, x) in r.iter().enumerate() {
                    flux[i % n] += h * x;
                }
                first = false;
            }
            r.iter_mut().zip(&diffusion.matvec(v)).for_each(|(a, b)| *a -= b);
            Ok(r)
        })?;
        Ok((next, flux))
    }
}

fn interior_mass(op: &DiscretizedOperator, v: &[f64]) -> Vec<f64> {
    let n = op.components();
    let h = op.grid().spacing();
    let mut m = vec![0.0; n];
    for (i, x) in v.iter().enumerate() {
        m[i % n] += h * x;
    }
    m
}

/// Evolves `u = ū + v` under the full nonlinear equation in the raw frame.
/// A run whose `H²` norm exceeds [`BLOWUP_FACTOR`] times the initial one
/// stops early and records the divergence.
pub fn evolve(op: &DiscretizedOperator, v0: &[f64], opts: &EvolveOptions) -> Result<EvolutionTrace> {
    opts.validate()?;
    if v0.len() != op.len() {
        return Err(Error::Dimension { expected: op.len(), got: v0.len() });
    }
    let integ = Integrator::new(op, opts.dt, opts.scheme)?;
    let n = op.components();
    let initial = op.h2(v0);
    let mass0 = interior_mass(op, v0);
    let mut trace = EvolutionTrace {
        frame: Frame::Raw,
        dt: opts.dt,
        times: Vec::new(),
        snapshots: Vec::new(),
        alpha: Vec::new(),
        alpha_dot: Vec::new(),
        norms: Vec::new(),
        mass: Vec::new(),
        conservation_defect: Vec::new(),
        template_ratio: Vec::new(),
        zeta: Vec::new(),
        divergence: None,
    };
    // left sums of the flux; closed to the trapezoid rule when recorded
    let mut left_sum = vec![0.0; n];
    let f0 = boundary_flux(op, v0);
    let closed = |left: &[f64], v: &[f64]| -> Vec<f64> {
        let f = boundary_flux(op, v);
        (0..n).map(|j| left[j] + 0.5 * opts.dt * (f[j] - f0[j])).collect()
    };
    let record = |trace: &mut EvolutionTrace, t: f64, v: &[f64], integral: &[f64]| -> Result<()> {
        let mass = interior_mass(op, v);
        trace.times.push(t);
        trace.norms.push(Norms::of(&op.to_field(v))?);
        trace.conservation_defect.push((0..n).map(|k| mass[k] - mass0[k] - integral[k]).collect());
        trace.mass.push(mass);
        trace.snapshots.push(v.to_vec());
        trace.alpha.push(0.0);
        trace.alpha_dot.push(0.0);
        Ok(())
    };
    record(&mut trace, 0.0, v0, &vec![0.0; n])?;
    let mut v = v0.to_vec();
    let steps = opts.steps();
    for k in 0..steps {
        let t = k as f64 * opts.dt;
        let (next, flux) = integ.step(t, &v)?;
        for j in 0..n {
            left_sum[j] += opts.dt * flux[j];
        }
        v = next;
        let tn = (k + 1) as f64 * opts.dt;
        let norm = op.h2(&v);
        if initial > 0.0 && norm > BLOWUP_FACTOR * initial {
            record(&mut trace, tn, &v, &closed(&left_sum, &v))?;
            trace.divergence = Some(Divergence { t: tn, norm, initial });
            return Ok(trace);
        }
        if (k + 1) % opts.snapshot_every == 0 || k + 1 == steps {
            record(&mut trace, tn, &v, &closed(&left_sum, &v))?;
        }
    }
    Ok(trace)
}

fn boundary_flux(op: &DiscretizedOperator, v: &[f64]) -> Vec<f64> {
    interior_mass(op, &op.perturbation_rhs(v))
}

/// Initial-data recipes, sampled at interior nodes.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum InitialData {
    Zero,
    /// `ū(· - shift) - ū`.
    Translate { shift: f64 },
    /// `A e^{-((x-c)/w)²}` in every component.
    Gaussian { amplitude: f64, center: f64, width: f64 },
    /// `A (e^{-((x-c)/w)²} - e^{-((x+c)/w)²})`, odd with zero mass.
    OddPair { amplitude: f64, center: f64, width: f64 },
    /// `A (1+|x|)^{-3/2}` switched off smoothly between `|x| = taper` and `2·taper`.
    AlgebraicTail { amplitude: f64, taper: f64 },
}

impl InitialData {
    pub fn sample(&self, op: &DiscretizedOperator, profile: &ShockProfile) -> Vec<f64> {
        let n = op.components();
        let grid = op.grid();
        let xs: Vec<f64> = (1..grid.len() - 1).map(|i| grid.x(i)).collect();
        let gauss = |x: f64, c: f64, w: f64| Float::exp(-((x - c) / w).powi(2));
        let mut out = Vec::with_capacity(xs.len() * n);
        for &x in &xs {
            match *self {
                InitialData::Zero => out.extend(core::iter::repeat_n(0.0, n)),
                InitialData::Translate { shift } => {
                    let a = profile.eval(0, x - shift);
                    let b = profile.eval(0, x);
                    out.extend(a.iter().zip(&b).map(|(a, b)| a - b));
                }
                InitialData::Gaussian { amplitude, center, width } => {
                    out.extend(core::iter::repeat_n(amplitude * gauss(x, center, width), n))
                }
                InitialData::OddPair { amplitude, center, width } => {
                    let g = amplitude * (gauss(x, center, width) - gauss(x, -center, width));
                    out.extend(core::iter::repeat_n(g, n))
                }
                InitialData::AlgebraicTail { amplitude, taper } => {
                    let g = amplitude * Float::powf(1.0 + x.abs(), -1.5) * crate::manifold::cutoff(x.abs() / taper);
                    out.extend(core::iter::repeat_n(g, n))
                }
            }
        }
        out
    }
}

/// `v = w + z` with `z = Π_u v` in eigen-coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub w: Vec<f64>,
    pub z: Vec<Complex>,
    pub z_field: Vec<f64>,
}

pub fn decompose(v: &[f64], spec: &SpectralDecomposition) -> Result<Decomposition> {
    if v.len() != spec.right.nrows() {
        return Err(Error::Dimension { expected: spec.right.nrows(), got: v.len() });
    }
    let z = spec.coordinates(v);
    let z_field = spec.synthesize(&z);
    let w = v.iter().zip(&z_field).map(|(a, b)| a - b).collect();
    Ok(Decomposition { w, z, z_field })
}
