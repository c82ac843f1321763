use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{decompose, fit_growth_rate, ExponentFit, FitWindow, Integrator};
use crate::manifold::ManifoldMap;
use crate::numerics::ImexScheme;
use crate::{Complex, Error, Result};

/// `H²` sizes at one time of a manifold experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunSample {
    pub t: f64,
    pub v: f64,
    pub w: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionalReport {
    pub samples: Vec<RunSample>,
    pub initial_norm: f64,
    /// `max_t |v(t)| / |v(0)|`.
    pub max_ratio: f64,
    /// `max_t |z| / |w|²`.
    pub z_over_w2: f64,
    /// `|z - Φ(w)|` removed at each re-projection.
    pub corrections: Vec<f64>,
    pub window: f64,
    /// Time the run left the 10× neighborhood, if it did.
    pub escaped_at: Option<f64>,
}

impl ConditionalReport {
    pub fn stays_within(&self, factor: f64) -> bool {
        self.escaped_at.is_none() && self.max_ratio <= factor
    }
}

/// Radius of the escape neighborhood relative to the initial `H²` norm.
pub const ESCAPE_FACTOR: f64 = 10.0;

fn sample(map: &ManifoldMap<'_>, t: f64, v: &[f64]) -> Result<RunSample> {
    let op = map.operator();
    let d = decompose(v, map.spectrum())?;
    Ok(RunSample { t, v: op.h2(v), w: op.h2(&d.w), z: op.h2(&d.z_field) })
}

/// Evolves `v₀ = w₀ + Φ(w₀)` under the full equation. Every `window` time
/// units the state is put back on the computed manifold, `v ← w + Φ(w)`,
/// which removes the discretization drift along the unstable direction.
pub fn conditional_run(map: &ManifoldMap<'_>, w0: &[f64], t_final: f64, window: f64) -> Result<ConditionalReport> {
    let op = map.operator();
    let dt = map.params().dt;
    if !(window >= dt && t_final >= 0.0) {
        return Err(Error::InvalidInput("re-projection window must be at least one step".into()));
    }
    let integ = Integrator::new(op, dt, ImexScheme::Ars222)?;
    let fp = map.evaluate(w0)?;
    let w = map.project_cs(w0);
    let mut v: Vec<f64> = w.iter().zip(&fp.phi_field).map(|(a, b)| a + b).collect();
    let mut seed = fp.paths.z;
    let initial = op.h2(&v);
    let per_window = Float::round(window / dt).max(1.0) as usize;
    let steps = Float::round(t_final / dt) as usize;
    let mut samples = alloc::vec![sample(map, 0.0, &v)?];
    let mut corrections = Vec::new();
    let mut escaped_at = None;
    for k in 0..steps {
        v = integ.step(k as f64 * dt, &v)?.0;
        let t = (k + 1) as f64 * dt;
        if (k + 1) % per_window == 0 && k + 1 < steps {
            let d = decompose(&v, map.spectrum())?;
            let shifted = shift_path(&seed, per_window);
            let fp = map.evaluate_from(&d.w, Some(shifted))?;
            let diff: Vec<f64> = d.z_field.iter().zip(&fp.phi_field).map(|(a, b)| a - b).collect();
            corrections.push(op.h2(&diff));
            v = d.w.iter().zip(&fp.phi_field).map(|(a, b)| a + b).collect();
            seed = fp.paths.z;
        }
        let s = sample(map, t, &v)?;
        samples.push(s);
        if s.v > ESCAPE_FACTOR * initial {
            escaped_at = Some(t);
            break;
        }
    }
    let max_ratio = samples.iter().map(|s| s.v / initial).fold(0.0, f64::max);
    let z_over_w2 = samples.iter().filter(|s| s.w > 1e-4 * initial).map(|s| s.z / (s.w * s.w)).fold(0.0, f64::max);
    Ok(ConditionalReport { samples, initial_norm: initial, max_ratio, z_over_w2, corrections, window, escaped_at })
}

pub(crate) fn shift_path(z: &[Vec<Complex>], by: usize) -> Vec<Vec<Complex>> {
    let last = z.last().cloned().unwrap_or_default();
    (0..z.len()).map(|k| z.get(k + by).cloned().unwrap_or_else(|| last.clone())).collect()
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EscapeReport {
    pub samples: Vec<RunSample>,
    pub initial_norm: f64,
    pub offset: f64,
    pub escape_time: Option<f64>,
    /// Exponential rate of `|Π_u v|` while it lies in `band`.
    pub rate: ExponentFit,
    pub band: (f64, f64),
}

/// Evolves `w₀ + Φ(w₀) + offset·φ₁` (with `|φ₁|_{H²} = 1`) until it leaves
/// the 10× neighborhood, and fits the growth rate of the unstable part over
/// the band `[5, 100]·offset`.
pub fn escape_run(map: &ManifoldMap<'_>, w0: &[f64], offset: f64, t_max: f64, seed: u64) -> Result<EscapeReport> {
    let op = map.operator();
    let spec = map.spectrum();
    let dt = map.params().dt;
    let integ = Integrator::new(op, dt, ImexScheme::Ars222)?;
    let fp = map.evaluate(w0)?;
    let mut unit = alloc::vec![Complex::new(0.0, 0.0); spec.p()];
    unit[0] = Complex::new(1.0, 0.0);
    let phi1 = spec.synthesize(&unit);
    let n1 = op.h2(&phi1);
    let w = map.project_cs(w0);
    let mut v: Vec<f64> =
        (0..w.len()).map(|i| w[i] + fp.phi_field[i] + offset * phi1[i] / n1).collect();
    let initial = op.h2(&v);
    let steps = Float::round(t_max / dt) as usize;
    let mut samples = alloc::vec![sample(map, 0.0, &v)?];
    let mut escape_time = None;
    for k in 0..steps {
        v = integ.step(k as f64 * dt, &v)?.0;
        let s = sample(map, (k + 1) as f64 * dt, &v)?;
        samples.push(s);
        if s.v > ESCAPE_FACTOR * initial {
            escape_time = Some(s.t);
            break;
        }
    }
    let band = (5.0 * offset, 100.0 * offset);
    let (t, y): (Vec<f64>, Vec<f64>) =
        samples.iter().filter(|s| s.z >= band.0 && s.z <= band.1).map(|s| (s.t, s.z)).unzip();
    let rate = fit_growth_rate(&t, &y, FitWindow::all(), seed)?;
    Ok(EscapeReport { samples, initial_norm: initial, offset, escape_time, rate, band })
}
