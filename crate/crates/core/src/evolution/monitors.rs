use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{decompose, EvolutionTrace, Frame};
use crate::numerics::DiscreteField;
use crate::spectral::{DiscretizedOperator, SpectralDecomposition};
use crate::templates::{template, TemplateParams};
use crate::{Error, Result};

/// `sup_x (|v| + |v_x|)/(θ + ψ₁ + ψ₂)(x, t)`; nodes where the template
/// vanishes are skipped.
pub fn template_ratio(field: &DiscreteField, t: f64, params: &TemplateParams) -> Result<f64> {
    let mag = field.magnitude();
    let dx = field.derivative(1)?.magnitude();
    let grid = field.grid();
    let mut best: f64 = 0.0;
    for i in 0..grid.len() {
        let tpl = template(grid.x(i), t, params)?;
        if tpl > 0.0 {
            best = best.max((mag[i] + dx[i]) / tpl);
        }
    }
    Ok(best)
}

pub fn template_ratio_series(trace: &EvolutionTrace, op: &DiscretizedOperator, params: &TemplateParams) -> Result<Vec<f64>> {
    trace
        .snapshots
        .iter()
        .zip(&trace.times)
        .map(|(v, &t)| template_ratio(&op.to_field(v), t, params))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZetaReport {
    /// Running supremum.
    pub zeta: Vec<f64>,
    /// `(template ratio of w, |w|_{H⁴}(1+s)^{1/4}, |α̇|(1+s))` per snapshot.
    pub terms: Vec<[f64; 3]>,
    pub final_value: f64,
    /// Set when the ratio term keeps growing over the second half of the run.
    pub violation: Option<String>,
}

/// `ζ(t) = sup_{s ≤ t} [ sup_y (|w| + |w_y|)/T(y, s) + |w|_{H⁴}(1+s)^{1/4} + |α̇(s)|(1+s) ]`
/// with `w = Π_cs v` (or `v` when there is no unstable spectrum).
pub fn zeta_monitor(
    trace: &EvolutionTrace,
    op: &DiscretizedOperator,
    spec: Option<&SpectralDecomposition>,
    params: &TemplateParams,
) -> Result<ZetaReport> {
    if trace.frame != Frame::Shifted {
        return Err(Error::InvalidInput("ζ needs a shifted-frame trace".into()));
    }
    let mut terms = Vec::with_capacity(trace.len());
    for (k, v) in trace.snapshots.iter().enumerate() {
        let s = trace.times[k];
        let w = match spec {
            Some(sp) if sp.p() > 0 => decompose(v, sp)?.w,
            _ => v.clone(),
        };
        let field = op.to_field(&w);
        terms.push([
            template_ratio(&field, s, params)?,
            field.hs_norm(4)? * Float::powf(1.0 + s, 0.25),
            trace.alpha_dot[k].abs() * (1.0 + s),
        ]);
    }
    let mut zeta = Vec::with_capacity(terms.len());
    let mut run: f64 = 0.0;
    for t in &terms {
        run = run.max(t[0] + t[1] + t[2]);
        zeta.push(run);
    }
    let half = terms.len() / 2;
    let sup = |r: &[[f64; 3]]| r.iter().map(|t| t[0]).fold(0.0, f64::max);
    let (first, second) = (sup(&terms[..half.max(1)]), sup(&terms[half..]));
    let violation = if !run.is_finite() {
        Some("ζ is not finite".into())
    } else if second > 2.0 * first && first > 0.0 {
        Some(format!("template ratio grows from {first:e} to {second:e} over the second half"))
    } else {
        None
    };
    Ok(ZetaReport { final_value: run, zeta, terms, violation })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DampingReport {
    pub c: f64,
    /// `θ₁ = θ₂`.
    pub theta: f64,
    /// Constants are fitted on `t ≤ fit_until`.
    pub fit_until: f64,
    /// `max_t (lhs - C·rhs)/max lhs` over the whole run; `≤ 0` when the
    /// inequality holds.
    pub max_violation: f64,
    pub residual: Vec<f64>,
}

const MAX_DAMPING_CONSTANT: f64 = 1e6;

/// Fits `|v(t)|²_{H⁴} ≤ C e^{-θt}|v(0)|²_{H⁴} + C ∫₀ᵗ e^{-θ(t-s)}(|v|²_{L²} + |α̇|²) ds`
/// on the first half of the run and reports the violation over all of it.
pub fn damping_monitor(trace: &EvolutionTrace) -> Result<DampingReport> {
    let n = trace.len();
    if n < 2 {
        return Err(Error::InvalidInput("damping monitor needs at least two snapshots".into()));
    }
    let t = &trace.times;
    let lhs: Vec<f64> = trace.norms.iter().map(|m| m.h4 * m.h4).collect();
    let g: Vec<f64> = trace.norms.iter().zip(&trace.alpha_dot).map(|(m, a)| m.l2 * m.l2 + a * a).collect();
    let fit_until = 0.5 * t[n - 1];
    let rhs_for = |theta: f64| -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut integral = 0.0;
        out.push(lhs[0]);
        for k in 1..n {
            let d = t[k] - t[k - 1];
            let e = Float::exp(-theta * d);
            integral = e * integral + 0.5 * d * (e * g[k - 1] + g[k]);
            out.push(Float::exp(-theta * t[k]) * lhs[0] + integral);
        }
        out
    };
    let scale = lhs.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(DampingReport { c: 0.0, theta: 0.0, fit_until, max_violation: 0.0, residual: alloc::vec![0.0; n] });
    }
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for i in 0..80 {
        let theta = 1e-3 * Float::powf(1e4, i as f64 / 79.0);
        let rhs = rhs_for(theta);
        let mut c: f64 = 0.0;
        for k in 0..n {
            if t[k] > fit_until {
                break;
            }
            if rhs[k] > 0.0 {
                c = c.max(lhs[k] / rhs[k]);
            } else if lhs[k] > 0.0 {
                c = f64::INFINITY;
            }
        }
        if best.as_ref().is_none_or(|b| c < b.0) {
            best = Some((c, theta, rhs));
        }
    }
    let (c, theta, rhs) = best.expect("nonempty θ grid");
    if !(c <= MAX_DAMPING_CONSTANT) {
        return Err(Error::Monitor(format!("no admissible damping constant: best C = {c:e}")));
    }
    let residual: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| (l - c * r) / scale).collect();
    let max_violation = residual.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(DampingReport { c, theta, fit_until, max_violation, residual })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedReport {
    pub series: Vec<f64>,
    pub max: f64,
    pub final_value: f64,
    pub finite: bool,
}

/// `|(1+|x|²)^{3/4} v(·, t)|_{H⁴}` along the trace.
pub fn weighted_monitor(trace: &EvolutionTrace) -> WeightedReport {
    let series: Vec<f64> = trace.norms.iter().map(|m| m.weighted_h4).collect();
    let finite = series.iter().all(|v| v.is_finite());
    WeightedReport {
        max: series.iter().cloned().fold(0.0, f64::max),
        final_value: series.last().copied().unwrap_or(0.0),
        finite,
        series,
    }
}
