use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::SpectralDecomposition;
use crate::models::Form;
use crate::numerics::{diff_matrix, DiscreteField};
use crate::{Complex, Error, Result};

/// Which eigenprojection to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Projection {
    Unstable,
    CenterStable,
    /// `Π̃_u`, conjugate to `Π_u` through `∂_x` (conservation form only).
    UnstableTilde,
    CenterStableTilde,
}

fn check_field(spec: &SpectralDecomposition, f: &DiscreteField) -> Result<()> {
    if f.grid() != &spec.grid || f.components() != spec.components {
        return Err(Error::Dimension { expected: spec.grid.len() * spec.components, got: f.values().len() });
    }
    Ok(())
}

/// Pads interior coefficients with zero end values.
fn pad(n: usize, interior: impl Iterator<Item = f64>, len: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    for (slot, x) in v[n..len - n].iter_mut().zip(interior) {
        *slot = x;
    }
    v
}

/// Antiderivatives `Φ_j` and derivatives `∂_x φ̃_j` on the full grid.
fn tilde_data(spec: &SpectralDecomposition) -> Result<(Vec<Vec<Complex>>, Vec<Vec<Complex>>)> {
    let n = spec.components;
    let m = spec.grid.len();
    let h = spec.grid.spacing();
    let d1 = diff_matrix(&spec.grid, 1, 4)?;
    let mut big_phi = Vec::new();
    let mut dleft = Vec::new();
    for j in 0..spec.p() {
        let full = |col: nalgebra::DVectorView<Complex>| {
            let mut v = vec![Complex::new(0.0, 0.0); m * n];
            for (slot, x) in v[n..m * n - n].iter_mut().zip(col.iter()) {
                *slot = *x;
            }
            v
        };
        let phi = full(spec.right.column(j));
        let mut anti = vec![Complex::new(0.0, 0.0); m * n];
        for i in 1..m {
            for k in 0..n {
                anti[i * n + k] = anti[(i - 1) * n + k] + (phi[(i - 1) * n + k] + phi[i * n + k]) * (0.5 * h);
            }
        }
        big_phi.push(anti);
        let lt = full(spec.left.column(j));
        let re: Vec<f64> = lt.iter().map(|c| c.re).collect();
        let im: Vec<f64> = lt.iter().map(|c| c.im).collect();
        let (dr, di) = (d1.apply_strided(&re, n), d1.apply_strided(&im, n));
        dleft.push(dr.iter().zip(&di).map(|(a, b)| Complex::new(*a, *b)).collect());
    }
    Ok((big_phi, dleft))
}

/// Applies `Π_u`, `Π_cs = I - Π_u` or their tilde versions to a field.
pub fn apply_projector(spec: &SpectralDecomposition, f: &DiscreteField, which: Projection) -> Result<DiscreteField> {
    check_field(spec, f)?;
    let n = spec.components;
    let len = f.values().len();
    let values = f.values();
    let unstable = match which {
        Projection::Unstable | Projection::CenterStable => {
            let c = spec.coordinates(&values[n..len - n]);
            pad(n, spec.synthesize(&c).into_iter(), len)
        }
        Projection::UnstableTilde | Projection::CenterStableTilde => {
            if spec.form != Form::Conservation {
                return Err(Error::Unsupported("tilde projections need a conservation-form model".into()));
            }
            let (anti, dleft) = tilde_data(spec)?;
            let h = spec.grid.spacing();
            let mut out = vec![0.0; len];
            for (a, dl) in anti.iter().zip(&dleft) {
                let c: Complex = dl.iter().zip(values).map(|(x, y)| x * *y).sum::<Complex>() * h;
                for (o, ai) in out.iter_mut().zip(a) {
                    *o -= (ai * c).re;
                }
            }
            out
        }
    };
    let out = match which {
        Projection::Unstable | Projection::UnstableTilde => unstable,
        _ => values.iter().zip(&unstable).map(|(a, b)| a - b).collect(),
    };
    DiscreteField::new(spec.grid, n, out)
}

/// One measured operator norm `|P|_{L^p → W^{r,p}}` over the probe set.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OperatorNorm {
    pub which: Projection,
    pub p: f64,
    pub r: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProjectorBounds {
    pub norms: Vec<OperatorNorm>,
    /// `max |(1+x²)^{3/4} Π_u f|_{H⁴} / |f|_{L¹}`.
    pub weighted_h4: f64,
    /// `max sup_x e^{θ|x|}|Π_cs f(x)| / sup_y e^{θ|y|}|f(y)|`.
    pub localization: f64,
    pub theta: f64,
    pub probes: usize,
}

/// Localized probe fields: Gaussians and their derivatives at a few centers
/// and widths, one component at a time.
pub fn probe_set(spec: &SpectralDecomposition) -> Vec<DiscreteField> {
    let mut out = Vec::new();
    for k in 0..spec.components {
        for &c in &[-4.0, -1.5, 0.0, 0.7, 3.0] {
            for &s in &[0.6, 1.2] {
                for deriv in [false, true] {
                    let f = DiscreteField::from_fn(spec.grid, spec.components, |x| {
                        let y = (x - c) / s;
                        let g = Float::exp(-0.5 * y * y);
                        let mut v = vec![0.0; spec.components];
                        v[k] = if deriv { -y * g } else { g };
                        v
                    });
                    if let Ok(f) = f {
                        out.push(f);
                    }
                }
            }
        }
    }
    out
}

fn w_norm(f: &DiscreteField, p: f64, r: usize) -> Result<f64> {
    let mut total = 0.0;
    let mut g = f.clone();
    for k in 0..=r {
        if k > 0 {
            g = f.derivative(k)?;
        }
        total += g.lp_norm(p);
    }
    Ok(total)
}

/// Measured projector norms and the weighted/localization constants.
pub fn projector_bounds(spec: &SpectralDecomposition, theta: f64) -> Result<ProjectorBounds> {
    let probes = probe_set(spec);
    let mut which = vec![Projection::Unstable, Projection::CenterStable];
    if spec.form == Form::Conservation {
        which.push(Projection::UnstableTilde);
        which.push(Projection::CenterStableTilde);
    }
    let mut norms = Vec::new();
    let images: Vec<Vec<DiscreteField>> = which
        .iter()
        .map(|w| probes.iter().map(|f| apply_projector(spec, f, *w)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    for (wi, w) in which.iter().enumerate() {
        let cs = matches!(w, Projection::CenterStable | Projection::CenterStableTilde);
        for &p in &[1.0, 2.0, f64::INFINITY] {
            for r in 0..=4 {
                let mut best: f64 = 0.0;
                for (f, g) in probes.iter().zip(&images[wi]) {
                    let den = if cs { w_norm(f, p, r)? } else { f.lp_norm(p) };
                    if den > 0.0 {
                        best = best.max(w_norm(g, p, r)? / den);
                    }
                }
                norms.push(OperatorNorm { which: *w, p, r, value: best });
            }
        }
    }
    let x = spec.grid.nodes();
    let n = spec.components;
    let mut weighted_h4: f64 = 0.0;
    let mut localization: f64 = 0.0;
    for (f, g) in probes.iter().zip(&images[0]) {
        let weighted = DiscreteField::from_fn(spec.grid, n, |xx| {
            let i = spec.grid.nearest(xx);
            let w = Float::powf(1.0 + xx * xx, 0.75);
            g.at(i).iter().map(|v| v * w).collect()
        })?;
        let l1 = f.l1_norm();
        if l1 > 0.0 {
            weighted_h4 = weighted_h4.max(weighted.hs_norm(4)? / l1);
        }
    }
    for (f, g) in probes.iter().zip(&images[1]) {
        let sup_w = |h: &DiscreteField| {
            (0..x.len())
                .map(|i| Float::exp(theta * x[i].abs()) * h.at(i).iter().fold(0.0_f64, |a, v| a.max(v.abs())))
                .fold(0.0_f64, f64::max)
        };
        let den = sup_w(f);
        if den > 0.0 {
            localization = localization.max(sup_w(g) / den);
        }
    }
    Ok(ProjectorBounds { norms, weighted_h4, localization, theta, probes: probes.len() })
}
