//! Setup and run helpers shared by the subcommands and the criteria.

use std::sync::Arc;

use shocklab_core::evolution::{
    evolve, fit_exponent, reframe, template_ratio_series, track_phase, zeta_monitor, EvolutionTrace, EvolveOptions,
    ExponentFit, FitWindow, PhaseOptions, PhaseTrack, ZetaReport,
};
use shocklab_core::models::{catalog_entry, EndStates};
use shocklab_core::numerics::Grid;
use shocklab_core::profile::{solve_profile, ProfileOptions, ShockProfile};
use shocklab_core::spectral::{assemble_l, eigenpair_near, DiscretizedOperator, SpectralDecomposition};
use shocklab_core::templates::TemplateParams;
use shocklab_core::Complex;

use crate::config::{ResolvedModel, Tolerances};
use crate::io::{num, OutputDir};
use crate::{Context, Error};

/// A solved profile with its discretized linearization.
pub struct Wave {
    pub model: ResolvedModel,
    pub profile: ShockProfile,
    pub op: DiscretizedOperator,
}

pub fn end_states(model: &ResolvedModel) -> Result<EndStates, Error> {
    EndStates::new(&model.system, &model.u_minus, &model.u_plus).during("models")
}

pub fn profile(model: &ResolvedModel, half_width: f64, nodes: usize, tol: &Tolerances) -> Result<ShockProfile, Error> {
    let grid = Grid::new(half_width, nodes).during("numerics")?;
    let es = end_states(model)?;
    let mut opts = ProfileOptions::with_guess(model.guess.clone());
    opts.tol = tol.profile;
    opts.tail_tol = tol.profile_tail;
    solve_profile(&model.system, &es, &grid, &model.phase, &opts).during("profile")
}

pub fn wave(model: &ResolvedModel, half_width: f64, nodes: usize, tol: &Tolerances) -> Result<Wave, Error> {
    let profile = profile(model, half_width, nodes, tol)?;
    let op = assemble_l(Arc::new(model.system.clone()), &profile).during("spectral")?;
    Ok(Wave { model: model.clone(), profile, op })
}

pub fn catalog_model(name: &str) -> ResolvedModel {
    let e = catalog_entry(name).expect("catalog model");
    ResolvedModel {
        system: e.system,
        u_minus: e.u_minus,
        u_plus: e.u_plus,
        guess: e.guess,
        phase: e.phase,
        exact: e.exact_profile,
    }
}

pub fn catalog_wave(name: &str, half_width: f64, nodes: usize) -> Result<Wave, Error> {
    wave(&catalog_model(name), half_width, nodes, &Tolerances::default())
}

/// Real eigenfunction nearest `sigma`, scaled to unit `H²` norm.
pub fn mode_near(op: &DiscretizedOperator, sigma: f64) -> Result<(f64, Vec<f64>), Error> {
    let e = eigenpair_near(op, Complex::new(sigma, 0.0)).during("spectral")?;
    let v: Vec<f64> = e.right.iter().map(|c| c.re).collect();
    let n = op.h2(&v);
    Ok((e.value.re, v.iter().map(|x| x / n).collect()))
}

/// A unit-`H²` center-stable direction: the `Π_cs` part of a centred Gaussian.
pub fn stable_direction(op: &DiscretizedOperator, spec: &SpectralDecomposition) -> Vec<f64> {
    let g = op.grid();
    let n = op.components();
    let bump: Vec<f64> = (1..g.len() - 1).flat_map(|i| std::iter::repeat_n((-g.x(i).powi(2) / 2.0).exp(), n)).collect();
    let z = spec.synthesize(&spec.coordinates(&bump));
    let w: Vec<f64> = bump.iter().zip(&z).map(|(a, b)| a - b).collect();
    let s = op.h2(&w);
    w.iter().map(|x| x / s).collect()
}

/// A raw run with its phase track and shifted-frame monitors.
pub struct TrackedRun {
    pub raw: EvolutionTrace,
    pub track: Option<PhaseTrack>,
    /// Shifted trace with `template_ratio` and `zeta` filled in.
    pub shifted: Option<EvolutionTrace>,
    pub zeta: Option<ZetaReport>,
    /// Why tracking or the monitors were skipped.
    pub note: Option<String>,
}

pub fn tracked_run(
    wave: &Wave,
    v0: &[f64],
    opts: &EvolveOptions,
    spec: Option<&SpectralDecomposition>,
) -> Result<TrackedRun, Error> {
    let raw = evolve(&wave.op, v0, opts).during("evolution")?;
    let mut run = TrackedRun { raw, track: None, shifted: None, zeta: None, note: None };
    if run.raw.divergence.is_some() {
        run.note = Some("run diverged; no phase tracking".into());
        return Ok(run);
    }
    let track = match track_phase(&run.raw, &wave.op, &wave.profile, &PhaseOptions::default()) {
        Ok(t) => t,
        Err(e) => {
            run.note = Some(format!("phase tracking: {e}"));
            return Ok(run);
        }
    };
    let mut shifted = reframe(&run.raw, &wave.op, &wave.profile, &track).during("evolution")?;
    match TemplateParams::from_end_states(&wave.model.system, &wave.profile.end_states) {
        Ok(params) => {
            shifted.template_ratio = template_ratio_series(&shifted, &wave.op, &params).during("templates")?;
            let z = zeta_monitor(&shifted, &wave.op, spec, &params).during("evolution")?;
            shifted.zeta = z.zeta.clone();
            run.zeta = Some(z);
        }
        Err(e) => run.note = Some(format!("templates: {e}")),
    }
    run.track = Some(track);
    run.shifted = Some(shifted);
    Ok(run)
}

/// Writes one row per snapshot: time, phase, norms, and whatever monitors
/// the trace carries.
pub fn write_trace(out: &OutputDir, name: &str, trace: &EvolutionTrace) -> Result<(), Error> {
    let mut header = vec!["t", "alpha", "alpha_dot", "l1", "l2", "linf", "h2", "h4", "weighted_h4"];
    let monitors = !trace.template_ratio.is_empty();
    if monitors {
        header.extend(["template_ratio", "zeta"]);
    }
    let mass_names: Vec<String> = (0..trace.mass.first().map_or(0, |m| m.len())).map(|k| format!("mass_{k}")).collect();
    header.extend(mass_names.iter().map(|s| s.as_str()));
    let rows = (0..trace.len()).map(|i| {
        let n = &trace.norms[i];
        let mut row = vec![trace.times[i], trace.alpha[i], trace.alpha_dot[i], n.l1, n.l2, n.linf, n.h2, n.h4, n.weighted_h4];
        if monitors {
            row.push(trace.template_ratio[i]);
            row.push(trace.zeta.get(i).copied().unwrap_or(f64::NAN));
        }
        row.extend(&trace.mass[i]);
        row.into_iter().map(num).collect::<Vec<_>>()
    });
    out.write_csv(name, &header, rows)
}

/// A named fitted exponent.
pub struct NamedFit {
    pub name: String,
    pub fit: ExponentFit,
}

/// Power-law fit of `y` over `[start, ∞)`, `None` if the series is not
/// positive there or too short.
pub fn power_fit(name: &str, t: &[f64], y: &[f64], start: f64, seed: u64) -> Result<NamedFit, Error> {
    let fit = fit_exponent(t, y, FitWindow::new(start, f64::INFINITY), seed).during("evolution")?;
    Ok(NamedFit { name: name.into(), fit })
}

pub fn write_fits(out: &OutputDir, name: &str, fits: &[NamedFit]) -> Result<(), Error> {
    let header = ["quantity", "slope", "ci_low", "ci_high", "intercept", "points", "window_start", "window_end", "seed"];
    let rows = fits.iter().map(|f| {
        let x = &f.fit;
        vec![
            f.name.clone(),
            num(x.slope),
            num(x.ci.0),
            num(x.ci.1),
            num(x.intercept),
            x.points.to_string(),
            num(x.window.start),
            num(x.window.end),
            x.seed.to_string(),
        ]
    });
    out.write_csv(name, &header, rows)
}

/// `(1+t)`-exponent of `|α(t) - α∞|` and `|α̇(t)|`.
pub fn phase_fits(track: &PhaseTrack, alpha_inf: f64, start: f64, seed: u64) -> Result<(NamedFit, NamedFit), Error> {
    let gap: Vec<f64> = track.alpha.iter().map(|a| (a - alpha_inf).abs()).collect();
    let speed: Vec<f64> = track.alpha_dot.iter().map(|a| a.abs()).collect();
    Ok((power_fit("alpha_gap", &track.times, &gap, start, seed)?, power_fit("alpha_dot", &track.times, &speed, start, seed)?))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
        assert!((loglog_slope(&x, &y) + 1.5).abs() < 1e-12);
    }

    #[test]
    fn stable_direction_has_no_unstable_part() {
        use shocklab_core::spectral::{unstable_spectrum, SpectralOptions};
        let w = catalog_wave("quadratic_pulse", 20.0, 201).unwrap();
        let spec = unstable_spectrum(&w.op, &SpectralOptions::default()).unwrap();
        let d = stable_direction(&w.op, &spec);
        assert!((w.op.h2(&d) - 1.0).abs() < 1e-12);
        assert!(spec.coordinates(&d).iter().all(|c| c.norm() < 1e-10));
    }
}
