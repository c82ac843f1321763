//! One function per subcommand. Each writes into `<root>/<command>/` and
//! returns that directory.

use std::path::{Path, PathBuf};

use shocklab_core::evans::{evans_roots, winding_number, zero_order_at_origin, EvansOptions, EvansSystem};
use shocklab_core::evolution::{
    conditional_run, damping_monitor, escape_run, limiting_phase, weighted_monitor, EvolveOptions, InitialData, Norms,
};
use shocklab_core::manifold::{ManifoldMap, ManifoldParams};
use shocklab_core::models::{catalog, verify_hypotheses, Form, HypothesisCheck, HypothesisOptions, ParabolicSystem};
use shocklab_core::profile::measure_decay;
use shocklab_core::spectral::{unstable_spectrum, SpectralDecomposition, SpectralOptions};

use crate::config::{ExperimentConfig, ModelSpec, ResolvedModel, RunMode};
use crate::io::{num, OutputDir};
use crate::pipeline::{
    end_states, loglog_slope, phase_fits, power_fit, stable_direction, tracked_run, wave, write_fits, write_trace,
    NamedFit, Wave,
};
use crate::{Context, Error};

fn status(c: &HypothesisCheck) -> String {
    serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

/// Catalog listing with hypothesis checks, plus the configured model when
/// it is inline.
pub fn models(config: Option<&ExperimentConfig>, root: &Path) -> Result<PathBuf, Error> {
    let mut out = OutputDir::create(root.join("models"))?;
    let mut list: Vec<(String, ResolvedModel)> =
        catalog().into_iter().map(|e| (e.name.to_string(), crate::pipeline::catalog_model(e.name))).collect();
    if let Some(ModelSpec::Inline(m)) = config.map(|c| &c.model) {
        list.push((m.name.clone(), config.unwrap().model.resolve()?));
    }
    let tol = config.map_or(1e-8, |c| c.tolerances.hypothesis);
    let xi: Vec<f64> = (0..=200).map(|k| -10.0 + 0.1 * k as f64).collect();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (name, m) in &list {
        let es = end_states(m)?;
        let bounds: Vec<(f64, f64)> =
            m.u_minus.iter().zip(&m.u_plus).map(|(a, b)| (a.min(*b) - 0.5, a.max(*b) + 0.5)).collect();
        let opts = HypothesisOptions { tol, ..Default::default() };
        let r = verify_hypotheses(&m.system, &es, &bounds, &xi, &opts).during("models")?;
        let form = match m.system.form() {
            Form::Conservation => "conservation",
            Form::General => "general",
        };
        let mut row = vec![name.clone(), form.into(), m.system.dim().to_string(), es.describe(), es.classification.ell().to_string()];
        for c in [&r.h1, &r.h2, &r.h3, &r.h5, &r.rh] {
            row.push(status(c));
            row.push(num(c.witness));
        }
        rows.push(row);
        reports.push(r);
    }
    let header = [
        "model", "form", "dim", "end_states", "ell", "h1", "h1_witness", "h2", "h2_witness", "h3", "h3_witness", "h5",
        "h5_witness", "rh", "rh_witness",
    ];
    out.write_csv("models.csv", &header, rows)?;
    out.write_json("hypotheses.json", &reports)?;
    out.record("models", list.len());
    out.record("all_hypotheses_pass", reports.iter().filter(|r| r.all_passed()).count());
    out.finish("models", config)?;
    Ok(out.path().to_path_buf())
}

fn grid_wave(cfg: &ExperimentConfig) -> Result<Wave, Error> {
    wave(&cfg.model.resolve()?, cfg.grid.half_width, cfg.grid.nodes, &cfg.tolerances)
}

/// Profile values (with the closed form where known) and the tail decay fit.
pub fn profile(cfg: &ExperimentConfig, root: &Path) -> Result<PathBuf, Error> {
    let mut out = OutputDir::create(root.join("profile"))?;
    let model = cfg.model.resolve()?;
    let p = crate::pipeline::profile(&model, cfg.grid.half_width, cfg.grid.nodes, &cfg.tolerances)?;
    let n = p.dim();
    let g = *p.grid();
    let mut header: Vec<String> = vec!["x".into()];
    header.extend((0..n).map(|k| format!("u_{k}")));
    if model.exact.is_some() {
        header.extend((0..n).map(|k| format!("exact_{k}")));
    }
    let mut sup: f64 = 0.0;
    let rows: Vec<Vec<String>> = (0..g.len())
        .map(|i| {
            let x = g.x(i);
            let u = p.field.at(i);
            let mut row = vec![num(x)];
            row.extend(u.iter().map(|v| num(*v)));
            if let Some(f) = model.exact {
                let e = f(x);
                sup = u.iter().zip(&e).fold(sup, |s, (a, b)| s.max((a - b).abs()));
                row.extend(e.iter().map(|v| num(*v)));
            }
            row
        })
        .collect();
    let hdr: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    out.write_csv("profile.csv", &hdr, rows)?;
    let decay = measure_decay(&p);
    out.write_json("decay.json", &decay)?;
    out.record("residual", p.residual);
    out.record("newton_iterations", p.newton_history.len());
    out.record("theta", decay.theta);
    out.record("decay_conclusive", decay.conclusive);
    if model.exact.is_some() {
        out.record("sup_error", sup);
    }
    out.finish("profile", Some(cfg))?;
    Ok(out.path().to_path_buf())
}

fn spectral_options(cfg: &ExperimentConfig) -> SpectralOptions {
    SpectralOptions { cutoff_re: cfg.tolerances.spectral_cutoff, ..Default::default() }
}

/// Unstable eigenvalues and eigenfunctions and the translational mode.
pub fn spectrum(cfg: &ExperimentConfig, root: &Path) -> Result<PathBuf, Error> {
    let mut out = OutputDir::create(root.join("spectrum"))?;
    let w = grid_wave(cfg)?;
    let spec = unstable_spectrum(&w.op, &spectral_options(cfg)).during("spectral")?;
    let rows = spec
        .eigenvalues
        .iter()
        .zip(&spec.ranks)
        .enumerate()
        .map(|(j, (l, r))| vec![j.to_string(), num(l.re), num(l.im), r.to_string()]);
    out.write_csv("eigenvalues.csv", &["index", "re", "im", "rank"], rows)?;
    write_modes(&out, &w, &spec)?;
    out.record("p", spec.p());
    out.record("zero_mode_residual", w.op.zero_mode_residual());
    if let Some(b) = spec.beta() {
        out.record("beta", b);
    }
    if let Some(z) = &spec.zero_mode {
        out.record("zero_mode_value", z.value);
        out.record("zero_mode_alignment", z.alignment);
    }
    out.finish("spectrum", Some(cfg))?;
    Ok(out.path().to_path_buf())
}

fn write_modes(out: &OutputDir, w: &Wave, spec: &SpectralDecomposition) -> Result<(), Error> {
    let g = w.op.grid();
    let n = w.op.components();
    let mut header = vec!["x".to_string(), "component".to_string()];
    for j in 0..spec.p() {
        header.extend([format!("re_phi_{j}"), format!("im_phi_{j}")]);
    }
    if spec.zero_mode.is_some() {
        header.extend(["zero_mode".into(), "zero_mode_dual".into()]);
    }
    let rows = (0..w.op.len()).map(|r| {
        let mut row = vec![num(g.x(r / n + 1)), (r % n).to_string()];
        for j in 0..spec.p() {
            let c = spec.right[(r, j)];
            row.extend([num(c.re), num(c.im)]);
        }
        if let Some(z) = &spec.zero_mode {
            row.extend([num(z.right[r]), num(z.left[r])]);
        }
        row
    });
    let hdr: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    out.write_csv("eigenfunctions.csv", &hdr, rows)
}

/// Evans function on each configured contour, winding numbers, roots and the
/// order of the zero at the origin.
pub fn evans(cfg: &ExperimentConfig, root: &Path) -> Result<PathBuf, Error> {
    let mut out = OutputDir::create(root.join("evans"))?;
    let model = cfg.model.resolve()?;
    let p = crate::pipeline::profile(&model, cfg.grid.half_width, cfg.grid.nodes, &cfg.tolerances)?;
    let opts = EvansOptions { rtol: cfg.tolerances.evans_rtol, atol: cfg.tolerances.evans_atol, ..Default::default() };
    let ev = EvansSystem::new(&model.system, &p, opts).during("evans")?;
    let mut summary_rows = Vec::new();
    let mut root_rows = Vec::new();
    for (k, c) in cfg.contours.iter().enumerate() {
        let r = winding_number(&ev, c.contour, c.samples).during("evans")?;
        let rows = r.values.iter().map(|(l, d)| vec![num(l.re), num(l.im), num(d.re), num(d.im)]);
        out.write_csv(&format!("contour_{k}.csv"), &["re_lambda", "im_lambda", "re_d", "im_d"], rows)?;
        let roots = evans_roots(&ev, &r).during("evans")?;
        root_rows.extend(roots.iter().map(|z| vec![k.to_string(), num(z.re), num(z.im)]));
        summary_rows.push(vec![k.to_string(), r.winding.to_string(), num(r.raw), num(r.min_abs), r.samples.to_string()]);
        out.record(&format!("winding_{k}"), r.winding);
    }
    out.write_csv("windings.csv", &["contour", "winding", "raw", "min_abs", "samples"], summary_rows)?;
    out.write_csv("roots.csv", &["contour", "re", "im"], root_rows)?;
    match zero_order_at_origin(&ev, 0.1) {
        Ok(o) => out.record("origin_order", o.order),
        Err(e) => out.record("origin_order", format!("undetermined: {e}")),
    }
    out.finish("evans", Some(cfg))?;
    Ok(out.path().to_path_buf())
}

/// `ManifoldParams` from the spectrum with the configured overrides.
pub fn manifold_params(cfg: &ExperimentConfig, spec: &SpectralDecomposition, delta: f64) -> Result<ManifoldParams, Error> {
    let m = &cfg.manifold;
    let mut p = ManifoldParams::from_spectrum(spec, delta, m.dt).during("manifold")?;
    p.horizon = m.horizon;
    p.tol = cfg.tolerances.manifold;
    if let Some(b) = m.beta {
        p.beta = b;
    }
    if let Some(o) = m.omega {
        p.omega = o;
    }
    if let Some(e) = m.eta {
        p.eta = e;
    }
    p.validate().map_err(|e| Error::Usage(format!("manifold parameters: {e}")))?;
    Ok(p)
}

/// Tangency ladder, contraction factors, `Φ(0)` and the invariance defect.
pub fn manifold(cfg: &ExperimentConfig, root: &Path) -> Result<PathBuf, Error> {
    let mut out = OutputDir::create(root.join("manifold"))?;
    let w = grid_wave(cfg)?;
    let spec = unstable_spectrum(&w.op, &spectral_options(cfg)).during("spectral")?;
    out.record("p", spec.p());
    if spec.p() == 0 {
        out.record("note", "no unstable spectrum: the manifold is the whole space and Φ ≡ 0");
        out.finish("manifold", Some(cfg))?;
        return Ok(out.path().to_path_buf());
    }
    let delta = cfg.manifold.delta;
    let map = ManifoldMap::new(&w.op, &spec, manifold_params(cfg, &spec, delta)?).during("manifold")?;
    let dir = stable_direction(&w.op, &spec);
    let zero = map.evaluate(&vec![0.0; w.op.len()]).during("manifold")?;
    let mut rows = Vec::new();
    let (mut eps, mut norms) = (Vec::new(), Vec::new());
    for &e in &cfg.manifold.ladder {
        let w0: Vec<f64> = dir.iter().map(|x| e * x).collect();
        let fp = map.evaluate(&w0).during("manifold")?;
        let phi = w.op.h2(&fp.phi_field);
        rows.push(vec![num(e), num(phi), num(fp.contraction), fp.iterations.to_string()]);
        eps.push(e);
        norms.push(phi);
    }
    out.write_csv("tangency.csv", &["w_norm", "phi_norm", "contraction", "iterations"], rows)?;
    if eps.len() >= 2 {
        out.record("tangency_slope", loglog_slope(&eps, &norms));
    }
    let factor = |d: f64| -> Result<f64, Error> {
        let map = ManifoldMap::new(&w.op, &spec, manifold_params(cfg, &spec, d)?).during("manifold")?;
        let w0: Vec<f64> = dir.iter().map(|x| 0.5 * d * x).collect();
        Ok(map.evaluate(&w0).during("manifold")?.contraction)
    };
    let (full, half) = (factor(delta)?, factor(0.5 * delta)?);
    out.record("phi_zero", w.op.h2(&zero.phi_field));
    out.record("contraction", full);
    out.record("contraction_half_delta", half);
    let probe: Vec<f64> = dir.iter().map(|x| cfg.manifold.ladder.last().copied().unwrap_or(0.05) * x).collect();
    let d = map.invariance_defect(&probe, 1.0).during("manifold")?;
    out.write_json("invariance.json", &d)?;
    out.record("invariance_defect", d.defect);
    out.finish("manifold", Some(cfg))?;
    Ok(out.path().to_path_buf())
}

fn with_amplitude(data: &InitialData, a: f64) -> InitialData {
    match *data {
        InitialData::Gaussian { center, width, .. } => InitialData::Gaussian { amplitude: a, center, width },
        InitialData::OddPair { center, width, .. } => InitialData::OddPair { amplitude: a, center, width },
        InitialData::AlgebraicTail { taper, .. } => InitialData::AlgebraicTail { amplitude: a, taper },
        InitialData::Translate { .. } => InitialData::Translate { shift: a },
        InitialData::Zero => InitialData::Zero,
    }
}

/// Nonlinear evolution in one of three modes.
pub fn evolve(cfg: &ExperimentConfig, root: &Path) -> Result<PathBuf, Error> {
    let mut out = OutputDir::create(root.join("evolve"))?;
    let w = grid_wave(cfg)?;
    let e = &cfg.evolution;
    match e.mode {
        RunMode::Free => free_run(cfg, &w, &mut out)?,
        RunMode::Conditional | RunMode::Escape => {
            let spec = unstable_spectrum(&w.op, &spectral_options(cfg)).during("spectral")?;
            if spec.p() == 0 {
                return Err(Error::Usage("conditional and escape runs need unstable spectrum".into()));
            }
            let mut params = manifold_params(cfg, &spec, cfg.manifold.delta)?;
            params.dt = e.dt;
            let map = ManifoldMap::new(&w.op, &spec, params).during("manifold")?;
            let w0: Vec<f64> = stable_direction(&w.op, &spec).iter().map(|x| e.w0 * x).collect();
            let samples = if e.mode == RunMode::Conditional {
                let r = conditional_run(&map, &w0, e.t_final, e.window).during("evolution")?;
                out.record("max_ratio", r.max_ratio);
                out.record("z_over_w2", r.z_over_w2);
                out.record("stays_within_2", r.stays_within(2.0));
                out.write_columns("corrections.csv", &[("correction", &r.corrections)])?;
                r.samples
            } else {
                let r = escape_run(&map, &w0, e.offset, e.t_final, cfg.seed).during("evolution")?;
                out.record("escape_time", r.escape_time.map_or(serde_json::Value::Null, Into::into));
                out.record("growth_rate", r.rate.slope);
                write_fits(&out, "fits.csv", &[NamedFit { name: "unstable_growth".into(), fit: r.rate.clone() }])?;
                r.samples
            };
            let col = |f: fn(&shocklab_core::evolution::RunSample) -> f64| samples.iter().map(f).collect::<Vec<_>>();
            let (t, v, ww, z) = (col(|s| s.t), col(|s| s.v), col(|s| s.w), col(|s| s.z));
            out.write_columns("samples.csv", &[("t", &t), ("v_h2", &v), ("w_h2", &ww), ("z_h2", &z)])?;
        }
    }
    out.finish("evolve", Some(cfg))?;
    Ok(out.path().to_path_buf())
}

fn free_run(cfg: &ExperimentConfig, w: &Wave, out: &mut OutputDir) -> Result<(), Error> {
    let e = &cfg.evolution;
    let opts = EvolveOptions::new(e.t_final, e.dt, e.snapshot_every);
    let spec = unstable_spectrum(&w.op, &spectral_options(cfg)).during("spectral")?;
    let v0 = e.initial.sample(&w.op, &w.profile);
    let run = tracked_run(w, &v0, &opts, Some(&spec))?;
    write_trace(out, "trace_raw.csv", &run.raw)?;
    if let Some(d) = &run.raw.divergence {
        out.record("diverged_at", d.t);
    }
    if let Some(n) = &run.note {
        out.record("note", n.as_str());
    }
    let Some(sh) = &run.shifted else { return Ok(()) };
    write_trace(out, "trace.csv", sh)?;
    let mut fits = Vec::new();
    for name in ["linf", "l2"] {
        if let Ok(f) = power_fit(name, &sh.times, &sh.norm_series(name).expect("known norm"), e.fit_start, cfg.seed) {
            fits.push(f);
        }
    }
    let track = run.track.as_ref().expect("tracked");
    if let Ok(ainf) = limiting_phase(&w.op, &w.profile, &run.raw.mass[0]) {
        out.record("alpha_inf", ainf);
        if let Ok((a, b)) = phase_fits(track, ainf, e.fit_start, cfg.seed) {
            fits.extend([a, b]);
        }
    }
    for f in &fits {
        out.record(&format!("slope_{}", f.name), f.fit.slope);
    }
    write_fits(out, "fits.csv", &fits)?;
    if let Some(z) = &run.zeta {
        out.record("zeta_final", z.final_value);
        out.record("zeta_violation", z.violation.clone().map_or(serde_json::Value::Null, Into::into));
        out.record("template_ratio_sup", sh.template_ratio.iter().cloned().fold(0.0, f64::max));
    }
    match damping_monitor(sh) {
        Ok(d) => {
            out.record("damping_c", d.c);
            out.record("damping_theta", d.theta);
            out.record("damping_violation", d.max_violation);
        }
        Err(err) => out.record("damping", err.to_string()),
    }
    let wm = weighted_monitor(sh);
    out.record("weighted_h4_max", wm.max);
    if !e.e0_ladder.is_empty() {
        let mut rows = Vec::new();
        let (mut e0s, mut sups) = (Vec::new(), Vec::new());
        for &a in &e.e0_ladder {
            let v0 = with_amplitude(&e.initial, a).sample(&w.op, &w.profile);
            let e0 = Norms::of(&w.op.to_field(&v0)).during("numerics")?.weighted_h4;
            let r = tracked_run(w, &v0, &opts, Some(&spec))?;
            let sup = r.shifted.as_ref().map_or(f64::NAN, |s| s.template_ratio.iter().cloned().fold(0.0, f64::max));
            rows.push(vec![num(a), num(e0), num(sup)]);
            e0s.push(e0);
            sups.push(sup);
        }
        out.write_csv("ladder.csv", &["amplitude", "e0", "template_ratio_sup"], rows)?;
        if sups.iter().all(|s| *s > 0.0) && e0s.len() >= 2 {
            out.record("template_ratio_e0_slope", loglog_slope(&e0s, &sups));
        }
    }
    Ok(())
}
