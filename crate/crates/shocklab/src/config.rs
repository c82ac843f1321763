//! Versioned experiment configuration (TOML).
//!
//! Every field has an explicit default; the resolved configuration written
//! next to each output is this struct serialized back to TOML, so it always
//! lists every value that was used.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shocklab_core::evans::Contour;
use shocklab_core::evolution::InitialData;
use shocklab_core::models::{catalog_entry, Form, Poly, PolySystem};
use shocklab_core::profile::{PhaseCondition, ProfileGuess};

use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub model: ModelSpec,
    #[serde(default)]
    pub seed: u64,
    /// Output root; `SHOCKLAB_OUT` and `--out` take precedence.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub manifold: ManifoldConfig,
    #[serde(default = "default_contours")]
    pub contours: Vec<ContourSpec>,
    #[serde(default)]
    pub evolution: EvolutionConfig,
}

/// A catalog name or an inline polynomial model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Name(String),
    Inline(InlineModel),
}

/// Polynomial coefficient table. Each polynomial is a list of
/// `[coefficient, [exponents...]]` terms; `viscosity` is row-major `n × n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineModel {
    pub name: String,
    pub form: Form,
    /// Flux polynomials in `u` (conservation form) or source polynomials in
    /// `(u, u_x)` (general form), one per component.
    pub terms: Vec<Vec<(f64, Vec<u32>)>>,
    pub viscosity: Vec<Vec<(f64, Vec<u32>)>>,
    pub u_minus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub guess: ProfileGuess,
    pub phase: PhaseCondition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub half_width: f64,
    pub nodes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { half_width: 20.0, nodes: 401 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub profile: f64,
    pub profile_tail: f64,
    pub hypothesis: f64,
    pub spectral_cutoff: f64,
    pub evans_rtol: f64,
    pub evans_atol: f64,
    pub manifold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            profile: 1e-10,
            profile_tail: 1e-6,
            hypothesis: 1e-8,
            spectral_cutoff: 0.05,
            evans_rtol: 1e-9,
            evans_atol: 1e-12,
            manifold: 1e-10,
        }
    }
}

/// `eta`, `omega` and `beta` default to values derived from the spectrum
/// when left out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ManifoldConfig {
    pub delta: f64,
    pub dt: f64,
    pub horizon: f64,
    pub eta: Option<f64>,
    pub omega: Option<f64>,
    pub beta: Option<f64>,
    /// Amplitudes of the tangency ladder along the slowest stable mode.
    pub ladder: Vec<f64>,
}

impl Default for ManifoldConfig {
    fn default() -> Self {
        Self {
            delta: 0.2,
            dt: 0.05,
            horizon: 40.0,
            eta: None,
            omega: None,
            beta: None,
            ladder: vec![0.0125, 0.025, 0.05],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    #[serde(flatten)]
    pub contour: Contour,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    64
}

fn default_contours() -> Vec<ContourSpec> {
    vec![ContourSpec { contour: Contour::right_half(0.05, 10.0), samples: 64 }]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Plain evolution with phase tracking and decay monitors.
    Free,
    /// Manifold data `w₀ + Φ(w₀)`, re-projected every `window`.
    Conditional,
    /// Manifold data offset along the first unstable mode.
    Escape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub mode: RunMode,
    pub t_final: f64,
    pub dt: f64,
    pub snapshot_every: usize,
    pub initial: InitialData,
    /// Amplitudes replacing `initial`'s amplitude for the template-ratio ladder.
    pub e0_ladder: Vec<f64>,
    /// Decay fits use `t ≥ fit_start`.
    pub fit_start: f64,
    pub window: f64,
    pub offset: f64,
    /// `H²` size of `w₀` along the slowest stable mode (conditional/escape).
    pub w0: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            mode: RunMode::Free,
            t_final: 20.0,
            dt: 0.05,
            snapshot_every: 10,
            initial: InitialData::Gaussian { amplitude: 0.01, center: 0.0, width: 2.0 },
            e0_ladder: Vec::new(),
            fit_start: 5.0,
            window: 2.0,
            offset: 1e-4,
            w0: 1e-2,
        }
    }
}

/// A model resolved from its specification.
#[derive(Clone, Debug)]
pub struct ResolvedModel {
    pub system: PolySystem,
    pub u_minus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub guess: ProfileGuess,
    pub phase: PhaseCondition,
    pub exact: Option<fn(f64) -> Vec<f64>>,
}

impl ModelSpec {
    pub fn name(&self) -> &str {
        match self {
            ModelSpec::Name(n) => n,
            ModelSpec::Inline(m) => &m.name,
        }
    }

    pub fn resolve(&self) -> Result<ResolvedModel, Error> {
        match self {
            ModelSpec::Name(name) => {
                let e = catalog_entry(name).ok_or_else(|| {
                    Error::Usage(format!("unknown model `{name}`; run `shocklab models` for the catalog"))
                })?;
                Ok(ResolvedModel {
                    system: e.system,
                    u_minus: e.u_minus,
                    u_plus: e.u_plus,
                    guess: e.guess,
                    phase: e.phase,
                    exact: e.exact_profile,
                })
            }
            ModelSpec::Inline(m) => {
                let polys = |t: &[Vec<(f64, Vec<u32>)>]| t.iter().map(|p| Poly::new(p.clone())).collect::<Vec<_>>();
                let (terms, visc) = (polys(&m.terms), polys(&m.viscosity));
                let system = match m.form {
                    Form::Conservation => PolySystem::conservation(&m.name, terms, visc),
                    Form::General => PolySystem::general(&m.name, terms, visc),
                }
                .map_err(|e| Error::Usage(format!("model `{}`: {e}", m.name)))?;
                let n = m.terms.len();
                if m.u_minus.len() != n || m.u_plus.len() != n {
                    return Err(Error::Usage(format!("model `{}`: end states must have {n} components", m.name)));
                }
                Ok(ResolvedModel {
                    system,
                    u_minus: m.u_minus.clone(),
                    u_plus: m.u_plus.clone(),
                    guess: m.guess.clone(),
                    phase: m.phase.clone(),
                    exact: None,
                })
            }
        }
    }
}

impl ExperimentConfig {
    /// Defaults for a catalog model.
    pub fn for_model(name: &str) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            model: ModelSpec::Name(name.into()),
            seed: 0,
            output: None,
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            manifold: ManifoldConfig::default(),
            contours: default_contours(),
            evolution: EvolutionConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, Error> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Usage(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Schema checks beyond what deserialization enforces.
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::Usage(format!("config: {msg}")));
        if self.schema != SCHEMA_VERSION {
            return bad(format!("schema version {} is not supported (expected {SCHEMA_VERSION})", self.schema));
        }
        self.model.resolve()?;
        if !(self.grid.half_width > 0.0 && self.grid.half_width.is_finite()) || self.grid.nodes < 5 {
            return bad("grid needs half_width > 0 and nodes >= 5".into());
        }
        let t = &self.tolerances;
        let positive = [t.profile, t.profile_tail, t.hypothesis, t.evans_rtol, t.evans_atol, t.manifold];
        if positive.iter().any(|v| !(*v > 0.0)) || !(t.spectral_cutoff > 0.0) {
            return bad("tolerances and the spectral cutoff must be positive".into());
        }
        let m = &self.manifold;
        if !(m.delta > 0.0 && m.dt > 0.0 && m.horizon > 0.0) || m.ladder.iter().any(|e| !(*e > 0.0)) {
            return bad("manifold delta, dt, horizon and ladder amplitudes must be positive".into());
        }
        if self.contours.iter().any(|c| c.samples < 8) {
            return bad("contours need at least 8 samples".into());
        }
        let e = &self.evolution;
        if !(e.t_final > 0.0 && e.dt > 0.0 && e.dt <= e.t_final) || e.snapshot_every == 0 {
            return bad("evolution needs 0 < dt <= t_final and snapshot_every >= 1".into());
        }
        if e.e0_ladder.iter().any(|a| !(*a > 0.0)) || !(e.window >= e.dt) || !(e.offset > 0.0) || !(e.w0 > 0.0) {
            return bad("evolution ladder, window, offset and w0 must be positive (window >= dt)".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = ExperimentConfig::from_toml("schema = 1\nmodel = \"burgers\"\n").unwrap();
        assert_eq!(c, ExperimentConfig::for_model("burgers"));
    }

    #[test]
    fn resolved_config_round_trips() {
        let mut c = ExperimentConfig::for_model("quadratic_pulse");
        c.evolution.e0_ladder = vec![0.01, 0.02];
        c.contours.push(ContourSpec { contour: Contour::Circle { center: (0.0, 0.0), radius: 0.1 }, samples: 32 });
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn schema_errors_are_usage_errors() {
        for text in [
            "schema = 1\nmodel = \"nope\"\n",
            "schema = 2\nmodel = \"burgers\"\n",
            "schema = 1\nmodel = \"burgers\"\n[grid]\nnodes = 3\n",
            "schema = 1\nmodel = \"burgers\"\nunknown = 1\n",
        ] {
            assert!(matches!(ExperimentConfig::from_toml(text), Err(Error::Usage(_))), "{text}");
        }
    }

    #[test]
    fn inline_model_matches_catalog() {
        let text = r#"
schema = 1
[model]
name = "my_burgers"
form = "conservation"
terms = [[[0.5, [2]]]]
viscosity = [[[1.0, [0]]]]
u_minus = [1.0]
u_plus = [-1.0]
guess = { kind = "tanh", width = 1.5 }
phase = { kind = "value", component = 0, x0 = 0.0 }
"#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        let m = c.model.resolve().unwrap();
        let u = [0.3];
        let cat = catalog_entry("burgers").unwrap();
        use shocklab_core::models::ParabolicSystem;
        assert_eq!(m.system.flux(&u), cat.system.flux(&u));
        assert_eq!(c.model.name(), "my_burgers");
    }
}
