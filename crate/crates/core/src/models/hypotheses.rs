use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use super::{sorted_eigs, Classification, EndStates, Form, ParabolicSystem};
use crate::linalg::complex_eigenvalues;
use crate::{Complex, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

/// Outcome of one hypothesis with the numerical witness behind it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HypothesisCheck {
    pub status: Status,
    pub witness: f64,
    pub note: String,
}

impl HypothesisCheck {
    fn new(pass: bool, witness: f64, note: String) -> Self {
        let status = if pass { Status::Pass } else { Status::Fail };
        Self { status, witness, note }
    }

    fn na(note: &str) -> Self {
        Self { status: Status::NotApplicable, witness: f64::NAN, note: note.into() }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HypothesisReport {
    pub model: String,
    /// Parabolicity: witness is `min Re σ(b)` over the sample box.
    pub h1: HypothesisCheck,
    /// Hyperbolicity at the end states: witness is the smallest gap/magnitude.
    pub h2: HypothesisCheck,
    /// Symbol dissipativity: witness is the margin θ.
    pub h3: HypothesisCheck,
    /// Classification; witness is `ℓ`.
    pub h5: HypothesisCheck,
    /// Rankine–Hugoniot: witness is `|f(u+) - f(u-)|`.
    pub rh: HypothesisCheck,
    pub classification: Classification,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        [&self.h1, &self.h2, &self.h3, &self.h5, &self.rh].iter().all(|c| c.passed())
    }
}

/// Tolerances and sampling for [`verify_hypotheses`].
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisOptions {
    pub tol: f64,
    pub samples_per_dim: usize,
}

impl Default for HypothesisOptions {
    fn default() -> Self {
        Self { tol: 1e-8, samples_per_dim: 9 }
    }
}

/// Largest θ with `Re σ(P(ξ)) + θξ² <= 0` over the grid and the
/// asymptotic tail, where `P(ξ) = -ξ²b - iξ h_{u_x} - h_u` at a rest state.
pub fn symbol_margin(system: &dyn ParabolicSystem, u: &[f64], xi_grid: &[f64]) -> f64 {
    let n = system.dim();
    let zero = vec![0.0; n];
    let b = system.viscosity(u);
    let hu = system.source_du(u, &zero);
    let hux = system.source_dux(u, &zero);
    let mut theta = f64::INFINITY;
    let tail = [1e2, 1e3, 1e4];
    for &xi in xi_grid.iter().chain(tail.iter()) {
        if xi == 0.0 {
            continue;
        }
        let p = DMatrix::from_fn(n, n, |i, j| {
            Complex::new(-xi * xi * b[(i, j)] - hu[(i, j)], -xi * hux[(i, j)])
        });
        let max_re = complex_eigenvalues(&p).iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
        theta = theta.min(-max_re / (xi * xi));
    }
    theta
}

/// Checks the structural hypotheses on a model and its end states.
///
/// `sample_box` gives an interval per component in which parabolicity is
/// sampled on a uniform lattice.
pub fn verify_hypotheses(
    system: &dyn ParabolicSystem,
    end_states: &EndStates,
    sample_box: &[(f64, f64)],
    xi_grid: &[f64],
    opts: &HypothesisOptions,
) -> Result<HypothesisReport> {
    let n = system.dim();
    let tol = opts.tol;
    let k = opts.samples_per_dim.max(2);
    let mut min_re_b = f64::INFINITY;
    let total = k.pow(n as u32);
    for idx in 0..total {
        let mut r = idx;
        let u: Vec<f64> = sample_box
            .iter()
            .map(|&(lo, hi)| {
                let s = r % k;
                r /= k;
                lo + (hi - lo) * s as f64 / (k - 1) as f64
            })
            .collect();
        let (re, _) = sorted_eigs(&system.viscosity(&u));
        min_re_b = min_re_b.min(re[0]);
    }
    let h1 = HypothesisCheck::new(min_re_b >= tol, min_re_b, format!("min Re σ(b) over {total} samples"));

    let theta = symbol_margin(system, &end_states.u_minus, xi_grid)
        .min(symbol_margin(system, &end_states.u_plus, xi_grid));
    let h3 = HypothesisCheck::new(theta >= tol, theta, "symbol margin θ at u±".into());

    let (h2, h5, rh) = match system.form() {
        Form::General => (
            HypothesisCheck::na("general-form pulse: no convection matrices"),
            HypothesisCheck::na("general-form pulse: translate family, ℓ = 1"),
            HypothesisCheck::na("general form"),
        ),
        Form::Conservation => {
            let real = end_states.max_imag <= tol;
            let simple = end_states.min_gap > tol || n == 1;
            let nonzero = end_states.min_abs > tol;
            let witness = if n == 1 { end_states.min_abs } else { end_states.min_gap.min(end_states.min_abs) };
            let h2 = HypothesisCheck::new(
                real && simple && nonzero,
                witness,
                format!(
                    "real: {real}, simple: {simple} (gap {:.3e}), nonzero: {nonzero} (min |a| {:.3e})",
                    end_states.min_gap, end_states.min_abs
                ),
            );
            let h5 = HypothesisCheck::new(
                true,
                end_states.classification.ell() as f64,
                format!("{:?}, incoming = {}", end_states.classification, end_states.incoming()),
            );
            let rh = HypothesisCheck::new(
                end_states.rh_residual <= tol.max(1e-12),
                end_states.rh_residual,
                "|f(u+) - f(u-)| (standing frame)".into(),
            );
            (h2, h5, rh)
        }
    };
    Ok(HypothesisReport {
        model: system.name().into(),
        h1,
        h2,
        h3,
        h5,
        rh,
        classification: end_states.classification,
    })
}
