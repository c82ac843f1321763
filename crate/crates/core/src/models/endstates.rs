use alloc::format;
use alloc::vec::Vec;

use super::{Form, ParabolicSystem};
use crate::{Error, Result};

/// Shock type by the characteristic count at the end states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Classification {
    Lax,
    Undercompressive,
    Overcompressive { ell: usize },
    /// General-form homoclinic wave; the translate family has `ℓ = 1`.
    Pulse,
}

impl Classification {
    pub fn ell(&self) -> usize {
        match self {
            Classification::Overcompressive { ell } => *ell,
            _ => 1,
        }
    }

    /// `γ` of the Green function bounds: 1 for undercompressive waves.
    pub fn gamma(&self) -> f64 {
        if *self == Classification::Undercompressive {
            1.0
        } else {
            0.0
        }
    }
}

/// End states of a standing wave with the characteristic data at each end.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EndStates {
    pub u_minus: Vec<f64>,
    pub u_plus: Vec<f64>,
    /// Sorted real parts of the eigenvalues of `df(u-)`.
    pub a_minus: Vec<f64>,
    pub a_plus: Vec<f64>,
    /// Largest imaginary part seen (zero for real hyperbolic end states).
    pub max_imag: f64,
    /// Smallest gap between consecutive eigenvalues at either end.
    pub min_gap: f64,
    /// Smallest `|a_j^±|`.
    pub min_abs: f64,
    /// `|f(u+) - f(u-)|`.
    pub rh_residual: f64,
    pub classification: Classification,
}

/// Convection matrix at a rest state: `df(u)` or `h_{u_x}(u, 0)`.
pub fn convection_matrix(system: &dyn ParabolicSystem, u: &[f64]) -> nalgebra::DMatrix<f64> {
    match system.form() {
        Form::Conservation => system.flux_jacobian(u),
        Form::General => system.source_dux(u, &alloc::vec![0.0; u.len()]),
    }
}

pub(crate) fn sorted_eigs(m: &nalgebra::DMatrix<f64>) -> (Vec<f64>, f64) {
    let ev = m.clone().complex_eigenvalues();
    let mut re: Vec<f64> = ev.iter().map(|c| c.re).collect();
    let im = ev.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    re.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (re, im)
}

impl EndStates {
    /// Computes characteristic data and classifies the wave.
    pub fn new(system: &dyn ParabolicSystem, u_minus: &[f64], u_plus: &[f64]) -> Result<Self> {
        let n = system.dim();
        for u in [u_minus, u_plus] {
            if u.len() != n {
                return Err(Error::Dimension { expected: n, got: u.len() });
            }
        }
        let (a_minus, im1) = sorted_eigs(&convection_matrix(system, u_minus));
        let (a_plus, im2) = sorted_eigs(&convection_matrix(system, u_plus));
        let gap = |a: &[f64]| a.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let min_gap = gap(&a_minus).min(gap(&a_plus));
        let min_abs = a_minus.iter().chain(&a_plus).map(|a| a.abs()).fold(f64::INFINITY, f64::min);
        let rh_residual = (system.flux(u_plus) - system.flux(u_minus)).norm();
        let same = u_minus.iter().zip(u_plus).all(|(a, b)| (a - b).abs() < 1e-12);
        let classification = match system.form() {
            Form::General => Classification::Pulse,
            Form::Conservation => {
                if same {
                    return Err(Error::InvalidInput(
                        "u+ = u-: constant state, no shock to classify".into(),
                    ));
                }
                let incoming =
                    a_minus.iter().filter(|&&a| a > 0.0).count() + a_plus.iter().filter(|&&a| a < 0.0).count();
                if incoming <= n {
                    Classification::Undercompressive
                } else if incoming == n + 1 {
                    Classification::Lax
                } else {
                    Classification::Overcompressive { ell: incoming - n }
                }
            }
        };
        Ok(Self {
            u_minus: u_minus.to_vec(),
            u_plus: u_plus.to_vec(),
            a_minus,
            a_plus,
            max_imag: im1.max(im2),
            min_gap,
            min_abs,
            rh_residual,
            classification,
        })
    }

    pub fn dim(&self) -> usize {
        self.u_minus.len()
    }

    /// Number of incoming characteristics `#{a^- > 0} + #{a^+ < 0}`.
    pub fn incoming(&self) -> usize {
        self.a_minus.iter().filter(|&&a| a > 0.0).count() + self.a_plus.iter().filter(|&&a| a < 0.0).count()
    }

    pub fn describe(&self) -> alloc::string::String {
        format!(
            "u- = {:?}, u+ = {:?}, a- = {:?}, a+ = {:?}, {:?}",
            self.u_minus, self.u_plus, self.a_minus, self.a_plus, self.classification
        )
    }
}
