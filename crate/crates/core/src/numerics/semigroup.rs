use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use super::{expm, expm_action};
use crate::linalg::BandMatrix;
use crate::{Complex, Error, Result};

/// Invariant splitting data: `Π_u = V Y` with `Y = h·leftᵀ` and `L V = V Λ`.
#[derive(Clone, Copy, Debug)]
pub struct UnstablePart<'a> {
    pub right: &'a DMatrix<Complex>,
    pub left: &'a DMatrix<Complex>,
    pub lambda: &'a DMatrix<Complex>,
    pub weight: f64,
}

impl UnstablePart<'_> {
    fn coordinates(&self, f: &[f64]) -> DVector<Complex> {
        let fc = DVector::from_iterator(f.len(), f.iter().map(|v| Complex::new(*v, 0.0)));
        self.left.transpose() * fc * Complex::new(self.weight, 0.0)
    }

    fn synthesize(&self, c: &DVector<Complex>) -> Vec<f64> {
        (self.right * c).iter().map(|v| v.re).collect()
    }

    pub fn project(&self, f: &[f64]) -> Vec<f64> {
        self.synthesize(&self.coordinates(f))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemigroupProjection {
    /// `e^{tL}Π_u f = V e^{tΛ} Y f`, defined for every real `t`.
    Unstable,
    /// `e^{tL}Π_cs f`, `t ≥ 0` only.
    CenterStable,
}

const DENSE_LIMIT: usize = 256;

fn exp_apply(l: &BandMatrix<f64>, t: f64, f: &[f64]) -> Result<Vec<f64>> {
    if l.dim() <= DENSE_LIMIT {
        let e = expm(&(l.to_dense() * t))?;
        Ok((e * DVector::from_column_slice(f)).as_slice().to_vec())
    } else {
        expm_action(l, t, f)
    }
}

/// `e^{tL} f`, optionally composed with a spectral projection.
pub fn semigroup_apply(
    l: &BandMatrix<f64>,
    t: f64,
    f: &[f64],
    projection: Option<(UnstablePart<'_>, SemigroupProjection)>,
) -> Result<Vec<f64>> {
    if f.len() != l.dim() {
        return Err(Error::Dimension { expected: l.dim(), got: f.len() });
    }
    match projection {
        None => {
            if t < 0.0 {
                return Err(Error::Contract("backward semigroup needs the unstable projection".into()));
            }
            exp_apply(l, t, f)
        }
        Some((part, SemigroupProjection::Unstable)) => {
            let c = part.coordinates(f);
            let e = expm(&(part.lambda * Complex::new(t, 0.0)))?;
            Ok(part.synthesize(&(e * c)))
        }
        Some((part, SemigroupProjection::CenterStable)) => {
            if t < 0.0 {
                return Err(Error::Contract("backward semigroup needs the unstable projection".into()));
            }
            let pu = part.project(f);
            let cs: Vec<f64> = f.iter().zip(&pu).map(|(a, b)| a - b).collect();
            let out = exp_apply(l, t, &cs)?;
            // remove roundoff that leaked into the unstable subspace
            let leak = part.project(&out);
            Ok(out.iter().zip(&leak).map(|(a, b)| a - b).collect())
        }
    }
}
