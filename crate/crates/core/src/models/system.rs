use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use core::fmt::Debug;
use nalgebra::{DMatrix, DVector};

use super::Poly;
use crate::error::ensure_finite;
use crate::{Error, Result};

/// Whether a system is given in conservation form `u_t + f(u)_x = (b(u)u_x)_x`
/// or in the general quasilinear form `u_t = b(u)u_xx - h(u, u_x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Form {
    Conservation,
    General,
}

/// A quasilinear parabolic system of dimension `n`.
///
/// Derivative methods have finite-difference defaults so a user system only
/// has to supply values; the catalog models override them analytically.
pub trait ParabolicSystem: Debug + Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn form(&self) -> Form;
    /// Declared smoothness index `k >= 2`.
    fn regularity(&self) -> usize {
        4
    }

    fn viscosity(&self, u: &[f64]) -> DMatrix<f64>;

    /// Flux `f(u)`; identically zero for general-form systems.
    fn flux(&self, u: &[f64]) -> DVector<f64> {
        DVector::zeros(u.len())
    }

    /// General-form source `h(u, u_x)`. The default assembles
    /// `df(u)u_x - (db(u)u_x)u_x` for conservation-form systems.
    fn source(&self, u: &[f64], ux: &[f64]) -> DVector<f64> {
        let ux_v = DVector::from_column_slice(ux);
        &self.flux_jacobian(u) * &ux_v - self.viscosity_derivative(u, ux) * ux_v
    }

    /// `df(u)`.
    fn flux_jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        fd_jacobian(u, |x| self.flux(x))
    }

    /// Directional derivative `db(u)[v]`.
    fn viscosity_derivative(&self, u: &[f64], v: &[f64]) -> DMatrix<f64> {
        let s = fd_step(u);
        let up: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + s * b).collect();
        let um: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - s * b).collect();
        (self.viscosity(&up) - self.viscosity(&um)) / (2.0 * s)
    }

    /// Second directional derivative `d²b(u)[v, w]`.
    fn viscosity_second_derivative(&self, u: &[f64], v: &[f64], w: &[f64]) -> DMatrix<f64> {
        let s = fd_step(u).sqrt() * 1e-2;
        let up: Vec<f64> = u.iter().zip(w).map(|(a, b)| a + s * b).collect();
        let um: Vec<f64> = u.iter().zip(w).map(|(a, b)| a - s * b).collect();
        (self.viscosity_derivative(&up, v) - self.viscosity_derivative(&um, v)) / (2.0 * s)
    }

    /// `h_u(u, u_x)`.
    fn source_du(&self, u: &[f64], ux: &[f64]) -> DMatrix<f64> {
        fd_jacobian(u, |x| self.source(x, ux))
    }

    /// `h_{u_x}(u, u_x)`.
    fn source_dux(&self, u: &[f64], ux: &[f64]) -> DMatrix<f64> {
        fd_jacobian(ux, |p| self.source(u, p))
    }
}

fn fd_step(u: &[f64]) -> f64 {
    let scale = u.iter().fold(1.0_f64, |a, b| a.max(b.abs()));
    6e-6 * scale
}

fn fd_jacobian(u: &[f64], f: impl Fn(&[f64]) -> DVector<f64>) -> DMatrix<f64> {
    let n = u.len();
    let s = fd_step(u);
    let m = f(u).len();
    let mut j = DMatrix::zeros(m, n);
    let mut x = u.to_vec();
    for k in 0..n {
        x[k] = u[k] + s;
        let fp = f(&x);
        x[k] = u[k] - s;
        let fm = f(&x);
        x[k] = u[k];
        j.set_column(k, &((fp - fm) / (2.0 * s)));
    }
    j
}

/// Values and first derivatives of a system at one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub f: Option<DVector<f64>>,
    pub df: Option<DMatrix<f64>>,
    pub b: DMatrix<f64>,
    pub h: Option<DVector<f64>>,
    pub h_u: Option<DMatrix<f64>>,
    pub h_ux: Option<DMatrix<f64>>,
}

/// Evaluates the model data at `u` (and `u_x` where needed).
///
/// General-form systems require `u_x`; for conservation form it is optional
/// and, when given, the source `h` is assembled from `f` and `b`.
pub fn eval(system: &dyn ParabolicSystem, u: &[f64], ux: Option<&[f64]>) -> Result<Evaluation> {
    let n = system.dim();
    if u.len() != n {
        return Err(Error::Dimension { expected: n, got: u.len() });
    }
    ensure_finite(u, "state")?;
    if let Some(p) = ux {
        if p.len() != n {
            return Err(Error::Dimension { expected: n, got: p.len() });
        }
        ensure_finite(p, "state gradient")?;
    }
    let b = system.viscosity(u);
    let (f, df) = match system.form() {
        Form::Conservation => (Some(system.flux(u)), Some(system.flux_jacobian(u))),
        Form::General => {
            if ux.is_none() {
                return Err(Error::InvalidInput(format!(
                    "{} is in general form: u_x is required",
                    system.name()
                )));
            }
            (None, None)
        }
    };
    let (h, h_u, h_ux) = match ux {
        Some(p) => (
            Some(system.source(u, p)),
            Some(system.source_du(u, p)),
            Some(system.source_dux(u, p)),
        ),
        None => (None, None, None),
    };
    let ev = Evaluation { f, df, b, h, h_u, h_ux };
    let mut all: Vec<f64> = ev.b.iter().copied().collect();
    for v in [&ev.f, &ev.h].into_iter().flatten() {
        all.extend(v.iter());
    }
    ensure_finite(&all, "model evaluation")?;
    Ok(ev)
}

/// A system whose flux (or source) and viscosity are polynomials.
///
/// Conservation form: `flux[k]` are polynomials in `u` (n variables).
/// General form: `source[k]` are polynomials in `(u, u_x)` (2n variables).
/// `viscosity` is the row-major `n × n` table of polynomials in `u`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolySystem {
    pub name: String,
    pub n: usize,
    pub form: Form,
    pub flux: Vec<Poly>,
    pub source: Vec<Poly>,
    pub viscosity: Vec<Poly>,
    #[cfg_attr(feature = "serde", serde(skip))]
    dflux: Vec<Vec<Poly>>,
    #[cfg_attr(feature = "serde", serde(skip))]
    dsource: Vec<Vec<Poly>>,
    #[cfg_attr(feature = "serde", serde(skip))]
    dvisc: Vec<Vec<Poly>>,
    #[cfg_attr(feature = "serde", serde(skip))]
    d2visc: Vec<Vec<Vec<Poly>>>,
}

impl PolySystem {
    pub fn conservation(name: &str, flux: Vec<Poly>, viscosity: Vec<Poly>) -> Result<Self> {
        Self::build(name, Form::Conservation, flux, Vec::new(), viscosity)
    }

    pub fn general(name: &str, source: Vec<Poly>, viscosity: Vec<Poly>) -> Result<Self> {
        Self::build(name, Form::General, Vec::new(), source, viscosity)
    }

    fn build(
        name: &str,
        form: Form,
        flux: Vec<Poly>,
        source: Vec<Poly>,
        viscosity: Vec<Poly>,
    ) -> Result<Self> {
        let n = match form {
            Form::Conservation => flux.len(),
            Form::General => source.len(),
        };
        if n == 0 {
            return Err(Error::InvalidInput("system dimension must be positive".into()));
        }
        if viscosity.len() != n * n {
            return Err(Error::Dimension { expected: n * n, got: viscosity.len() });
        }
        let check = |p: &Poly, vars: usize, what: &str| -> Result<()> {
            if p.terms.iter().any(|t| t.1.len() != vars) {
                return Err(Error::InvalidInput(format!(
                    "{what} polynomial terms must have {vars} exponents"
                )));
            }
            Ok(())
        };
        for p in &flux {
            check(p, n, "flux")?;
        }
        for p in &source {
            check(p, 2 * n, "source")?;
        }
        for p in &viscosity {
            check(p, n, "viscosity")?;
        }
        let diff_all = |ps: &[Poly], vars: usize| -> Vec<Vec<Poly>> {
            ps.iter().map(|p| (0..vars).map(|v| if p.terms.is_empty() { Poly::zero() } else { p.derivative(v) }).collect()).collect()
        };
        let dflux = diff_all(&flux, n);
        let dsource = diff_all(&source, 2 * n);
        let dvisc = diff_all(&viscosity, n);
        let d2visc = dvisc.iter().map(|row| diff_all(row, n)).collect();
        Ok(Self {
            name: name.into(),
            n,
            form,
            flux,
            source,
            viscosity,
            dflux,
            dsource,
            dvisc,
            d2visc,
        })
    }

    /// Rebuilds derivative tables (needed after deserialization).
    pub fn rebuilt(self) -> Result<Self> {
        Self::build(&self.name, self.form, self.flux, self.source, self.viscosity)
    }
}

impl ParabolicSystem for PolySystem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn form(&self) -> Form {
        self.form
    }

    fn viscosity(&self, u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.viscosity[i * self.n + j].eval(u))
    }

    fn flux(&self, u: &[f64]) -> DVector<f64> {
        match self.form {
            Form::Conservation => DVector::from_iterator(self.n, self.flux.iter().map(|p| p.eval(u))),
            Form::General => DVector::zeros(self.n),
        }
    }

    fn source(&self, u: &[f64], ux: &[f64]) -> DVector<f64> {
        match self.form {
            Form::Conservation => {
                let p = DVector::from_column_slice(ux);
                &self.flux_jacobian(u) * &p - self.viscosity_derivative(u, ux) * p
            }
            Form::General => {
                let mut x = u.to_vec();
                x.extend_from_slice(ux);
                DVector::from_iterator(self.n, self.source.iter().map(|p| p.eval(&x)))
            }
        }
    }

    fn flux_jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        match self.form {
            Form::Conservation => DMatrix::from_fn(self.n, self.n, |i, j| self.dflux[i][j].eval(u)),
            Form::General => DMatrix::zeros(self.n, self.n),
        }
    }

    fn viscosity_derivative(&self, u: &[f64], v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            let d = &self.dvisc[i * self.n + j];
            (0..self.n).map(|k| d[k].eval(u) * v[k]).sum()
        })
    }

    fn viscosity_second_derivative(&self, u: &[f64], v: &[f64], w: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            let d = &self.d2visc[i * self.n + j];
            let mut s = 0.0;
            for k in 0..self.n {
                for l in 0..self.n {
                    s += d[k][l].eval(u) * v[k] * w[l];
                }
            }
            s
        })
    }

    fn source_du(&self, u: &[f64], ux: &[f64]) -> DMatrix<f64> {
        match self.form {
            Form::Conservation => {
                // h = df(u) p - (db(u)p) p ; derivative in u along e_k
                let n = self.n;
                let mut m = DMatrix::zeros(n, n);
                for k in 0..n {
                    let col: DVector<f64> = DVector::from_iterator(
                        n,
                        (0..n).map(|i| {
                            let d2f: f64 = (0..n).map(|j| self.dflux[i][j].derivative(k).eval(u) * ux[j]).sum();
                            let mut e = vec![0.0; n];
                            e[k] = 1.0;
                            let bb = self.viscosity_second_derivative(u, ux, &e);
                            let corr: f64 = (0..n).map(|j| bb[(i, j)] * ux[j]).sum();
                            d2f - corr
                        }),
                    );
                    m.set_column(k, &col);
                }
                m
            }
            Form::General => {
                let mut x = u.to_vec();
                x.extend_from_slice(ux);
                DMatrix::from_fn(self.n, self.n, |i, j| self.dsource[i][j].eval(&x))
            }
        }
    }

    fn source_dux(&self, u: &[f64], ux: &[f64]) -> DMatrix<f64> {
        match self.form {
            Form::Conservation => {
                let n = self.n;
                let p = DVector::from_column_slice(ux);
                let mut m = self.flux_jacobian(u) - self.viscosity_derivative(u, ux);
                for k in 0..n {
                    let mut e = vec![0.0; n];
                    e[k] = 1.0;
                    let col = self.viscosity_derivative(u, &e) * &p;
                    for i in 0..n {
                        m[(i, k)] -= col[i];
                    }
                }
                m
            }
            Form::General => {
                let mut x = u.to_vec();
                x.extend_from_slice(ux);
                DMatrix::from_fn(self.n, self.n, |i, j| self.dsource[i][self.n + j].eval(&x))
            }
        }
    }
}
