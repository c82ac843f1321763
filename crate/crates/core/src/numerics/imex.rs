use alloc::vec::Vec;

use crate::error::ensure_finite;
use crate::linalg::{BandLu, BandMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ImexScheme {
    /// Backward/forward Euler, first order.
    Euler,
    /// Ascher–Ruuth–Spiteri (2,2,2), second order, L-stable implicit part.
    Ars222,
}

impl ImexScheme {
    fn gamma(self) -> f64 {
        match self {
            ImexScheme::Euler => 1.0,
            ImexScheme::Ars222 => 1.0 - core::f64::consts::FRAC_1_SQRT_2,
        }
    }

    pub fn order(self) -> usize {
        match self {
            ImexScheme::Euler => 1,
            ImexScheme::Ars222 => 2,
        }
    }
}

/// IMEX integrator for `u' = A u + E(t, u)` with a fixed band matrix `A`
/// treated implicitly. The factorization of `I - γ dt A` is reused.
#[derive(Clone, Debug)]
pub struct ImexStepper {
    scheme: ImexScheme,
    dt: f64,
    a: BandMatrix<f64>,
    lu: BandLu<f64>,
}

impl ImexStepper {
    pub fn new(a: BandMatrix<f64>, dt: f64, scheme: ImexScheme) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput("time step must be positive".into()));
        }
        let mut m = a.clone();
        m.scale(-scheme.gamma() * dt);
        m.add_identity(1.0);
        let lu = m.factor()?;
        Ok(Self { scheme, dt, a, lu })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> ImexScheme {
        self.scheme
    }

    pub fn linear(&self) -> &BandMatrix<f64> {
        &self.a
    }

    /// Advances one step from time `t`.
    pub fn step<F>(&self, t: f64, u: &[f64], mut explicit: F) -> Result<Vec<f64>>
    where
        F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    {
        let dt = self.dt;
        let out = match self.scheme {
            ImexScheme::Euler => {
                let e = explicit(t, u)?;
                let mut r: Vec<f64> = u.iter().zip(&e).map(|(a, b)| a + dt * b).collect();
                self.lu.solve_in_place(&mut r);
                r
            }
            ImexScheme::Ars222 => {
                let g = self.scheme.gamma();
                let d = 1.0 - 1.0 / (2.0 * g);
                let e1 = explicit(t, u)?;
                let mut u2: Vec<f64> = u.iter().zip(&e1).map(|(a, b)| a + g * dt * b).collect();
                self.lu.solve_in_place(&mut u2);
                let e2 = explicit(t + g * dt, &u2)?;
                let au2 = self.a.matvec(&u2);
                let mut u3: Vec<f64> = (0..u.len())
                    .map(|i| u[i] + dt * ((1.0 - g) * au2[i] + d * e1[i] + (1.0 - d) * e2[i]))
                    .collect();
                self.lu.solve_in_place(&mut u3);
                u3
            }
        };
        ensure_finite(&out, "IMEX step")?;
        Ok(out)
    }
}

/// One IMEX step of `u' = A u + E(t, u)`; factors `A` on every call, so
/// prefer [`ImexStepper`] for repeated steps.
pub fn step_imex<F>(
    a: &BandMatrix<f64>,
    explicit: F,
    t: f64,
    u: &[f64],
    dt: f64,
    scheme: ImexScheme,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    ImexStepper::new(a.clone(), dt, scheme)?.step(t, u, explicit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid;
    use alloc::vec;

    fn heat(grid: &Grid) -> BandMatrix<f64> {
        let n = grid.len() - 2;
        let h2 = grid.spacing().powi(2);
        let mut a = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.set(i, i, -2.0 / h2);
            if i > 0 {
                a.set(i, i - 1, 1.0 / h2);
            }
            if i + 1 < n {
                a.set(i, i + 1, 1.0 / h2);
            }
        }
        a
    }

    #[test]
    fn backward_euler_amplification() {
        let g = Grid::new(core::f64::consts::PI, 201).unwrap();
        let a = heat(&g);
        let xs = g.nodes();
        let u: Vec<f64> = xs[1..200].iter().map(|x| x.sin()).collect();
        let dt = 0.05;
        let h = g.spacing();
        // discrete symbol of the 3-point Laplacian on sin(x)
        let k2 = 4.0 / (h * h) * (h / 2.0).sin().powi(2);
        let s = ImexStepper::new(a, dt, ImexScheme::Euler).unwrap();
        let u1 = s.step(0.0, &u, |_, v| Ok(vec![0.0; v.len()])).unwrap();
        let ratio = u1[49] / u[49];
        assert!((ratio - 1.0 / (1.0 + dt * k2)).abs() < 1e-12);
    }

    #[test]
    fn zero_stays_zero() {
        let g = Grid::new(1.0, 21).unwrap();
        let s = ImexStepper::new(heat(&g), 0.01, ImexScheme::Ars222).unwrap();
        let mut u = vec![0.0; 19];
        for k in 0..10 {
            u = s.step(k as f64 * 0.01, &u, |_, v| Ok(v.iter().map(|x| x * x).collect())).unwrap();
        }
        assert!(u.iter().all(|&v| v == 0.0));
    }

    fn logistic_error(scheme: ImexScheme, dt: f64) -> f64 {
        // u' = -u + u^2 + sin t split as linear -u, explicit u^2 + sin t
        let mut a = BandMatrix::zeros(1, 0, 0);
        a.set(0, 0, -1.0);
        let s = ImexStepper::new(a, dt, scheme).unwrap();
        let steps = (1.0 / dt).round() as usize;
        let mut u = vec![0.3];
        for k in 0..steps {
            u = s.step(k as f64 * dt, &u, |t, v| Ok(vec![v[0] * v[0] + t.sin()])).unwrap();
        }
        let mut r = [0.3];
        let fine = 1e-4;
        let f = |t: f64, v: f64| -v + v * v + t.sin();
        for k in 0..10000 {
            let t = k as f64 * fine;
            let k1 = f(t, r[0]);
            let k2 = f(t + fine / 2.0, r[0] + fine / 2.0 * k1);
            let k3 = f(t + fine / 2.0, r[0] + fine / 2.0 * k2);
            let k4 = f(t + fine, r[0] + fine * k3);
            r[0] += fine / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        (u[0] - r[0]).abs()
    }

    #[test]
    fn observed_orders() {
        let e1 = logistic_error(ImexScheme::Ars222, 0.02);
        let e2 = logistic_error(ImexScheme::Ars222, 0.01);
        assert!((e1 / e2 - 4.0).abs() < 0.4, "ratio {}", e1 / e2);
        let f1 = logistic_error(ImexScheme::Euler, 0.02);
        let f2 = logistic_error(ImexScheme::Euler, 0.01);
        assert!((f1 / f2 - 2.0).abs() < 0.2);
    }
}
