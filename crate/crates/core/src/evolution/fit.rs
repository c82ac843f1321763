use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Closed time window `[start, end]` for a fit.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitWindow {
    pub start: f64,
    pub end: f64,
}

impl FitWindow {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn all() -> Self {
        Self { start: f64::NEG_INFINITY, end: f64::INFINITY }
    }

    fn contains(&self, t: f64) -> bool {
        self.start <= t && t <= self.end
    }
}

/// Least-squares slope with a percentile bootstrap interval.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% bootstrap interval for the slope.
    pub ci: (f64, f64),
    pub points: usize,
    pub window: FitWindow,
    pub seed: u64,
}

fn regression(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

const RESAMPLES: usize = 400;

fn fit_transformed(
    t: &[f64],
    y: &[f64],
    window: FitWindow,
    seed: u64,
    abscissa: impl Fn(f64) -> f64,
) -> Result<ExponentFit> {
    if t.len() != y.len() {
        return Err(Error::Dimension { expected: t.len(), got: y.len() });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&ti, &yi) in t.iter().zip(y) {
        if !window.contains(ti) {
            continue;
        }
        if !(yi > 0.0 && yi.is_finite()) {
            return Err(Error::Domain(format!("series value {yi} at t = {ti} is not positive")));
        }
        xs.push(abscissa(ti));
        ys.push(Float::ln(yi));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidInput(format!("{} points in the fit window, need 3", xs.len())));
    }
    let (slope, intercept) = regression(&xs, &ys);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = xs.len();
    let mut slopes = Vec::with_capacity(RESAMPLES);
    let (mut bx, mut by) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..RESAMPLES {
        bx.clear();
        by.clear();
        for _ in 0..n {
            let i = rng.random_range(0..n);
            bx.push(xs[i]);
            by.push(ys[i]);
        }
        slopes.push(regression(&bx, &by).0);
    }
    slopes.sort_by(|a, b| a.total_cmp(b));
    let q = |p: f64| slopes[((p * (RESAMPLES - 1) as f64).round() as usize).min(RESAMPLES - 1)];
    Ok(ExponentFit { slope, intercept, ci: (q(0.025), q(0.975)), points: n, window, seed })
}

/// Slope of `log y` against `log(1+t)`; `y = (1+t)^{-1/2}` gives `-0.5`.
pub fn fit_exponent(t: &[f64], y: &[f64], window: FitWindow, seed: u64) -> Result<ExponentFit> {
    fit_transformed(t, y, window, seed, |t| Float::ln(1.0 + t))
}

/// Slope of `log y` against `t` (exponential rate).
pub fn fit_growth_rate(t: &[f64], y: &[f64], window: FitWindow, seed: u64) -> Result<ExponentFit> {
    fit_transformed(t, y, window, seed, |t| t)
}
