use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::Grid;

/// Local Lagrange interpolation of node-major data (`n` components) at `x`.
///
/// Uses `points` nodes centred on `x`; outside the grid the values are held
/// at `left`/`right` (the end states) when given, else clamped.
pub fn interpolate(
    grid: &Grid,
    values: &[f64],
    n: usize,
    x: f64,
    points: usize,
    ends: Option<(&[f64], &[f64])>,
) -> Vec<f64> {
    let m = grid.len();
    let x0 = grid.x(0);
    let xl = grid.x(m - 1);
    if x < x0 || x > xl {
        if let Some((l, r)) = ends {
            return if x < x0 { l.to_vec() } else { r.to_vec() };
        }
    }
    let h = grid.spacing();
    let pos = ((x - x0) / h).clamp(0.0, (m - 1) as f64);
    let p = points.min(m);
    let start = (pos.floor() as isize - (p as isize - 1) / 2).clamp(0, (m - p) as isize) as usize;
    let mut out = alloc::vec![0.0; n];
    for a in 0..p {
        let mut w = 1.0;
        for b in 0..p {
            if a != b {
                w *= (pos - (start + b) as f64) / (a as f64 - b as f64);
            }
        }
        for k in 0..n {
            out[k] += w * values[(start + a) * n + k];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials_and_nodes() {
        let g = Grid::new(2.0, 41).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|x| x * x * x - x).collect();
        for x in [-1.93, -0.3, 0.0, 1.2345, 1.99] {
            let y = interpolate(&g, &v, 1, x, 6, None)[0];
            assert!((y - (x * x * x - x)).abs() < 1e-12);
        }
        assert!((interpolate(&g, &v, 1, g.x(7), 6, None)[0] - v[7]).abs() < 1e-14);
        assert_eq!(interpolate(&g, &v, 1, 5.0, 6, Some((&[1.0], &[-1.0])))[0], -1.0);
    }
}
