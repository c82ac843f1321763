use alloc::sync::Arc;
use alloc::vec::Vec;
use std::time::Instant;

use super::*;
use crate::models::{burgers, quadratic_pulse, CatalogEntry, EndStates};
use crate::numerics::Grid;
use crate::profile::{solve_profile, ProfileOptions};
use crate::spectral::{assemble_l, eigenpair_near, unstable_spectrum, SpectralOptions};

extern crate std;

fn operator(entry: &CatalogEntry, x: f64, m: usize) -> DiscretizedOperator {
    let grid = Grid::new(x, m).unwrap();
    let es = EndStates::new(&entry.system, &entry.u_minus, &entry.u_plus).unwrap();
    let p = solve_profile(&entry.system, &es, &grid, &entry.phase, &ProfileOptions::with_guess(entry.guess.clone()))
        .unwrap();
    assemble_l(Arc::new(entry.system.clone()), &p).unwrap()
}

fn pulse() -> (DiscretizedOperator, SpectralDecomposition) {
    let op = operator(&quadratic_pulse(), 20.0, 401);
    let s = unstable_spectrum(&op, &SpectralOptions::default()).unwrap();
    (op, s)
}

fn params(spec: &SpectralDecomposition, delta: f64) -> ManifoldParams {
    let mut p = ManifoldParams::from_spectrum(spec, delta, 0.05).unwrap();
    p.horizon = 40.0;
    p
}

/// Stable eigenfunction at `λ = -3/4`, normalized to unit `H²` norm.
fn stable_mode(op: &DiscretizedOperator) -> Vec<f64> {
    let e = eigenpair_near(op, Complex::new(-0.75, 0.0)).unwrap();
    assert!((e.value.re + 0.75).abs() < 1e-2, "{}", e.value);
    let v: Vec<f64> = e.right.iter().map(|c| c.re).collect();
    let n = op.h2(&v);
    v.iter().map(|x| x / n).collect()
}

#[test]
fn cutoff_is_a_smooth_step() {
    assert_eq!(cutoff(0.0), 1.0);
    assert_eq!(cutoff(1.0), 1.0);
    assert_eq!(cutoff(2.0), 0.0);
    assert_eq!(cutoff(7.0), 0.0);
    assert!((cutoff(1.5) - 0.5).abs() < 1e-15);
    let mut prev = 1.0;
    for k in 1..200 {
        let r = 1.0 + k as f64 / 200.0;
        let c = cutoff(r);
        assert!(c <= prev && (0.0..=1.0).contains(&c));
        assert!((c + cutoff(3.0 - r) - 1.0).abs() < 1e-14);
        prev = c;
    }
    // flat at the joins
    assert!(1.0 - cutoff(1.01) < 1e-20);
    assert!(cutoff(1.99) < 1e-20);
}

#[test]
fn params_validation() {
    let (_, spec) = pulse();
    let p = ManifoldParams::from_spectrum(&spec, 0.1, 0.05).unwrap();
    assert!((p.beta - 0.625).abs() < 1e-2);
    assert!((p.omega - p.beta / 8.0).abs() < 1e-15);
    p.validate().unwrap();
    let short = ManifoldParams { horizon: 5.0, ..p.clone() };
    assert!(matches!(short.validate(), Err(Error::HorizonTooShort { .. })));
    let bad = ManifoldParams { eta: p.beta * 1.1, ..p.clone() };
    assert!(matches!(bad.validate(), Err(Error::InvalidInput(_))));
    let bad = ManifoldParams { delta: -1.0, ..p };
    assert!(bad.validate().is_err());
}

#[test]
fn stable_model_has_no_manifold() {
    let op = operator(&burgers(), 20.0, 201);
    let s = unstable_spectrum(&op, &SpectralOptions::default()).unwrap();
    assert!(ManifoldParams::from_spectrum(&s, 0.1, 0.05).is_err());
}

#[test]
fn tail_integral_of_constant_forcing() {
    let (op, spec) = pulse();
    let map = ManifoldMap::new(&op, &spec, params(&spec, 0.1)).unwrap();
    let steps = map.params().steps();
    let g = vec![vec![Complex::new(1.0, 0.0)]; steps + 1];
    let c = map.apply_tail_integral(&g).unwrap();
    let lam = spec.lambda[(0, 0)];
    let tt = map.params().horizon;
    for (k, ck) in c.iter().enumerate() {
        let t = k as f64 * map.params().dt;
        let exact = -(Complex::new(1.0, 0.0) - (-lam * (tt - t)).exp()) / lam;
        assert!((ck[0] - exact).norm() < 1e-12, "k={k} {} vs {}", ck[0], exact);
    }
    // linear forcing is also integrated exactly
    let g: Vec<Vec<Complex>> = (0..=steps).map(|k| vec![Complex::new(k as f64 * 0.05, 0.0)]).collect();
    let c = map.apply_tail_integral(&g).unwrap();
    let exact0 = {
        // -∫_0^T e^{-λs} s ds
        let e = (-lam * tt).exp();
        -((Complex::new(1.0, 0.0) - e) / (lam * lam) - e * tt / lam)
    };
    assert!((c[0][0] - exact0).norm() < 1e-10);
}

#[test]
fn zero_is_a_fixed_point() {
    let (op, spec) = pulse();
    let map = ManifoldMap::new(&op, &spec, params(&spec, 0.1)).unwrap();
    let fp = map.evaluate(&vec![0.0; op.len()]).unwrap();
    assert!(fp.iterations <= 2);
    assert_eq!(op.h2(&fp.phi_field), 0.0);
}

#[test]
fn tangency_and_contraction() {
    let (op, spec) = pulse();
    let psi = stable_mode(&op);
    let t0 = Instant::now();
    let delta = 0.2;
    let map = ManifoldMap::new(&op, &spec, params(&spec, delta)).unwrap();
    let eps = [0.0125, 0.025, 0.05];
    let norms: Vec<f64> = eps
        .iter()
        .map(|e| {
            let w: Vec<f64> = psi.iter().map(|x| e * x).collect();
            let fp = map.evaluate(&w).unwrap();
            assert!(fp.contraction < 1.0);
            op.h2(&fp.phi_field)
        })
        .collect();
    let slope = (norms[2].ln() - norms[0].ln()) / (eps[2].ln() - eps[0].ln());
    assert!((slope - 2.0).abs() < 0.1, "tangency slope {slope} {norms:?}");
    std::eprintln!("tangency {:?}", t0.elapsed());

    // contraction factor scales with δ, measured at |w₀| = δ/2
    let factor = |delta: f64| {
        let map = ManifoldMap::new(&op, &spec, params(&spec, delta)).unwrap();
        let w: Vec<f64> = psi.iter().map(|x| 0.5 * delta * x).collect();
        map.evaluate(&w).unwrap().contraction
    };
    let (a, b) = (factor(0.05), factor(0.1));
    assert!(a > 0.0 && a < 1.0 && b < 1.0);
    let r = b / a;
    assert!((r - 2.0).abs() < 0.8, "contraction {a} {b}");
}

#[test]
fn reflection_symmetry() {
    let (op, spec) = pulse();
    let map = ManifoldMap::new(&op, &spec, params(&spec, 0.2)).unwrap();
    let n = op.len();
    let w: Vec<f64> = (0..n)
        .map(|i| {
            let x = op.grid().x(i + 1);
            0.05 * (-(x - 1.5) * (x - 1.5) / 2.0).exp()
        })
        .collect();
    let w = map.project_cs(&w);
    let r: Vec<f64> = w.iter().rev().cloned().collect();
    let a = map.evaluate(&w).unwrap();
    let b = map.evaluate(&r).unwrap();
    let rb: Vec<f64> = b.phi_field.iter().rev().cloned().collect();
    let d: Vec<f64> = a.phi_field.iter().zip(&rb).map(|(x, y)| x - y).collect();
    assert!(op.h2(&d) <= 1e-8 * op.h2(&a.phi_field).max(1e-12));
    let lip = lipschitz_certificate(&map, &[(w.clone(), r), (w.clone(), w)]).unwrap();
    assert_eq!(lip.pairs, 1);
    assert!(lip.constant < 1e-6);
}

#[test]
fn invariance_defect_shrinks_under_refinement() {
    let entry = quadratic_pulse();
    let mut defects = Vec::new();
    for (m, dt) in [(201, 0.1), (401, 0.05)] {
        let op = operator(&entry, 20.0, m);
        let spec = unstable_spectrum(&op, &SpectralOptions::default()).unwrap();
        let mut p = ManifoldParams::from_spectrum(&spec, 0.2, dt).unwrap();
        p.horizon = 40.0;
        let map = ManifoldMap::new(&op, &spec, p).unwrap();
        let w: Vec<f64> = stable_mode(&op).iter().map(|x| 0.05 * x).collect();
        let d = map.invariance_defect(&w, 1.0).unwrap();
        defects.push(d.defect / d.z_norm.max(1e-300));
    }
    assert!(defects[1] < defects[0], "{defects:?}");
}

#[test]
fn cache_round_trip_and_merge() {
    let a = [0.1, -0.2, 0.3];
    let b = [0.1, -0.2, 0.30000000000000004];
    assert_ne!(checksum(&a), checksum(&b));
    let mut c1 = ManifoldCache::default();
    c1.insert(&a, &[Complex::new(1.0, 2.0)]);
    let mut c2 = ManifoldCache::default();
    c2.insert(&b, &[Complex::new(3.0, 0.0)]);
    c1.merge(c2);
    assert_eq!(c1.entries.len(), 2);
    assert_eq!(c1.get(&a).unwrap()[0], Complex::new(1.0, 2.0));
    assert_eq!(c1.get(&b).unwrap()[0], Complex::new(3.0, 0.0));
    assert!(c1.get(&[0.0]).is_none());
}

#[test]
fn reduced_rhs_at_rest_and_breakdown() {
    let op = operator(&quadratic_pulse(), 20.0, 201);
    let r = reduced_rhs(&op, &vec![0.0; op.len()]).unwrap();
    assert_eq!(r.alpha_dot, 0.0);
    assert!(r.v_dot.iter().all(|v| *v == 0.0));
    assert_eq!(r.denominator, 1.0);
    // v = -2ū has v_x = -2ū_x, pushing the frame denominator to -1
    let v: Vec<f64> = op.base().iter().map(|x| -2.0 * x).collect();
    assert!(matches!(reduced_rhs(&op, &v), Err(Error::FrameBreakdown(_))));
    // a small perturbation gets a finite phase speed and a v̇ orthogonal to ū_x
    let v: Vec<f64> = op.zero_mode().iter().map(|x| 0.01 * x * x).collect();
    let r = reduced_rhs(&op, &v).unwrap();
    assert!(r.alpha_dot.is_finite());
    assert!(op.dot(op.zero_mode(), &r.v_dot).abs() < 1e-12);
}
