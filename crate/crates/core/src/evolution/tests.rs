use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use std::time::Instant;

use super::*;
use crate::manifold::{ManifoldMap, ManifoldParams};
use crate::models::{burgers, quadratic_pulse, CatalogEntry, EndStates};
use crate::numerics::Grid;
use crate::profile::{solve_profile, ProfileOptions};
use crate::spectral::{assemble_l, eigenpair_near, unstable_spectrum, SpectralOptions};
use crate::templates::TemplateParams;

extern crate std;

fn setup(entry: &CatalogEntry, x: f64, m: usize) -> (ShockProfile, DiscretizedOperator) {
    let grid = Grid::new(x, m).unwrap();
    let es = EndStates::new(&entry.system, &entry.u_minus, &entry.u_plus).unwrap();
    let p = solve_profile(&entry.system, &es, &grid, &entry.phase, &ProfileOptions::with_guess(entry.guess.clone()))
        .unwrap();
    let op = assemble_l(Arc::new(entry.system.clone()), &p).unwrap();
    (p, op)
}

#[test]
fn zero_data_stays_zero() {
    let (_, op) = setup(&burgers(), 20.0, 201);
    let tr = evolve(&op, &vec![0.0; op.len()], &EvolveOptions::new(2.0, 0.05, 10)).unwrap();
    assert_eq!(tr.len(), 5);
    assert!(tr.snapshots.iter().flatten().all(|&x| x == 0.0));
    assert!(tr.divergence.is_none());
    let d = damping_monitor(&tr).unwrap();
    assert_eq!(d.max_violation, 0.0);
}

#[test]
fn translate_is_nearly_stationary() {
    let (p, op) = setup(&burgers(), 20.0, 401);
    let v0 = InitialData::Translate { shift: 0.3 }.sample(&op, &p);
    let tr = evolve(&op, &v0, &EvolveOptions::new(5.0, 0.05, 20)).unwrap();
    let last = tr.snapshots.last().unwrap();
    let diff: Vec<f64> = last.iter().zip(&v0).map(|(a, b)| a - b).collect();
    assert!(op.l2(&diff) < 1e-3 * op.l2(&v0), "{}", op.l2(&diff));
    let track = track_phase(&tr, &op, &p, &PhaseOptions::default()).unwrap();
    for (a, ad) in track.alpha.iter().zip(&track.alpha_dot) {
        assert!((a - 0.3).abs() < 1e-4, "{a}");
        assert!(ad.abs() < 1e-4);
    }
}

#[test]
fn exact_translate_phase() {
    let (p, op) = setup(&quadratic_pulse(), 20.0, 401);
    let xs = op.grid().nodes();
    for a in [-0.7, 0.0, 0.25, 1.1] {
        let v = InitialData::Translate { shift: a }.sample(&op, &p);
        let u = phase::full_state(&op, &p, &v);
        let got = phase::least_squares_phase(&p, &xs, &u, 0.0, 3.0, &PhaseOptions::default()).unwrap();
        assert!((got - a).abs() < 1e-8, "{a} {got}");
    }
}

#[test]
fn conservation_defect_is_small() {
    let (p, op) = setup(&burgers(), 30.0, 601);
    let v0 = InitialData::Gaussian { amplitude: 0.1, center: -3.0, width: 2.0 }.sample(&op, &p);
    let tr = evolve(&op, &v0, &EvolveOptions::new(5.0, 0.05, 10)).unwrap();
    for d in &tr.conservation_defect {
        assert!(d[0].abs() < 1e-10, "{}", d[0]);
    }
    // mass itself is conserved while the data stays inside the domain
    assert!((tr.mass.last().unwrap()[0] - tr.mass[0][0]).abs() < 1e-8);
}

#[test]
fn fit_exponent_examples() {
    let t: Vec<f64> = (0..200).map(|k| 5.0 + k as f64 * 0.5).collect();
    let y: Vec<f64> = t.iter().map(|t| (1.0 + t).powf(-0.5)).collect();
    let f = fit_exponent(&t, &y, FitWindow::all(), 7).unwrap();
    assert!((f.slope + 0.5).abs() < 1e-6);
    assert!(f.ci.0 <= f.slope + 1e-9 && f.slope - 1e-9 <= f.ci.1);
    let heat: Vec<f64> = t.iter().map(|t| 1.0 / (4.0 * core::f64::consts::PI * (1.0 + t)).sqrt()).collect();
    assert!((fit_exponent(&t, &heat, FitWindow::all(), 7).unwrap().slope + 0.5).abs() < 1e-9);
    let c = vec![3.0; t.len()];
    assert!(fit_exponent(&t, &c, FitWindow::all(), 7).unwrap().slope.abs() < 1e-12);
    let mut bad = y.clone();
    bad[10] = 0.0;
    assert!(matches!(fit_exponent(&t, &bad, FitWindow::all(), 7), Err(Error::Domain(_))));
    let g: Vec<f64> = t.iter().map(|t| 1e-4 * (1.25 * t).exp()).collect();
    assert!((fit_growth_rate(&t, &g, FitWindow::new(5.0, 10.0), 1).unwrap().slope - 1.25).abs() < 1e-9);
    // same seed, same interval
    assert_eq!(fit_exponent(&t, &y, FitWindow::new(10.0, 50.0), 3), fit_exponent(&t, &y, FitWindow::new(10.0, 50.0), 3));
}

#[test]
fn decomposition_identities() {
    let (p, op) = setup(&quadratic_pulse(), 20.0, 401);
    let spec = unstable_spectrum(&op, &SpectralOptions::default()).unwrap();
    let phi1 = spec.synthesize(&[Complex::new(1.0, 0.0)]);
    let d = decompose(&phi1, &spec).unwrap();
    assert!(op.l2(&d.w) < 1e-10 * op.l2(&phi1));
    let v = InitialData::Gaussian { amplitude: 0.2, center: 1.0, width: 1.5 }.sample(&op, &p);
    let d = decompose(&v, &spec).unwrap();
    let sum: Vec<f64> = d.w.iter().zip(&d.z_field).map(|(a, b)| a + b).collect();
    assert!(sum.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-14));
    let lhs = op.dot(&v, &v);
    let rhs = op.dot(&d.w, &d.w) + 2.0 * op.dot(&d.w, &d.z_field) + op.dot(&d.z_field, &d.z_field);
    assert!((lhs - rhs).abs() < 1e-12 * lhs);
    // w is annihilated by the dual modes
    assert!(spec.coordinates(&d.w)[0].norm() < 1e-12);
}

#[test]
fn limiting_phase_for_burgers() {
    let (p, op) = setup(&burgers(), 20.0, 201);
    assert!((limiting_phase(&op, &p, &[0.8]).unwrap() - 0.4).abs() < 1e-12);
}

#[test]
fn kernel_phase_recovers_burgers_l() {
    let (p, op) = setup(&burgers(), 60.0, 1201);
    let params = TemplateParams::from_end_states(&burgers().system, &p.end_states).unwrap();
    let v0 = InitialData::AlgebraicTail { amplitude: 0.05, taper: 15.0 }.sample(&op, &p);
    let tr = evolve(&op, &v0, &EvolveOptions::new(30.0, 0.05, 10)).unwrap();
    let track = track_phase(&tr, &op, &p, &PhaseOptions::default()).unwrap();
    let sh = reframe(&tr, &op, &p, &track).unwrap();
    let k = kernel_phase(&sh, &op, &params, 4).unwrap();
    assert!((k.l_scale + 0.5).abs() < 0.05, "{}", k.l_scale);
    let spread = track.alpha.last().unwrap() - track.alpha[0];
    assert!(k.rms < 0.1 * spread.abs(), "{} {}", k.rms, spread);
    // all mass has reached the shock: the phase settles at mass/2
    let ainf = limiting_phase(&op, &p, &tr.mass[0]).unwrap();
    assert!((track.alpha.last().unwrap() - ainf).abs() < 0.02 * ainf);
}

#[test]
fn monitors_on_zero_and_small_data() {
    let (p, op) = setup(&burgers(), 40.0, 401);
    let params = TemplateParams::from_end_states(&burgers().system, &p.end_states).unwrap();
    let zero = evolve(&op, &vec![0.0; op.len()], &EvolveOptions::new(2.0, 0.1, 5)).unwrap();
    let track = track_phase(&zero, &op, &p, &PhaseOptions::default()).unwrap();
    let sh = reframe(&zero, &op, &p, &track).unwrap();
    let z = zeta_monitor(&sh, &op, None, &params).unwrap();
    assert!(z.zeta.iter().all(|&x| x < 1e-9));
    assert!(template_ratio_series(&sh, &op, &params).unwrap().iter().all(|&x| x < 1e-9));

    let v0 = InitialData::AlgebraicTail { amplitude: 0.01, taper: 10.0 }.sample(&op, &p);
    let tr = evolve(&op, &v0, &EvolveOptions::new(10.0, 0.05, 4)).unwrap();
    let track = track_phase(&tr, &op, &p, &PhaseOptions::default()).unwrap();
    let sh = reframe(&tr, &op, &p, &track).unwrap();
    let z = zeta_monitor(&sh, &op, None, &params).unwrap();
    assert!(z.zeta.windows(2).all(|w| w[0] <= w[1]));
    assert!(z.violation.is_none());
    let d = damping_monitor(&sh).unwrap();
    assert!(d.c <= 1e6 && d.max_violation <= 1e-9, "{d:?}");
    let w = weighted_monitor(&sh);
    assert!(w.finite && w.max > 0.0);
}

#[test]
fn pulse_dichotomy() {
    let (_, op) = setup(&quadratic_pulse(), 20.0, 401);
    let spec = unstable_spectrum(&op, &SpectralOptions::default()).unwrap();
    let mut params = ManifoldParams::from_spectrum(&spec, 0.2, 0.05).unwrap();
    params.horizon = 40.0;
    let map = ManifoldMap::new(&op, &spec, params).unwrap();
    let e = eigenpair_near(&op, Complex::new(-0.75, 0.0)).unwrap();
    let s: Vec<f64> = e.right.iter().map(|c| c.re).collect();
    let n = op.h2(&s);
    let w0: Vec<f64> = s.iter().map(|x| 1e-2 * x / n).collect();
    let t0 = Instant::now();
    let r = conditional_run(&map, &w0, 10.0, 2.0).unwrap();
    assert!(r.stays_within(2.0), "{}", r.max_ratio);
    assert!(r.corrections.windows(2).all(|w| w[1] < w[0]));
    let e = escape_run(&map, &w0, 1e-4, 20.0, 1).unwrap();
    assert!(e.escape_time.is_some());
    assert!((e.rate.slope - 1.25).abs() < 0.05, "{:?}", e.rate);
    std::println!("pulse dichotomy {:?}", t0.elapsed());
    // w₀ = 0 stays at rest
    let r = conditional_run(&map, &vec![0.0; op.len()], 2.0, 1.0).unwrap();
    assert!(r.samples.iter().all(|s| s.v == 0.0));
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
    #[test]
    fn fitted_power_laws(p in -2.0f64..1.0, c in 0.1f64..10.0, seed in 0u64..1000) {
        let t: Vec<f64> = (0..50).map(|k| 5.0 + k as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| c * (1.0 + t).powf(p)).collect();
        let f = fit_exponent(&t, &y, FitWindow::new(5.0, 60.0), seed).unwrap();
        proptest::prop_assert!((f.slope - p).abs() < 1e-9);
        proptest::prop_assert!(f.ci.0 <= f.ci.1);
    }

    #[test]
    fn derivative_is_exact_on_quadratics(a in -1.0f64..1.0, b in -1.0f64..1.0, gaps in proptest::collection::vec(0.1f64..1.0, 3..12)) {
        let mut t = vec![0.0];
        for g in &gaps {
            t.push(t.last().unwrap() + g);
        }
        let y: Vec<f64> = t.iter().map(|t| a * t * t + b * t).collect();
        for (d, t) in phase::differentiate(&t, &y).iter().zip(&t) {
            proptest::prop_assert!((d - (2.0 * a * t + b)).abs() < 1e-9);
        }
    }
}
