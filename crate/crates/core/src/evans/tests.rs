use alloc::sync::Arc;

use super::*;
use crate::models::{burgers, quadratic_pulse, CatalogEntry, EndStates};
use crate::numerics::Grid;
use crate::profile::{solve_profile, ProfileOptions};
use crate::spectral::{assemble_l, unstable_spectrum, SpectralOptions};

fn solve(entry: &CatalogEntry, m: usize) -> ShockProfile {
    let grid = Grid::new(20.0, m).unwrap();
    let es = EndStates::new(&entry.system, &entry.u_minus, &entry.u_plus).unwrap();
    solve_profile(&entry.system, &es, &grid, &entry.phase, &ProfileOptions::with_guess(entry.guess.clone())).unwrap()
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

#[test]
fn burgers_values() {
    let e = burgers();
    let p = solve(&e, 401);
    let ev = EvansSystem::new(&e.system, &p, EvansOptions::default()).unwrap();
    let scale = ev.eval(c(1.0, 0.0)).unwrap().value.norm();
    assert!(scale > 1e-2);
    assert!(ev.eval(c(0.0, 0.0)).unwrap().value.norm() <= 1e-6 * scale);
    // simple zero: difference quotient at the origin is nonzero
    let d = ev.eval(c(1e-3, 0.0)).unwrap().value.norm() / 1e-3;
    assert!(d > 1e-2 * scale);
}

#[test]
fn pulse_vanishes_at_its_eigenvalue() {
    let e = quadratic_pulse();
    let p = solve(&e, 401);
    let ev = EvansSystem::new(&e.system, &p, EvansOptions::default()).unwrap();
    let scale = ev.eval(c(3.0, 0.0)).unwrap().value.norm();
    assert!(ev.eval(c(1.25, 0.0)).unwrap().value.norm() <= 1e-4 * scale);
}

#[test]
fn reality_symmetry() {
    let e = quadratic_pulse();
    let p = solve(&e, 401);
    let ev = EvansSystem::new(&e.system, &p, EvansOptions::default()).unwrap();
    for l in [c(0.3, 0.7), c(2.0, -1.5), c(0.1, 4.0)] {
        let a = ev.eval(l).unwrap().value;
        let b = ev.eval(l.conj()).unwrap().value;
        assert!((a - b.conj()).norm() <= 1e-10 * a.norm());
    }
}

#[test]
fn windings_and_roots() {
    for (e, expected) in [(burgers(), 0), (quadratic_pulse(), 1)] {
        let p = solve(&e, 801);
        let ev = EvansSystem::new(&e.system, &p, EvansOptions::default()).unwrap();
        let w = winding_number(&ev, Contour::right_half(0.05, 10.0), 64).unwrap();
        assert_eq!(w.winding, expected, "{}", e.name);
        assert!((w.raw - w.winding as f64).abs() < 1e-2);
        let roots = evans_roots(&ev, &w).unwrap();
        assert_eq!(roots.len(), expected as usize);
        let op = assemble_l(Arc::new(e.system.clone()), &p).unwrap();
        let spec = unstable_spectrum(&op, &SpectralOptions { cutoff_re: 0.1, ..Default::default() }).unwrap();
        assert_eq!(spec.p(), roots.len());
        for (r, l) in roots.iter().zip(&spec.eigenvalues) {
            assert!((r - l).norm() < 1e-3, "{r} vs {l}");
        }
        let far = winding_number(&ev, Contour::Rectangle { re: (10.0, 20.0), im: (-10.0, 10.0) }, 32).unwrap();
        assert_eq!(far.winding, 0);
    }
}

#[test]
fn winding_is_additive() {
    let e = quadratic_pulse();
    let p = solve(&e, 401);
    let ev = EvansSystem::new(&e.system, &p, EvansOptions::default()).unwrap();
    let whole = winding_number(&ev, Contour::Rectangle { re: (0.05, 4.0), im: (-2.0, 2.0) }, 48).unwrap();
    let a = winding_number(&ev, Contour::Rectangle { re: (0.05, 2.0), im: (-2.0, 2.0) }, 48).unwrap();
    let b = winding_number(&ev, Contour::Rectangle { re: (2.0, 4.0), im: (-2.0, 2.0) }, 48).unwrap();
    assert_eq!(whole.winding, a.winding + b.winding);
    assert_eq!(whole.winding, 1);
}

#[test]
fn origin_orders() {
    for e in [burgers(), quadratic_pulse()] {
        let p = solve(&e, 401);
        let ev = EvansSystem::new(&e.system, &p, EvansOptions::default()).unwrap();
        assert_eq!(zero_order_at_origin(&ev, 0.1).unwrap().order, 1, "{}", e.name);
        // no root at a shifted center
        let shifted = winding_number(&ev, Contour::Circle { center: (0.5, 0.0), radius: 0.1 }, 32).unwrap();
        assert_eq!(shifted.winding, 0);
    }
}

#[test]
fn contour_through_a_root_is_rejected() {
    let e = quadratic_pulse();
    let p = solve(&e, 401);
    let ev = EvansSystem::new(&e.system, &p, EvansOptions::default()).unwrap();
    let r = winding_number(&ev, Contour::Circle { center: (1.0, 0.0), radius: 0.25 }, 16);
    assert!(matches!(r, Err(Error::ContourTooClose { .. })), "{r:?}");
}

#[test]
fn essential_spectrum_is_rejected() {
    let e = quadratic_pulse();
    let p = solve(&e, 201);
    let ev = EvansSystem::new(&e.system, &p, EvansOptions::default()).unwrap();
    assert!(matches!(ev.eval(c(-1.5, 0.0)), Err(Error::EssentialSpectrum { .. })));
}

#[test]
fn contour_points_are_closed_and_counterclockwise() {
    let r = Contour::Rectangle { re: (0.0, 2.0), im: (-1.0, 1.0) };
    assert_eq!(r.point(0.0), c(0.0, -1.0));
    assert!((r.point(0.25) - c(2.0, -1.0)).norm() < 1e-12);
    assert!((r.point(0.999_999_9) - r.point(0.0)).norm() < 1e-5);
    let circ = Contour::Circle { center: (1.0, 0.0), radius: 2.0 };
    assert!((circ.point(0.25) - c(1.0, 2.0)).norm() < 1e-12);
    assert!(circ.contains(c(0.0, 0.0)) && !r.contains(c(3.0, 0.0)));
}
