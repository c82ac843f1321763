use super::*;
use crate::models::{burgers, quadratic_pulse, CatalogEntry};

fn solve(entry: &CatalogEntry, m: usize) -> ShockProfile {
    let grid = Grid::new(20.0, m).unwrap();
    let es = EndStates::new(&entry.system, &entry.u_minus, &entry.u_plus).unwrap();
    solve_profile(&entry.system, &es, &grid, &entry.phase, &ProfileOptions::with_guess(entry.guess.clone())).unwrap()
}

fn sup_error(p: &ShockProfile, exact: fn(f64) -> Vec<f64>) -> f64 {
    let g = p.grid();
    (0..g.len()).map(|i| (p.field.at(i)[0] - exact(g.x(i))[0]).abs()).fold(0.0, f64::max)
}

#[test]
fn burgers_profile_matches_tanh() {
    let e = burgers();
    let p = solve(&e, 1601);
    let err = sup_error(&p, e.exact_profile.unwrap());
    assert!(err < 1e-6, "sup error {err}");
    assert!(p.residual <= 1e-10);
    assert!(p.derivative(1).values().iter().all(|&v| v < 0.0));
}

#[test]
fn pulse_profile_matches_sech() {
    let e = quadratic_pulse();
    let p = solve(&e, 1601);
    let err = sup_error(&p, e.exact_profile.unwrap());
    assert!(err < 1e-6, "sup error {err}");
    assert!(p.speed.abs() < 1e-8);
}

#[test]
fn refinement_order() {
    let e = burgers();
    let e1 = sup_error(&solve(&e, 201), e.exact_profile.unwrap());
    let e2 = sup_error(&solve(&e, 401), e.exact_profile.unwrap());
    assert!(e1 / e2 > 10.0, "ratio {}", e1 / e2);
}

#[test]
fn constant_end_states_have_no_connection() {
    let e = burgers();
    let es = EndStates::new(&e.system, &[1.0], &[-1.0]).unwrap();
    let es = EndStates { u_plus: vec![1.0], ..es };
    let grid = Grid::new(20.0, 201).unwrap();
    let r = solve_profile(&e.system, &es, &grid, &e.phase, &ProfileOptions::with_guess(e.guess.clone()));
    assert!(matches!(r, Err(Error::NoConnection { .. })));
}

#[test]
fn decay_rates() {
    for e in [burgers(), quadratic_pulse()] {
        let d = measure_decay(&solve(&e, 1601));
        assert!(d.conclusive, "{}", e.name);
        assert!((d.theta - 1.0).abs() < 0.05, "{} theta {}", e.name, d.theta);
    }
}

#[test]
fn constant_profile_decay_is_inconclusive() {
    let mut p = solve(&burgers(), 201);
    let g = *p.grid();
    p.field = DiscreteField::zeros(g, 1);
    p.derivatives = (0..4).map(|_| DiscreteField::zeros(g, 1)).collect();
    assert!(!measure_decay(&p).conclusive);
}

#[test]
fn translates() {
    let p = solve(&burgers(), 801);
    let t0 = translate(&p, 0.0).unwrap();
    assert_eq!(t0.field, p.field);
    let t1 = translate(&p, 1.0).unwrap();
    let g = p.grid();
    for i in 0..g.len() {
        let x = g.x(i);
        assert!((t1.field.at(i)[0] + ((x - 1.0) / 2.0).tanh()).abs() < 1e-6);
    }
    let ab = translate(&translate(&p, 0.3).unwrap(), 0.45).unwrap();
    let direct = translate(&p, 0.75).unwrap();
    assert!(ab.field.sub(&direct.field).sup_norm() < 1e-7);
    assert!(translate(&p, 15.0).is_err());
}

#[test]
fn guess_perturbation_invariance() {
    let e = burgers();
    let grid = Grid::new(20.0, 801).unwrap();
    let es = EndStates::new(&e.system, &e.u_minus, &e.u_plus).unwrap();
    let base = solve(&e, 801);
    let mut opts = ProfileOptions::with_guess(e.guess.clone());
    let g0 = e.guess.sample(&grid, &es);
    opts.initial = Some(DiscreteField::scalar(grid, |x| 0.1 * (x / 3.0).sin() / (x / 5.0).cosh()).add(&g0));
    let q = solve_profile(&e.system, &es, &grid, &e.phase, &opts).unwrap();
    assert!(q.field.sub(&base.field).sup_norm() < 1e-9);
}
