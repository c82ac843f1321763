use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use super::*;
use crate::models::{burgers, quadratic_pulse, CatalogEntry, EndStates, Form};
use crate::numerics::{DiscreteField, Grid};
use crate::profile::{solve_profile, ProfileOptions, ShockProfile};
use crate::{Complex, Error};

fn solve(entry: &CatalogEntry, m: usize) -> ShockProfile {
    let grid = Grid::new(20.0, m).unwrap();
    let es = EndStates::new(&entry.system, &entry.u_minus, &entry.u_plus).unwrap();
    solve_profile(&entry.system, &es, &grid, &entry.phase, &ProfileOptions::with_guess(entry.guess.clone())).unwrap()
}

fn operator(entry: &CatalogEntry, m: usize) -> DiscretizedOperator {
    assemble_l(Arc::new(entry.system.clone()), &solve(entry, m)).unwrap()
}

fn pulse_spectrum(m: usize) -> (DiscretizedOperator, SpectralDecomposition) {
    let op = operator(&quadratic_pulse(), m);
    let s = unstable_spectrum(&op, &SpectralOptions::default()).unwrap();
    (op, s)
}

#[test]
fn pulse_operator_is_schrodinger_stencil() {
    let op = operator(&quadratic_pulse(), 201);
    let g = *op.grid();
    let h = g.spacing();
    for i in [10usize, 80, 100, 150] {
        let x = g.x(i + 1);
        let s = 1.0 / (x / 2.0).cosh();
        let diag = -2.0 / (h * h) - 1.0 + 3.0 * s * s;
        assert!((op.matrix().get(i, i) - diag).abs() < 1e-4, "node {i}");
        assert!((op.matrix().get(i, i + 1) - 1.0 / (h * h)).abs() < 1e-9);
    }
}

#[test]
fn burgers_operator_matches_linearization() {
    let mut errs = Vec::new();
    for m in [401usize, 801] {
        let op = operator(&burgers(), m);
        let g = *op.grid();
        // v = e^{-x²}: L v = v'' - (ū v)' with ū = -tanh(x/2)
        let v: Vec<f64> = (1..g.len() - 1).map(|i| (-g.x(i) * g.x(i)).exp()).collect();
        let lv = op.apply(&v);
        let err = (1..g.len() - 1)
            .map(|i| {
                let x = g.x(i);
                let e = (-x * x).exp();
                let t = (x / 2.0).tanh();
                let ub = -t;
                let ubx = -0.5 * (1.0 - t * t);
                let exact = (4.0 * x * x - 2.0) * e - (ubx * e + ub * (-2.0 * x * e));
                (lv[i - 1] - exact).abs()
            })
            .fold(0.0, f64::max);
        errs.push(err);
    }
    assert!(errs[1] < 2e-3 && errs[0] / errs[1] > 3.5, "{errs:?}");
}

#[test]
fn constant_state_has_discrete_symbol() {
    let e = burgers();
    let mut p = solve(&e, 401);
    let g = *p.grid();
    p.field = DiscreteField::scalar(g, |_| 1.0);
    let op = assemble_l(Arc::new(e.system.clone()), &p).unwrap();
    let h = g.spacing();
    let k = 1.3;
    let re: Vec<f64> = (1..g.len() - 1).map(|i| (k * g.x(i)).cos()).collect();
    let im: Vec<f64> = (1..g.len() - 1).map(|i| (k * g.x(i)).sin()).collect();
    let (lr, li) = (op.apply(&re), op.apply(&im));
    // symbol of D₂ - f'(1) D₁ with f' = 1
    let sym = Complex::new((2.0 * (k * h).cos() - 2.0) / (h * h), -(k * h).sin() / h);
    for i in [50usize, 200, 300] {
        let z = Complex::new(re[i], im[i]);
        let got = Complex::new(lr[i], li[i]);
        assert!((got - sym * z).norm() < 1e-9);
    }
    // continuum symbol -ik f' - k² to second order
    assert!((sym - Complex::new(-k * k, -k)).norm() < 0.01);
}

#[test]
fn pulse_unstable_eigenvalue_richardson() {
    let (_, s1) = pulse_spectrum(201);
    let (_, s2) = pulse_spectrum(401);
    assert_eq!((s1.p(), s2.p()), (1, 1));
    let (l1, l2) = (s1.eigenvalues[0].re, s2.eigenvalues[0].re);
    let rich = (4.0 * l2 - l1) / 3.0;
    assert!((rich - 1.25).abs() < 1e-3, "{rich}");
    assert!(s2.eigenvalues[0].im.abs() < 1e-10);
    assert_eq!(s2.ranks, vec![1]);
    let beta = s2.beta().unwrap();
    let omega = s2.omega().unwrap();
    assert!(3.0 * omega < beta);
}

#[test]
fn zero_mode_residual_is_second_order() {
    for e in [quadratic_pulse(), burgers()] {
        let r1 = operator(&e, 201).zero_mode_residual();
        let r2 = operator(&e, 401).zero_mode_residual();
        assert!((r1 / r2 - 4.0).abs() < 0.5, "{} ratio {}", e.name, r1 / r2);
    }
}

#[test]
fn zero_mode_matches_profile_derivative() {
    let (op, s) = pulse_spectrum(401);
    let z = s.zero_mode.unwrap();
    assert!(z.alignment > 1.0 - 1e-5);
    assert!(z.value.abs() < 2e-3);
    assert!((op.dot(&z.left, &z.right) - 1.0).abs() < 1e-10);
}

#[test]
fn burgers_is_stable() {
    let op = operator(&burgers(), 201);
    let s = unstable_spectrum(&op, &SpectralOptions::default()).unwrap();
    assert_eq!(s.p(), 0);
    assert!(s.beta().is_none());
    let all = dense_eigenvalues(&op, 2000).unwrap();
    assert!(all.iter().all(|l| l.re < 1e-6));
}

#[test]
fn high_cutoff_gives_empty_set() {
    let op = operator(&quadratic_pulse(), 201);
    let s = unstable_spectrum(&op, &SpectralOptions { cutoff_re: 5.0, ..Default::default() }).unwrap();
    assert_eq!(s.p(), 0);
}

#[test]
fn cutoff_on_an_eigenvalue_is_ambiguous() {
    let op = operator(&quadratic_pulse(), 201);
    let l = dense_eigenvalues(&op, 2000).unwrap().into_iter().map(|l| l.re).fold(f64::MIN, f64::max);
    let r = unstable_spectrum(&op, &SpectralOptions { cutoff_re: l + 1e-4, ..Default::default() });
    assert!(matches!(r, Err(Error::AmbiguousSplitting { .. })));
}

#[test]
fn projector_identities() {
    let (op, s) = pulse_spectrum(201);
    let h = op.grid().spacing();
    let gram = s.left.transpose() * &s.right * Complex::new(h, 0.0);
    assert!((gram - DMatrix::identity(1, 1)).norm() < 1e-10);
    let f = DiscreteField::scalar(*op.grid(), |x| (x - 1.0) * (-(x - 0.5) * (x - 0.5) / 3.0).exp());
    let pu = apply_projector(&s, &f, Projection::Unstable).unwrap();
    let pcs = apply_projector(&s, &f, Projection::CenterStable).unwrap();
    assert!(pu.add(&pcs).sub(&f).sup_norm() < 1e-14);
    let puu = apply_projector(&s, &pu, Projection::Unstable).unwrap();
    assert!(puu.sub(&pu).sup_norm() < 1e-10 * pu.sup_norm().max(1.0));
    assert!(apply_projector(&s, &pcs, Projection::Unstable).unwrap().sup_norm() < 1e-10);
    let phi = op.to_field(&s.synthesize(&[Complex::new(1.0, 0.0)]));
    assert!(apply_projector(&s, &phi, Projection::Unstable).unwrap().sub(&phi).sup_norm() < 1e-10);
    // L commutes with the projector
    let lphi = op.apply(&op.restrict(phi.values()));
    let lam = s.eigenvalues[0].re;
    let res = lphi.iter().zip(&op.restrict(phi.values())).map(|(a, b)| (a - lam * b).abs()).fold(0.0, f64::max);
    assert!(res < 1e-8 * lam.abs() * phi.sup_norm().max(1.0) + 1e-8);
}

#[test]
fn tilde_projectors_are_conservation_only() {
    let (op, s) = pulse_spectrum(201);
    let f = DiscreteField::zeros(*op.grid(), 1);
    assert!(matches!(apply_projector(&s, &f, Projection::UnstableTilde), Err(Error::Unsupported(_))));
}

fn synthetic(m: usize) -> SpectralDecomposition {
    let g = Grid::new(20.0, m).unwrap();
    let xs: Vec<f64> = (1..m - 1).map(|i| g.x(i)).collect();
    let right = DMatrix::from_iterator(m - 2, 1, xs.iter().map(|&x| Complex::new(-x * (-x * x / 2.0).exp(), 0.0)));
    let left = DMatrix::from_iterator(m - 2, 1, xs.iter().map(|&x| Complex::new((-(x - 0.3) * (x - 0.3)).exp(), 0.0)));
    SpectralDecomposition::from_modes(g, 1, Form::Conservation, vec![Complex::new(0.7, 0.0)], right, left).unwrap()
}

#[test]
fn tilde_commutator_converges() {
    let mut errs = Vec::new();
    for m in [201usize, 401] {
        let s = synthetic(m);
        let f = DiscreteField::scalar(s.grid, |x| (1.0 + x) * (-(x - 1.0) * (x - 1.0)).exp());
        let lhs = apply_projector(&s, &f.derivative(1).unwrap(), Projection::Unstable).unwrap();
        let rhs = apply_projector(&s, &f, Projection::UnstableTilde).unwrap().derivative(1).unwrap();
        errs.push(lhs.sub(&rhs).sup_norm());
        let tilde = apply_projector(&s, &f, Projection::UnstableTilde).unwrap();
        let ctilde = apply_projector(&s, &f, Projection::CenterStableTilde).unwrap();
        assert!(tilde.add(&ctilde).sub(&f).sup_norm() < 1e-14);
        // Φ_j decays at both ends
        assert!(tilde.at(0)[0].abs() < 1e-12 && tilde.at(m - 1)[0].abs() < 1e-8);
    }
    assert!(errs[1] < 1e-2 && errs[0] / errs[1] > 3.5, "{errs:?}");
}

#[test]
fn conservative_operator_has_divergence_structure() {
    let op = operator(&burgers(), 401);
    let g = *op.grid();
    let v: Vec<f64> = (1..g.len() - 1).map(|i| (g.x(i) + 0.5) * (-(g.x(i) - 1.0).powi(2)).exp()).collect();
    let total: f64 = op.apply(&v).iter().sum::<f64>() * g.spacing();
    assert!(total.abs() < 1e-12, "{total}");
}

#[test]
fn nonlinear_remainder_is_quadratic() {
    let op = operator(&quadratic_pulse(), 201);
    let g = *op.grid();
    let v: Vec<f64> = (1..g.len() - 1).map(|i| (-(g.x(i) - 0.5).powi(2) / 2.0).exp()).collect();
    let n1 = op.l2(&op.nonlinear(&v.iter().map(|x| 1e-2 * x).collect::<Vec<_>>()));
    let n2 = op.l2(&op.nonlinear(&v.iter().map(|x| 5e-3 * x).collect::<Vec<_>>()));
    assert!((n1 / n2 - 4.0).abs() < 1e-6, "{}", n1 / n2);
    assert!(op.nonlinear(&vec![0.0; v.len()]).iter().all(|x| *x == 0.0));
}

#[test]
fn projector_bounds_refine() {
    let (_, s1) = pulse_spectrum(201);
    let (_, s2) = pulse_spectrum(401);
    let b1 = projector_bounds(&s1, 0.5).unwrap();
    let b2 = projector_bounds(&s2, 0.5).unwrap();
    for (a, b) in b1.norms.iter().zip(&b2.norms) {
        assert!(a.value.is_finite() && a.value > 0.0);
        assert!((a.value / b.value - 1.0).abs() < 0.1, "{a:?} vs {b:?}");
    }
    assert!((b1.weighted_h4 / b2.weighted_h4 - 1.0).abs() < 0.1);
    assert!(b1.localization.is_finite() && b1.localization > 0.0);
}

#[test]
fn burgers_projector_bounds_vanish() {
    let op = operator(&burgers(), 201);
    let s = unstable_spectrum(&op, &SpectralOptions::default()).unwrap();
    let b = projector_bounds(&s, 0.5).unwrap();
    let unstable = b.norms.iter().filter(|n| n.which == Projection::Unstable);
    assert!(unstable.clone().count() > 0 && unstable.clone().all(|n| n.value == 0.0));
    assert_eq!(b.weighted_h4, 0.0);
}

mod semigroup {
    use super::*;
    use crate::numerics::{semigroup_apply, SemigroupProjection};

    #[test]
    fn identity_at_time_zero() {
        let (op, s) = pulse_spectrum(101);
        let f: Vec<f64> = (0..op.len()).map(|i| ((i as f64) * 0.1).sin()).collect();
        let g = semigroup_apply(op.matrix(), 0.0, &f, None).unwrap();
        assert!(g.iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-13));
        let pu = semigroup_apply(op.matrix(), 0.0, &f, Some((s.unstable_part(), SemigroupProjection::Unstable))).unwrap();
        let cs = semigroup_apply(op.matrix(), 0.0, &f, Some((s.unstable_part(), SemigroupProjection::CenterStable))).unwrap();
        assert!(pu.iter().zip(&cs).zip(&f).all(|((a, b), c)| (a + b - c).abs() < 1e-12));
    }

    #[test]
    fn unstable_growth_and_group_law() {
        let (op, s) = pulse_spectrum(401);
        let phi = s.synthesize(&[Complex::new(1.0, 0.0)]);
        for path in [None, Some((s.unstable_part(), SemigroupProjection::Unstable))] {
            let g = semigroup_apply(op.matrix(), 1.0, &phi, path).unwrap();
            let factor = op.l2(&g) / op.l2(&phi);
            assert!((factor / 1.25f64.exp() - 1.0).abs() < 0.01, "{factor}");
        }
        let part = Some((s.unstable_part(), SemigroupProjection::Unstable));
        let f: Vec<f64> = op.zero_mode().iter().zip(&phi).map(|(a, b)| a + b).collect();
        let ab = semigroup_apply(op.matrix(), 0.4, &semigroup_apply(op.matrix(), -0.7, &f, part).unwrap(), part).unwrap();
        let direct = semigroup_apply(op.matrix(), -0.3, &f, part).unwrap();
        assert!(ab.iter().zip(&direct).all(|(a, b)| (a - b).abs() < 1e-12));
        let back = semigroup_apply(op.matrix(), -2.0, &phi, part).unwrap();
        assert!(op.l2(&back) <= (-2.0 * s.beta().unwrap()).exp() * op.l2(&phi));
    }

    #[test]
    fn backward_without_projection_is_rejected() {
        let (op, s) = pulse_spectrum(101);
        let f = vec![0.0; op.len()];
        assert!(matches!(semigroup_apply(op.matrix(), -1.0, &f, None), Err(Error::Contract(_))));
        let cs = Some((s.unstable_part(), SemigroupProjection::CenterStable));
        assert!(matches!(semigroup_apply(op.matrix(), -1.0, &f, cs), Err(Error::Contract(_))));
    }

    #[test]
    fn burgers_zero_mode_is_stationary() {
        let op = operator(&burgers(), 401);
        let phi = op.zero_mode().to_vec();
        let g = semigroup_apply(op.matrix(), 2.0, &phi, None).unwrap();
        let diff: Vec<f64> = g.iter().zip(&phi).map(|(a, b)| a - b).collect();
        assert!(op.l2(&diff) < 1e-3 * op.l2(&phi), "{}", op.l2(&diff) / op.l2(&phi));
    }

    #[test]
    fn center_stable_growth_is_bounded() {
        let (op, s) = pulse_spectrum(201);
        let omega = s.omega().unwrap();
        let f: Vec<f64> = (0..op.len()).map(|i| (-(((i as f64) - 100.0) / 15.0).powi(2)).exp()).collect();
        let cs = Some((s.unstable_part(), SemigroupProjection::CenterStable));
        let c0 = op.l2(&f);
        let mut cmax: f64 = 0.0;
        for t in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let g = semigroup_apply(op.matrix(), t, &f, cs).unwrap();
            cmax = cmax.max(op.l2(&g) / ((omega * t).exp() * c0));
        }
        assert!(cmax < 3.0, "{cmax}");
    }
}
