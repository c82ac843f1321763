use super::*;
use alloc::vec;
use alloc::vec::Vec;
use proptest::prelude::*;

#[test]
fn burgers_eval() {
    let m = burgers();
    let e = eval(&m.system, &[0.5], None).unwrap();
    assert_eq!(e.f.unwrap()[0], 0.125);
    let e = eval(&m.system, &[-1.0], None).unwrap();
    assert_eq!(e.df.unwrap()[(0, 0)], -1.0);
}

#[test]
fn cubic_eval() {
    let m = cubic();
    let e = eval(&m.system, &[1.0, 0.0], None).unwrap();
    let f = e.f.unwrap();
    assert_eq!((f[0], f[1]), (1.0, 0.0));
}

#[test]
fn eval_domain_errors() {
    let m = burgers();
    assert!(eval(&m.system, &[f64::NAN], None).is_err());
    let p = quadratic_pulse();
    assert!(eval(&p.system, &[0.1], None).is_err());
    assert!(eval(&p.system, &[0.1], Some(&[0.0])).is_ok());
}

#[test]
fn conservation_source_matches_flux_form() {
    // h = f(u)_x - (db(u) u_x) u_x with b constant is df u_x
    let m = burgers();
    let h = m.system.source(&[0.7], &[0.3]);
    assert!((h[0] - 0.21).abs() < 1e-15);
}

#[test]
fn catalog_contents() {
    let c = catalog();
    let b = c.iter().find(|e| e.name == "burgers").unwrap();
    assert_eq!((b.u_minus[0], b.u_plus[0]), (1.0, -1.0));
    let f = |u: f64| b.system.flux(&[u])[0];
    assert_eq!(f(b.u_minus[0]), f(b.u_plus[0]));
    // -tanh(x/2) solves u' = (u^2 - 1)/2
    let x: f64 = 0.37;
    let u = -(x / 2.0).tanh();
    let du = -0.5 / (x / 2.0).cosh().powi(2);
    assert!((du - (u * u - 1.0) / 2.0).abs() < 1e-14);

    let p = c.iter().find(|e| e.name == "quadratic_pulse").unwrap();
    assert_eq!((p.u_minus[0], p.u_plus[0]), (0.0, 0.0));
    // 3/2 sech^2(x/2) solves u'' - u + u^2 = 0
    let ex = p.exact_profile.unwrap();
    let hh = 1e-3;
    let (um, u0, up) = (ex(x - hh)[0], ex(x)[0], ex(x + hh)[0]);
    let upp = (up - 2.0 * u0 + um) / (hh * hh);
    assert!((upp - u0 + u0 * u0).abs() < 1e-5);

    let cu = c.iter().find(|e| e.name == "cubic").unwrap();
    let es = EndStates::new(&cu.system, &cu.u_minus, &cu.u_plus).unwrap();
    assert_eq!(es.classification, Classification::Undercompressive);
    assert_eq!(es.a_minus, vec![1.0, 3.0]);
}

#[test]
fn burgers_hypotheses() {
    let m = burgers();
    let es = EndStates::new(&m.system, &m.u_minus, &m.u_plus).unwrap();
    let xi: Vec<f64> = (-100..=100).map(|k| k as f64 * 0.1).collect();
    let r = verify_hypotheses(&m.system, &es, &[(-1.5, 1.5)], &xi, &HypothesisOptions::default()).unwrap();
    assert_eq!(r.classification, Classification::Lax);
    assert_eq!(r.h5.witness, 1.0);
    assert!((r.h3.witness - 1.0).abs() < 1e-12);
    assert!(r.all_passed());
}

#[test]
fn constant_state_is_rejected() {
    let m = burgers();
    assert!(EndStates::new(&m.system, &[0.5], &[0.5]).is_err());
}

#[test]
fn cubic_fails_rankine_hugoniot_in_standing_frame() {
    let m = cubic();
    let es = EndStates::new(&m.system, &m.u_minus, &m.u_plus).unwrap();
    let r = verify_hypotheses(&m.system, &es, &[(-1.5, 1.5), (-1.5, 1.5)], &[1.0], &HypothesisOptions::default())
        .unwrap();
    assert_eq!(r.rh.status, Status::Fail);
    assert!((r.rh.witness - 2.0).abs() < 1e-12);
    assert_eq!(r.classification, Classification::Undercompressive);
}

#[test]
fn symbol_margin_nonnegative_on_catalog() {
    let xi: Vec<f64> = (-100..=100).map(|k| k as f64 * 0.1).collect();
    for e in catalog() {
        for u in [&e.u_minus, &e.u_plus] {
            assert!(symbol_margin(&e.system, u, &xi) >= 0.0, "{}", e.name);
        }
    }
}

#[test]
fn degenerate_eigenvalues_fail_h2() {
    // f(u) = (u1^2/2, u1 u2) at u = (1, 0) has df = [[1,0],[0,1]]: double eigenvalue
    let sys = PolySystem::conservation(
        "degenerate",
        vec![Poly::new(vec![(0.5, vec![2, 0])]), Poly::new(vec![(1.0, vec![1, 1])])],
        vec![Poly::constant(1.0, 2), Poly::zero(), Poly::zero(), Poly::constant(1.0, 2)],
    )
    .unwrap();
    let es = EndStates::new(&sys, &[1.0, 0.0], &[-1.0, 0.0]).unwrap();
    let r = verify_hypotheses(&sys, &es, &[(-1.0, 1.0), (-1.0, 1.0)], &[1.0], &HypothesisOptions::default()).unwrap();
    assert_eq!(r.h2.status, Status::Fail);
    assert!(r.h2.witness.abs() < 1e-8);
}

/// Same system with `f` replaced by finite-difference-only derivatives.
#[derive(Debug)]
struct FdOnly<'a>(&'a PolySystem);

impl ParabolicSystem for FdOnly<'_> {
    fn name(&self) -> &str {
        "fd"
    }
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn form(&self) -> Form {
        self.0.form()
    }
    fn viscosity(&self, u: &[f64]) -> nalgebra::DMatrix<f64> {
        self.0.viscosity(u)
    }
    fn flux(&self, u: &[f64]) -> nalgebra::DVector<f64> {
        self.0.flux(u)
    }
    fn source(&self, u: &[f64], ux: &[f64]) -> nalgebra::DVector<f64> {
        self.0.source(u, ux)
    }
}

fn variable_viscosity() -> PolySystem {
    // b(u) = [[1 + u1^2, u2],[0, 2 + u1 u2]] with cubic flux
    PolySystem::conservation(
        "vv",
        cubic().system.flux.clone(),
        vec![
            Poly::new(vec![(1.0, vec![0, 0]), (1.0, vec![2, 0])]),
            Poly::new(vec![(1.0, vec![0, 1])]),
            Poly::zero(),
            Poly::new(vec![(2.0, vec![0, 0]), (1.0, vec![1, 1])]),
        ],
    )
    .unwrap()
}

proptest! {
    #[test]
    fn analytic_derivatives_match_finite_differences(
        u in prop::collection::vec(-1.5f64..1.5, 2),
        p in prop::collection::vec(-1.0f64..1.0, 2),
    ) {
        let sys = variable_viscosity();
        let fd = FdOnly(&sys);
        let tol = 1e-7;
        prop_assert!((sys.flux_jacobian(&u) - fd.flux_jacobian(&u)).norm() < tol);
        prop_assert!((sys.viscosity_derivative(&u, &p) - fd.viscosity_derivative(&u, &p)).norm() < tol);
        prop_assert!((sys.source_du(&u, &p) - fd.source_du(&u, &p)).norm() < 1e-6);
        prop_assert!((sys.source_dux(&u, &p) - fd.source_dux(&u, &p)).norm() < 1e-6);
        let w = [p[1], -p[0]];
        prop_assert!((sys.viscosity_second_derivative(&u, &p, &w) - fd.viscosity_second_derivative(&u, &p, &w)).norm() < 1e-5);
    }

    #[test]
    fn pulse_source_derivatives(u in -2.0f64..2.0, p in -1.0f64..1.0) {
        let sys = quadratic_pulse().system;
        let fd = FdOnly(&sys);
        prop_assert!((sys.source_du(&[u], &[p]) - fd.source_du(&[u], &[p])).norm() < 1e-7);
        prop_assert!((sys.source_du(&[u], &[p])[(0, 0)] - (1.0 - 2.0 * u)).abs() < 1e-14);
    }

    #[test]
    fn classification_invariant_under_reflection(a in 0.2f64..2.0, c in -2.0f64..-0.2) {
        let b = burgers();
        let es = EndStates::new(&b.system, &[a], &[c]).unwrap();
        let reflected = PolySystem::conservation(
            "reflected",
            b.system.flux.iter().map(|p| p.negated()).collect(),
            b.system.viscosity.clone(),
        ).unwrap();
        let er = EndStates::new(&reflected, &[c], &[a]).unwrap();
        prop_assert_eq!(es.classification, er.classification);
    }
}
