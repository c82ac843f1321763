use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Poly, PolySystem};
use crate::profile::{PhaseCondition, ProfileGuess};

/// A named model with its end states and profile-solver defaults.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub system: PolySystem,
    pub u_minus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub guess: ProfileGuess,
    pub phase: PhaseCondition,
    /// Closed-form profile, where one is known.
    pub exact_profile: Option<fn(f64) -> Vec<f64>>,
}

fn burgers_exact(x: f64) -> Vec<f64> {
    vec![-(x / 2.0).tanh()]
}

fn pulse_exact(x: f64) -> Vec<f64> {
    vec![1.5 / (x / 2.0).cosh().powi(2)]
}

pub fn burgers() -> CatalogEntry {
    let system = PolySystem::conservation(
        "burgers",
        vec![Poly::new(vec![(0.5, vec![2])])],
        vec![Poly::constant(1.0, 1)],
    )
    .expect("valid burgers model");
    CatalogEntry {
        name: "burgers",
        description: "viscous Burgers u_t + (u^2/2)_x = u_xx, standing Lax shock from 1 to -1",
        system,
        u_minus: vec![1.0],
        u_plus: vec![-1.0],
        guess: ProfileGuess::Tanh { width: 1.5 },
        phase: PhaseCondition::Value { component: 0, x0: 0.0, value: None },
        exact_profile: Some(burgers_exact),
    }
}

pub fn quadratic_pulse() -> CatalogEntry {
    // u_t = u_xx - (u - u^2)
    let system = PolySystem::general(
        "quadratic_pulse",
        vec![Poly::new(vec![(1.0, vec![1, 0]), (-1.0, vec![2, 0])])],
        vec![Poly::constant(1.0, 1)],
    )
    .expect("valid pulse model");
    CatalogEntry {
        name: "quadratic_pulse",
        description: "u_t = u_xx - u + u^2, standing unstable pulse 3/2 sech^2(x/2)",
        system,
        u_minus: vec![0.0],
        u_plus: vec![0.0],
        guess: ProfileGuess::Bump { amplitude: 1.2, width: 2.5 },
        phase: PhaseCondition::Derivative { component: 0, x0: 0.0 },
        exact_profile: Some(pulse_exact),
    }
}

pub fn cubic() -> CatalogEntry {
    // f(u) = |u|^2 u, b = Id
    let system = PolySystem::conservation(
        "cubic",
        vec![
            Poly::new(vec![(1.0, vec![3, 0]), (1.0, vec![1, 2])]),
            Poly::new(vec![(1.0, vec![2, 1]), (1.0, vec![0, 3])]),
        ],
        vec![
            Poly::constant(1.0, 2),
            Poly::zero(),
            Poly::zero(),
            Poly::constant(1.0, 2),
        ],
    )
    .expect("valid cubic model");
    CatalogEntry {
        name: "cubic",
        description: "2x2 cubic flux f(u) = |u|^2 u with identity viscosity; antisymmetric end states",
        system,
        u_minus: vec![1.0, 0.0],
        u_plus: vec![-1.0, 0.0],
        guess: ProfileGuess::Tanh { width: 1.0 },
        phase: PhaseCondition::Value { component: 0, x0: 0.0, value: None },
        exact_profile: None,
    }
}

/// All catalog models.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![burgers(), quadratic_pulse(), cubic()]
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}
