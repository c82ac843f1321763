//! Grids, fields, finite differences, quadrature, IMEX stepping and
//! semigroup action.

mod diff;
mod expm;
mod field;
mod grid;
mod imex;
mod interp;
mod quadrature;
mod semigroup;

pub use diff::{diff_matrix, DiffOp};
pub use expm::{expm, expm_action};
pub use field::DiscreteField;
pub use grid::Grid;
pub use interp::interpolate;
pub use imex::{step_imex, ImexScheme, ImexStepper};
pub use quadrature::{quadrature, trapezoid_weights, QuadratureRule};
pub use semigroup::{semigroup_apply, SemigroupProjection, UnstablePart};

