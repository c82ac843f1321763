//! Numerical laboratory for the stability of viscous shock and pulse profiles
//! of quasilinear parabolic systems.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation on in-memory data; file formats, configuration and the command
//! line front end live in the `shocklab` companion crate.
//!
//! Module map:
//!
//! - [`models`]: parabolic systems, the model catalog and hypothesis checks.
//! - [`numerics`]: grids, finite differences, quadrature, IMEX stepping and
//!   semigroup action.
//! - [`profile`]: standing-wave profiles, tail decay and translates.
//! - [`spectral`]: the discretized linearization, unstable eigenprojections
//!   and projector bounds.
//! - [`evans`]: Evans function, winding numbers and the order of the zero at
//!   the origin.
//! - [`manifold`]: the cutoff nonlinearity, the implicit fixed-point scheme
//!   and the center-stable manifold map.
//! - [`templates`]: pointwise decay templates, excited kernels and
//!   convolution checks.
//! - [`evolution`]: nonlinear runs, phase tracking and decay monitors.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod evans;
pub mod evolution;
pub mod linalg;
pub mod manifold;
pub mod models;
pub mod numerics;
pub mod profile;
pub mod spectral;
pub mod templates;

pub use error::{Error, Result};

/// Real scalar type used throughout.
pub type Real = f64;
/// Complex scalar type used for spectral data.
pub type Complex = num_complex::Complex<f64>;
