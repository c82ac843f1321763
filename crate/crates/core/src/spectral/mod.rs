//! The discretized linearization about a profile, its unstable spectrum and
//! the associated eigenprojections.

mod eigen;
mod operator;
mod projector;

pub use eigen::{
    dense_eigenvalues, eigenpair_near, unstable_spectrum, zero_mode, EigenPair, SpectralDecomposition,
    SpectralOptions, ZeroMode,
};
pub use operator::{assemble_l, assemble_l_with, DiscretizedOperator, Recipe};
pub use projector::{apply_projector, probe_set, projector_bounds, OperatorNorm, ProjectorBounds, Projection};

#[cfg(test)]
mod tests;
