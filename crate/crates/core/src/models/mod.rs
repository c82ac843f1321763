//! Parabolic systems, the model catalog and hypothesis verification.

mod catalog;
mod endstates;
mod hypotheses;
mod poly;
mod system;

pub use catalog::{burgers, catalog, catalog_entry, cubic, quadratic_pulse, CatalogEntry};
pub(crate) use endstates::sorted_eigs;
pub use endstates::{convection_matrix, Classification, EndStates};
pub use hypotheses::{
    symbol_margin, verify_hypotheses, HypothesisCheck, HypothesisOptions, HypothesisReport, Status,
};
pub use poly::Poly;
pub use system::{eval, Evaluation, Form, ParabolicSystem, PolySystem};

#[cfg(test)]
mod tests;
