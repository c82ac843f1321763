use alloc::string::String;
use alloc::vec::Vec;

/// Failure modes of the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("singular linear system (zero pivot at row {row})")]
    Singular { row: usize },
    #[error("no connection found; Newton residual history {history:?}")]
    NoConnection { history: Vec<f64> },
    #[error("ambiguous spectral splitting: eigenvalue with Re = {re} lies within {tol} of the cutoff")]
    AmbiguousSplitting { re: f64, tol: f64 },
    #[error("Jordan chain of length {0} exceeds the supported maximum of 3")]
    JordanTooLong(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("lambda = {re}+{im}i lies in the essential spectrum (no consistent splitting)")]
    EssentialSpectrum { re: f64, im: f64 },
    #[error("step size underflow while integrating at x = {x}")]
    StepSize { x: f64 },
    #[error("contour passes too close to a zero: min |D| = {min_abs}")]
    ContourTooClose { min_abs: f64 },
    #[error("radius check failed: {0}")]
    Radius(String),
    #[error("tail horizon too short: truncation bound {bound:e} exceeds tolerance {tol:e}")]
    HorizonTooShort { bound: f64, tol: f64 },
    #[error("fixed-point map is not contractive: measured factor {factor}")]
    NonContraction { factor: f64 },
    #[error("frame breakdown: phase denominator {0} < 0.5")]
    FrameBreakdown(f64),
    #[error("phase ambiguity: {0} local minima in the search window")]
    PhaseAmbiguity(usize),
    #[error("divergence at t = {t}: norm {norm:e}")]
    Divergence { t: f64, norm: f64 },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("monitor failure: {0}")]
    Monitor(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain(alloc::format!("non-finite value in {what}")))
    }
}
