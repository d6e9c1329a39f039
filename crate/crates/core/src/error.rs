use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Validation failures of norm axioms are not errors when they come out of
/// [`crate::gauge::validate_axioms`]; they only become [`Error::AxiomValidation`]
/// when a constructor refuses a spec.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid size {0}: must be a power of two and at least 8")]
    InvalidGrid(usize),

    #[error("non-finite sample at node {index}")]
    NumericInput { index: usize },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("point {radius} is within one grid spacing of the unit circle (limit {limit})")]
    NearBoundary { radius: f64, limit: f64 },

    #[error("modulus is not log-integrable: {vanishing} of {total} nodes below {threshold:e}")]
    NotLogIntegrable {
        vanishing: usize,
        total: usize,
        threshold: f64,
    },

    #[error("modulus vanishes on a set of positive measure: {0}")]
    VanishingModulus(String),

    #[error("norm evaluation failed: {0}")]
    NormEvaluation(String),

    #[error("dual-norm ascent did not converge after {iterations} iterations (best lower bound {best_lower_bound})")]
    OptimizationFailure {
        iterations: usize,
        best_lower_bound: f64,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unsupported norm: {0}")]
    UnsupportedNorm(String),

    #[error("function is not in the Hardy class: {0}")]
    NotHardy(String),

    #[error("inverse is not in the norm space: {0}")]
    InverseUnbounded(String),

    #[error("degenerate generator: {0}")]
    DegenerateGenerator(String),

    #[error("distance verdict and log-integrability verdict disagree: {0}")]
    InconsistentCrossCheck(String),

    #[error("invalid norm spec: {0}")]
    InvalidSpec(String),

    #[error("norm axiom validation failed: {0}")]
    AxiomValidation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
