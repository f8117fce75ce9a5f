use alloc::string::String;

/// Errors produced by the geometry core.
///
/// Numeric tolerances are carried in the variants so callers can report how
/// far an input was from acceptable, not just that it was rejected.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sampling failed after {retries} retries (level set may be empty or too thin)")]
    SamplingFailed { retries: u32 },

    #[error("field value is not tangent to the level set (pairing residual {residual:e} exceeds {tolerance:e})")]
    NotTangent { residual: f64, tolerance: f64 },

    #[error("field is not an invariant horizontal lift (residual {residual:e} exceeds {tolerance:e})")]
    NotALift { residual: f64, tolerance: f64 },

    #[error("horizontal basis is degenerate: {0}")]
    BadBasis(String),

    #[error("chart breakdown: {0}")]
    ChartBreakdown(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("classification not in the catalog: {0}")]
    UnsupportedClassification(String),

    #[error("no orbit cross-section is available for this generator case")]
    UnsupportedOrbitSection,

    #[error("cannot fit a proportionality constant: operator is numerically zero while the Ricci tensor is not")]
    FitImpossible,

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("unknown tolerance name: {0}")]
    UnknownTolerance(String),
}

pub type Result<T> = core::result::Result<T, Error>;
