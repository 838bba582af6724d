use thiserror::Error;

/// Errors raised by code construction, pre-transforms, enumeration and design.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Kronecker exponent above the configured cap.
    #[error("Kronecker exponent {n} exceeds the cap of {cap}")]
    Size { n: u32, cap: u32 },

    /// A 1-based row/column index outside `1..=len`.
    #[error("index {index} out of range 1..={len}")]
    Index { index: usize, len: usize },

    /// Two vectors (or a vector and a code) disagree on length.
    #[error("length mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    /// Invalid construction parameter.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An entry on or below the diagonal of a pre-transform.
    #[error("entry ({i}, {j}) is not strictly upper-triangular")]
    Triangularity { i: usize, j: usize },

    /// Duplicate entries, duplicate targets and similar structural faults.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Dimension too large for exhaustive enumeration.
    #[error("exhaustive enumeration needs K = {k} but the cap is {cap}")]
    Capacity { k: usize, cap: usize },

    /// The minimum-weight codebook would not fit the memory guard.
    #[error("codebook too large: {nmin} minimum-weight codewords exceed the limit of {limit}")]
    CodebookTooLarge { nmin: u64, limit: u64 },

    /// The distance-gap precondition of a design procedure does not hold.
    #[error(
        "distance gap precondition failed: d_min = {dmin}, second least weight = {}, required > {required}",
        second_least.map_or_else(|| "none".to_string(), |w| w.to_string())
    )]
    Precondition {
        dmin: usize,
        second_least: Option<usize>,
        required: usize,
    },

    /// No candidate information index / combination exists for the requested design.
    #[error("design infeasible: {0}")]
    Infeasible(String),

    /// An internal invariant was violated (indicates an encoder or codebook bug).
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// Malformed serialized document.
    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
