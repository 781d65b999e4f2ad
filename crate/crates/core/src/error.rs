use crate::subset::Subset;
use thiserror::Error;

/// Errors produced by measure construction, transforms and generators.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("element count {0} outside the supported range 2..=26")]
    ElementCount(usize),

    #[error("value array has length {got}, expected 2^{n} = {expected}")]
    ValueLength { n: usize, got: usize, expected: usize },

    #[error("values must be finite, found {value} at subset {subset}")]
    NonFiniteValue { subset: Subset, value: f64 },

    #[error("subset {0} must be nonempty and proper")]
    NotProperSubset(Subset),

    #[error("interaction indices are undefined for {0}: at least two elements required")]
    IndexUndefined(Subset),

    #[error("element {element} is already in subset {subset}")]
    ElementInSubset { element: usize, subset: Subset },

    #[error("element {element} is out of range for n = {n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("monotonicity violated: mu({lower}) = {lower_value} > mu({upper}) = {upper_value}")]
    NotMonotone {
        lower: Subset,
        upper: Subset,
        lower_value: f64,
        upper_value: f64,
    },

    #[error("degenerate measure: {0}")]
    Degenerate(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid linear extension: {0}")]
    InvalidExtension(String),

    #[error("exhaustive extension enumeration is only supported for n <= 4, got {0}")]
    EnumerationUnsupported(usize),

    #[error("empty batch")]
    EmptyBatch,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("generated measure failed verification: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
