//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by validation and computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("matrix is not Hermitian: max |M - M^H| entry {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("amplitude vector must be non-zero")]
    ZeroVector,

    #[error("density matrix trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("density matrix has eigenvalue {eigenvalue:e} below -{tolerance:e}")]
    NotPositiveSemidefinite { eigenvalue: f64, tolerance: f64 },

    #[error("Born probability {value:e} for outcome {index} is below tolerance")]
    NegativeProbability { index: usize, value: f64 },

    #[error("eigenvalue grouping tolerance must be positive, got {0}")]
    InvalidGroupTolerance(f64),

    #[error(
        "spectral decomposition violates {property}: deviation {deviation:e} exceeds {tolerance:e}"
    )]
    SpectrumInvariant {
        property: &'static str,
        deviation: f64,
        tolerance: f64,
    },

    #[error("probability {value} at index {index} is outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1 within {tolerance:e}")]
    NotNormalized { sum: f64, tolerance: f64 },

    #[error("divergence undefined: q[{index}] = 0 while p[{index}] = {p_value} > 0")]
    UndefinedDivergence { index: usize, p_value: f64 },

    #[error("weights must be non-negative and sum to 1 within {tolerance:e} (sum = {sum})")]
    InvalidWeights { sum: f64, tolerance: f64 },

    #[error("distributions are on different alphabets: {left} vs {right}")]
    AlphabetMismatch { left: String, right: String },

    #[error("expected {expected} weights for {got} distributions")]
    WeightCountMismatch { expected: usize, got: usize },

    #[error("empty observable catalog")]
    EmptyCatalog,

    #[error("duplicate observable label {0:?} in catalog")]
    DuplicateLabel(String),

    #[error("observable index {index} out of range for catalog of size {size}")]
    ObservableIndexOutOfRange { index: usize, size: usize },

    #[error("outcome index {index} out of range for observable {label:?} with {size} outcomes")]
    OutcomeIndexOutOfRange {
        label: String,
        index: usize,
        size: usize,
    },

    #[error("schedule length {schedule} does not match program length {program}")]
    ScheduleLengthMismatch { schedule: usize, program: usize },

    #[error("sequence must contain at least 2 entries (n >= 2 required), got {0}")]
    SequenceTooShort(usize),

    #[error("segment length must be positive")]
    EmptySegment,

    #[error("cursor k = {k} out of range 2..={n}")]
    CursorOutOfRange { k: usize, n: usize },

    #[error("minimum segment length must be at least 2, got {0}")]
    InvalidMinSegment(usize),

    #[error("significance threshold must be non-negative, got {0}")]
    InvalidThreshold(f64),

    #[error("unknown scenario {name:?}; valid names: {valid}")]
    UnknownScenario { name: String, valid: String },

    #[error("unknown observable label {label:?} on line {line}")]
    UnknownObservableLabel { label: String, line: usize },

    #[error("unknown outcome value {value:?} for observable {label:?} on line {line}")]
    UnknownOutcomeValue {
        label: String,
        value: String,
        line: usize,
    },

    #[error("malformed sequence line {line}: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
