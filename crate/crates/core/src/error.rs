//! Error types shared across the crate.

use thiserror::Error;

/// Errors from time-series construction, normalization, grids, and metrics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series is empty")]
    Empty,

    #[error("length mismatch ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("times not strictly increasing at index {index}")]
    NonIncreasingTime { index: usize },

    #[error("degenerate {axis} span: minimum equals maximum")]
    DegenerateSpan { axis: &'static str },

    #[error("need at least {required} points, got {actual}")]
    TooFewPoints { required: usize, actual: usize },
}

/// Errors from the classical fitting baselines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {required} points, got {actual}")]
    TooFewPoints { required: usize, actual: usize },

    #[error("{actual} sample points exceed the exact-interpolation cap of {cap}")]
    TooManyPoints { cap: usize, actual: usize },

    #[error("singular system: pivot {pivot:e} below tolerance at column {column}")]
    SingularSystem { column: usize, pivot: f64 },

    #[error("query {x} outside the knot range [{start}, {end}]")]
    OutOfRange { x: f64, start: f64, end: f64 },

    #[error("invalid model: {reason}")]
    InvalidModel { reason: String },
}

/// Errors from network construction, training, and inference.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NnError {
    #[error("architecture must contain at least one layer")]
    EmptyArchitecture,

    #[error("shape mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("forward cache does not match this call: {context}")]
    CacheMismatch { context: String },

    #[error("invalid training config: {reason}")]
    InvalidConfig { reason: String },

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("empty batch")]
    Empty,

    #[error("length mismatch ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Errors from the synthetic benchmark harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("invalid synthetic spec: {reason}")]
    InvalidSpec { reason: String },

    #[error("noisy and clean series must share the same times")]
    TimeMismatch,

    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Errors from model (de)serialization.
#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("unknown format version {found} (supported: {supported})")]
    UnknownVersion { found: u64, supported: u32 },

    #[error("parameter count mismatch: architecture implies {expected}, file holds {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("corrupt model file: {reason}")]
    Corrupt { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Errors from reading the `Time,Message` CSV format.
#[derive(Debug, Error)]
pub enum CsvError {
    #[error("bad header: expected exactly `Time,Message`")]
    BadHeader,

    #[error("row at line {line}: {reason}")]
    BadRow { line: u64, reason: String },

    #[error(transparent)]
    Series(#[from] SeriesError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
