//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("row {row}: malformed date '{value}' (expected YYYY-MM-DD)")]
    MalformedDate { row: usize, value: String },

    #[error("row {row}: non-numeric value '{value}' for channel '{channel}'")]
    NonNumericValue {
        row: usize,
        channel: String,
        value: String,
    },

    #[error("duplicate observation for channel '{channel}' at date {date}")]
    DuplicateObservation { channel: String, date: String },

    #[error("channel '{channel}': {needed} observations required, found {found}")]
    InsufficientData {
        channel: String,
        needed: usize,
        found: usize,
    },

    #[error("channel '{channel}': non-positive value {value} at t={t} cannot be log-transformed")]
    LogDomain { channel: String, t: f64, value: f64 },

    #[error("unknown channel '{0}'")]
    UnknownChannel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("constraining {from} to {to} is not supported")]
    UnsupportedConstraint { from: String, to: String },

    #[error("kernel matrix is ill-conditioned; factorization failed at final jitter {final_jitter:e}")]
    IllConditionedKernel { final_jitter: f64 },

    #[error("degenerate prior: channel '{0}' has zero magnitude scale")]
    DegeneratePrior(String),

    #[error("degenerate channel '{0}': zero kernel variance")]
    DegenerateChannel(String),

    #[error("metric normalization undefined: mean of the reference values is zero")]
    NormalizationUndefined,

    #[error("empty report: {0}")]
    EmptyReport(String),

    #[error("training failed for all trials: {summary}")]
    TrainingFailed { summary: String },

    #[error("gradient check failed: relative error {rel_err:e} exceeds {tol:e}")]
    GradientCheck { rel_err: f64, tol: f64 },

    #[error("invalid mask: {0}")]
    InvalidMask(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSynthSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
