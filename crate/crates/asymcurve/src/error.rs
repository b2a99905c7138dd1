//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid resampling step {step}: must be positive and smaller than the curve length {len}")]
    InvalidStep { step: f64, len: f64 },

    #[error("arclength {s} outside the valid range [{lo}, {hi}]")]
    OutOfRange { s: f64, lo: f64, hi: f64 },

    #[error("parameter {name} = {value} is out of range: {expected}")]
    BadParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("degenerate subarc: endpoints s = {a} and s = {b} give a zero chord")]
    DegenerateSubarc { a: f64, b: f64 },

    #[error("curve has {points} points; at least {required} required")]
    InsufficientData { points: usize, required: usize },

    #[error("curve must be {expected}")]
    BadCurve { expected: &'static str },

    #[error("normal offset folds at s = {s}: 1 - kappa*f = {value}")]
    OffsetFold { s: f64, value: f64 },

    #[error("subarc of length {len} is shorter than the partition step {epsilon}")]
    TooShortSubarc { len: f64, epsilon: f64 },

    #[error("projected sample count {projected} exceeds the budget {budget} (set ASYMCURVE_BUDGET or lower depth)")]
    BudgetExceeded { projected: u64, budget: u64 },

    #[error("no endpoint pair with chord <= {delta} on the scan grid")]
    EmptyScan { delta: f64 },

    #[error("row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
