use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad input, bad configuration, parse failure.
    Usage,
    /// The numbers themselves are degenerate (zero volatility, zero kernel mass, ...).
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("series too short: need at least 2 samples, got {n}")]
    TooShort { n: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("label mismatch: {reason}")]
    LabelMismatch { reason: String },

    #[error("horizon {h} exceeds series length {n}")]
    HorizonTooLarge { h: usize, n: usize },

    #[error("horizon {h} is below the minimum of 2 samples")]
    HorizonTooSmall { h: usize },

    #[error("box of {h} samples cannot be fitted (need at least 2)")]
    DegenerateBox { h: usize },

    #[error("horizon {h} yields {boxes} box(es) over {n} samples; at least 2 are required")]
    InsufficientBoxes { h: usize, boxes: usize, n: usize },

    #[error("no horizons given")]
    EmptyHorizons,

    #[error("horizon {h} is not part of the decomposition")]
    UnknownHorizon { h: usize },

    #[error("return volatility {sigma:e} is at or below the floor {floor:e}")]
    ZeroVolatility { sigma: f64, floor: f64 },

    #[error("mean local risk at horizon {h} is at or below the floor {floor:e}")]
    ZeroMeanRisk { h: usize, floor: f64 },

    #[error("field has zero spread; cannot normalize")]
    ZeroFieldSpread,

    #[error("kernel mass is zero{}", context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    ZeroKernelMass { context: Option<String> },

    #[error("invalid kernel: {reason}")]
    InvalidKernel { reason: String },

    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },

    #[error("jackknife needs at least 2 resampling units, got {m}")]
    TooFewUnits { m: usize },

    #[error("jackknife replicate {index} failed: {source}")]
    EstimatorFailure {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid synthetic spec: {reason}")]
    SpecInvalid { reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::ZeroVolatility { .. }
            | Error::ZeroMeanRisk { .. }
            | Error::ZeroFieldSpread
            | Error::ZeroKernelMass { .. }
            | Error::EstimatorFailure { .. } => ErrorCategory::Numerical,
            Error::Io(_) => ErrorCategory::Io,
            Error::Json(e) if e.is_io() => ErrorCategory::Io,
            _ => ErrorCategory::Usage,
        }
    }

    pub(crate) fn zero_mass(context: impl Into<String>) -> Self {
        Error::ZeroKernelMass {
            context: Some(context.into()),
        }
    }

    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            reason: reason.into(),
        }
    }
}
