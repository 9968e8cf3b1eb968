//! Cumulative profit-and-loss series and their daily increments.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Relative scale of the degeneracy floor applied to risks and volatilities.
pub const DEGENERACY_SCALE: f64 = 1e-12;

/// A validated cumulative PnL curve, one sample per trading day.
///
/// Values are stored as cumulative levels. Labels are reporting metadata
/// and never enter the arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnLSeries {
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl PnLSeries {
    /// Validate raw samples (and optional labels) into a series.
    pub fn new(values: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort { n: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(labels) = &labels {
            if labels.len() != values.len() {
                return Err(Error::LabelMismatch {
                    reason: format!("{} labels for {} values", labels.len(), values.len()),
                });
            }
            if let Some(k) = labels.windows(2).position(|w| w[0] >= w[1]) {
                return Err(Error::LabelMismatch {
                    reason: format!(
                        "labels not strictly increasing at index {}: {:?} >= {:?}",
                        k + 1,
                        labels[k],
                        labels[k + 1]
                    ),
                });
            }
        }
        Ok(Self { values, labels })
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, None)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false for a validated series; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn increments(&self) -> ReturnSeries {
        ReturnSeries {
            increments: self.values.windows(2).map(|w| w[1] - w[0]).collect(),
        }
    }

    /// `max(x) - min(x)`.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }

    /// Floor below which a risk or volatility is treated as zero:
    /// `1e-12` times the value range, or `1e-12` for a flat series.
    pub fn degeneracy_floor(&self) -> f64 {
        let range = self.range();
        DEGENERACY_SCALE * if range > 0.0 { range } else { 1.0 }
    }

    /// Scale every value by `a` and shift by `b`, keeping labels.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        Self::new(
            self.values.iter().map(|v| a * v + b).collect(),
            self.labels.clone(),
        )
    }

    /// Time-reversed copy. Labels are dropped since they would no longer increase.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            values,
            labels: None,
        }
    }

    /// SHA-256 of the little-endian value bytes, hex encoded.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for v in &self.values {
            hasher.update(v.to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

/// Daily increments `r(k) = x(k+1) - x(k)` of a [`PnLSeries`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    increments: Vec<f64>,
}

impl ReturnSeries {
    pub fn as_slice(&self) -> &[f64] {
        &self.increments
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.increments.iter().sum::<f64>() / self.increments.len() as f64
    }

    /// Population standard deviation (divisor `len`).
    pub fn std_population(&self) -> f64 {
        let mean = self.mean();
        let ss: f64 = self.increments.iter().map(|r| (r - mean).powi(2)).sum();
        (ss / self.increments.len() as f64).sqrt()
    }

    /// Cumulative sum starting from `start`, reconstructing the level series.
    pub fn integrate(&self, start: f64) -> Vec<f64> {
        std::iter::once(start)
            .chain(self.increments.iter().scan(start, |acc, r| {
                *acc += r;
                Some(*acc)
            }))
            .collect()
    }
}
