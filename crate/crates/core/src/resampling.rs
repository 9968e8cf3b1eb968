//! Delete-one jackknife standard errors.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Replicate sets smaller than this trigger a warning.
pub const SMALL_REPLICATE_SET: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JackknifeEstimate {
    /// Estimator on the full unit set.
    pub value: f64,
    /// `sqrt((m - 1) / m * sum_j (theta_j - theta_bar)^2)`.
    pub error: f64,
    /// Number of resampling units.
    pub m: usize,
}

/// Delete-one jackknife of `estimator` over `units`.
///
/// The estimator receives the remaining units with their original order
/// preserved. Replicate `j` omits `units[j]`.
pub fn jackknife<T, F>(units: &[T], estimator: F) -> Result<JackknifeEstimate>
where
    T: Clone,
    F: Fn(&[T]) -> Result<f64>,
{
    let m = units.len();
    if m < 2 {
        return Err(Error::TooFewUnits { m });
    }
    if m < SMALL_REPLICATE_SET {
        warn!("jackknife over only {m} units; the error estimate is fragile");
    }
    let value = estimator(units)?;

    let mut subset: Vec<T> = Vec::with_capacity(m - 1);
    let mut replicates = Vec::with_capacity(m);
    for j in 0..m {
        subset.clear();
        subset.extend(
            units
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, u)| u.clone()),
        );
        let theta = estimator(&subset).map_err(|e| Error::EstimatorFailure {
            index: j,
            source: Box::new(e),
        })?;
        replicates.push(theta);
    }

    Ok(JackknifeEstimate {
        value,
        error: jackknife_error(&replicates),
        m,
    })
}

/// Jackknife standard error from a complete set of leave-one-out replicates.
pub fn jackknife_error(replicates: &[f64]) -> f64 {
    let m = replicates.len();
    if m < 2 {
        return 0.0;
    }
    // Shift by the first replicate so identical replicates give exactly zero.
    let pivot = replicates[0];
    let shifted_mean = replicates.iter().map(|t| t - pivot).sum::<f64>() / m as f64;
    let ss: f64 = replicates
        .iter()
        .map(|t| (t - pivot - shifted_mean).powi(2))
        .sum();
    ((m as f64 - 1.0) / m as f64 * ss).sqrt()
}
