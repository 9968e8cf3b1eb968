//! Box-wise linear detrending of a PnL series across investment horizons.
//!
//! A series of `n` samples is cut, for every horizon `h`, into `floor(n / h)`
//! contiguous non-overlapping boxes. When `h` does not divide `n` the
//! leftover samples are dropped from the oldest end, so the most recent
//! sample always closes the last box. Each box gets an ordinary least
//! squares line over local coordinates `0..h`; the fitted endpoint
//! difference is the local return and the RMS residual (divisor `h`) is
//! the local risk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::PnLSeries;

/// Half-open sample range `[start, end)` of one box at one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeBox {
    pub horizon: usize,
    /// Ordinal within the horizon, oldest first.
    pub index: usize,
    pub start: usize,
    pub end: usize,
}

impl TimeBox {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    /// Midpoint in source sample coordinates.
    pub fn center(&self) -> f64 {
        self.start as f64 + (self.len() as f64 - 1.0) / 2.0
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start as f64 && t < self.end as f64
    }
}

/// Linear trend of one box together with its local return and local risk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalFit {
    pub time_box: TimeBox,
    /// Currency per sample.
    pub slope: f64,
    /// Fitted value at local coordinate 0.
    pub intercept: f64,
    /// `slope * (h - 1)`: fitted last point minus fitted first point.
    pub local_return: f64,
    /// RMS deviation of the samples from the fitted line.
    pub local_risk: f64,
    pub center_t: f64,
}

/// Split `series` into `floor(n / h)` boxes anchored at the most recent sample.
pub fn partition(series: &PnLSeries, h: usize) -> Result<Vec<TimeBox>> {
    partition_len(series.len(), h)
}

pub(crate) fn partition_len(n: usize, h: usize) -> Result<Vec<TimeBox>> {
    if h < 2 {
        return Err(Error::HorizonTooSmall { h });
    }
    if h > n {
        return Err(Error::HorizonTooLarge { h, n });
    }
    let offset = n % h;
    Ok((0..n / h)
        .map(|index| TimeBox {
            horizon: h,
            index,
            start: offset + index * h,
            end: offset + (index + 1) * h,
        })
        .collect())
}

/// Least-squares line through the samples of `time_box`.
pub fn fit_box(series: &PnLSeries, time_box: TimeBox) -> Result<LocalFit> {
    if time_box.end > series.len() || time_box.start > time_box.end {
        return Err(Error::invalid(format!(
            "box [{}, {}) outside series of length {}",
            time_box.start,
            time_box.end,
            series.len()
        )));
    }
    let y = &series.values()[time_box.start..time_box.end];
    let h = y.len();
    if h < 2 {
        return Err(Error::DegenerateBox { h });
    }
    let hf = h as f64;
    let t_mean = (hf - 1.0) / 2.0;
    let y_mean = y.iter().sum::<f64>() / hf;

    // Centered sums keep the fit well conditioned for large PnL offsets.
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (t, &v) in y.iter().enumerate() {
        let dt = t as f64 - t_mean;
        sxy += dt * (v - y_mean);
        sxx += dt * dt;
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * t_mean;

    let ssr: f64 = y
        .iter()
        .enumerate()
        .map(|(t, &v)| {
            let r = (v - y_mean) - slope * (t as f64 - t_mean);
            r * r
        })
        .sum();

    Ok(LocalFit {
        time_box,
        slope,
        intercept,
        local_return: slope * (hf - 1.0),
        local_risk: (ssr / hf).sqrt(),
        center_t: time_box.center(),
    })
}

/// The full time-by-horizon field of local fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrdGrid {
    horizons: Vec<usize>,
    fits: Vec<Vec<LocalFit>>,
    n: usize,
    risk_floor: f64,
    source_checksum: String,
}

impl LrdGrid {
    /// Sorted, de-duplicated horizons.
    pub fn horizons(&self) -> &[usize] {
        &self.horizons
    }

    /// One row per horizon, each ordered by box index.
    pub fn fits(&self) -> &[Vec<LocalFit>] {
        &self.fits
    }

    pub fn row(&self, h: usize) -> Result<&[LocalFit]> {
        self.row_index(h).map(|i| self.fits[i].as_slice())
    }

    pub fn row_index(&self, h: usize) -> Result<usize> {
        self.horizons
            .binary_search(&h)
            .map_err(|_| Error::UnknownHorizon { h })
    }

    /// Length of the source series.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Risks at or below this value are treated as zero.
    pub fn risk_floor(&self) -> f64 {
        self.risk_floor
    }

    /// SHA-256 of the source values, see [`PnLSeries::checksum`].
    pub fn source_checksum(&self) -> &str {
        &self.source_checksum
    }

    pub fn cell_count(&self) -> usize {
        self.fits.iter().map(Vec::len).sum()
    }
}

/// Decompose `series` over every horizon in `horizons`.
///
/// Horizons are sorted and de-duplicated. Every horizon must leave at
/// least two boxes.
pub fn decompose(series: &PnLSeries, horizons: &[usize]) -> Result<LrdGrid> {
    if horizons.is_empty() {
        return Err(Error::EmptyHorizons);
    }
    let mut sorted = horizons.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let n = series.len();
    let fits = sorted
        .iter()
        .map(|&h| {
            let boxes = partition(series, h)?;
            if boxes.len() < 2 {
                return Err(Error::InsufficientBoxes {
                    h,
                    boxes: boxes.len(),
                    n,
                });
            }
            boxes.into_iter().map(|b| fit_box(series, b)).collect()
        })
        .collect::<Result<Vec<Vec<LocalFit>>>>()?;

    Ok(LrdGrid {
        horizons: sorted,
        fits,
        n,
        risk_floor: series.degeneracy_floor(),
        source_checksum: series.checksum(),
    })
}

/// Horizons that leave at least two boxes over `n` samples.
pub fn admissible_horizons(n: usize, candidates: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&h| h >= 2 && n / h >= 2)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
