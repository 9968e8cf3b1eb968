//! Time and scale convolution kernels, and the scalar indicators built from them.
//!
//! A measure field `f(i, h)` is collapsed in two stages. First, along time
//! at a fixed horizon:
//!
//! ```text
//! eta(tau, h) = sum_i K_t((c_i - tau) / dt) f(i, h) / sum_i K_t((c_i - tau) / dt)
//! ```
//!
//! over box centers `c_i`, then across horizons:
//!
//! ```text
//! Phi(tau, rho) = sum_h K_s((h - rho) / ds) eta(tau, h) / sum_h K_s((h - rho) / ds)
//! ```
//!
//! Flagged cells are left out of both sums. Rows whose time mass vanishes
//! are skipped with a warning.

use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::decomposition::LrdGrid;
use crate::error::{Error, Result};
use crate::measures::{MeasureField, MeasureKind};
use crate::resampling::jackknife;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelShape {
    /// Constant weight 1.
    Uniform,
    /// Unnormalized `exp(-u^2 / 2)`.
    Gaussian,
    /// 1 for `|u| <= 1`, else 0.
    Heaviside,
}

impl KernelShape {
    pub fn name(self) -> &'static str {
        match self {
            KernelShape::Uniform => "uniform",
            KernelShape::Gaussian => "gaussian",
            KernelShape::Heaviside => "heaviside",
        }
    }
}

impl fmt::Display for KernelShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(KernelShape::Uniform),
            "gaussian" => Ok(KernelShape::Gaussian),
            "heaviside" => Ok(KernelShape::Heaviside),
            other => Err(Error::InvalidKernel {
                reason: format!("unknown kernel shape {other:?}"),
            }),
        }
    }
}

/// A weighting function placed at `center` with bandwidth `dilatation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    shape: KernelShape,
    center: f64,
    dilatation: f64,
}

impl Kernel {
    pub fn new(shape: KernelShape, center: f64, dilatation: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidKernel {
                reason: format!("center must be finite, got {center}"),
            });
        }
        if !(dilatation.is_finite() && dilatation > 0.0) {
            return Err(Error::InvalidKernel {
                reason: format!("dilatation must be finite and > 0, got {dilatation}"),
            });
        }
        Ok(Self {
            shape,
            center,
            dilatation,
        })
    }

    pub fn uniform() -> Self {
        Self {
            shape: KernelShape::Uniform,
            center: 0.0,
            dilatation: 1.0,
        }
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn dilatation(&self) -> f64 {
        self.dilatation
    }

    pub fn weight(&self, position: f64) -> f64 {
        let u = (position - self.center) / self.dilatation;
        match self.shape {
            KernelShape::Uniform => 1.0,
            KernelShape::Gaussian => (-0.5 * u * u).exp(),
            KernelShape::Heaviside => {
                if u.abs() <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Principal time and the two dilatations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParameters {
    pub tau: f64,
    pub delta_t: f64,
    pub delta_s: f64,
}

/// `tau` at the last sample, `delta_s = 100 rho`, `delta_t` a quarter of the time span.
pub fn default_parameters(grid: &LrdGrid, rho: f64) -> KernelParameters {
    KernelParameters::for_length(grid.n(), rho)
}

impl KernelParameters {
    /// Defaults for a series of `n` samples indexed `0..n`.
    pub fn for_length(n: usize, rho: f64) -> Self {
        let last = n.saturating_sub(1) as f64;
        Self {
            tau: last,
            delta_t: last / 4.0,
            delta_s: 100.0 * rho,
        }
    }
}

/// How Phi's jackknife defines a resampling unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResamplingUnit {
    /// One box of the finest horizon; deleting it also deletes, at every
    /// coarser horizon, the box that contains its center.
    #[default]
    TimeSlice,
    /// One whole horizon row.
    Horizon,
}

/// A scalar indicator with its jackknife error and the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorResult {
    pub value: f64,
    pub jackknife_error: f64,
    pub resampling_units: usize,
    pub measure: MeasureKind,
    /// Principal horizon (for a per-horizon eta, the horizon itself).
    pub rho: f64,
    pub tau: f64,
    pub delta_t: f64,
    /// Absent for a per-horizon eta, which has no scale kernel.
    pub delta_s: Option<f64>,
    pub time_kernel: KernelShape,
    pub scale_kernel: Option<KernelShape>,
    pub degenerate_cells_skipped: usize,
}

type CellMask = Vec<Vec<bool>>;

fn full_mask(field: &MeasureField) -> CellMask {
    field
        .values()
        .iter()
        .map(|row| vec![true; row.len()])
        .collect()
}

fn row_average<W: Fn(f64) -> f64>(
    field: &MeasureField,
    row: usize,
    weight: &W,
    keep: Option<&[bool]>,
) -> Result<f64> {
    let fits = &field.grid().fits()[row];
    let values = &field.values()[row];
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, (fit, v)) in fits.iter().zip(values).enumerate() {
        if keep.is_some_and(|k| !k[i]) {
            continue;
        }
        if let Some(v) = v {
            let w = weight(fit.center_t);
            num += w * v;
            den += w;
        }
    }
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(Error::zero_mass(format!(
            "time kernel at horizon {}",
            field.horizons()[row]
        )))
    }
}

fn collapse<WT: Fn(f64) -> f64, WS: Fn(f64) -> f64>(
    field: &MeasureField,
    scale_weight: &WS,
    time_weight: &WT,
    mask: &CellMask,
    skip_rows: Option<&[bool]>,
    warn_skips: bool,
) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (row, &h) in field.horizons().iter().enumerate() {
        if skip_rows.is_some_and(|s| s[row]) {
            continue;
        }
        let eta = match row_average(field, row, time_weight, Some(&mask[row])) {
            Ok(eta) => eta,
            Err(Error::ZeroKernelMass { .. }) => {
                if warn_skips {
                    warn!("horizon {h} has no time-kernel mass; skipped");
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let w = scale_weight(h as f64);
        num += w * eta;
        den += w;
    }
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(Error::zero_mass("scale kernel"))
    }
}

/// Time-kernel average of the field row at horizon `h`.
pub fn eta(field: &MeasureField, h: usize, time_kernel: &Kernel) -> Result<f64> {
    let row = field.grid().row_index(h)?;
    row_average(field, row, &|t| time_kernel.weight(t), None)
}

/// Scale-kernel collapse of the per-horizon eta values.
pub fn phi(field: &MeasureField, scale_kernel: &Kernel, time_kernel: &Kernel) -> Result<f64> {
    collapse(
        field,
        &|s| scale_kernel.weight(s),
        &|t| time_kernel.weight(t),
        &full_mask(field),
        None,
        true,
    )
}

/// [`eta`] with a jackknife error; one unit is one non-degenerate box at `h`.
pub fn eta_indicator(
    field: &MeasureField,
    h: usize,
    time_kernel: &Kernel,
) -> Result<IndicatorResult> {
    let row = field.grid().row_index(h)?;
    let cells = &field.values()[row];
    let units: Vec<usize> = (0..cells.len()).filter(|&i| cells[i].is_some()).collect();
    let weight = |t: f64| time_kernel.weight(t);
    let estimate = jackknife(&units, |kept: &[usize]| {
        let mut keep = vec![false; cells.len()];
        for &i in kept {
            keep[i] = true;
        }
        row_average(field, row, &weight, Some(&keep))
    })?;
    Ok(IndicatorResult {
        value: estimate.value,
        jackknife_error: estimate.error,
        resampling_units: estimate.m,
        measure: field.kind(),
        rho: h as f64,
        tau: time_kernel.center(),
        delta_t: time_kernel.dilatation(),
        delta_s: None,
        time_kernel: time_kernel.shape(),
        scale_kernel: None,
        degenerate_cells_skipped: cells.len() - units.len(),
    })
}

/// Phi with a jackknife error over time slices.
pub fn phi_indicator(
    field: &MeasureField,
    scale_kernel: &Kernel,
    time_kernel: &Kernel,
) -> Result<IndicatorResult> {
    phi_indicator_with(field, scale_kernel, time_kernel, ResamplingUnit::default())
}

/// Phi with a jackknife error over the chosen resampling unit.
pub fn phi_indicator_with(
    field: &MeasureField,
    scale_kernel: &Kernel,
    time_kernel: &Kernel,
    unit: ResamplingUnit,
) -> Result<IndicatorResult> {
    let ws = |s: f64| scale_kernel.weight(s);
    let wt = |t: f64| time_kernel.weight(t);
    let value = collapse(field, &ws, &wt, &full_mask(field), None, true)?;

    let estimate = match unit {
        ResamplingUnit::TimeSlice => {
            let owners = slice_owners(field.grid());
            let finest = field.grid().fits()[0].len();
            let units: Vec<usize> = (0..finest).collect();
            jackknife(&units, |kept: &[usize]| {
                let mask = slice_mask(field, &owners, kept);
                collapse(field, &ws, &wt, &mask, None, false)
            })?
        }
        ResamplingUnit::Horizon => {
            let rows = field.horizons().len();
            let units: Vec<usize> = (0..rows).collect();
            let mask = full_mask(field);
            jackknife(&units, |kept: &[usize]| {
                let mut skip = vec![true; rows];
                for &r in kept {
                    skip[r] = false;
                }
                collapse(field, &ws, &wt, &mask, Some(&skip), false)
            })?
        }
    };

    Ok(IndicatorResult {
        value,
        jackknife_error: estimate.error,
        resampling_units: estimate.m,
        measure: field.kind(),
        rho: scale_kernel.center(),
        tau: time_kernel.center(),
        delta_t: time_kernel.dilatation(),
        delta_s: Some(scale_kernel.dilatation()),
        time_kernel: time_kernel.shape(),
        scale_kernel: Some(scale_kernel.shape()),
        degenerate_cells_skipped: field.flagged_count(),
    })
}

/// For every row and box, the finest-horizon boxes whose centers it contains.
fn slice_owners(grid: &LrdGrid) -> Vec<Vec<Vec<usize>>> {
    let finest = &grid.fits()[0];
    grid.fits()
        .iter()
        .map(|row| {
            row.iter()
                .map(|fit| {
                    finest
                        .iter()
                        .filter(|f| fit.time_box.contains(f.center_t))
                        .map(|f| f.time_box.index)
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// A box survives when every finest slice it contains is still present.
fn slice_mask(field: &MeasureField, owners: &[Vec<Vec<usize>>], kept: &[usize]) -> CellMask {
    let mut present = vec![false; field.grid().fits()[0].len()];
    for &j in kept {
        present[j] = true;
    }
    owners
        .iter()
        .map(|row| {
            row.iter()
                .map(|slices| slices.iter().all(|&j| present[j]))
                .collect()
        })
        .collect()
}
