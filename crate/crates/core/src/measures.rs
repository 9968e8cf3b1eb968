//! Global baselines and the local performance fields built on an [`LrdGrid`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decomposition::{LocalFit, LrdGrid};
use crate::error::{Error, Result};
use crate::series::PnLSeries;

/// `sqrt(252)`, annualization for daily returns.
pub const ANNUALIZE_DAILY: f64 = 15.874_507_866_387_544;
/// `sqrt(12)`, annualization for monthly returns.
pub const ANNUALIZE_MONTHLY: f64 = 3.464_101_615_137_754_6;

/// Which local quantity a [`MeasureField`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    LocalReturn,
    LocalRisk,
    /// Local Sharpe ratio `r / sigma`.
    Lsr,
    /// Local risk-adjusted return `r - beta * phi_h * sigma`.
    Lra {
        beta: f64,
        normalize: bool,
    },
}

impl MeasureKind {
    pub fn lra(beta: f64) -> Self {
        MeasureKind::Lra {
            beta,
            normalize: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let MeasureKind::Lra { beta, .. } = *self {
            if !beta.is_finite() || beta < 0.0 {
                return Err(Error::invalid(format!(
                    "risk aversion must be finite and >= 0, got {beta}"
                )));
            }
        }
        Ok(())
    }

    /// Short lowercase name used in reports and file metadata.
    pub fn name(&self) -> &'static str {
        match self {
            MeasureKind::LocalReturn => "return",
            MeasureKind::LocalRisk => "risk",
            MeasureKind::Lsr => "lsr",
            MeasureKind::Lra { .. } => "lra",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureKind::Lra { beta, normalize } => {
                write!(
                    f,
                    "lra(beta={beta}{})",
                    if *normalize { ", normalized" } else { "" }
                )
            }
            other => f.write_str(other.name()),
        }
    }
}

/// Annualized Sharpe ratio of the daily increments.
///
/// Uses the sample mean and the population standard deviation. A
/// volatility at or below the series' degeneracy floor is an error rather
/// than an infinite ratio.
pub fn global_sharpe(series: &PnLSeries, annualization: f64) -> Result<f64> {
    let r = series.increments();
    if r.len() < 2 {
        return Err(Error::TooShort { n: series.len() });
    }
    let sigma = r.std_population();
    let floor = series.degeneracy_floor();
    if sigma <= floor {
        return Err(Error::ZeroVolatility { sigma, floor });
    }
    Ok(annualization * r.mean() / sigma)
}

/// `mean(r) - beta * sigma(r)` over the daily increments.
pub fn global_rar(series: &PnLSeries, beta: f64) -> Result<f64> {
    let r = series.increments();
    if r.len() < 2 {
        return Err(Error::TooShort { n: series.len() });
    }
    Ok(r.mean() - beta * r.std_population())
}

/// Mean local return over mean local risk at horizon `h`. May be negative.
pub fn phi_h(grid: &LrdGrid, h: usize) -> Result<f64> {
    phi_of_row(grid.row(h)?, h, grid.risk_floor())
}

fn phi_of_row(row: &[LocalFit], h: usize, floor: f64) -> Result<f64> {
    let m = row.len() as f64;
    let mean_return = row.iter().map(|f| f.local_return).sum::<f64>() / m;
    let mean_risk = row.iter().map(|f| f.local_risk).sum::<f64>() / m;
    if mean_risk <= floor {
        return Err(Error::ZeroMeanRisk { h, floor });
    }
    Ok(mean_return / mean_risk)
}

/// Local Sharpe ratio of one box, `None` when its risk is at or below `floor`.
pub fn local_sharpe(fit: &LocalFit, floor: f64) -> Option<f64> {
    (fit.local_risk > floor).then(|| fit.local_return / fit.local_risk)
}

/// Local risk-adjusted return of one box.
pub fn local_rar(fit: &LocalFit, beta: f64, phi: f64) -> f64 {
    fit.local_return - beta * phi * fit.local_risk
}

/// A local measure evaluated on every cell of a grid.
///
/// Degenerate cells (LSR with zero local risk) hold `None` and are skipped
/// by every downstream convolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureField {
    grid: LrdGrid,
    kind: MeasureKind,
    values: Vec<Vec<Option<f64>>>,
}

impl MeasureField {
    pub fn grid(&self) -> &LrdGrid {
        &self.grid
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn horizons(&self) -> &[usize] {
        self.grid.horizons()
    }

    /// Per-horizon cell values aligned with `grid().fits()`.
    pub fn values(&self) -> &[Vec<Option<f64>>] {
        &self.values
    }

    pub fn row(&self, h: usize) -> Result<&[Option<f64>]> {
        self.grid.row_index(h).map(|i| self.values[i].as_slice())
    }

    pub fn flags(&self) -> Vec<Vec<bool>> {
        self.values
            .iter()
            .map(|row| row.iter().map(Option::is_none).collect())
            .collect()
    }

    pub fn flagged_count(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_none()).count()
    }
}

/// Evaluate `kind` on every cell of `grid`.
///
/// For a normalized LRA every cell is divided by one global divisor: the
/// population standard deviation of all LRA cells of the grid.
pub fn measure_field(grid: &LrdGrid, kind: MeasureKind) -> Result<MeasureField> {
    kind.validate()?;
    let floor = grid.risk_floor();
    let mut values: Vec<Vec<Option<f64>>> = match kind {
        MeasureKind::LocalReturn => map_cells(grid, |f| Some(f.local_return)),
        MeasureKind::LocalRisk => map_cells(grid, |f| Some(f.local_risk)),
        MeasureKind::Lsr => map_cells(grid, |f| local_sharpe(f, floor)),
        MeasureKind::Lra { beta, .. } => grid
            .horizons()
            .iter()
            .zip(grid.fits())
            .map(|(&h, row)| {
                let phi = phi_of_row(row, h, floor)?;
                Ok(row.iter().map(|f| Some(local_rar(f, beta, phi))).collect())
            })
            .collect::<Result<_>>()?,
    };

    if let MeasureKind::Lra {
        normalize: true, ..
    } = kind
    {
        let all: Vec<f64> = values.iter().flatten().flatten().copied().collect();
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        let sd = (all.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / all.len() as f64).sqrt();
        if sd <= floor {
            return Err(Error::ZeroFieldSpread);
        }
        for v in values.iter_mut().flatten().flatten() {
            *v /= sd;
        }
    }

    Ok(MeasureField {
        grid: grid.clone(),
        kind,
        values,
    })
}

fn map_cells(grid: &LrdGrid, f: impl Fn(&LocalFit) -> Option<f64>) -> Vec<Vec<Option<f64>>> {
    grid.fits()
        .iter()
        .map(|row| row.iter().map(&f).collect())
        .collect()
}
