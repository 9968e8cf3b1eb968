//! Indicator reports for one series and side-by-side comparisons of two.

use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::config::IndicatorConfig;
use crate::decomposition::decompose;
use crate::error::{Error, Result};
use crate::kernels::{eta_indicator, phi_indicator_with, IndicatorResult};
use crate::measures::{global_sharpe, measure_field, MeasureKind};
use crate::series::PnLSeries;

/// Phi at one principal horizon, plus eta at that horizon when it is on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub measure: MeasureKind,
    pub rho: f64,
    pub phi: IndicatorResult,
    pub eta: Option<IndicatorResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub name: String,
    pub n: usize,
    pub source_checksum: String,
    /// Annualized Sharpe ratio of the daily increments.
    pub sharpe: f64,
    pub horizons: Vec<usize>,
    pub indicators: Vec<IndicatorRow>,
}

impl SeriesReport {
    pub fn find(&self, measure: &str, rho: f64) -> Option<&IndicatorRow> {
        self.indicators
            .iter()
            .find(|r| r.measure.name() == measure && r.rho == rho)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub config: IndicatorConfig,
    pub series: SeriesReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub config: IndicatorConfig,
    pub a: SeriesReport,
    pub b: SeriesReport,
}

/// Every configured (measure, rho) indicator for `series`.
pub fn analyze(series: &PnLSeries, name: &str, config: &IndicatorConfig) -> Result<SeriesReport> {
    config.validate()?;
    let n = series.len();
    let horizons = config.resolve_horizons(n)?;
    let grid = decompose(series, &horizons)?;
    let rhos = config.resolve_rho(grid.horizons());
    let sharpe = global_sharpe(series, config.annualization)?;

    let mut indicators = Vec::new();
    for kind in config.measures() {
        let field = measure_field(&grid, kind)?;
        for &rho in &rhos {
            let (time_kernel, scale_kernel) = config.kernels(n, rho)?;
            let phi = phi_indicator_with(&field, &scale_kernel, &time_kernel, config.resampling)?;

            let on_grid = (rho.fract() == 0.0 && rho >= 0.0)
                .then_some(rho as usize)
                .filter(|h| grid.horizons().contains(h));
            let (eta, eta_note) = match on_grid {
                None => (
                    None,
                    Some(format!(
                        "rho {rho} is not one of the decomposition horizons"
                    )),
                ),
                Some(h) => match eta_indicator(&field, h, &time_kernel) {
                    Ok(e) => (Some(e), None),
                    Err(e) if e.category() == crate::error::ErrorCategory::Numerical => {
                        warn!("{name}: eta for {kind} at horizon {h} unavailable: {e}");
                        (None, Some(e.to_string()))
                    }
                    Err(e) => return Err(e),
                },
            };
            indicators.push(IndicatorRow {
                measure: kind,
                rho,
                phi,
                eta,
                eta_note,
            });
        }
    }

    Ok(SeriesReport {
        name: name.to_string(),
        n,
        source_checksum: grid.source_checksum().to_string(),
        sharpe,
        horizons: grid.horizons().to_vec(),
        indicators,
    })
}

pub fn run_indicator(
    series: &PnLSeries,
    name: &str,
    config: &IndicatorConfig,
) -> Result<IndicatorReport> {
    Ok(IndicatorReport {
        config: config.clone(),
        series: analyze(series, name, config)?,
    })
}

pub fn run_compare(
    series_a: &PnLSeries,
    series_b: &PnLSeries,
    names: (&str, &str),
    config: &IndicatorConfig,
) -> Result<CompareReport> {
    Ok(CompareReport {
        config: config.clone(),
        a: analyze(series_a, names.0, config)?,
        b: analyze(series_b, names.1, config)?,
    })
}

/// `value(error)` with the error rounded to one significant digit and the
/// value printed to the same decimal place, e.g. `2.71(7)`.
pub fn format_uncertainty(value: f64, error: f64) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    if !(error.is_finite() && error > 0.0) {
        return format!("{value:.4}(0)");
    }
    let mut decimals = -error.log10().floor() as i32;
    let mut digit = (error * 10f64.powi(decimals)).round();
    if digit >= 10.0 {
        decimals -= 1;
        digit = (error * 10f64.powi(decimals)).round();
    }
    // Adding 0.0 turns a value that rounds to -0 into +0.
    if decimals >= 0 {
        let scale = 10f64.powi(decimals);
        let value = (value * scale).round() / scale + 0.0;
        format!("{value:.prec$}({digit:.0})", prec = decimals as usize)
    } else {
        // Error spans whole units: keep the value integral and print the full error.
        let value = value.round() + 0.0;
        format!("{value:.0}({error:.0})")
    }
}

fn cell(row: Option<&IndicatorResult>) -> String {
    row.map_or_else(
        || "-".to_string(),
        |r| format_uncertainty(r.value, r.jackknife_error),
    )
}

fn label(kind: MeasureKind) -> String {
    match kind {
        MeasureKind::Lsr => "LSR".into(),
        MeasureKind::Lra { .. } => "LRA".into(),
        MeasureKind::LocalReturn => "RET".into(),
        MeasureKind::LocalRisk => "RISK".into(),
    }
}

/// Plain-text tables in `a/b` form, one column per principal horizon.
pub fn render_compare(report: &CompareReport) -> String {
    let cfg = &report.config;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "series: {} (a) / {} (b)\nkernels: time={} scale={}  beta={}  normalize={}",
        report.a.name, report.b.name, cfg.kernel_time, cfg.kernel_scale, cfg.beta, cfg.normalize
    );
    let _ = writeln!(
        out,
        "sharpe (annualized): {:.4} / {:.4}",
        report.a.sharpe, report.b.sharpe
    );

    let rhos = cfg.resolve_rho(&report.a.horizons);
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    for kind in cfg.measures() {
        let pick = |s: &SeriesReport, rho: f64| -> Option<IndicatorRow> {
            s.indicators
                .iter()
                .find(|r| r.measure == kind && r.rho == rho)
                .cloned()
        };
        let mut phi_cells = Vec::new();
        let mut eta_cells = Vec::new();
        for &rho in &rhos {
            let (a, b) = (pick(&report.a, rho), pick(&report.b, rho));
            phi_cells.push(format!(
                "{}/{}",
                cell(a.as_ref().map(|r| &r.phi)),
                cell(b.as_ref().map(|r| &r.phi))
            ));
            eta_cells.push(format!(
                "{}/{}",
                cell(a.as_ref().and_then(|r| r.eta.as_ref())),
                cell(b.as_ref().and_then(|r| r.eta.as_ref()))
            ));
        }
        rows.push((format!("Phi[{}]", label(kind)), phi_cells));
        rows.push((format!("eta[{}]", label(kind)), eta_cells));
    }

    let header: Vec<String> = rhos.iter().map(|r| format!("rho={r}")).collect();
    let name_width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
    let col_width = rows
        .iter()
        .flat_map(|(_, c)| c.iter().map(String::len))
        .chain(header.iter().map(String::len))
        .max()
        .unwrap_or(0);
    let _ = write!(out, "{:name_width$}", "");
    for h in &header {
        let _ = write!(out, "  {h:>col_width$}");
    }
    out.push('\n');
    for (name, cells) in rows {
        let _ = write!(out, "{name:name_width$}");
        for c in cells {
            let _ = write!(out, "  {c:>col_width$}");
        }
        out.push('\n');
    }
    out
}

impl CompareReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(Error::from)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(Error::from)
    }
}

impl IndicatorReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(Error::from)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(Error::from)
    }
}
