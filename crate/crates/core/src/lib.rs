//! Local risk decomposition of profit-and-loss series.
//!
//! A cumulative PnL curve is cut into non-overlapping boxes at several
//! investment horizons. Each box is detrended by a least-squares line,
//! giving a local return (fitted endpoint difference) and a local risk
//! (RMS residual). From these come time-by-horizon fields of local Sharpe
//! ratios and local risk-adjusted returns, which kernel convolutions over
//! time and horizon collapse into scalar indicators with jackknife errors.
//!
//! ```
//! use lrd_core::{decompose, measure_field, phi_indicator, Kernel, MeasureKind, PnLSeries};
//!
//! let pnl: Vec<f64> = (0..400).map(|k| 0.1 * k as f64 + (k as f64 * 0.7).sin()).collect();
//! let series = PnLSeries::from_values(pnl).unwrap();
//! let grid = decompose(&series, &[20, 50, 100]).unwrap();
//! let field = measure_field(&grid, MeasureKind::Lsr).unwrap();
//! let phi = phi_indicator(&field, &Kernel::uniform(), &Kernel::uniform()).unwrap();
//! assert!(phi.value > 0.0);
//! ```

pub mod config;
pub mod decomposition;
pub mod error;
pub mod io;
pub mod kernels;
pub mod measures;
pub mod report;
pub mod resampling;
pub mod series;
pub mod synth;

pub use config::{IndicatorConfig, SynthFile};
pub use decomposition::{decompose, fit_box, partition, LocalFit, LrdGrid, TimeBox};
pub use error::{Error, ErrorCategory, Result};
pub use io::{export_field, load_csv, ExportFormat, GridExport, Provenance};
pub use kernels::{
    default_parameters, eta, eta_indicator, phi, phi_indicator, phi_indicator_with,
    IndicatorResult, Kernel, KernelParameters, KernelShape, ResamplingUnit,
};
pub use measures::{
    global_rar, global_sharpe, local_rar, local_sharpe, measure_field, phi_h, MeasureField,
    MeasureKind, ANNUALIZE_DAILY, ANNUALIZE_MONTHLY,
};
pub use report::{run_compare, run_indicator, CompareReport, IndicatorReport, SeriesReport};
pub use resampling::{jackknife, JackknifeEstimate};
pub use series::{PnLSeries, ReturnSeries};
pub use synth::{calibrate, calibrate_realized, generate, SynthSpec, TwoSeriesDesign};
