//! Python bindings for the `lrd_core` crate.

use std::cell::RefCell;

use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

use lrd_core as core;
use lrd_core::{ErrorCategory, ResamplingUnit};

create_exception!(
    lrd,
    NumericalError,
    PyArithmeticError,
    "A degenerate numerical configuration."
);

fn to_py(e: core::Error) -> PyErr {
    let msg = e.to_string();
    match e.category() {
        ErrorCategory::Usage => PyValueError::new_err(msg),
        ErrorCategory::Numerical => NumericalError::new_err(msg),
        ErrorCategory::Io => PyOSError::new_err(msg),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

#[pyclass(name = "PnLSeries", module = "lrd", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPnLSeries {
    inner: core::PnLSeries,
}

#[pymethods]
impl PyPnLSeries {
    #[new]
    #[pyo3(signature = (values, labels=None))]
    fn new(values: Vec<f64>, labels: Option<Vec<String>>) -> PyResult<Self> {
        Ok(Self {
            inner: core::PnLSeries::new(values, labels).py()?,
        })
    }

    #[staticmethod]
    fn load_csv(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::load_csv(path).py()?,
        })
    }

    fn save_csv(&self, path: &str) -> PyResult<()> {
        core::io::save_csv(&self.inner, path).py()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn labels(&self) -> Option<Vec<String>> {
        self.inner.labels().map(<[String]>::to_vec)
    }

    fn increments(&self) -> Vec<f64> {
        self.inner.increments().as_slice().to_vec()
    }

    fn range(&self) -> f64 {
        self.inner.range()
    }

    fn affine(&self, a: f64, b: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.affine(a, b).py()?,
        })
    }

    fn reversed(&self) -> Self {
        Self {
            inner: self.inner.reversed(),
        }
    }

    fn checksum(&self) -> String {
        self.inner.checksum()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("PnLSeries(n={})", self.inner.len())
    }
}

#[pyclass(
    name = "LocalFit",
    module = "lrd",
    frozen,
    get_all,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyLocalFit {
    horizon: usize,
    index: usize,
    start: usize,
    end: usize,
    slope: f64,
    intercept: f64,
    local_return: f64,
    local_risk: f64,
    center_t: f64,
}

impl From<&core::LocalFit> for PyLocalFit {
    fn from(f: &core::LocalFit) -> Self {
        Self {
            horizon: f.time_box.horizon,
            index: f.time_box.index,
            start: f.time_box.start,
            end: f.time_box.end,
            slope: f.slope,
            intercept: f.intercept,
            local_return: f.local_return,
            local_risk: f.local_risk,
            center_t: f.center_t,
        }
    }
}

#[pymethods]
impl PyLocalFit {
    fn __repr__(&self) -> String {
        format!(
            "LocalFit(h={}, index={}, return={:.6}, risk={:.6})",
            self.horizon, self.index, self.local_return, self.local_risk
        )
    }
}

#[pyclass(name = "LrdGrid", module = "lrd", frozen)]
struct PyLrdGrid {
    inner: core::LrdGrid,
}

#[pymethods]
impl PyLrdGrid {
    #[getter]
    fn horizons(&self) -> Vec<usize> {
        self.inner.horizons().to_vec()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn risk_floor(&self) -> f64 {
        self.inner.risk_floor()
    }

    fn row(&self, h: usize) -> PyResult<Vec<PyLocalFit>> {
        Ok(self
            .inner
            .row(h)
            .py()?
            .iter()
            .map(PyLocalFit::from)
            .collect())
    }

    fn cell_count(&self) -> usize {
        self.inner.cell_count()
    }
}

#[pyclass(name = "MeasureField", module = "lrd", frozen)]
struct PyMeasureField {
    inner: core::MeasureField,
}

#[pymethods]
impl PyMeasureField {
    #[getter]
    fn horizons(&self) -> Vec<usize> {
        self.inner.horizons().to_vec()
    }

    #[getter]
    fn measure(&self) -> String {
        self.inner.kind().to_string()
    }

    /// One list per horizon; degenerate cells are `None`.
    #[getter]
    fn values(&self) -> Vec<Vec<Option<f64>>> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn centers(&self) -> Vec<Vec<f64>> {
        self.inner
            .grid()
            .fits()
            .iter()
            .map(|row| row.iter().map(|f| f.center_t).collect())
            .collect()
    }

    fn flagged_count(&self) -> usize {
        self.inner.flagged_count()
    }

    /// Write the field as CSV or JSON, chosen by extension unless `format` is given.
    #[pyo3(signature = (path, format=None))]
    fn export(&self, path: &str, format: Option<&str>) -> PyResult<()> {
        let format = match format {
            Some(f) => f.parse().py()?,
            None => core::ExportFormat::from_path(path.as_ref()),
        };
        core::export_field(&self.inner, path, format, None).py()
    }
}

#[pyclass(name = "Kernel", module = "lrd", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyKernel {
    inner: core::Kernel,
}

#[pymethods]
impl PyKernel {
    #[new]
    #[pyo3(signature = (shape, center=0.0, dilatation=1.0))]
    fn new(shape: &str, center: f64, dilatation: f64) -> PyResult<Self> {
        let shape: core::KernelShape = shape.parse().py()?;
        Ok(Self {
            inner: core::Kernel::new(shape, center, dilatation).py()?,
        })
    }

    #[staticmethod]
    fn uniform() -> Self {
        Self {
            inner: core::Kernel::uniform(),
        }
    }

    fn weight(&self, position: f64) -> f64 {
        self.inner.weight(position)
    }

    fn __repr__(&self) -> String {
        format!(
            "Kernel({}, center={}, dilatation={})",
            self.inner.shape(),
            self.inner.center(),
            self.inner.dilatation()
        )
    }
}

#[pyclass(name = "IndicatorResult", module = "lrd", frozen, get_all)]
struct PyIndicatorResult {
    value: f64,
    jackknife_error: f64,
    resampling_units: usize,
    measure: String,
    rho: f64,
    tau: f64,
    delta_t: f64,
    delta_s: Option<f64>,
    degenerate_cells_skipped: usize,
}

impl From<core::IndicatorResult> for PyIndicatorResult {
    fn from(r: core::IndicatorResult) -> Self {
        Self {
            value: r.value,
            jackknife_error: r.jackknife_error,
            resampling_units: r.resampling_units,
            measure: r.measure.to_string(),
            rho: r.rho,
            tau: r.tau,
            delta_t: r.delta_t,
            delta_s: r.delta_s,
            degenerate_cells_skipped: r.degenerate_cells_skipped,
        }
    }
}

#[pymethods]
impl PyIndicatorResult {
    fn __repr__(&self) -> String {
        format!(
            "IndicatorResult({})",
            core::report::format_uncertainty(self.value, self.jackknife_error)
        )
    }
}

#[pyclass(name = "CompareReport", module = "lrd", frozen)]
struct PyCompareReport {
    inner: core::report::CompareReport,
}

#[pymethods]
impl PyCompareReport {
    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().py()
    }

    fn render(&self) -> String {
        core::report::render_compare(&self.inner)
    }

    #[getter]
    fn sharpe(&self) -> (f64, f64) {
        (self.inner.a.sharpe, self.inner.b.sharpe)
    }
}

fn measure_kind(measure: &str, beta: f64, normalize: bool) -> PyResult<core::MeasureKind> {
    Ok(match measure.to_ascii_lowercase().as_str() {
        "lsr" => core::MeasureKind::Lsr,
        "lra" => core::MeasureKind::Lra { beta, normalize },
        "return" => core::MeasureKind::LocalReturn,
        "risk" => core::MeasureKind::LocalRisk,
        other => return Err(PyValueError::new_err(format!("unknown measure {other:?}"))),
    })
}

#[pyfunction]
fn decompose(series: &PyPnLSeries, horizons: Vec<usize>) -> PyResult<PyLrdGrid> {
    Ok(PyLrdGrid {
        inner: core::decompose(&series.inner, &horizons).py()?,
    })
}

#[pyfunction]
#[pyo3(signature = (grid, measure="lsr", beta=0.75, normalize=false))]
fn measure_field(
    grid: &PyLrdGrid,
    measure: &str,
    beta: f64,
    normalize: bool,
) -> PyResult<PyMeasureField> {
    let kind = measure_kind(measure, beta, normalize)?;
    Ok(PyMeasureField {
        inner: core::measure_field(&grid.inner, kind).py()?,
    })
}

#[pyfunction]
#[pyo3(signature = (series, annualization=core::ANNUALIZE_DAILY))]
fn global_sharpe(series: &PyPnLSeries, annualization: f64) -> PyResult<f64> {
    core::global_sharpe(&series.inner, annualization).py()
}

#[pyfunction]
#[pyo3(signature = (series, beta=0.75))]
fn global_rar(series: &PyPnLSeries, beta: f64) -> PyResult<f64> {
    core::global_rar(&series.inner, beta).py()
}

#[pyfunction]
fn phi_h(grid: &PyLrdGrid, h: usize) -> PyResult<f64> {
    core::phi_h(&grid.inner, h).py()
}

/// `(tau, delta_t, delta_s)` defaults for `n` samples and principal horizon `rho`.
#[pyfunction]
fn kernel_parameters(n: usize, rho: f64) -> (f64, f64, f64) {
    let p = core::KernelParameters::for_length(n, rho);
    (p.tau, p.delta_t, p.delta_s)
}

#[pyfunction]
fn eta(field: &PyMeasureField, h: usize, time_kernel: &PyKernel) -> PyResult<f64> {
    core::eta(&field.inner, h, &time_kernel.inner).py()
}

#[pyfunction]
fn phi(field: &PyMeasureField, scale_kernel: &PyKernel, time_kernel: &PyKernel) -> PyResult<f64> {
    core::phi(&field.inner, &scale_kernel.inner, &time_kernel.inner).py()
}

#[pyfunction]
fn eta_indicator(
    field: &PyMeasureField,
    h: usize,
    time_kernel: &PyKernel,
) -> PyResult<PyIndicatorResult> {
    Ok(core::eta_indicator(&field.inner, h, &time_kernel.inner)
        .py()?
        .into())
}

#[pyfunction]
#[pyo3(signature = (field, scale_kernel, time_kernel, unit="time-slice"))]
fn phi_indicator(
    field: &PyMeasureField,
    scale_kernel: &PyKernel,
    time_kernel: &PyKernel,
    unit: &str,
) -> PyResult<PyIndicatorResult> {
    let unit = match unit {
        "time-slice" => ResamplingUnit::TimeSlice,
        "horizon" => ResamplingUnit::Horizon,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown resampling unit {other:?}"
            )))
        }
    };
    Ok(
        core::phi_indicator_with(&field.inner, &scale_kernel.inner, &time_kernel.inner, unit)
            .py()?
            .into(),
    )
}

/// Delete-one jackknife of a Python callable over a list of units.
///
/// Returns `(value, error, m)`.
#[pyfunction]
fn jackknife(
    py: Python<'_>,
    units: Vec<Py<PyAny>>,
    estimator: Bound<'_, PyAny>,
) -> PyResult<(f64, f64, usize)> {
    let raised: RefCell<Option<PyErr>> = RefCell::new(None);
    let indices: Vec<usize> = (0..units.len()).collect();
    let result = core::jackknife(&indices, |kept: &[usize]| {
        let subset: Vec<Py<PyAny>> = kept.iter().map(|&i| units[i].clone_ref(py)).collect();
        match estimator.call1((subset,)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => Ok(v),
            Err(e) => {
                raised.borrow_mut().get_or_insert(e);
                Err(core::Error::InvalidParameter {
                    reason: "estimator raised".into(),
                })
            }
        }
    });
    if let Some(e) = raised.into_inner() {
        return Err(e);
    }
    let est = result.py()?;
    Ok((est.value, est.error, est.m))
}

/// A series with piecewise-constant drift. `segments` is a list of
/// `(length, drift)`; without it one segment of `drift` spans the series.
#[pyfunction]
#[pyo3(signature = (n, noise_amplitude, seed, drift=0.0, segments=None))]
fn generate(
    n: usize,
    noise_amplitude: f64,
    seed: u64,
    drift: f64,
    segments: Option<Vec<(usize, f64)>>,
) -> PyResult<PyPnLSeries> {
    let mut spec = core::SynthSpec::linear(n, drift, noise_amplitude, seed);
    if let Some(segments) = segments {
        spec.segments = segments
            .into_iter()
            .map(|(length, drift)| core::synth::Segment { length, drift })
            .collect();
    }
    Ok(PyPnLSeries {
        inner: core::generate(&spec).py()?,
    })
}

#[pyfunction]
#[pyo3(signature = (target_sharpe, noise_amplitude, n, annualization=core::ANNUALIZE_DAILY))]
fn calibrate(
    target_sharpe: f64,
    noise_amplitude: f64,
    n: usize,
    annualization: f64,
) -> PyResult<f64> {
    core::calibrate(target_sharpe, noise_amplitude, n, annualization).py()
}

/// The calibrated `(blue, green)` pair of the default two-series design.
#[pyfunction]
fn two_series(seed: u64) -> PyResult<(PyPnLSeries, PyPnLSeries)> {
    let (blue, green) = core::TwoSeriesDesign::default().generate(seed).py()?;
    Ok((PyPnLSeries { inner: blue }, PyPnLSeries { inner: green }))
}

#[pyfunction]
fn load_csv(path: &str) -> PyResult<PyPnLSeries> {
    PyPnLSeries::load_csv(path)
}

/// Compare two series. `config` is TOML text; defaults apply when omitted.
#[pyfunction]
#[pyo3(signature = (a, b, config=None, names=("a".to_string(), "b".to_string())))]
fn compare(
    a: &PyPnLSeries,
    b: &PyPnLSeries,
    config: Option<&str>,
    names: (String, String),
) -> PyResult<PyCompareReport> {
    let config = match config {
        Some(text) => core::IndicatorConfig::from_toml_str(text).py()?,
        None => core::IndicatorConfig::default(),
    };
    Ok(PyCompareReport {
        inner: core::run_compare(&a.inner, &b.inner, (&names.0, &names.1), &config).py()?,
    })
}

#[pymodule]
fn lrd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add("ANNUALIZE_DAILY", core::ANNUALIZE_DAILY)?;
    m.add("ANNUALIZE_MONTHLY", core::ANNUALIZE_MONTHLY)?;
    m.add_class::<PyPnLSeries>()?;
    m.add_class::<PyLocalFit>()?;
    m.add_class::<PyLrdGrid>()?;
    m.add_class::<PyMeasureField>()?;
    m.add_class::<PyKernel>()?;
    m.add_class::<PyIndicatorResult>()?;
    m.add_class::<PyCompareReport>()?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(measure_field, m)?)?;
    m.add_function(wrap_pyfunction!(global_sharpe, m)?)?;
    m.add_function(wrap_pyfunction!(global_rar, m)?)?;
    m.add_function(wrap_pyfunction!(phi_h, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(eta, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(eta_indicator, m)?)?;
    m.add_function(wrap_pyfunction!(phi_indicator, m)?)?;
    m.add_function(wrap_pyfunction!(jackknife, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(two_series, m)?)?;
    m.add_function(wrap_pyfunction!(load_csv, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
