//! Flat key-value configuration for indicator runs and synthetic series.
//!
//! Both documents are TOML. An indicator config looks like
//!
//! ```toml
//! horizons = [50, 100, 250, 500, 1000]
//! measure = ["lsr", "lra"]
//! beta = 0.75
//! normalize = false
//! kernel_time = "gaussian"
//! kernel_scale = "gaussian"
//! rho = [50, 100, 250, 500, 1000]
//! tau = "last"
//! delta_t = "default"
//! delta_s = "default"
//! ```

use std::fs;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::decomposition::admissible_horizons;
use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelParameters, KernelShape, ResamplingUnit};
use crate::measures::{MeasureKind, ANNUALIZE_DAILY};
use crate::synth::{Segment, SynthSpec};

/// Horizons used when a config does not name any.
pub const DEFAULT_HORIZONS: [usize; 5] = [50, 100, 250, 500, 1000];

/// Default risk aversion.
pub const DEFAULT_BETA: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureName {
    Lsr,
    Lra,
    #[serde(alias = "local_return")]
    Return,
    #[serde(alias = "local_risk")]
    Risk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(t) => vec![t.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// `"last"` or an explicit sample index.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Keyword<f64>", into = "Keyword<f64>")]
pub enum TauSpec {
    #[default]
    Last,
    At(f64),
}

/// `"default"` (the standard convention) or an explicit positive value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Keyword<f64>", into = "Keyword<f64>")]
pub enum DilatationSpec {
    #[default]
    Default,
    Value(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Keyword<T> {
    Word(String),
    Number(T),
}

impl TryFrom<Keyword<f64>> for TauSpec {
    type Error = String;

    fn try_from(k: Keyword<f64>) -> std::result::Result<Self, String> {
        match k {
            Keyword::Word(w) if w.eq_ignore_ascii_case("last") => Ok(TauSpec::Last),
            Keyword::Word(w) => Err(format!("tau must be \"last\" or a number, got {w:?}")),
            Keyword::Number(t) => Ok(TauSpec::At(t)),
        }
    }
}

impl From<TauSpec> for Keyword<f64> {
    fn from(t: TauSpec) -> Self {
        match t {
            TauSpec::Last => Keyword::Word("last".into()),
            TauSpec::At(t) => Keyword::Number(t),
        }
    }
}

impl TryFrom<Keyword<f64>> for DilatationSpec {
    type Error = String;

    fn try_from(k: Keyword<f64>) -> std::result::Result<Self, String> {
        match k {
            Keyword::Word(w)
                if w.eq_ignore_ascii_case("paper") || w.eq_ignore_ascii_case("default") =>
            {
                Ok(DilatationSpec::Default)
            }
            Keyword::Word(w) => Err(format!(
                "dilatation must be \"default\" or a number, got {w:?}"
            )),
            Keyword::Number(v) => Ok(DilatationSpec::Value(v)),
        }
    }
}

impl From<DilatationSpec> for Keyword<f64> {
    fn from(d: DilatationSpec) -> Self {
        match d {
            DilatationSpec::Default => Keyword::Word("default".into()),
            DilatationSpec::Value(v) => Keyword::Number(v),
        }
    }
}

fn default_measures() -> OneOrMany<MeasureName> {
    OneOrMany::Many(vec![MeasureName::Lsr, MeasureName::Lra])
}

fn default_beta() -> f64 {
    DEFAULT_BETA
}

fn default_kernel() -> KernelShape {
    KernelShape::Gaussian
}

fn default_annualization() -> f64 {
    ANNUALIZE_DAILY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicatorConfig {
    /// Explicit horizons, or the defaults clipped to the series length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<usize>>,
    #[serde(default = "default_measures")]
    pub measure: OneOrMany<MeasureName>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub normalize: bool,
    #[serde(default = "default_kernel")]
    pub kernel_time: KernelShape,
    #[serde(default = "default_kernel")]
    pub kernel_scale: KernelShape,
    /// Principal horizons; defaults to the resolved horizons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    #[serde(default)]
    pub tau: TauSpec,
    #[serde(default)]
    pub delta_t: DilatationSpec,
    #[serde(default)]
    pub delta_s: DilatationSpec,
    #[serde(default = "default_annualization")]
    pub annualization: f64,
    #[serde(default)]
    pub resampling: ResamplingUnit,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        Self {
            horizons: None,
            measure: default_measures(),
            beta: DEFAULT_BETA,
            normalize: false,
            kernel_time: KernelShape::Gaussian,
            kernel_scale: KernelShape::Gaussian,
            rho: None,
            tau: TauSpec::Last,
            delta_t: DilatationSpec::Default,
            delta_s: DilatationSpec::Default,
            annualization: ANNUALIZE_DAILY,
            resampling: ResamplingUnit::TimeSlice,
        }
    }
}

impl IndicatorConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("indicator config is always representable in TOML")
    }

    pub fn with_kernels(mut self, shape: KernelShape) -> Self {
        self.kernel_time = shape;
        self.kernel_scale = shape;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::Config(format!(
                "beta must be finite and >= 0, got {}",
                self.beta
            )));
        }
        if !(self.annualization.is_finite() && self.annualization > 0.0) {
            return Err(Error::Config(format!(
                "annualization must be finite and > 0, got {}",
                self.annualization
            )));
        }
        if self.measure.to_vec().is_empty() {
            return Err(Error::Config("at least one measure is required".into()));
        }
        if let Some(h) = &self.horizons {
            if h.is_empty() {
                return Err(Error::Config("horizons must not be empty".into()));
            }
        }
        if let Some(rho) = &self.rho {
            if rho.is_empty() || rho.iter().any(|r| !r.is_finite()) {
                return Err(Error::Config(
                    "rho must be a non-empty list of finite numbers".into(),
                ));
            }
        }
        for (name, d) in [("delta_t", self.delta_t), ("delta_s", self.delta_s)] {
            if let DilatationSpec::Value(v) = d {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Config(format!("{name} must be > 0, got {v}")));
                }
            }
        }
        if let TauSpec::At(t) = self.tau {
            if !t.is_finite() {
                return Err(Error::Config(format!("tau must be finite, got {t}")));
            }
        }
        Ok(())
    }

    pub fn measures(&self) -> Vec<MeasureKind> {
        self.measure
            .to_vec()
            .into_iter()
            .map(|m| match m {
                MeasureName::Lsr => MeasureKind::Lsr,
                MeasureName::Lra => MeasureKind::Lra {
                    beta: self.beta,
                    normalize: self.normalize,
                },
                MeasureName::Return => MeasureKind::LocalReturn,
                MeasureName::Risk => MeasureKind::LocalRisk,
            })
            .collect()
    }

    /// Horizons for a series of `n` samples.
    pub fn resolve_horizons(&self, n: usize) -> Result<Vec<usize>> {
        let horizons = match &self.horizons {
            Some(h) => h.clone(),
            None => {
                let clipped = admissible_horizons(n, &DEFAULT_HORIZONS);
                if clipped.len() < DEFAULT_HORIZONS.len() {
                    warn!("series of {n} samples supports only horizons {clipped:?}");
                }
                clipped
            }
        };
        if horizons.is_empty() {
            return Err(Error::InsufficientBoxes {
                h: DEFAULT_HORIZONS[0],
                boxes: n / DEFAULT_HORIZONS[0],
                n,
            });
        }
        Ok(horizons)
    }

    pub fn resolve_rho(&self, horizons: &[usize]) -> Vec<f64> {
        match &self.rho {
            Some(r) => r.clone(),
            None => horizons.iter().map(|&h| h as f64).collect(),
        }
    }

    /// Kernel parameters for a series of `n` samples at principal horizon `rho`.
    pub fn parameters(&self, n: usize, rho: f64) -> KernelParameters {
        let defaults = KernelParameters::for_length(n, rho);
        KernelParameters {
            tau: match self.tau {
                TauSpec::Last => defaults.tau,
                TauSpec::At(t) => t,
            },
            delta_t: match self.delta_t {
                DilatationSpec::Default => defaults.delta_t,
                DilatationSpec::Value(v) => v,
            },
            delta_s: match self.delta_s {
                DilatationSpec::Default => defaults.delta_s,
                DilatationSpec::Value(v) => v,
            },
        }
    }

    /// `(time, scale)` kernels for a series of `n` samples at `rho`.
    pub fn kernels(&self, n: usize, rho: f64) -> Result<(Kernel, Kernel)> {
        let p = self.parameters(n, rho);
        Ok((
            Kernel::new(self.kernel_time, p.tau, p.delta_t)?,
            Kernel::new(self.kernel_scale, rho, p.delta_s)?,
        ))
    }
}

/// Synthetic series description as read from a TOML file.
///
/// With `target_sharpe` set, segment drifts are relative weights that get
/// rescaled until the realized Sharpe ratio hits the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthFile {
    pub n: usize,
    pub noise_amplitude: f64,
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub target_sharpe: Option<f64>,
    #[serde(default = "default_annualization")]
    pub annualization: f64,
}

impl SynthFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    /// The concrete spec for `seed`, calibrated when a target is given.
    pub fn to_spec(&self, seed: u64) -> Result<SynthSpec> {
        let spec = SynthSpec {
            n: self.n,
            segments: self.segments.clone(),
            noise_amplitude: self.noise_amplitude,
            seed,
        };
        match self.target_sharpe {
            Some(target) => crate::synth::calibrate_realized(&spec, target, self.annualization),
            None => {
                spec.validate()?;
                Ok(spec)
            }
        }
    }
}
