//! Seeded artificial PnL curves: piecewise-constant drift plus Gaussian increments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{global_sharpe, ANNUALIZE_DAILY};
use crate::series::PnLSeries;

/// Identity of the pseudorandom stream, recorded in output metadata.
pub const GENERATOR: &str = "chacha8/seed_from_u64+standard_normal(ziggurat)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Number of increments.
    pub length: usize,
    /// Currency per sample.
    pub drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub segments: Vec<Segment>,
    /// Standard deviation of the additive Gaussian increments.
    pub noise_amplitude: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// A single drift over the whole series.
    pub fn linear(n: usize, drift: f64, noise_amplitude: f64, seed: u64) -> Self {
        Self {
            n,
            segments: vec![Segment {
                length: n.saturating_sub(1),
                drift,
            }],
            noise_amplitude,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::SpecInvalid {
                reason: format!("n must be at least 2, got {}", self.n),
            });
        }
        let total: usize = self.segments.iter().map(|s| s.length).sum();
        if total != self.n - 1 {
            return Err(Error::SpecInvalid {
                reason: format!(
                    "segment lengths sum to {total}, expected n - 1 = {}",
                    self.n - 1
                ),
            });
        }
        if !(self.noise_amplitude.is_finite() && self.noise_amplitude >= 0.0) {
            return Err(Error::SpecInvalid {
                reason: format!("noise amplitude must be >= 0, got {}", self.noise_amplitude),
            });
        }
        if let Some(s) = self.segments.iter().find(|s| !s.drift.is_finite()) {
            return Err(Error::SpecInvalid {
                reason: format!("non-finite drift {}", s.drift),
            });
        }
        Ok(())
    }

    fn drift_profile(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.drift, s.length))
    }

    fn with_scaled_drifts(&self, scale: f64) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    length: s.length,
                    drift: s.drift * scale,
                })
                .collect(),
            ..self.clone()
        }
    }
}

/// `count` standard-normal draws from the seeded stream.
pub fn standard_normals(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect()
}

/// Generate the series described by `spec`, starting at 0.
pub fn generate(spec: &SynthSpec) -> Result<PnLSeries> {
    spec.validate()?;
    let noise = standard_normals(spec.seed, spec.n - 1);
    integrate(spec, &noise)
}

fn integrate(spec: &SynthSpec, noise: &[f64]) -> Result<PnLSeries> {
    let mut level = 0.0;
    let mut values = Vec::with_capacity(spec.n);
    values.push(level);
    for (drift, z) in spec.drift_profile().zip(noise) {
        level += drift + spec.noise_amplitude * z;
        values.push(level);
    }
    PnLSeries::from_values(values)
}

/// Drift whose expected annualized Sharpe ratio is `target_sharpe`.
pub fn calibrate(
    target_sharpe: f64,
    noise_amplitude: f64,
    n: usize,
    annualization: f64,
) -> Result<f64> {
    if !(noise_amplitude.is_finite() && noise_amplitude > 0.0) {
        return Err(Error::SpecInvalid {
            reason: format!("noise amplitude must be > 0, got {noise_amplitude}"),
        });
    }
    if n < 2 {
        return Err(Error::SpecInvalid {
            reason: format!("n must be at least 2, got {n}"),
        });
    }
    Ok(target_sharpe * noise_amplitude / annualization)
}

/// Rescale the drifts of `shape` so the generated series has exactly
/// `target_sharpe` as its realized annualized Sharpe ratio.
///
/// The drifts of `shape` are read as relative weights; the returned spec
/// keeps their ratios and draws the same noise.
pub fn calibrate_realized(
    shape: &SynthSpec,
    target_sharpe: f64,
    annualization: f64,
) -> Result<SynthSpec> {
    shape.validate()?;
    if shape.noise_amplitude <= 0.0 {
        return Err(Error::SpecInvalid {
            reason: "realized calibration needs a positive noise amplitude".into(),
        });
    }
    if shape.segments.iter().all(|s| s.drift == 0.0) {
        return Err(Error::SpecInvalid {
            reason: "realized calibration needs at least one non-zero drift weight".into(),
        });
    }
    let noise = standard_normals(shape.seed, shape.n - 1);
    let realized = |scale: f64| -> Result<f64> {
        let s = integrate(&shape.with_scaled_drifts(scale), &noise)?;
        global_sharpe(&s, annualization)
    };
    let unreachable = || Error::SpecInvalid {
        reason: format!("target Sharpe {target_sharpe} cannot be reached by rescaling the drifts"),
    };

    let mut lo = -shape.noise_amplitude;
    let mut hi = shape.noise_amplitude;
    let mut expansions = 0;
    while realized(lo)? > target_sharpe || realized(hi)? < target_sharpe {
        lo *= 2.0;
        hi *= 2.0;
        expansions += 1;
        if expansions > 64 {
            return Err(unreachable());
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if realized(mid)? < target_sharpe {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(shape.with_scaled_drifts(0.5 * (lo + hi)))
}

/// The two-strategy experiment: a volatile "blue" series whose drift stalls
/// over the final stretch, and a steadier "green" series.
///
/// Both series are built from the same seeded standard-normal stream, with
/// blue's increments scaled by `noise_ratio`, so they differ only in drift
/// profile and noise amplitude. Drifts are calibrated on the realized noise
/// so each series hits its Sharpe target exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSeriesDesign {
    pub n: usize,
    pub green_noise: f64,
    /// Blue noise amplitude over green noise amplitude.
    pub noise_ratio: f64,
    pub blue_sharpe: f64,
    pub green_sharpe: f64,
    /// Share of blue's increments, at the recent end, run at the weak drift.
    pub weak_fraction: f64,
    /// Blue's drift over the weak stretch relative to its earlier drift.
    pub weak_drift_ratio: f64,
    pub annualization: f64,
}

impl Default for TwoSeriesDesign {
    fn default() -> Self {
        Self {
            n: 2000,
            green_noise: 1.0,
            noise_ratio: 1.5,
            blue_sharpe: 0.78,
            green_sharpe: 0.68,
            weak_fraction: 0.25,
            weak_drift_ratio: 0.0,
            annualization: ANNUALIZE_DAILY,
        }
    }
}

impl TwoSeriesDesign {
    /// Calibrated `(blue, green)` specs for `seed`.
    pub fn specs(&self, seed: u64) -> Result<(SynthSpec, SynthSpec)> {
        if !(0.0..1.0).contains(&self.weak_fraction) {
            return Err(Error::SpecInvalid {
                reason: format!(
                    "weak fraction must lie in [0, 1), got {}",
                    self.weak_fraction
                ),
            });
        }
        let steps = self.n.saturating_sub(1);
        let weak = (self.weak_fraction * steps as f64).round() as usize;
        let mut blue_segments = vec![Segment {
            length: steps - weak,
            drift: 1.0,
        }];
        if weak > 0 {
            blue_segments.push(Segment {
                length: weak,
                drift: self.weak_drift_ratio,
            });
        }
        let blue_shape = SynthSpec {
            n: self.n,
            segments: blue_segments,
            noise_amplitude: self.green_noise * self.noise_ratio,
            seed,
        };
        let green_shape = SynthSpec::linear(self.n, 1.0, self.green_noise, seed);
        Ok((
            calibrate_realized(&blue_shape, self.blue_sharpe, self.annualization)?,
            calibrate_realized(&green_shape, self.green_sharpe, self.annualization)?,
        ))
    }

    pub fn generate(&self, seed: u64) -> Result<(PnLSeries, PnLSeries)> {
        let (blue, green) = self.specs(seed)?;
        Ok((generate(&blue)?, generate(&green)?))
    }
}
