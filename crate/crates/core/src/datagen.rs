//! Synthetic problems: Gaussian ensembles, bandlimited ground truths and
//! measurement noise.

use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lifted::{Intensities, MeasurementEnsemble, ModelError};
use crate::numerics::{seeded_rng, ComplexVector, Stream, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatagenError {
    #[error("dimensions must be positive (got M = {m}, N = {n})")]
    EmptyDimensions { m: usize, n: usize },
    #[error("invalid band B = {band} for N = {n}: need N even and 1 <= B <= N/2")]
    InvalidBand { n: usize, band: usize },
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// i.i.d. entries `𝒩(0, ½) + j𝒩(0, ½)`.
pub fn sample_gaussian_ensemble(m: usize, n: usize, seed: u64) -> Result<MeasurementEnsemble, DatagenError> {
    if m == 0 || n == 0 {
        return Err(DatagenError::EmptyDimensions { m, n });
    }
    let mut rng = seeded_rng(seed, Stream::Ensemble);
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid standard deviation");
    let data = (0..m * n).map(|_| C64::new(normal.sample(&mut rng), normal.sample(&mut rng))).collect();
    Ok(MeasurementEnsemble::new(m, n, data)?)
}

/// A real Gaussian draw low-pass filtered to the `2B` central bins of its
/// centered spectrum, i.e. frequencies `−B, …, B − 1`.
///
/// Synthesis uses the `1/N`-normalized inverse DFT so that `B = N/2` returns
/// the draw itself. Bins are 0-based: centered position `c` holds frequency
/// `c − N/2`, and the retained positions `N/2 − B, …, N/2 + B − 1` are the
/// 1-based positions `N/2 − B + 1, …, N/2 + B`.
pub fn sample_bandlimited_truth(n: usize, band: usize, seed: u64) -> Result<ComplexVector, DatagenError> {
    if n == 0 || !n.is_multiple_of(2) || band == 0 || band > n / 2 {
        return Err(DatagenError::InvalidBand { n, band });
    }
    let mut rng = seeded_rng(seed, Stream::Truth);
    let mut buf: Vec<C64> = (0..n).map(|_| C64::new(StandardNormal.sample(&mut rng), 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, coeff) in buf.iter_mut().enumerate() {
        // Unshifted bin k carries frequency k for k < N/2 and k − N otherwise.
        let keep = k < band || k >= n - band;
        if !keep {
            *coeff = C64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let inv_n = 1.0 / n as f64;
    buf.iter_mut().for_each(|z| *z *= inv_n);
    ComplexVector::new(buf).map_err(|_| DatagenError::InvalidBand { n, band })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NoiseModel {
    #[default]
    None,
    /// `y + σ ε`, clamped at zero.
    Awgn { sigma: f64 },
    /// `Poisson(κ y) / κ`.
    Poisson { kappa: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<(), DatagenError> {
        match *self {
            NoiseModel::None => Ok(()),
            NoiseModel::Awgn { sigma } if sigma >= 0.0 && sigma.is_finite() => Ok(()),
            NoiseModel::Poisson { kappa } if kappa > 0.0 && kappa.is_finite() => Ok(()),
            NoiseModel::Awgn { .. } => Err(DatagenError::InvalidNoise("awgn sigma must be >= 0".into())),
            NoiseModel::Poisson { .. } => Err(DatagenError::InvalidNoise("poisson kappa must be > 0".into())),
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::None => f.write_str("none"),
            NoiseModel::Awgn { sigma } => write!(f, "awgn:{sigma}"),
            NoiseModel::Poisson { kappa } => write!(f, "poisson:{kappa}"),
        }
    }
}

impl FromStr for NoiseModel {
    type Err = DatagenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| DatagenError::InvalidNoise(format!("`{s}`")));
        let model = match s.split_once(':') {
            None if s == "none" => NoiseModel::None,
            Some(("awgn", v)) => NoiseModel::Awgn { sigma: parse(v)? },
            Some(("poisson", v)) => NoiseModel::Poisson { kappa: parse(v)? },
            _ => {
                return Err(DatagenError::InvalidNoise(format!(
                    "`{s}` (expected none, awgn:<sigma> or poisson:<kappa>)"
                )))
            }
        };
        model.validate()?;
        Ok(model)
    }
}

impl TryFrom<String> for NoiseModel {
    type Error = DatagenError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<NoiseModel> for String {
    fn from(n: NoiseModel) -> Self {
        n.to_string()
    }
}

pub fn add_noise(y: &Intensities, model: NoiseModel, seed: u64) -> Result<Intensities, DatagenError> {
    model.validate()?;
    let mut rng = seeded_rng(seed, Stream::Noise);
    let values = match model {
        NoiseModel::None | NoiseModel::Awgn { sigma: 0.0 } => return Ok(y.clone()),
        NoiseModel::Awgn { sigma } => y
            .values()
            .iter()
            .map(|&v| {
                let e: f64 = StandardNormal.sample(&mut rng);
                (v + sigma * e).max(0.0)
            })
            .collect(),
        NoiseModel::Poisson { kappa } => y
            .values()
            .iter()
            .map(|&v| {
                let rate = kappa * v;
                if rate > 0.0 {
                    Poisson::new(rate).expect("positive finite rate").sample(&mut rng) / kappa
                } else {
                    0.0
                }
            })
            .collect(),
    };
    Ok(Intensities::new(values)?)
}
