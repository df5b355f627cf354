//! Bregman divergences, their generating potentials, representatives and the
//! `γ̂` point estimate used by the Itakura–Saito processing functions.
//!
//! `d_φ(q, p) = φ(q) − φ(p) − ⟨q − p, ∇φ(p)⟩`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lifted::MeasurementEnsemble;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BregmanError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("need at least one sample")]
    NoSamples,
}

/// Entries of `q` at or below this are treated as exact zeros.
pub const ZERO_TOL: f64 = 1e-300;

const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Real,
    NonNegative,
    Positive,
    Simplex,
}

/// A strictly convex generating function with its gradient.
pub trait Potential {
    fn name(&self) -> &str;
    fn domain(&self) -> Domain;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

/// Built-in potentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialSpec {
    /// `‖x‖²` on ℝ^M; generates the squared Euclidean distance.
    SquaredNorm,
    /// `Σ x log x` on ℝ₊^M; generates the generalized I-divergence.
    NegativeEntropy,
    /// `Σ x log x` restricted to the simplex; generates KL.
    NegativeEntropySimplex,
    /// `−(1/M) Σ log x` on ℝ₊₊^M; generates the Itakura–Saito divergence.
    Burg,
}

fn xlogx(x: f64) -> f64 {
    if x <= ZERO_TOL {
        0.0
    } else {
        x * x.ln()
    }
}

impl Potential for PotentialSpec {
    fn name(&self) -> &str {
        match self {
            PotentialSpec::SquaredNorm => "squared-norm",
            PotentialSpec::NegativeEntropy => "negative-entropy",
            PotentialSpec::NegativeEntropySimplex => "negative-entropy-simplex",
            PotentialSpec::Burg => "burg",
        }
    }

    fn domain(&self) -> Domain {
        match self {
            PotentialSpec::SquaredNorm => Domain::Real,
            PotentialSpec::NegativeEntropy => Domain::NonNegative,
            PotentialSpec::NegativeEntropySimplex => Domain::Simplex,
            PotentialSpec::Burg => Domain::Positive,
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            PotentialSpec::SquaredNorm => x.iter().map(|v| v * v).sum(),
            PotentialSpec::NegativeEntropy | PotentialSpec::NegativeEntropySimplex => {
                x.iter().copied().map(xlogx).sum()
            }
            PotentialSpec::Burg => -x.iter().map(|v| v.ln()).sum::<f64>() / x.len() as f64,
        }
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            PotentialSpec::SquaredNorm => x.iter().map(|v| 2.0 * v).collect(),
            PotentialSpec::NegativeEntropy | PotentialSpec::NegativeEntropySimplex => {
                x.iter().map(|v| v.ln() + 1.0).collect()
            }
            PotentialSpec::Burg => {
                let m = x.len() as f64;
                x.iter().map(|v| -1.0 / (m * v)).collect()
            }
        }
    }
}

fn check_lengths(q: &[f64], p: &[f64]) -> Result<(), BregmanError> {
    if q.len() != p.len() {
        return Err(BregmanError::LengthMismatch { left: q.len(), right: p.len() });
    }
    if q.is_empty() {
        return Err(BregmanError::DomainViolation("empty vector".into()));
    }
    Ok(())
}

/// Checks membership of `x` in `domain`; `interior` demands strict positivity where relevant.
pub fn check_domain(domain: Domain, x: &[f64], interior: bool, label: &str) -> Result<(), BregmanError> {
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(BregmanError::DomainViolation(format!("{label}[{i}] is not finite")));
    }
    let needs_positive = match domain {
        Domain::Real => None,
        Domain::Positive => Some(true),
        Domain::NonNegative | Domain::Simplex => Some(interior),
    };
    match needs_positive {
        Some(true) => {
            if let Some(i) = x.iter().position(|&v| v <= 0.0) {
                return Err(BregmanError::DomainViolation(format!("{label}[{i}] = {} must be positive", x[i])));
            }
        }
        Some(false) => {
            if let Some(i) = x.iter().position(|&v| v < 0.0) {
                return Err(BregmanError::DomainViolation(format!("{label}[{i}] = {} must be nonnegative", x[i])));
            }
        }
        None => {}
    }
    if domain == Domain::Simplex {
        let total: f64 = x.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(BregmanError::DomainViolation(format!("{label} sums to {total}, not 1")));
        }
    }
    Ok(())
}

/// Generic `d_φ(q, p)` from the potential's value and gradient.
pub fn bregman_divergence<P: Potential + ?Sized>(potential: &P, q: &[f64], p: &[f64]) -> Result<f64, BregmanError> {
    check_lengths(q, p)?;
    check_domain(potential.domain(), q, false, "q")?;
    check_domain(potential.domain(), p, true, "p")?;
    let grad = potential.gradient(p);
    let linear: f64 = q.iter().zip(p).zip(&grad).map(|((qi, pi), gi)| (qi - pi) * gi).sum();
    let d = potential.value(q) - potential.value(p) - linear;
    Ok(d.max(0.0))
}

fn i_divergence_terms(q: &[f64], p: &[f64]) -> f64 {
    q.iter()
        .zip(p)
        .map(|(&qi, &pi)| if qi <= ZERO_TOL { pi } else { qi * (qi / pi).ln() - qi + pi })
        .sum::<f64>()
        .max(0.0)
}

/// `Σ q log(q/p)` for probability vectors, with `0·log 0 = 0`.
pub fn kl_divergence(q: &[f64], p: &[f64]) -> Result<f64, BregmanError> {
    check_lengths(q, p)?;
    check_domain(Domain::Simplex, q, false, "q")?;
    check_domain(Domain::Simplex, p, true, "p")?;
    let d: f64 = q.iter().zip(p).map(|(&qi, &pi)| if qi <= ZERO_TOL { 0.0 } else { qi * (qi / pi).ln() }).sum();
    Ok(d.max(0.0))
}

/// `Σ q log(q/p) − Σ (q − p)` on ℝ₊^M.
pub fn generalized_i_divergence(q: &[f64], p: &[f64]) -> Result<f64, BregmanError> {
    check_lengths(q, p)?;
    check_domain(Domain::NonNegative, q, false, "q")?;
    check_domain(Domain::Positive, p, true, "p")?;
    Ok(i_divergence_terms(q, p))
}

/// `(1/M) Σ (q/p − 1 − log(q/p))`.
pub fn is_divergence(q: &[f64], p: &[f64]) -> Result<f64, BregmanError> {
    check_lengths(q, p)?;
    check_domain(Domain::Positive, q, true, "q")?;
    check_domain(Domain::Positive, p, true, "p")?;
    let d: f64 = q
        .iter()
        .zip(p)
        .map(|(qi, pi)| {
            let r = qi / pi;
            r - 1.0 - r.ln()
        })
        .sum();
    Ok((d / q.len() as f64).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentativeKind {
    /// The statistical-model expectation, all ones.
    Model,
    /// `‖a_m‖² / N`.
    Sphere,
    /// `‖a_m‖² / Σ ‖a_i‖²`.
    Simplex,
}

impl RepresentativeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RepresentativeKind::Model => "model",
            RepresentativeKind::Sphere => "sphere",
            RepresentativeKind::Simplex => "simplex",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "model" => Some(RepresentativeKind::Model),
            "sphere" => Some(RepresentativeKind::Sphere),
            "simplex" => Some(RepresentativeKind::Simplex),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representative {
    pub kind: RepresentativeKind,
    pub values: Vec<f64>,
}

pub fn representative(kind: RepresentativeKind, ens: &MeasurementEnsemble) -> Representative {
    let norms = ens.row_norms_sq();
    let values = match kind {
        RepresentativeKind::Model => vec![1.0; ens.m()],
        RepresentativeKind::Sphere => {
            let n = ens.n() as f64;
            norms.iter().map(|r| r / n).collect()
        }
        RepresentativeKind::Simplex => {
            let total = ens.total_norm_sq();
            norms.iter().map(|r| r / total).collect()
        }
    };
    Representative { kind, values }
}

/// `γ̂ = φ(p) − φ(q̂) = (1/M) Σ log(q̂_m / p_m)` under the Burg potential.
pub fn gamma_hat(p: &[f64], qhat: &[f64]) -> Result<f64, BregmanError> {
    check_lengths(p, qhat)?;
    check_domain(Domain::Positive, p, true, "p")?;
    check_domain(Domain::Positive, qhat, true, "qhat")?;
    let burg = PotentialSpec::Burg;
    Ok(burg.value(p) - burg.value(qhat))
}

/// Componentwise sample mean of equally long vectors.
pub fn empirical_mean(samples: &[Vec<f64>]) -> Result<Vec<f64>, BregmanError> {
    let first = samples.first().ok_or(BregmanError::NoSamples)?;
    let mut mean = vec![0.0; first.len()];
    for s in samples {
        if s.len() != mean.len() {
            return Err(BregmanError::LengthMismatch { left: mean.len(), right: s.len() });
        }
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    let k = samples.len() as f64;
    mean.iter_mut().for_each(|m| *m /= k);
    Ok(mean)
}

/// `(1/K) Σ_i d_φ(Q_i, center)`.
pub fn mean_divergence<P: Potential + ?Sized>(
    potential: &P,
    samples: &[Vec<f64>],
    center: &[f64],
) -> Result<f64, BregmanError> {
    if samples.is_empty() {
        return Err(BregmanError::NoSamples);
    }
    let mut total = 0.0;
    for s in samples {
        total += bregman_divergence(potential, s, center)?;
    }
    Ok(total / samples.len() as f64)
}

/// `(1/K) Σ_i φ(Q_i) − φ(Q̄)`.
pub fn jensen_gap<P: Potential + ?Sized>(potential: &P, samples: &[Vec<f64>]) -> Result<f64, BregmanError> {
    let mean = empirical_mean(samples)?;
    let avg: f64 = samples.iter().map(|s| potential.value(s)).sum::<f64>() / samples.len() as f64;
    Ok(avg - potential.value(&mean))
}
