//! Sample processing functions `t = T(y)`.
//!
//! Every method maps measured intensities to real synthesis weights. Methods
//! are addressed by lowercase ids with optional `:key=value` parameters, for
//! example `truncated:kappa=2.5` or `is_opt:rep=sphere:gamma-sign=minus`.
//! Throughout, `λ₀ = ‖y‖₁ / M` and `ȳ = y / λ₀`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::bregman::{gamma_hat, representative, BregmanError, Representative, RepresentativeKind};
use crate::lifted::{gram_intensity, Intensities, MeasurementEnsemble, ModelError, ProcessedWeights};
use crate::numerics::{solve_cg, CgError, CgOptions, EigenMode, HermitianOperator, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProcessingError {
    #[error("all measurements are zero")]
    EmptyMeasurements,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("method needs at least {needed} measurements, got {found}")]
    TooFewMeasurements { needed: usize, found: usize },
    #[error("measurement count mismatch: ensemble has {expected} rows, got {found} intensities")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("minimum-norm solve did not converge (relative residual {residual:.3e})")]
    NonConvergence { best: ProcessedWeights, residual: f64, iterations: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bregman(#[from] BregmanError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodId {
    Classical,
    Truncated,
    Orthogonal,
    Weighted,
    MinNorm,
    Mm,
    Ll,
    Poisson,
    Awgn,
    Kl,
    Is0,
    IsOpt,
    L2Min,
}

impl MethodId {
    pub const ALL: [MethodId; 13] = [
        MethodId::Classical,
        MethodId::Truncated,
        MethodId::Orthogonal,
        MethodId::Weighted,
        MethodId::MinNorm,
        MethodId::Mm,
        MethodId::Ll,
        MethodId::Poisson,
        MethodId::Awgn,
        MethodId::Kl,
        MethodId::Is0,
        MethodId::IsOpt,
        MethodId::L2Min,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MethodId::Classical => "classical",
            MethodId::Truncated => "truncated",
            MethodId::Orthogonal => "orthogonal",
            MethodId::Weighted => "weighted",
            MethodId::MinNorm => "min_norm",
            MethodId::Mm => "mm",
            MethodId::Ll => "ll",
            MethodId::Poisson => "poisson",
            MethodId::Awgn => "awgn",
            MethodId::Kl => "kl",
            MethodId::Is0 => "is0",
            MethodId::IsOpt => "is_opt",
            MethodId::L2Min => "l2_min",
        }
    }

    /// The orthogonality-promoting matrix is searched for its smallest eigenvalue.
    pub fn eig_mode(&self) -> EigenMode {
        match self {
            MethodId::Orthogonal => EigenMode::Min,
            _ => EigenMode::Max,
        }
    }

    fn allowed_keys(&self) -> &'static [&'static str] {
        match self {
            MethodId::Classical => &[],
            MethodId::Truncated => &["kappa"],
            MethodId::Orthogonal => &["subset"],
            MethodId::Weighted => &["subset", "power"],
            MethodId::MinNorm => &["tikhonov", "cg-tol"],
            MethodId::Mm => &["floor"],
            MethodId::Ll => &["floor"],
            MethodId::Poisson => &["kappa0"],
            MethodId::Awgn => &["sigma0", "cdf", "floor"],
            MethodId::Kl => &["floor"],
            MethodId::Is0 => &["rep", "zero", "floor"],
            MethodId::IsOpt => &["rep", "zero", "floor", "gamma-sign"],
            MethodId::L2Min => &["rep"],
        }
    }

    fn default_rep(&self) -> RepresentativeKind {
        match self {
            MethodId::L2Min => RepresentativeKind::Model,
            _ => RepresentativeKind::Simplex,
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = ProcessingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MethodId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| ProcessingError::InvalidParameter(format!("unknown method id `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroHandling {
    /// Weight exactly zero where `y_m = 0`.
    #[default]
    Indicator,
    /// Reciprocal of the floor-clamped intensity.
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaSign {
    /// `(1 + γ̂)`.
    #[default]
    Plus,
    /// `(1 − γ̂)`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CdfKind {
    /// Standard normal `Φ` with density `Φ′`.
    #[default]
    Gaussian,
    /// Logistic `Φ(z) = 1 / (1 + e^{−z})`.
    Logistic,
}

/// Per-method hyperparameters. Keys irrelevant to a method are rejected at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodParams {
    /// Truncation threshold on `ȳ`.
    pub kappa: f64,
    /// Orthogonal/weighted subset fraction as `(numerator, denominator)`.
    pub subset: (usize, usize),
    /// Exponent of the weighted method.
    pub power: f64,
    /// `ε_y`, relative clamp floor for logarithms and reciprocals.
    pub floor: f64,
    pub kappa0: f64,
    pub sigma0: f64,
    pub rep: Option<RepresentativeKind>,
    pub zero: ZeroHandling,
    pub gamma_sign: GammaSign,
    pub cdf: CdfKind,
    /// Relative Tikhonov weight; the absolute shift is `tikhonov · trace(G) / M`.
    pub tikhonov: f64,
    pub cg_tol: f64,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            kappa: 3.0,
            subset: (5, 6),
            power: 0.25,
            floor: 1e-12,
            kappa0: 1.0,
            sigma0: 0.1,
            rep: None,
            zero: ZeroHandling::Indicator,
            gamma_sign: GammaSign::Plus,
            cdf: CdfKind::Gaussian,
            tikhonov: 1e-10,
            cg_tol: 1e-10,
        }
    }
}

/// A method id with its parameters; parses from and prints as `id[:key=value]*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MethodSpec {
    pub id: MethodId,
    pub params: MethodParams,
}

impl MethodSpec {
    pub fn new(id: MethodId) -> Self {
        Self { id, params: MethodParams::default() }
    }

    pub fn with_params(id: MethodId, params: MethodParams) -> Result<Self, ProcessingError> {
        let spec = Self { id, params };
        spec.validate()?;
        Ok(spec)
    }

    pub fn eig_mode(&self) -> EigenMode {
        self.id.eig_mode()
    }

    pub fn representative_kind(&self) -> RepresentativeKind {
        self.params.rep.unwrap_or_else(|| self.id.default_rep())
    }

    pub fn validate(&self) -> Result<(), ProcessingError> {
        let p = &self.params;
        let bad = |msg: &str| Err(ProcessingError::InvalidParameter(msg.to_string()));
        if !(p.kappa > 0.0 && p.kappa.is_finite()) {
            return bad("kappa must be positive");
        }
        let (a, b) = p.subset;
        if b == 0 || a > b {
            return bad("subset must be a fraction a/b with 0 <= a <= b and b > 0");
        }
        if !(p.power > 0.0 && p.power.is_finite()) {
            return bad("power must be positive");
        }
        if !(p.floor > 0.0 && p.floor < 1.0) {
            return bad("floor must lie in (0, 1)");
        }
        if !(p.kappa0 >= 0.0 && p.kappa0.is_finite()) {
            return bad("kappa0 must be nonnegative");
        }
        if !(p.sigma0 > 0.0 && p.sigma0.is_finite()) {
            return bad("sigma0 must be positive");
        }
        if !(p.tikhonov >= 0.0 && p.tikhonov.is_finite()) {
            return bad("tikhonov must be nonnegative");
        }
        if !(p.cg_tol > 0.0 && p.cg_tol < 1.0) {
            return bad("cg-tol must lie in (0, 1)");
        }
        Ok(())
    }

    /// `(key, value)` pairs that differ from the defaults, in canonical order.
    fn non_default_params(&self) -> Vec<(&'static str, String)> {
        let p = &self.params;
        let d = MethodParams::default();
        let mut out = Vec::new();
        for &key in self.id.allowed_keys() {
            let value = match key {
                "kappa" if p.kappa != d.kappa => Some(format!("{}", p.kappa)),
                "subset" if p.subset != d.subset => Some(format!("{}/{}", p.subset.0, p.subset.1)),
                "power" if p.power != d.power => Some(format!("{}", p.power)),
                "floor" if p.floor != d.floor => Some(format!("{}", p.floor)),
                "kappa0" if p.kappa0 != d.kappa0 => Some(format!("{}", p.kappa0)),
                "sigma0" if p.sigma0 != d.sigma0 => Some(format!("{}", p.sigma0)),
                "rep" => p.rep.map(|r| r.as_str().to_string()),
                "zero" if p.zero == ZeroHandling::Clamp => Some("clamp".into()),
                "gamma-sign" if p.gamma_sign == GammaSign::Minus => Some("minus".into()),
                "cdf" if p.cdf == CdfKind::Logistic => Some("logistic".into()),
                "tikhonov" if p.tikhonov != d.tikhonov => Some(format!("{}", p.tikhonov)),
                "cg-tol" if p.cg_tol != d.cg_tol => Some(format!("{}", p.cg_tol)),
                _ => None,
            };
            if let Some(v) = value {
                out.push((key, v));
            }
        }
        out
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id.as_str())?;
        for (k, v) in self.non_default_params() {
            write!(f, ":{k}={v}")?;
        }
        Ok(())
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ProcessingError> {
    value.parse::<f64>().map_err(|_| ProcessingError::InvalidParameter(format!("{key}: `{value}` is not a number")))
}

impl FromStr for MethodSpec {
    type Err = ProcessingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.trim().split(':');
        let id: MethodId = parts.next().unwrap_or_default().trim().parse()?;
        let mut params = MethodParams::default();
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| ProcessingError::InvalidParameter(format!("expected key=value, found `{part}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !id.allowed_keys().contains(&key) {
                return Err(ProcessingError::InvalidParameter(format!(
                    "method {id} does not accept parameter `{key}`"
                )));
            }
            let invalid = || ProcessingError::InvalidParameter(format!("{key}: invalid value `{value}`"));
            match key {
                "kappa" => params.kappa = parse_f64(key, value)?,
                "power" => params.power = parse_f64(key, value)?,
                "floor" => params.floor = parse_f64(key, value)?,
                "kappa0" => params.kappa0 = parse_f64(key, value)?,
                "sigma0" => params.sigma0 = parse_f64(key, value)?,
                "tikhonov" => params.tikhonov = parse_f64(key, value)?,
                "cg-tol" => params.cg_tol = parse_f64(key, value)?,
                "subset" => {
                    let (a, b) = value.split_once('/').ok_or_else(invalid)?;
                    params.subset =
                        (a.trim().parse().map_err(|_| invalid())?, b.trim().parse().map_err(|_| invalid())?);
                }
                "rep" => params.rep = Some(RepresentativeKind::parse(value).ok_or_else(invalid)?),
                "zero" => {
                    params.zero = match value {
                        "indicator" => ZeroHandling::Indicator,
                        "clamp" => ZeroHandling::Clamp,
                        _ => return Err(invalid()),
                    }
                }
                "gamma-sign" => {
                    params.gamma_sign = match value {
                        "plus" => GammaSign::Plus,
                        "minus" => GammaSign::Minus,
                        _ => return Err(invalid()),
                    }
                }
                "cdf" => {
                    params.cdf = match value {
                        "gaussian" => CdfKind::Gaussian,
                        "logistic" => CdfKind::Logistic,
                        _ => return Err(invalid()),
                    }
                }
                _ => unreachable!("allowed_keys covers every key"),
            }
        }
        MethodSpec::with_params(id, params)
    }
}

impl TryFrom<String> for MethodSpec {
    type Error = ProcessingError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<MethodSpec> for String {
    fn from(spec: MethodSpec) -> Self {
        spec.to_string()
    }
}

/// Summary statistics of `(y, ensemble)` shared by all methods.
#[derive(Debug, Clone)]
pub struct EnsembleStats<'a> {
    pub lambda0: f64,
    pub l1_norm: f64,
    pub alpha: f64,
    pub row_norms_sq: &'a [f64],
    pub total_norm_sq: f64,
    ens: &'a MeasurementEnsemble,
}

impl<'a> EnsembleStats<'a> {
    pub fn new(ens: &'a MeasurementEnsemble, y: &Intensities) -> Self {
        Self {
            lambda0: y.mean(),
            l1_norm: y.l1_norm(),
            alpha: ens.alpha(),
            row_norms_sq: ens.row_norms_sq(),
            total_norm_sq: ens.total_norm_sq(),
            ens,
        }
    }

    pub fn representative(&self, kind: RepresentativeKind) -> Representative {
        representative(kind, self.ens)
    }
}

/// Weights plus the side quantities some methods compute on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Processed {
    pub weights: ProcessedWeights,
    pub lambda0: f64,
    pub gamma_hat: Option<f64>,
    pub cg_iterations: Option<usize>,
}

pub fn apply_processing(
    method: &MethodSpec,
    y: &Intensities,
    ens: &MeasurementEnsemble,
) -> Result<ProcessedWeights, ProcessingError> {
    process(method, y, ens).map(|p| p.weights)
}

pub fn process(method: &MethodSpec, y: &Intensities, ens: &MeasurementEnsemble) -> Result<Processed, ProcessingError> {
    method.validate()?;
    if y.len() != ens.m() {
        return Err(ProcessingError::DimensionMismatch { expected: ens.m(), found: y.len() });
    }
    let stats = EnsembleStats::new(ens, y);
    let p = &method.params;
    let yv = y.values();
    let m = yv.len();
    let needs_mean =
        !matches!(method.id, MethodId::Classical | MethodId::Orthogonal | MethodId::Weighted | MethodId::MinNorm);
    if needs_mean && (stats.l1_norm.is_nan() || stats.l1_norm <= 0.0) {
        return Err(ProcessingError::EmptyMeasurements);
    }
    let lambda0 = stats.lambda0;
    let ybar = |v: f64| v / lambda0;
    let mut gamma = None;
    let mut cg_iterations = None;

    let t: Vec<f64> = match method.id {
        MethodId::Classical => yv.to_vec(),
        MethodId::Truncated => yv.iter().map(|&v| if ybar(v) < p.kappa { v } else { 0.0 }).collect(),
        MethodId::Orthogonal | MethodId::Weighted => {
            if m < 2 {
                return Err(ProcessingError::TooFewMeasurements { needed: 2, found: m });
            }
            let in_subset = smallest_subset(yv, p.subset);
            if method.id == MethodId::Orthogonal {
                in_subset.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect()
            } else {
                yv.iter().zip(&in_subset).map(|(&v, &s)| if s { 0.0 } else { v.powf(p.power) }).collect()
            }
        }
        MethodId::MinNorm => {
            let solved = min_norm_solve(ens, y, p.cg_tol, p.tikhonov)?;
            cg_iterations = Some(solved.1);
            solved.0
        }
        MethodId::Mm => {
            let shift = stats.alpha.sqrt() - 1.0;
            yv.iter().map(|&v| (ybar(v) - 1.0) / (ybar(v) + shift).max(p.floor)).collect()
        }
        MethodId::Ll => yv.iter().map(|&v| 1.0 - 1.0 / ybar(v).max(p.floor)).collect(),
        MethodId::Poisson => yv.iter().map(|&v| (ybar(v) - p.kappa0) / (ybar(v) + 1.0)).collect(),
        MethodId::Awgn => {
            yv.iter().map(|&v| 1.0 - 1.0 / awgn_denominator(ybar(v), p.sigma0, p.cdf).max(p.floor)).collect()
        }
        MethodId::Kl => {
            let scale = stats.total_norm_sq / stats.l1_norm;
            yv.iter().zip(stats.row_norms_sq).map(|(&v, &r)| (v.max(p.floor * lambda0) * scale / r).ln()).collect()
        }
        MethodId::Is0 | MethodId::IsOpt => {
            let kind = method.representative_kind();
            let qhat = stats.representative(kind).values;
            // p = y/‖y‖₁ on the simplex, ȳ otherwise; both evaluated on the floor-clamped y.
            let norm = if kind == RepresentativeKind::Simplex { stats.l1_norm } else { lambda0 };
            let clamped: Vec<f64> = yv.iter().map(|&v| v.max(p.floor * lambda0) / norm).collect();
            let numerator = if method.id == MethodId::IsOpt {
                let g = gamma_hat(&clamped, &qhat)?;
                gamma = Some(g);
                match p.gamma_sign {
                    GammaSign::Plus => 1.0 + g,
                    GammaSign::Minus => 1.0 - g,
                }
            } else {
                1.0
            };
            yv.iter()
                .zip(&clamped)
                .zip(&qhat)
                .map(
                    |((&v, &pc), &q)| {
                        if v == 0.0 && p.zero == ZeroHandling::Indicator {
                            0.0
                        } else {
                            numerator / q - 1.0 / pc
                        }
                    },
                )
                .collect()
        }
        MethodId::L2Min => {
            let qhat = stats.representative(method.representative_kind()).values;
            yv.iter().zip(&qhat).map(|(&v, &q)| 2.0 * ybar(v) - q).collect()
        }
    };
    Ok(Processed { weights: ProcessedWeights::new(t)?, lambda0, gamma_hat: gamma, cg_iterations })
}

/// Marks the `⌊aM/b⌋` smallest intensities, ties broken by lower index.
pub fn smallest_subset(y: &[f64], (a, b): (usize, usize)) -> Vec<bool> {
    let m = y.len();
    let size = m * a / b;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| y[i].total_cmp(&y[j]).then(i.cmp(&j)));
    let mut in_subset = vec![false; m];
    for &i in &order[..size] {
        in_subset[i] = true;
    }
    in_subset
}

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// `ȳ − σ₀² + σ₀ Φ′(z)/Φ(z)` at `z = ȳ/σ₀ − σ₀`, written as `σ₀ (z + Φ′(z)/Φ(z))`.
pub fn awgn_denominator(ybar: f64, sigma0: f64, cdf: CdfKind) -> f64 {
    let z = ybar / sigma0 - sigma0;
    let shifted = match cdf {
        CdfKind::Gaussian => {
            if z > -30.0 {
                let pdf = FRAC_1_SQRT_2PI * (-0.5 * z * z).exp();
                let cdf = 0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2);
                z + pdf / cdf
            } else {
                // z + φ/Φ → (1 − uR(u)) / R(u) with Mills ratio R(u) at u = −z.
                let u2 = z * z;
                let mills = (1.0 - 1.0 / u2 + 3.0 / (u2 * u2) - 15.0 / (u2 * u2 * u2)) / -z;
                let numerator = 1.0 / u2 - 3.0 / (u2 * u2) + 15.0 / (u2 * u2 * u2);
                numerator / mills
            }
        }
        CdfKind::Logistic => z + 1.0 / (1.0 + z.exp()),
    };
    sigma0 * shifted
}

/// Solves `(G + τ·trace(G)/M · I) t = y` with `G = |AAᴴ|²` by conjugate gradients.
pub fn min_norm_weights(
    ens: &MeasurementEnsemble,
    y: &Intensities,
    tol: f64,
    tikhonov: f64,
) -> Result<ProcessedWeights, ProcessingError> {
    Ok(ProcessedWeights::new(min_norm_solve(ens, y, tol, tikhonov)?.0)?)
}

fn min_norm_solve(
    ens: &MeasurementEnsemble,
    y: &Intensities,
    tol: f64,
    tikhonov: f64,
) -> Result<(Vec<f64>, usize), ProcessingError> {
    if y.len() != ens.m() {
        return Err(ProcessingError::DimensionMismatch { expected: ens.m(), found: y.len() });
    }
    if tikhonov.is_nan() || tikhonov < 0.0 {
        return Err(ProcessingError::InvalidParameter("tikhonov must be nonnegative".into()));
    }
    let g = gram_intensity(ens);
    let m = g.dim();
    let opts = CgOptions { tol, max_iter: 10 * m + 1000, tikhonov: tikhonov * g.trace() / m as f64 };
    let rhs: Vec<C64> = y.values().iter().map(|&v| C64::new(v, 0.0)).collect();
    let real = |w: &[C64]| w.iter().map(|z| z.re).collect::<Vec<f64>>();
    match solve_cg(&g, &rhs, &opts) {
        Ok(sol) => Ok((real(&sol.solution), sol.iterations)),
        Err(CgError::NonConvergence { best }) => Err(ProcessingError::NonConvergence {
            best: ProcessedWeights::new(real(&best.solution))?,
            residual: best.residual,
            iterations: best.iterations,
        }),
        Err(e) => Err(ProcessingError::InvalidParameter(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(m: usize) -> MeasurementEnsemble {
        MeasurementEnsemble::scaled_identity(m, 1.0).unwrap()
    }

    fn run(spec: &str, y: &[f64], ens: &MeasurementEnsemble) -> Vec<f64> {
        let spec: MethodSpec = spec.parse().unwrap();
        apply_processing(&spec, &Intensities::new(y.to_vec()).unwrap(), ens).unwrap().into_inner()
    }

    fn close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn classical_is_identity() {
        close(&run("classical", &[1.0, 2.0, 3.0], &basis(3)), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn truncated_drops_large_intensities() {
        close(&run("truncated", &[1.0, 1.0, 1.0, 13.0], &basis(4)), &[1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn mm_values() {
        close(&run("mm", &[1.0, 1.0], &basis(2)), &[0.0, 0.0]);
        // α = 4 needs M = 4N; ȳ = (3, 1/3, 1/3, 1/3).
        let rows = vec![vec![C64::new(1.0, 0.0)]; 4];
        let ens = MeasurementEnsemble::from_rows(&rows).unwrap();
        let t = run("mm", &[3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], &ens);
        let lambda0 = (3.0 + 1.0) / 4.0;
        let ybar = 3.0 / lambda0;
        assert!((t[0] - (ybar - 1.0) / (ybar + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn ll_values() {
        let t = run("ll", &[1.0, 2.0], &basis(2));
        close(&t, &[1.0 - 1.5 / 1.0, 1.0 - 1.5 / 2.0]);
    }

    #[test]
    fn kl_equal_norms_reduces_to_log_ybar() {
        close(&run("kl", &[1.0, 3.0], &basis(2)), &[0.5f64.ln(), 1.5f64.ln()]);
    }

    #[test]
    fn is0_simplex_example() {
        close(&run("is0", &[0.5, 1.5], &basis(2)), &[-2.0, 2.0 / 3.0]);
    }

    #[test]
    fn orthogonal_subset() {
        let spec: MethodSpec = "orthogonal".parse().unwrap();
        assert_eq!(spec.eig_mode(), EigenMode::Min);
        close(&run("orthogonal", &[5.0, 1.0, 2.0, 3.0, 4.0, 6.0], &basis(6)), &[1.0, 1.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn orthogonal_ties_prefer_lower_index() {
        assert_eq!(smallest_subset(&[1.0, 1.0, 1.0], (2, 3)), vec![true, true, false]);
    }

    #[test]
    fn poisson_zero_at_noise_floor() {
        close(&run("poisson:kappa0=0.5", &[0.5, 1.5], &basis(2)), &[0.0, 1.0 / 2.5]);
    }

    #[test]
    fn zero_measurements_get_zero_is_weight() {
        let t = run("is_opt", &[0.0, 1.0, 2.0], &basis(3));
        assert_eq!(t[0], 0.0);
        let clamped = run("is0:zero=clamp", &[0.0, 1.0, 2.0], &basis(3));
        assert!(clamped[0] < -1e10);
    }

    #[test]
    fn empty_measurements_rejected() {
        let spec: MethodSpec = "ll".parse().unwrap();
        let y = Intensities::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(apply_processing(&spec, &y, &basis(2)), Err(ProcessingError::EmptyMeasurements));
    }

    #[test]
    fn spec_round_trip_and_validation() {
        for s in [
            "kl",
            "is_opt:rep=sphere:gamma-sign=minus",
            "weighted:subset=2/3:power=0.5",
            "awgn:sigma0=0.2:cdf=logistic",
        ] {
            let spec: MethodSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("awgn:sigma0=0".parse::<MethodSpec>().is_err());
        assert!("poisson:kappa0=-1".parse::<MethodSpec>().is_err());
        assert!("classical:kappa=2".parse::<MethodSpec>().is_err());
        assert!("nope".parse::<MethodSpec>().is_err());
    }

    #[test]
    fn awgn_denominator_is_positive_and_continuous() {
        for &ybar in &[-10.0, -2.0, -1.0, 0.0, 0.01, 0.5, 1.0, 5.0] {
            let d = awgn_denominator(ybar, 0.1, CdfKind::Gaussian);
            assert!(d > 0.0, "ybar {ybar}: {d}");
        }
        let just_above = awgn_denominator(-30.0 * 0.1 + 0.01 - 1e-9, 0.1, CdfKind::Gaussian);
        let just_below = awgn_denominator(-30.0 * 0.1 + 0.01 - 1e-3, 0.1, CdfKind::Gaussian);
        assert!((just_above / just_below - 1.0).abs() < 1e-3);
    }

    #[test]
    fn min_norm_on_orthonormal_rows_returns_y() {
        let y = Intensities::new(vec![1.0, 2.0, 3.0]).unwrap();
        let t = min_norm_weights(&basis(3), &y, 1e-12, 0.0).unwrap();
        close(t.values(), &[1.0, 2.0, 3.0]);
    }
}
