//! Deterministic Monte-Carlo runner.
//!
//! For every oversampling factor `α`, band `B`, truth index `s` and trial `l`,
//! a truth is drawn from `derive_trial_seed(master, s, 0)` and an ensemble from
//! `derive_trial_seed(master, s, l)`; every configured method is then run on
//! the same `(x, A, y)` tuple. Trials execute concurrently, results are
//! reduced in sorted trial order, so reports do not depend on thread count.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::datagen::{add_noise, sample_bandlimited_truth, sample_gaussian_ensemble, DatagenError, NoiseModel};
use crate::lifted::{forward_lifted, Intensities, MeasurementEnsemble, ModelError};
use crate::numerics::{derive_trial_seed, ComplexVector};
use crate::processing::MethodSpec;
use crate::spectral::{correlation, estimate, SolverOptions, StageTimings};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("could not build worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Datagen(#[from] DatagenError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n: usize,
    pub alphas: Vec<f64>,
    pub bands: Vec<usize>,
    pub truths: usize,
    pub trials: usize,
    pub methods: Vec<MethodSpec>,
    pub noise: NoiseModel,
    pub parallelism: usize,
    pub out: PathBuf,
    /// Record wall-clock times in `mean_seconds`; off keeps reports bitwise reproducible.
    pub timing: bool,
    /// Optional per-trial CSV written by the CLI.
    pub trial_dump: Option<PathBuf>,
    pub solver: SolverOptions,
}

pub fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl ExperimentConfig {
    /// Defaults: seed 0, `B = max(1, N/8)`, 5 truths, 10 trials, no noise, all cores.
    pub fn new(n: usize, alphas: Vec<f64>, methods: Vec<MethodSpec>) -> Self {
        Self {
            seed: 0,
            n,
            alphas,
            bands: vec![(n / 8).max(1)],
            truths: 5,
            trials: 10,
            methods,
            noise: NoiseModel::None,
            parallelism: default_parallelism(),
            out: PathBuf::from("report.json"),
            timing: false,
            trial_dump: None,
            solver: SolverOptions::default(),
        }
    }

    pub fn measurements(&self, alpha: f64) -> usize {
        (alpha * self.n as f64).round() as usize
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::ConfigInvalid(m));
        if self.n == 0 || !self.n.is_multiple_of(2) {
            return bad(format!("n = {} must be positive and even", self.n));
        }
        if self.alphas.is_empty() {
            return bad("alphas must not be empty".into());
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a.is_finite()) || self.measurements(a) == 0 {
                return bad(format!("alpha = {a} must be positive and give at least one measurement"));
            }
        }
        if self.bands.is_empty() {
            return bad("bands must not be empty".into());
        }
        if let Some(b) = self.bands.iter().find(|&&b| b == 0 || b > self.n / 2) {
            return bad(format!("band {b} outside 1..={}", self.n / 2));
        }
        if self.truths == 0 || self.trials == 0 {
            return bad("truths and trials must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("methods must not be empty".into());
        }
        for m in &self.methods {
            m.validate().map_err(|e| HarnessError::ConfigInvalid(format!("method {m}: {e}")))?;
        }
        self.noise.validate()?;
        if self.parallelism == 0 {
            return bad("parallelism must be at least 1".into());
        }
        Ok(())
    }
}

/// Echo of the fields that determine a report's numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub n: usize,
    pub alphas: Vec<f64>,
    pub bands: Vec<usize>,
    pub truths: usize,
    pub trials: usize,
    pub methods: Vec<String>,
    pub noise: String,
}

impl From<&ExperimentConfig> for ConfigEcho {
    fn from(cfg: &ExperimentConfig) -> Self {
        Self {
            seed: cfg.seed,
            n: cfg.n,
            alphas: cfg.alphas.clone(),
            bands: cfg.bands.clone(),
            truths: cfg.truths,
            trials: cfg.trials,
            methods: cfg.methods.iter().map(ToString::to_string).collect(),
            noise: cfg.noise.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub alpha: f64,
    pub band: usize,
    pub mean_rho: Option<f64>,
    pub std_rho: Option<f64>,
    pub trials: usize,
    pub failures: usize,
    pub mean_seconds: f64,
}

/// Pooled over all bands for one `(method, α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandAverage {
    pub method: String,
    pub alpha: f64,
    pub mean_rho: Option<f64>,
    pub std_rho: Option<f64>,
    pub trials: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageSeconds {
    pub datagen: f64,
    pub processing: f64,
    pub synthesis: f64,
    pub eigensolve: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: ConfigEcho,
    pub rows: Vec<ReportRow>,
    pub band_averages: Vec<BandAverage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_seconds: Option<StageSeconds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: String,
    pub rho: Option<f64>,
    pub failed: bool,
    pub seconds: f64,
    pub timings: StageTimings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub alpha: f64,
    pub band: usize,
    pub s: usize,
    pub l: usize,
    /// SHA-256 (hex) of the truth, ensemble and measurements every method consumed.
    pub checksum: String,
    pub datagen_seconds: f64,
    pub outcomes: Vec<MethodOutcome>,
}

/// Inputs of one trial, regenerable from the configuration alone.
pub struct TrialInputs {
    pub truth: ComplexVector,
    pub ensemble: MeasurementEnsemble,
    pub measurements: Intensities,
}

pub fn trial_inputs(
    cfg: &ExperimentConfig,
    alpha: f64,
    band: usize,
    s: usize,
    l: usize,
) -> Result<TrialInputs, HarnessError> {
    let truth = sample_bandlimited_truth(cfg.n, band, derive_trial_seed(cfg.seed, s as u64, 0))?;
    let trial_seed = derive_trial_seed(cfg.seed, s as u64, l as u64);
    let ensemble = sample_gaussian_ensemble(cfg.measurements(alpha), cfg.n, trial_seed)?;
    let clean = forward_lifted(&ensemble, truth.as_slice())?;
    let measurements = add_noise(&clean, cfg.noise, trial_seed)?;
    Ok(TrialInputs { truth, ensemble, measurements })
}

pub fn checksum(inputs: &TrialInputs) -> String {
    let mut h = Sha256::new();
    for z in inputs.truth.as_slice().iter().chain(inputs.ensemble.as_slice()) {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    for v in inputs.measurements.values() {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn run_trial(cfg: &ExperimentConfig, alpha: f64, band: usize, s: usize, l: usize) -> Result<TrialRecord, HarnessError> {
    let start = Instant::now();
    let inputs = trial_inputs(cfg, alpha, band, s, l)?;
    let datagen_seconds = start.elapsed().as_secs_f64();
    let checksum = checksum(&inputs);
    let solver = SolverOptions { seed: derive_trial_seed(cfg.seed, s as u64, l as u64), ..cfg.solver };
    let outcomes = cfg
        .methods
        .iter()
        .map(|method| match estimate(&inputs.ensemble, &inputs.measurements, method, &solver) {
            Ok(report) if !report.flags.failed() => MethodOutcome {
                method: method.to_string(),
                rho: correlation(inputs.truth.as_slice(), report.estimate.as_slice()).ok(),
                failed: false,
                seconds: report.wall_time,
                timings: report.timings,
            },
            Ok(report) => MethodOutcome {
                method: method.to_string(),
                rho: None,
                failed: true,
                seconds: report.wall_time,
                timings: report.timings,
            },
            Err(_) => MethodOutcome {
                method: method.to_string(),
                rho: None,
                failed: true,
                seconds: 0.0,
                timings: StageTimings::default(),
            },
        })
        .map(|mut o| {
            if o.rho.is_none() {
                o.failed = true;
            }
            o
        })
        .collect();
    Ok(TrialRecord { alpha, band, s, l, checksum, datagen_seconds, outcomes })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    run_experiment_detailed(cfg).map(|(report, _)| report)
}

/// Runs the sweep and also returns every trial record in sorted `(α, B, s, l)` order.
pub fn run_experiment_detailed(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Vec<TrialRecord>), HarnessError> {
    cfg.validate()?;
    let mut units = Vec::new();
    for &alpha in &cfg.alphas {
        for &band in &cfg.bands {
            for s in 0..cfg.truths {
                for l in 0..cfg.trials {
                    units.push((alpha, band, s, l));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| HarnessError::ThreadPool(e.to_string()))?;
    let records: Vec<TrialRecord> = pool.install(|| {
        units.par_iter().map(|&(alpha, band, s, l)| run_trial(cfg, alpha, band, s, l)).collect::<Result<_, _>>()
    })?;
    Ok((aggregate(cfg, &records), records))
}

/// Sample mean and `n − 1` standard deviation; `None` when empty.
fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(mean), Some(std))
}

/// Reduces trial records (already in sorted order) into report rows.
pub fn aggregate(cfg: &ExperimentConfig, records: &[TrialRecord]) -> ExperimentReport {
    let mut rows = Vec::new();
    let mut band_averages = Vec::new();
    let mut stages = StageSeconds::default();
    let mut estimates = 0usize;
    for r in records {
        stages.datagen += r.datagen_seconds;
        for o in &r.outcomes {
            stages.processing += o.timings.processing;
            stages.synthesis += o.timings.synthesis;
            stages.eigensolve += o.timings.eigensolve;
            estimates += 1;
        }
    }
    for &alpha in &cfg.alphas {
        for (mi, method) in cfg.methods.iter().enumerate() {
            let name = method.to_string();
            let mut pooled = Vec::new();
            let mut pooled_failures = 0;
            for &band in &cfg.bands {
                let outcomes: Vec<&MethodOutcome> =
                    records.iter().filter(|r| r.alpha == alpha && r.band == band).map(|r| &r.outcomes[mi]).collect();
                let rhos: Vec<f64> = outcomes.iter().filter_map(|o| o.rho).collect();
                let failures = outcomes.len() - rhos.len();
                let (mean_rho, std_rho) = mean_std(&rhos);
                let mean_seconds = if cfg.timing && !outcomes.is_empty() {
                    outcomes.iter().map(|o| o.seconds).sum::<f64>() / outcomes.len() as f64
                } else {
                    0.0
                };
                rows.push(ReportRow {
                    method: name.clone(),
                    alpha,
                    band,
                    mean_rho,
                    std_rho,
                    trials: rhos.len(),
                    failures,
                    mean_seconds,
                });
                pooled.extend(rhos);
                pooled_failures += failures;
            }
            let (mean_rho, std_rho) = mean_std(&pooled);
            band_averages.push(BandAverage {
                method: name,
                alpha,
                mean_rho,
                std_rho,
                trials: pooled.len(),
                failures: pooled_failures,
            });
        }
    }
    let stage_seconds = cfg.timing.then(|| {
        let trials = records.len().max(1) as f64;
        let per_estimate = estimates.max(1) as f64;
        StageSeconds {
            datagen: stages.datagen / trials,
            processing: stages.processing / per_estimate,
            synthesis: stages.synthesis / per_estimate,
            eigensolve: stages.eigensolve / per_estimate,
        }
    });
    ExperimentReport {
        version: REPORT_VERSION.to_string(),
        config: ConfigEcho::from(cfg),
        rows,
        band_averages,
        stage_seconds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub method: String,
    pub mean_rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub alpha: f64,
    pub entries: Vec<RankEntry>,
}

/// Per-α ranking by band-averaged mean correlation, descending; ties by method id.
pub fn compare_methods(report: &ExperimentReport) -> Vec<Ranking> {
    let mut alphas: Vec<f64> = report.band_averages.iter().map(|b| b.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    alphas
        .into_iter()
        .map(|alpha| {
            let mut entries: Vec<RankEntry> = report
                .band_averages
                .iter()
                .filter(|b| b.alpha == alpha)
                .map(|b| RankEntry { method: b.method.clone(), mean_rho: b.mean_rho })
                .collect();
            entries.sort_by(|a, b| {
                let key = |e: &RankEntry| e.mean_rho.unwrap_or(f64::NEG_INFINITY);
                key(b).total_cmp(&key(a)).then_with(|| a.method.cmp(&b.method))
            });
            Ranking { alpha, entries }
        })
        .collect()
}

pub fn render_rankings(rankings: &[Ranking]) -> String {
    let mut out = String::new();
    for r in rankings {
        out.push_str(&format!("alpha = {}\n", r.alpha));
        for (i, e) in r.entries.iter().enumerate() {
            let rho = e.mean_rho.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
            out.push_str(&format!("  {:>2}. {:<24} {}\n", i + 1, e.method, rho));
        }
    }
    out
}
