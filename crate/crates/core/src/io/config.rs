//! Line-oriented `key = value` experiment configuration with `#` comments.
//!
//! Required keys: `n`, `alphas`, `methods`. Optional keys and defaults:
//! `seed = 0`, `bands = max(1, n/8)`, `truths = 5`, `trials = 10`,
//! `noise = none`, `parallelism = <available cores>`, `out = report.json`,
//! `timing = false`, `trial_dump = none`, `realization = auto`,
//! `strategy = krylov`. Unknown keys are rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::datagen::NoiseModel;
use crate::harness::ExperimentConfig;
use crate::lifted::Realization;
use crate::numerics::EigenStrategy;
use crate::processing::MethodSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("missing required key `{0}`")]
    MissingRequired(&'static str),
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { key: String, line: usize },
}

const KEYS: [&str; 14] = [
    "seed",
    "n",
    "alphas",
    "bands",
    "truths",
    "trials",
    "methods",
    "noise",
    "parallelism",
    "out",
    "timing",
    "trial_dump",
    "realization",
    "strategy",
];

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue { key: key.to_string(), reason: reason.into() }
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| bad(key, format!("`{value}` is not valid")))
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError> {
    value.split(',').map(|v| scalar(key, v.trim())).collect()
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut entries: Vec<(&str, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey { key: key.to_string(), line: i + 1 });
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::DuplicateKey { key: key.to_string(), line: i + 1 });
        }
        entries.push((key, value));
    }
    let get = |key: &str| entries.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let required = |key: &'static str| get(key).ok_or(ConfigError::MissingRequired(key));

    let n: usize = scalar("n", required("n")?)?;
    let alphas: Vec<f64> = list("alphas", required("alphas")?)?;
    let methods = required("methods")?
        .split(',')
        .map(|m| m.trim().parse::<MethodSpec>().map_err(|e| bad("methods", e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cfg = ExperimentConfig::new(n, alphas, methods);

    if let Some(v) = get("seed") {
        cfg.seed = scalar("seed", v)?;
    }
    if let Some(v) = get("bands") {
        cfg.bands = list("bands", v)?;
    }
    if let Some(v) = get("truths") {
        cfg.truths = scalar("truths", v)?;
    }
    if let Some(v) = get("trials") {
        cfg.trials = scalar("trials", v)?;
    }
    if let Some(v) = get("noise") {
        cfg.noise = v.parse::<NoiseModel>().map_err(|e| bad("noise", e.to_string()))?;
    }
    if let Some(v) = get("parallelism") {
        cfg.parallelism = scalar("parallelism", v)?;
    }
    if let Some(v) = get("out") {
        cfg.out = PathBuf::from(v);
    }
    if let Some(v) = get("timing") {
        cfg.timing = scalar("timing", v)?;
    }
    if let Some(v) = get("trial_dump") {
        cfg.trial_dump = (v != "none").then(|| PathBuf::from(v));
    }
    if let Some(v) = get("realization") {
        cfg.solver.realization = match v {
            "auto" => Realization::Auto,
            "dense" => Realization::Dense,
            "matrix-free" => Realization::MatrixFree,
            _ => return Err(bad("realization", format!("`{v}` (expected auto, dense or matrix-free)"))),
        };
    }
    if let Some(v) = get("strategy") {
        cfg.solver.strategy = match v {
            "krylov" => EigenStrategy::Krylov,
            "shifted-power" => EigenStrategy::ShiftedPower,
            _ => return Err(bad("strategy", format!("`{v}` (expected krylov or shifted-power)"))),
        };
    }
    cfg.validate().map_err(|e| bad("config", e.to_string()))?;
    Ok(cfg)
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Writes every key explicitly; parsing the output yields the same configuration.
pub fn serialize_config(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    line("seed", cfg.seed.to_string());
    line("n", cfg.n.to_string());
    line("alphas", join(&cfg.alphas));
    line("bands", join(&cfg.bands));
    line("truths", cfg.truths.to_string());
    line("trials", cfg.trials.to_string());
    line("methods", join(&cfg.methods));
    line("noise", cfg.noise.to_string());
    line("parallelism", cfg.parallelism.to_string());
    line("out", cfg.out.display().to_string());
    line("timing", cfg.timing.to_string());
    line("trial_dump", cfg.trial_dump.as_ref().map_or_else(|| "none".into(), |p| p.display().to_string()));
    line(
        "realization",
        match cfg.solver.realization {
            Realization::Auto => "auto",
            Realization::Dense => "dense",
            Realization::MatrixFree => "matrix-free",
        }
        .into(),
    );
    line(
        "strategy",
        match cfg.solver.strategy {
            EigenStrategy::Krylov => "krylov",
            EigenStrategy::ShiftedPower => "shifted-power",
        }
        .into(),
    );
    out
}
