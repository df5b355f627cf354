//! Report serialization. JSON follows
//! `{version, config, rows: [{method, alpha, band, mean_rho, std_rho, trials, failures, mean_seconds}], band_averages}`;
//! CSV carries the same row columns with floats printed to 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::harness::{ExperimentReport, TrialRecord};

pub const CSV_COLUMNS: [&str; 8] =
    ["method", "alpha", "band", "mean_rho", "std_rho", "trials", "failures", "mean_seconds"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    /// `.csv` selects CSV; anything else is JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

fn full(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(full).unwrap_or_default()
}

pub fn report_to_json(report: &ExperimentReport) -> Result<String, ReportError> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn report_to_csv(report: &ExperimentReport) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.method,
            full(r.alpha),
            r.band,
            opt(r.mean_rho),
            opt(r.std_rho),
            r.trials,
            r.failures,
            full(r.mean_seconds)
        );
    }
    out
}

pub fn write_report(
    report: &ExperimentReport,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<(), ReportError> {
    let text = match format {
        ReportFormat::Json => report_to_json(report)?,
        ReportFormat::Csv => report_to_csv(report),
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// One line per `(trial, method)`: `alpha,band,s,l,method,rho,failed,seconds,checksum`.
pub fn trial_dump_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("alpha,band,s,l,method,rho,failed,seconds,checksum\n");
    for r in records {
        for o in &r.outcomes {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                full(r.alpha),
                r.band,
                r.s,
                r.l,
                o.method,
                opt(o.rho),
                o.failed,
                full(o.seconds),
                r.checksum
            );
        }
    }
    out
}

pub fn write_trial_dump(records: &[TrialRecord], path: impl AsRef<Path>) -> Result<(), ReportError> {
    std::fs::write(path, trial_dump_csv(records))?;
    Ok(())
}
