use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use bregspec::datagen::{sample_bandlimited_truth, sample_gaussian_ensemble};
use bregspec::harness::{compare_methods, render_rankings, run_experiment_detailed, ExperimentConfig};
use bregspec::io::{
    load_complex_vector, load_ensemble, load_real_vector, parse_config, save_complex_vector, save_ensemble,
    save_real_vector, write_report, write_trial_dump, ReportFormat,
};
use bregspec::lifted::{forward_lifted, rip_probe, Intensities, Realization};
use bregspec::numerics::EigenStrategy;
use bregspec::spectral::{estimate, SolverOptions};
use bregspec::MethodSpec;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bregspec", version, about = "Spectral initialization for phase retrieval")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an M×N complex Gaussian measurement ensemble.
    GenEnsemble {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a bandlimited ground-truth signal.
    GenSignal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        band: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute intensities y_m = |a_mᴴx|².
    Forward {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute a spectral estimate from measured intensities.
    Estimate {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        measurements: PathBuf,
        #[arg(long)]
        method: MethodSpec,
        #[arg(long)]
        out: PathBuf,
        /// Print the estimate report as JSON on stdout.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "auto", value_parser = ["auto", "dense", "matrix-free"])]
        realization: String,
        #[arg(long, default_value = "krylov", value_parser = ["krylov", "shifted-power"])]
        strategy: String,
    },
    /// Run a full Monte-Carlo sweep described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sample the lifted isometry ratio at random unit vectors.
    RipProbe {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a sweep with per-stage timings.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Marks a failure of the numerical pipeline rather than of the inputs.
#[derive(Debug)]
struct Numerical(String);

impl fmt::Display for Numerical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Numerical {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<Numerical>() { 4 } else { 3 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GenEnsemble { m, n, seed, out } => {
            let ens = sample_gaussian_ensemble(m, n, seed)?;
            save_ensemble(&ens, &out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::GenSignal { n, band, seed, out } => {
            let x = sample_bandlimited_truth(n, band, seed)?;
            save_complex_vector(x.as_slice(), &out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Forward { ensemble, signal, out } => {
            let ens = load_ensemble(&ensemble).with_context(|| format!("reading {}", ensemble.display()))?;
            let x = load_complex_vector(&signal).with_context(|| format!("reading {}", signal.display()))?;
            let y = forward_lifted(&ens, &x)?;
            save_real_vector(y.values(), &out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Estimate { ensemble, measurements, method, out, json, seed, realization, strategy } => {
            let ens = load_ensemble(&ensemble).with_context(|| format!("reading {}", ensemble.display()))?;
            let values =
                load_real_vector(&measurements).with_context(|| format!("reading {}", measurements.display()))?;
            let y = Intensities::new(values)?;
            let opts = SolverOptions {
                realization: match realization.as_str() {
                    "dense" => Realization::Dense,
                    "matrix-free" => Realization::MatrixFree,
                    _ => Realization::Auto,
                },
                strategy: match strategy.as_str() {
                    "shifted-power" => EigenStrategy::ShiftedPower,
                    _ => EigenStrategy::Krylov,
                },
                seed,
                ..SolverOptions::default()
            };
            let report = estimate(&ens, &y, &method, &opts)?;
            save_complex_vector(report.estimate.as_slice(), &out)
                .with_context(|| format!("writing {}", out.display()))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                eprintln!(
                    "{}: eigenvalue {:.6e}, {} iterations, residual {:.2e}",
                    report.method, report.eigenvalue, report.iterations, report.residual
                );
            }
            if report.flags.degenerate {
                return Err(Numerical("spectral matrix is numerically zero".into()).into());
            }
            if report.flags.nonconverged {
                return Err(Numerical(format!("solver did not converge (residual {:.2e})", report.residual)).into());
            }
        }
        Command::Simulate { config } => {
            let cfg = load_config(&config)?;
            sweep(&cfg)?;
        }
        Command::RipProbe { ensemble, probes, seed } => {
            let ens = load_ensemble(&ensemble).with_context(|| format!("reading {}", ensemble.display()))?;
            let probe = rip_probe(&ens, probes, seed)?;
            println!("ratio_min {:.10}", probe.ratio_min);
            println!("ratio_max {:.10}", probe.ratio_max);
            println!("delta {:.10}", probe.delta());
        }
        Command::Bench { config } => {
            let mut cfg = load_config(&config)?;
            cfg.timing = true;
            let start = Instant::now();
            let stages = sweep(&cfg)?;
            println!("total {:.3}s", start.elapsed().as_secs_f64());
            if let Some(s) = stages {
                println!("per trial datagen {:.6}s", s.datagen);
                println!("per estimate processing {:.6}s", s.processing);
                println!("per estimate synthesis {:.6}s", s.synthesis);
                println!("per estimate eigensolve {:.6}s", s.eigensolve);
            }
        }
    }
    Ok(())
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(path).with_context(|| format!("reading config {}", path.display()))
}

fn sweep(cfg: &ExperimentConfig) -> Result<Option<bregspec::harness::StageSeconds>> {
    let (report, records) = run_experiment_detailed(cfg)?;
    write_report(&report, &cfg.out, ReportFormat::from_path(&cfg.out))
        .with_context(|| format!("writing {}", cfg.out.display()))?;
    if let Some(dump) = &cfg.trial_dump {
        write_trial_dump(&records, dump).with_context(|| format!("writing {}", dump.display()))?;
    }
    print!("{}", render_rankings(&compare_methods(&report)));
    println!("report written to {}", cfg.out.display());
    Ok(report.stage_seconds)
}
