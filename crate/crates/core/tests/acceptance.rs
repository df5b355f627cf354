//! Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use bregspec::bregman::{empirical_mean, jensen_gap, mean_divergence, PotentialSpec};
use bregspec::datagen::{sample_bandlimited_truth, sample_gaussian_ensemble};
use bregspec::harness::{run_experiment, ExperimentConfig, ExperimentReport};
use bregspec::io::{report_to_csv, report_to_json};
use bregspec::lifted::{forward_lifted, gram_intensity, rip_probe, synthesize, ProcessedWeights, Realization};
use bregspec::numerics::{
    dot, power_iterate_extremal, random_unit_vector, seeded_rng, EigenMode, EigenOptions, EigenStrategy,
    HermitianOperator, Stream, C64,
};
use bregspec::processing::{apply_processing, min_norm_weights, process, MethodSpec};
use bregspec::spectral::{estimate, SolverOptions};
use common::*;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, notes: Vec::new() }
    }

    fn note(mut self, note: String) -> Self {
        self.notes.push(note);
        self
    }
}

fn methods(ids: &[&str]) -> Vec<MethodSpec> {
    ids.iter().map(|m| m.parse().unwrap()).collect()
}

fn sweep(alphas: Vec<f64>, ids: &[&str], truths: usize, trials: usize, parallelism: usize) -> ExperimentReport {
    let mut cfg = ExperimentConfig::new(64, alphas, methods(ids));
    cfg.bands = vec![8];
    cfg.truths = truths;
    cfg.trials = trials;
    cfg.parallelism = parallelism;
    run_experiment(&cfg).expect("sweep runs")
}

fn mean_rho(report: &ExperimentReport, method: &str, alpha: f64) -> f64 {
    report.band_averages.iter().find(|r| r.method == method && r.alpha == alpha).and_then(|r| r.mean_rho).unwrap_or(0.0)
}

fn total_failures(report: &ExperimentReport) -> usize {
    report.band_averages.iter().map(|r| r.failures).sum()
}

fn a1() -> Outcome {
    let ids = ["kl", "is_opt", "ll", "mm"];
    let start = Instant::now();
    let report = sweep(vec![10.0], &ids, 5, 20, 1);
    let seconds = start.elapsed().as_secs_f64();
    let rhos: Vec<String> = ids.iter().map(|m| format!("{m}={:.4}", mean_rho(&report, m, 10.0))).collect();
    let pass = ids.iter().all(|m| mean_rho(&report, m, 10.0) >= 0.95) && seconds <= 120.0;
    Outcome::new(pass, format!("{} (need >= 0.95), {seconds:.1}s single-threaded", rhos.join(" ")))
}

fn a2() -> Outcome {
    let strong = ["kl", "is_opt", "ll", "mm"];
    let weak = ["classical", "truncated", "orthogonal", "weighted"];
    let all: Vec<&str> = strong.iter().chain(&weak).copied().collect();
    let report = sweep(vec![2.0], &all, 5, 20, bregspec::harness::default_parallelism());
    let avg = |ids: &[&str]| ids.iter().map(|m| mean_rho(&report, m, 2.0)).sum::<f64>() / ids.len() as f64;
    let (s, w) = (avg(&strong), avg(&weak));
    Outcome::new(
        s >= 1.5 * w && total_failures(&report) == 0,
        format!("strong {s:.4} vs weak {w:.4}, ratio {:.3} (need >= 1.5), 100 trials", s / w),
    )
}

fn a3() -> Outcome {
    let ids = ["is_opt:rep=sphere", "ll", "is0:rep=sphere"];
    let report = sweep(vec![2.0, 5.0], &ids, 10, 20, bregspec::harness::default_parallelism());
    let mut pass = true;
    let mut parts = Vec::new();
    let mut diag = Vec::new();
    for alpha in [2.0, 5.0] {
        let is_opt = mean_rho(&report, ids[0], alpha);
        let ll = mean_rho(&report, "ll", alpha);
        pass &= is_opt >= ll - 0.01;
        parts.push(format!("alpha={alpha}: is_opt {is_opt:.4} vs ll {ll:.4} (diff {:+.4})", is_opt - ll));
        diag.push(format!("alpha={alpha}: is0 {:+.4}", mean_rho(&report, ids[2], alpha) - ll));
    }
    Outcome::new(pass, format!("{}; 200 trials per alpha", parts.join(", ")))
        .note(format!("sphere representative without gamma correction vs ll: {}", diag.join(", ")))
}

fn a4() -> Outcome {
    let mut r = rng(400);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = r.random_range(1..12);
        let m = r.random_range(1..60);
        let ens = sample_gaussian_ensemble(m, n, 1000 + trial).unwrap();
        let z = random_vector(&mut r, n);
        let t: Vec<f64> = (0..m).map(|_| r.random_range(-3.0..3.0)).collect();
        let lhs: f64 = ens.rows().zip(&t).map(|(a, tm)| tm * dot(a, &z).norm_sqr()).sum::<f64>() / m as f64;
        let z_sq: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let scale = ens.row_norms_sq().iter().zip(&t).map(|(a, tm)| tm.abs() * a).sum::<f64>() / m as f64 * z_sq;
        let weights = ProcessedWeights::new(t).unwrap();
        for realization in [Realization::Dense, Realization::MatrixFree] {
            let op = synthesize(&ens, &weights, realization).unwrap();
            let rhs = dot(&z, &op.apply_vec(&z)).re;
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    Outcome::new(
        worst <= 1e-10,
        format!("worst relative gap {worst:.2e} over 100 draws, both realizations (need <= 1e-10)"),
    )
}

fn eigen_oracle(strategy: EigenStrategy) -> (f64, usize) {
    let mut r = rng(500);
    let mut worst = 1.0f64;
    let mut errors = 0;
    for trial in 0..200 {
        let n = 1 + trial % 8;
        let h = random_hermitian(&mut r, n);
        let (_, vectors) = dense_eigen(&h);
        for (mode, idx) in [(EigenMode::Max, n - 1), (EigenMode::Min, 0)] {
            let opts = EigenOptions::for_dim(n).with_strategy(strategy).with_seed(trial as u64);
            match power_iterate_extremal(&h, mode, &opts) {
                Ok(res) => worst = worst.min(overlap(res.eigenvector.as_slice(), &vectors[idx])),
                Err(_) => errors += 1,
            }
        }
    }
    (worst, errors)
}

fn a5() -> Outcome {
    let (worst, errors) = eigen_oracle(EigenStrategy::Krylov);
    let (sp_worst, sp_errors) = eigen_oracle(EigenStrategy::ShiftedPower);
    Outcome::new(
        worst >= 1.0 - 1e-8 && errors == 0,
        format!("min overlap {worst:.12} over 200 matrices, max and min modes, {errors} solver errors"),
    )
    .note(format!("shifted power strategy: min overlap {sp_worst:.12}, {sp_errors} nonconverged"))
}

fn a6() -> Outcome {
    let ens = sample_gaussian_ensemble(64, 16, 5).unwrap();
    let mut probe = seeded_rng(600, Stream::Probe);
    let mut r = rng(601);
    let mut beaten = 0;
    let mut worst_gap = 0.0f64;
    for (spec, on_simplex) in [(PotentialSpec::NegativeEntropySimplex, true), (PotentialSpec::Burg, false)] {
        let samples: Vec<Vec<f64>> = (0..500)
            .map(|_| {
                let v = random_unit_vector(&mut probe, 16);
                let y = forward_lifted(&ens, &v).unwrap();
                let scale = if on_simplex { y.l1_norm() } else { y.mean() };
                y.values().iter().map(|x| x / scale).collect()
            })
            .collect();
        let mean = empirical_mean(&samples).unwrap();
        let best = mean_divergence(&spec, &samples, &mean).unwrap();
        for _ in 0..50 {
            let eps: Vec<f64> = (0..mean.len()).map(|_| r.random_range(-1.0..1.0)).collect();
            let mut cand: Vec<f64> = mean.iter().zip(&eps).map(|(m, e)| m * (1.0 + 0.2 * e)).collect();
            if on_simplex {
                let s: f64 = cand.iter().sum();
                cand.iter_mut().for_each(|c| *c /= s);
            }
            if mean_divergence(&spec, &samples, &cand).unwrap() <= best {
                beaten += 1;
            }
        }
        let gap = jensen_gap(&spec, &samples).unwrap();
        worst_gap = worst_gap.max((gap - best).abs() / best.abs());
    }
    Outcome::new(
        beaten == 0 && worst_gap <= 1e-10,
        format!(
            "{beaten} of 100 perturbations matched the mean; Jensen gap relative error {worst_gap:.2e} (need <= 1e-10)"
        ),
    )
}

fn a7() -> Outcome {
    let mut worst_res = 0.0f64;
    let mut worst_err = 0.0f64;
    for trial in 0..30u64 {
        let m = 2 + (trial as usize % 31);
        let ens = sample_gaussian_ensemble(m, 8, 700 + trial).unwrap();
        let x = sample_bandlimited_truth(8, 2, 800 + trial).unwrap();
        let y = forward_lifted(&ens, x.as_slice()).unwrap();
        let t = match min_norm_weights(&ens, &y, 1e-12, 0.0) {
            Ok(t) => t,
            Err(_) => return Outcome::new(false, format!("solve failed for M = {m}")),
        };
        let g = gram_intensity(&ens);
        let gt = g.apply_vec(&t.values().iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
        let res: f64 = gt.iter().zip(y.values()).map(|(a, b)| (a.re - b).powi(2)).sum::<f64>().sqrt();
        let ynorm: f64 = y.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        worst_res = worst_res.max(res / ynorm);
        let dense = DMatrix::from_fn(m, m, |i, j| g.get(i, j).re);
        let direct = dense.lu().solve(&DVector::from_column_slice(y.values())).unwrap();
        let err: f64 = t.values().iter().zip(direct.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        worst_err = worst_err.max(err / direct.norm());
    }
    Outcome::new(
        worst_res <= 1e-6 && worst_err <= 1e-8,
        format!("worst residual {worst_res:.2e} (need <= 1e-6), worst oracle error {worst_err:.2e} (need <= 1e-8), M = 2..32"),
    )
}

fn a8() -> Outcome {
    let (n, m, trials) = (256, 2048, 50);
    let spec: MethodSpec = "is_opt".parse().unwrap();
    let mut within = 0;
    let mut mean_gamma = 0.0;
    let mut sample_within = 0;
    let mut probe = seeded_rng(800, Stream::Probe);
    for trial in 0..trials {
        let ens = sample_gaussian_ensemble(m, n, 900 + trial).unwrap();
        let x = sample_bandlimited_truth(n, n / 8, 950 + trial).unwrap();
        let y = forward_lifted(&ens, x.as_slice()).unwrap();
        let gamma = process(&spec, &y, &ens).unwrap().gamma_hat.unwrap();
        mean_gamma += gamma / trials as f64;
        if gamma.abs() <= 0.05 {
            within += 1;
        }
        let v = random_unit_vector(&mut probe, n);
        let q = forward_lifted(&ens, &v).unwrap();
        let (ql, yl) = (q.l1_norm(), y.l1_norm());
        let sample: f64 =
            q.values().iter().zip(y.values()).map(|(a, b)| ((a / ql) / (b / yl)).ln()).sum::<f64>() / m as f64;
        if sample.abs() <= 0.05 {
            sample_within += 1;
        }
    }
    Outcome::new(
        within as f64 >= 0.95 * trials as f64,
        format!("{within}/{trials} trials with |gamma_hat| <= 0.05 (need >= 95%), mean gamma_hat {mean_gamma:.4}"),
    )
    .note(format!("sample gamma at a random unit vector: {sample_within}/{trials} within 0.05"))
}

fn a9() -> Outcome {
    let mut worst = 0.0f64;
    let mut identical = true;
    for trial in 0..20u64 {
        let ens = sample_gaussian_ensemble(160, 16, 1100 + trial).unwrap();
        let x = sample_bandlimited_truth(16, 4, 1200 + trial).unwrap();
        let y = forward_lifted(&ens, x.as_slice()).unwrap();
        let is0: MethodSpec = "is0:rep=model".parse().unwrap();
        let ll: MethodSpec = "ll".parse().unwrap();
        let a = apply_processing(&is0, &y, &ens).unwrap();
        let b = apply_processing(&ll, &y, &ens).unwrap();
        for (u, v) in a.values().iter().zip(b.values()) {
            worst = worst.max((u - v).abs() / u.abs().max(1.0));
        }
        let opts = SolverOptions::default();
        identical &=
            estimate(&ens, &y, &is0, &opts).unwrap().estimate == estimate(&ens, &y, &ll, &opts).unwrap().estimate;
    }
    Outcome::new(
        worst <= 1e-12 && identical,
        format!("worst weight gap {worst:.2e} (need <= 1e-12), estimates identical: {identical}"),
    )
}

fn a10() -> Outcome {
    let ens = sample_gaussian_ensemble(4096, 16, 1300).unwrap();
    let probe = rip_probe(&ens, 200, 1301).unwrap();
    Outcome::new(
        probe.ratio_min >= 1.5 && probe.ratio_max <= 2.5,
        format!("ratios in [{:.4}, {:.4}] over 200 probes (need within [1.5, 2.5])", probe.ratio_min, probe.ratio_max),
    )
}

fn a11() -> Outcome {
    let mut cfg =
        ExperimentConfig::new(32, vec![2.0, 6.0], methods(&["classical", "min_norm", "ll", "is_opt", "awgn"]));
    cfg.bands = vec![2, 8];
    cfg.truths = 2;
    cfg.trials = 3;
    cfg.seed = 2024;
    let mut outputs = Vec::new();
    for parallelism in [1, 1, 4, 8] {
        cfg.parallelism = parallelism;
        let report = run_experiment(&cfg).unwrap();
        outputs.push((report_to_json(&report).unwrap(), report_to_csv(&report)));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    Outcome::new(same, format!("4 runs at parallelism 1, 1, 4, 8: JSON and CSV bitwise identical: {same}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("A1", a1),
        ("A2", a2),
        ("A3", a3),
        ("A4", a4),
        ("A5", a5),
        ("A6", a6),
        ("A7", a7),
        ("A8", a8),
        ("A9", a9),
        ("A10", a10),
        ("A11", a11),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{name:<4} {verdict}  {}  [{:.1}s]", outcome.detail, start.elapsed().as_secs_f64());
        for note in &outcome.notes {
            println!("       note: {note}");
        }
        if !outcome.pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} failed ({})", failed.len(), failed.join(", "));
        ExitCode::FAILURE
    }
}
