use bregspec::harness::{compare_methods, render_rankings, run_experiment, ExperimentConfig};
use bregspec::processing::MethodSpec;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(64);
    let trials: usize = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(20);
    let methods: Vec<MethodSpec> = [
        "classical",
        "truncated",
        "orthogonal",
        "weighted",
        "min_norm",
        "mm",
        "ll",
        "poisson",
        "awgn",
        "kl",
        "is0",
        "is_opt",
        "is_opt:rep=sphere",
        "is0:rep=sphere",
        "l2_min",
    ]
    .iter()
    .map(|m| m.parse().unwrap())
    .collect();
    let mut cfg = ExperimentConfig::new(n, vec![2.0, 5.0, 10.0], methods);
    cfg.truths = 5;
    cfg.trials = trials;
    cfg.timing = true;
    let start = std::time::Instant::now();
    let report = run_experiment(&cfg).unwrap();
    println!("{}", render_rankings(&compare_methods(&report)));
    for r in &report.rows {
        if r.failures > 0 {
            println!("failures: {} alpha {} -> {}", r.method, r.alpha, r.failures);
        }
    }
    println!("{:?}", report.stage_seconds);
    println!("elapsed {:.2}s", start.elapsed().as_secs_f64());
}
