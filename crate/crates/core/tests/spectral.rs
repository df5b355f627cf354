mod common;

use bregspec::datagen::{sample_bandlimited_truth, sample_gaussian_ensemble};
use bregspec::lifted::{forward_lifted, Intensities, Realization};
use bregspec::numerics::{EigenStrategy, C64};
use bregspec::spectral::*;
use common::*;
use rand::Rng;

#[test]
fn kl_recovers_at_high_oversampling() {
    let n = 64;
    let mut total = 0.0;
    let runs = 5;
    for seed in 0..runs {
        let x = sample_bandlimited_truth(n, 8, seed).unwrap();
        let ens = sample_gaussian_ensemble(10 * n, n, 100 + seed).unwrap();
        let y = forward_lifted(&ens, x.as_slice()).unwrap();
        let report = estimate(&ens, &y, &"kl".parse().unwrap(), &SolverOptions::default()).unwrap();
        assert!(!report.flags.failed());
        assert!((report.estimate.norm() - 1.0).abs() < 1e-12);
        total += correlation(x.as_slice(), report.estimate.as_slice()).unwrap();
    }
    assert!(total / runs as f64 >= 0.9);
}

#[test]
fn estimate_is_invariant_to_positive_scaling() {
    let x = sample_bandlimited_truth(32, 4, 2).unwrap();
    let ens = sample_gaussian_ensemble(160, 32, 3).unwrap();
    let y = forward_lifted(&ens, x.as_slice()).unwrap();
    let y2 = Intensities::new(y.values().iter().map(|v| 3.7 * v).collect()).unwrap();
    let opts = SolverOptions::default();
    let a = estimate(&ens, &y, &"classical".parse().unwrap(), &opts).unwrap();
    let b = estimate(&ens, &y2, &"classical".parse().unwrap(), &opts).unwrap();
    assert!(overlap(a.estimate.as_slice(), b.estimate.as_slice()) >= 1.0 - 1e-8);
}

#[test]
fn estimates_are_deterministic() {
    let x = sample_bandlimited_truth(32, 4, 9).unwrap();
    let ens = sample_gaussian_ensemble(100, 32, 10).unwrap();
    let y = forward_lifted(&ens, x.as_slice()).unwrap();
    for method in ["ll", "orthogonal", "is_opt", "min_norm"] {
        let spec = method.parse().unwrap();
        let opts = SolverOptions { seed: 77, ..SolverOptions::default() };
        let a = estimate(&ens, &y, &spec, &opts).unwrap();
        let b = estimate(&ens, &y, &spec, &opts).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.eigenvalue.to_bits(), b.eigenvalue.to_bits());
    }
}

#[test]
fn realizations_and_strategies_agree() {
    let x = sample_bandlimited_truth(16, 4, 1).unwrap();
    let ens = sample_gaussian_ensemble(80, 16, 2).unwrap();
    let y = forward_lifted(&ens, x.as_slice()).unwrap();
    let spec = "ll".parse().unwrap();
    let reference = estimate(&ens, &y, &spec, &SolverOptions::default()).unwrap();
    for (realization, strategy) in
        [(Realization::MatrixFree, EigenStrategy::Krylov), (Realization::Dense, EigenStrategy::ShiftedPower)]
    {
        let opts = SolverOptions { realization, strategy, max_iter: Some(200_000), ..SolverOptions::default() };
        let other = estimate(&ens, &y, &spec, &opts).unwrap();
        assert!(!other.flags.failed());
        assert!(overlap(reference.estimate.as_slice(), other.estimate.as_slice()) >= 1.0 - 1e-8);
    }
}

#[test]
fn report_fields_are_populated() {
    let x = sample_bandlimited_truth(16, 4, 4).unwrap();
    let ens = sample_gaussian_ensemble(64, 16, 5).unwrap();
    let y = forward_lifted(&ens, x.as_slice()).unwrap();
    let report = estimate(&ens, &y, &"is_opt".parse().unwrap(), &SolverOptions::default()).unwrap();
    assert!(report.gamma_hat.is_some());
    assert!((report.lambda0 - y.mean()).abs() < 1e-15);
    assert!(report.wall_time >= 0.0);
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["method"], "is_opt");
    assert!(json["flags"]["nonconverged"].is_boolean());
}

#[test]
fn correlation_ignores_global_phase() {
    let mut r = rng(50);
    let x = random_vector(&mut r, 10);
    let mut xhat = random_vector(&mut r, 10);
    bregspec::numerics::normalize(&mut xhat);
    let base = correlation(&x, &xhat).unwrap();
    for _ in 0..20 {
        let theta: f64 = r.random_range(0.0..std::f64::consts::TAU);
        let rotated: Vec<C64> = xhat.iter().map(|z| z * C64::from_polar(1.0, theta)).collect();
        assert!((correlation(&x, &rotated).unwrap() - base).abs() < 1e-12);
        let scaled: Vec<C64> = x.iter().map(|z| z * 4.2).collect();
        assert!((correlation(&scaled, &xhat).unwrap() - base).abs() < 1e-12);
    }
}
