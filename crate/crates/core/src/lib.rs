//! Spectral initialization for phase retrieval.
//!
//! Given phaseless measurements `y_m = |⟨a_m, x⟩|²`, a spectral method forms
//! `Y(t) = (1/M) Σ t_m a_m a_mᴴ` from processed weights `t = T(y)` and returns
//! its extremal eigenvector as an estimate of `x` up to global phase.
//!
//! ```
//! use bregspec::datagen::{sample_bandlimited_truth, sample_gaussian_ensemble};
//! use bregspec::lifted::forward_lifted;
//! use bregspec::spectral::{correlation, estimate, SolverOptions};
//!
//! let x = sample_bandlimited_truth(32, 4, 1).unwrap();
//! let ens = sample_gaussian_ensemble(320, 32, 2).unwrap();
//! let y = forward_lifted(&ens, x.as_slice()).unwrap();
//! let report = estimate(&ens, &y, &"ll".parse().unwrap(), &SolverOptions::default()).unwrap();
//! let rho = correlation(x.as_slice(), report.estimate.as_slice()).unwrap();
//! assert!(rho > 0.8);
//! ```

pub mod bregman;
pub mod datagen;
pub mod harness;
pub mod io;
pub mod lifted;
pub mod numerics;
pub mod processing;
pub mod spectral;

pub use datagen::NoiseModel;
pub use harness::{run_experiment, ExperimentConfig, ExperimentReport};
pub use lifted::{forward_lifted, synthesize, Intensities, MeasurementEnsemble, ProcessedWeights, Realization};
pub use numerics::{ComplexVector, EigenMode, EigenResult, HermitianOperator, C64};
pub use processing::{apply_processing, MethodId, MethodSpec};
pub use spectral::{correlation, estimate, EstimateReport, SolverOptions};
