//! The estimator pipeline `y → t = T(y) → Y(t) → extremal eigenvector`, and
//! the correlation metric used to score it.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lifted::{synthesize, Intensities, MeasurementEnsemble, ModelError, Realization};
use crate::numerics::{dot, power_iterate_extremal, ComplexVector, EigenError, EigenOptions, EigenStrategy, C64};
use crate::processing::{process, MethodSpec, Processed, ProcessingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error(transparent)]
    Processing(#[from] ProcessingError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid solver options: {0}")]
    InvalidOptions(&'static str),
}

/// Eigensolver and realization settings; `None` fields use the dimension-dependent defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolverOptions {
    pub realization: Realization,
    pub strategy: EigenStrategy,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub seed: u64,
}

impl SolverOptions {
    pub fn eigen_options(&self, n: usize) -> EigenOptions {
        let defaults = EigenOptions::for_dim(n);
        EigenOptions {
            tol: self.tol.unwrap_or(defaults.tol),
            max_iter: self.max_iter.unwrap_or(defaults.max_iter),
            seed: self.seed,
            strategy: self.strategy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EstimateFlags {
    /// The eigensolver or the minimum-norm solve stopped above tolerance.
    pub nonconverged: bool,
    /// The spectral matrix was numerically zero; the estimate carries no information.
    pub degenerate: bool,
}

impl EstimateFlags {
    pub fn failed(&self) -> bool {
        self.nonconverged || self.degenerate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub processing: f64,
    pub synthesis: f64,
    pub eigensolve: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub method: MethodSpec,
    pub estimate: ComplexVector,
    pub eigenvalue: f64,
    pub iterations: usize,
    pub residual: f64,
    pub lambda0: f64,
    pub gamma_hat: Option<f64>,
    pub wall_time: f64,
    pub timings: StageTimings,
    pub flags: EstimateFlags,
}

/// Runs one spectral estimate. Solver failures are reported through
/// [`EstimateReport::flags`]; only invalid inputs produce an error.
pub fn estimate(
    ens: &MeasurementEnsemble,
    y: &Intensities,
    method: &MethodSpec,
    opts: &SolverOptions,
) -> Result<EstimateReport, SpectralError> {
    let eig_opts = opts.eigen_options(ens.n());
    if eig_opts.tol.is_nan() || eig_opts.tol <= 0.0 || eig_opts.max_iter == 0 {
        return Err(SpectralError::InvalidOptions("tol must be positive and max_iter at least 1"));
    }
    let start = Instant::now();
    let mut flags = EstimateFlags::default();

    let processed = match process(method, y, ens) {
        Ok(p) => p,
        Err(ProcessingError::NonConvergence { best, .. }) => {
            flags.nonconverged = true;
            Processed { weights: best, lambda0: y.mean(), gamma_hat: None, cg_iterations: None }
        }
        Err(e) => return Err(e.into()),
    };
    let t_processing = start.elapsed().as_secs_f64();

    let op = synthesize(ens, &processed.weights, opts.realization)?;
    let t_synthesis = start.elapsed().as_secs_f64();

    let (estimate, eigenvalue, iterations, residual) = match power_iterate_extremal(&op, method.eig_mode(), &eig_opts) {
        Ok(r) => (r.eigenvector, r.eigenvalue, r.iterations, r.residual),
        Err(EigenError::NonConvergence { best }) => {
            flags.nonconverged = true;
            (best.eigenvector, best.eigenvalue, best.iterations, best.residual)
        }
        Err(EigenError::ZeroOperator) => {
            flags.degenerate = true;
            (ComplexVector::basis(ens.n(), 0), 0.0, 1, 0.0)
        }
        Err(EigenError::InvalidInput(msg)) => return Err(SpectralError::InvalidOptions(msg)),
    };
    let wall_time = start.elapsed().as_secs_f64();

    Ok(EstimateReport {
        method: *method,
        estimate,
        eigenvalue,
        iterations,
        residual,
        lambda0: processed.lambda0,
        gamma_hat: processed.gamma_hat,
        wall_time,
        timings: StageTimings {
            processing: t_processing,
            synthesis: t_synthesis - t_processing,
            eigensolve: wall_time - t_synthesis,
        },
        flags,
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrelationError {
    #[error("reference vector is zero")]
    ZeroVector,
    #[error("estimate must have unit norm, has {0}")]
    NotUnitNorm(f64),
    #[error("length mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// `ρ = |⟨x, x̂⟩| / ‖x‖` for unit-norm `x̂`, clamped to `[0, 1]`.
pub fn correlation(x: &[C64], xhat: &[C64]) -> Result<f64, CorrelationError> {
    if x.len() != xhat.len() {
        return Err(CorrelationError::DimensionMismatch(x.len(), xhat.len()));
    }
    let nx = crate::numerics::norm(x);
    if nx == 0.0 {
        return Err(CorrelationError::ZeroVector);
    }
    let nh = crate::numerics::norm(xhat);
    if (nh - 1.0).abs() > 1e-9 {
        return Err(CorrelationError::NotUnitNorm(nh));
    }
    Ok((dot(x, xhat).norm() / nx).clamp(0.0, 1.0))
}
