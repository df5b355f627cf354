//! Extremal eigenpairs of Hermitian operators.
//!
//! Two strategies share one contract. [`EigenStrategy::ShiftedPower`] is
//! power iteration on `H + σI` (max mode) or `σI − H` (min mode) with
//! `σ = 1.01·B`, `B` the operator's spectral-radius bound.
//! [`EigenStrategy::Krylov`] (the default) runs Rayleigh–Ritz on a restarted,
//! fully reorthogonalized Krylov basis.
//!
//! Both stop when `‖Hv − λv‖ ≤ tol·max(1, |λ|)`, count iterations in
//! operator applications and canonicalize the returned eigenvector's phase.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dense_eigen::hermitian_eigen;
use super::operator::{DenseHermitian, HermitianOperator};
use super::seed::{seeded_rng, Stream};
use super::vector::{axpy, canonicalize_phase, dot, norm, normalize, random_unit_vector, ComplexVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenMode {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenStrategy {
    #[default]
    Krylov,
    ShiftedPower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub strategy: EigenStrategy,
}

impl EigenOptions {
    /// `tol = 1e-9`, `max_iter = 10·n + 1000`.
    pub fn for_dim(n: usize) -> Self {
        Self { tol: 1e-9, max_iter: 10 * n + 1000, seed: 0, strategy: EigenStrategy::default() }
    }

    pub fn with_strategy(mut self, strategy: EigenStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub eigenvalue: f64,
    pub eigenvector: ComplexVector,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("eigensolver did not converge after {} operator applications (residual {:.3e})", best.iterations, best.residual)]
    NonConvergence { best: EigenResult },
    #[error("operator is numerically zero")]
    ZeroOperator,
    #[error("invalid eigensolver input: {0}")]
    InvalidInput(&'static str),
}

const ZERO_OPERATOR: f64 = 1e-300;

pub fn power_iterate_extremal<H: HermitianOperator + ?Sized>(
    op: &H,
    mode: EigenMode,
    opts: &EigenOptions,
) -> Result<EigenResult, EigenError> {
    if op.dim() == 0 {
        return Err(EigenError::InvalidInput("operator dimension must be at least 1"));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(EigenError::InvalidInput("tol must be positive"));
    }
    if opts.max_iter == 0 {
        return Err(EigenError::InvalidInput("max_iter must be at least 1"));
    }
    let mut rng = seeded_rng(opts.seed, Stream::EigenStart);
    let start = random_unit_vector(&mut rng, op.dim());
    match opts.strategy {
        EigenStrategy::ShiftedPower => shifted_power(op, mode, opts, start),
        EigenStrategy::Krylov => krylov(op, mode, opts, start, &mut rng),
    }
}

fn converged(residual: f64, lambda: f64, tol: f64) -> bool {
    residual <= tol * lambda.abs().max(1.0)
}

fn finish(mut v: Vec<C64>, eigenvalue: f64, iterations: usize, residual: f64) -> EigenResult {
    canonicalize_phase(&mut v);
    EigenResult {
        eigenvalue,
        eigenvector: ComplexVector::new(v).expect("eigenvector entries are finite"),
        iterations,
        residual,
    }
}

/// Rayleigh quotient and residual norm for a unit vector `v` with image `hv`.
fn rayleigh(v: &[C64], hv: &[C64]) -> (f64, f64) {
    let lambda = dot(v, hv).re;
    let r: f64 = hv.iter().zip(v).map(|(h, x)| (h - x * lambda).norm_sqr()).sum::<f64>().sqrt();
    (lambda, r)
}

struct Best {
    v: Vec<C64>,
    lambda: f64,
    residual: f64,
}

impl Best {
    fn offer(slot: &mut Option<Best>, v: &[C64], lambda: f64, residual: f64) {
        let rel = residual / lambda.abs().max(1.0);
        let better = slot.as_ref().is_none_or(|b| rel < b.residual / b.lambda.abs().max(1.0));
        if better {
            *slot = Some(Best { v: v.to_vec(), lambda, residual });
        }
    }

    fn into_error(self, iterations: usize) -> EigenError {
        EigenError::NonConvergence { best: finish(self.v, self.lambda, iterations, self.residual) }
    }
}

fn shifted_power<H: HermitianOperator + ?Sized>(
    op: &H,
    mode: EigenMode,
    opts: &EigenOptions,
    mut v: Vec<C64>,
) -> Result<EigenResult, EigenError> {
    let sigma = 1.01 * op.spectral_bound();
    let sign = match mode {
        EigenMode::Max => 1.0,
        EigenMode::Min => -1.0,
    };
    let mut hv = op.apply_vec(&v);
    let mut applications = 1;
    if norm(&hv) <= ZERO_OPERATOR {
        return Err(EigenError::ZeroOperator);
    }
    let mut best = None;
    loop {
        let (lambda, residual) = rayleigh(&v, &hv);
        if converged(residual, lambda, opts.tol) {
            return Ok(finish(v, lambda, applications, residual));
        }
        Best::offer(&mut best, &v, lambda, residual);
        if applications >= opts.max_iter {
            return Err(best.expect("at least one iterate").into_error(applications));
        }
        // w = ±Hv + σv
        for (h, x) in hv.iter_mut().zip(&v) {
            *h = *h * sign + x * sigma;
        }
        std::mem::swap(&mut v, &mut hv);
        if normalize(&mut v) == 0.0 {
            return Err(EigenError::ZeroOperator);
        }
        op.apply(&v, &mut hv);
        applications += 1;
    }
}

/// Gram–Schmidt twice against `basis`; returns the norm left over relative to the input norm.
fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) -> f64 {
    let before = norm(v);
    if before == 0.0 {
        return 0.0;
    }
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            axpy(-c, b, v);
        }
    }
    normalize(v) / before
}

const BASIS_MAX: usize = 48;
const BREAKDOWN: f64 = 1e-10;

fn krylov<H: HermitianOperator + ?Sized>(
    op: &H,
    mode: EigenMode,
    opts: &EigenOptions,
    start: Vec<C64>,
    rng: &mut ChaCha8Rng,
) -> Result<EigenResult, EigenError> {
    let n = op.dim();
    let max_basis = n.min(BASIS_MAX);
    let keep = (max_basis / 3).max(1);

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(max_basis);
    let mut images: Vec<Vec<C64>> = Vec::with_capacity(max_basis);
    let mut next = start;
    let mut applications = 0usize;
    let mut best: Option<Best> = None;

    loop {
        // Expand the basis with Krylov directions.
        while basis.len() < max_basis && applications < opts.max_iter {
            if orthogonalize(&mut next, &basis) < BREAKDOWN {
                // Invariant subspace; continue with a fresh direction.
                if basis.len() == n {
                    break;
                }
                let mut fresh = random_unit_vector(rng, n);
                if orthogonalize(&mut fresh, &basis) < BREAKDOWN {
                    break;
                }
                next = fresh;
            }
            let image = op.apply_vec(&next);
            applications += 1;
            if applications == 1 && norm(&image) <= ZERO_OPERATOR {
                return Err(EigenError::ZeroOperator);
            }
            basis.push(std::mem::take(&mut next));
            next = image.clone();
            images.push(image);
        }

        // Rayleigh–Ritz on span(basis).
        let k = basis.len();
        let projected = DenseHermitian::from_fn(k, |i, j| dot(&basis[i], &images[j]));
        let eig = hermitian_eigen(&projected);
        let order: Vec<usize> = match mode {
            EigenMode::Max => (0..k).rev().collect(),
            EigenMode::Min => (0..k).collect(),
        };
        let combine = |coeffs: &[C64], vecs: &[Vec<C64>]| {
            let mut out = vec![C64::new(0.0, 0.0); n];
            for (c, v) in coeffs.iter().zip(vecs) {
                axpy(*c, v, &mut out);
            }
            out
        };
        let y = eig.vector(order[0]);
        let mut u = combine(y, &basis);
        normalize(&mut u);
        let hu = combine(y, &images);
        let (theta, residual) = rayleigh(&u, &hu);
        Best::offer(&mut best, &u, theta, residual);

        if converged(residual, theta, opts.tol) {
            // Confirm against a fresh application of the operator.
            let fresh = op.apply_vec(&u);
            applications += 1;
            let (theta, residual) = rayleigh(&u, &fresh);
            if converged(residual, theta, opts.tol) {
                return Ok(finish(u, theta, applications, residual));
            }
            Best::offer(&mut best, &u, theta, residual);
        }
        if applications >= opts.max_iter {
            return Err(best.expect("at least one Ritz pair").into_error(applications));
        }

        // Thick restart: keep the extremal Ritz vectors, continue from the residual.
        let kept = keep.min(k);
        let mut new_basis = Vec::with_capacity(max_basis);
        let mut new_images = Vec::with_capacity(max_basis);
        for &idx in &order[..kept] {
            let y = eig.vector(idx);
            new_basis.push(combine(y, &basis));
            new_images.push(combine(y, &images));
        }
        next = hu.iter().zip(&u).map(|(h, x)| h - x * theta).collect();
        basis = new_basis;
        images = new_images;
        for i in 0..basis.len() {
            let (done, rest) = basis.split_at_mut(i);
            let (done_img, rest_img) = images.split_at_mut(i);
            let (v, hv) = (&mut rest[0], &mut rest_img[0]);
            for (b, hb) in done.iter().zip(done_img.iter()) {
                let c = dot(b, v);
                axpy(-c, b, v);
                axpy(-c, hb, hv);
            }
            let scale = normalize(v);
            if scale > 0.0 {
                hv.iter_mut().for_each(|z| *z /= scale);
            }
        }
        if k >= n {
            next = random_unit_vector(rng, n);
        }
    }
}
