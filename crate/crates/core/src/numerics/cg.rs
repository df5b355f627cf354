use thiserror::Error;

use super::operator::HermitianOperator;
use super::vector::{axpy, dot, norm, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Relative residual target `‖(H + τI)w − b‖ ≤ tol·‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
    /// Tikhonov shift `τ ≥ 0`.
    pub tikhonov: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub solution: Vec<C64>,
    pub iterations: usize,
    /// Relative residual of `solution`, recomputed from scratch.
    pub residual: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CgError {
    #[error("dimension mismatch: operator has {expected} rows, right-hand side has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("conjugate gradient stalled at relative residual {:.3e} after {} iterations", best.residual, best.iterations)]
    NonConvergence { best: CgSolution },
    #[error("invalid solver options: {0}")]
    InvalidOptions(&'static str),
}

/// Solves `(H + τI) w = rhs` for Hermitian positive (semi)definite `H`.
///
/// The recursively updated residual is periodically replaced by the true one,
/// and a return is only accepted after the true residual meets the target.
pub fn solve_cg<H: HermitianOperator + ?Sized>(op: &H, rhs: &[C64], opts: &CgOptions) -> Result<CgSolution, CgError> {
    let n = op.dim();
    if rhs.len() != n {
        return Err(CgError::DimensionMismatch { expected: n, found: rhs.len() });
    }
    if opts.tikhonov.is_nan() || opts.tikhonov < 0.0 {
        return Err(CgError::InvalidOptions("tikhonov must be nonnegative"));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(CgError::InvalidOptions("tol must be positive"));
    }
    let shifted = |v: &[C64], out: &mut [C64]| {
        op.apply(v, out);
        if opts.tikhonov > 0.0 {
            axpy(C64::new(opts.tikhonov, 0.0), v, out);
        }
    };
    let true_residual = |x: &[C64], scratch: &mut [C64]| -> Vec<C64> {
        shifted(x, scratch);
        rhs.iter().zip(scratch.iter()).map(|(b, ax)| b - ax).collect()
    };

    let b_norm = norm(rhs);
    let mut x = vec![C64::new(0.0, 0.0); n];
    if b_norm == 0.0 {
        return Ok(CgSolution { solution: x, iterations: 0, residual: 0.0 });
    }
    let target = opts.tol * b_norm;
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    let mut r: Vec<C64> = rhs.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    let mut best = (x.clone(), 1.0);
    let mut ap = vec![C64::new(0.0, 0.0); n];

    for it in 1..=opts.max_iter {
        shifted(&p, &mut ap);
        let pap = dot(&p, &ap).re;
        if pap.is_nan() || pap <= 0.0 {
            break;
        }
        let step = rr / pap;
        axpy(C64::new(step, 0.0), &p, &mut x);
        axpy(C64::new(-step, 0.0), &ap, &mut r);
        let mut rr_new = dot(&r, &r).re;

        let refresh = it % 50 == 0 || rr_new.sqrt() <= target;
        if refresh {
            r = true_residual(&x, &mut scratch);
            rr_new = dot(&r, &r).re;
            let rel = rr_new.sqrt() / b_norm;
            if rel < best.1 {
                best = (x.clone(), rel);
            }
            if rr_new.sqrt() <= target {
                return Ok(CgSolution { solution: x, iterations: it, residual: rel });
            }
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + *pi * beta;
        }
    }
    let r = true_residual(&x, &mut scratch);
    let rel = norm(&r) / b_norm;
    if rel <= opts.tol {
        return Ok(CgSolution { solution: x, iterations: opts.max_iter, residual: rel });
    }
    let (solution, residual) = if rel < best.1 { (x, rel) } else { best };
    Err(CgError::NonConvergence { best: CgSolution { solution, iterations: opts.max_iter, residual } })
}
