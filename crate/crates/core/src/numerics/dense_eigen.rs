//! Full eigendecomposition of small dense Hermitian matrices: Householder
//! reduction to a real symmetric tridiagonal matrix followed by the implicit
//! QL algorithm with Wilkinson shifts.

use super::operator::{DenseHermitian, HermitianOperator};
use super::vector::C64;

/// Eigenvalues in ascending order; eigenvectors stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    vectors: Vec<C64>,
    n: usize,
}

impl HermitianEigen {
    /// Unit eigenvector belonging to `values[k]`.
    pub fn vector(&self, k: usize) -> &[C64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }
}

const MAX_QL_ITERATIONS: usize = 60;

pub fn hermitian_eigen(matrix: &DenseHermitian) -> HermitianEigen {
    let n = matrix.dim();
    let mut a: Vec<C64> = matrix.as_slice().to_vec();
    let (diag, offdiag, q) = tridiagonalize(&mut a, n);

    // Rephase so the off-diagonal becomes real and nonnegative: T = D S Dᴴ.
    let mut phases = vec![C64::new(1.0, 0.0); n];
    let mut e = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let g = offdiag[k].norm();
        e[k] = g;
        phases[k + 1] = if g > 0.0 { phases[k] * offdiag[k] / g } else { phases[k] };
    }
    let mut d = diag;
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tridiagonal_ql(&mut d, &mut e, &mut z, n);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    let mut w = vec![C64::new(0.0, 0.0); n];
    for &k in &order {
        for (j, wj) in w.iter_mut().enumerate() {
            *wj = phases[j] * z[j * n + k];
        }
        for i in 0..n {
            let row = &q[i * n..(i + 1) * n];
            vectors.push(row.iter().zip(&w).map(|(qij, wj)| qij * wj).sum());
        }
    }
    HermitianEigen { values, vectors, n }
}

/// Reduces `a` (row-major, Hermitian) in place to tridiagonal form `QᴴAQ`.
/// Returns the real diagonal, the complex subdiagonal `T[k+1][k]` and `Q` (row-major).
fn tridiagonalize(a: &mut [C64], n: usize) -> (Vec<f64>, Vec<C64>, Vec<C64>) {
    let zero = C64::new(0.0, 0.0);
    let mut q = vec![zero; n * n];
    for i in 0..n {
        q[i * n + i] = C64::new(1.0, 0.0);
    }
    let mut offdiag = vec![zero; n.saturating_sub(1)];
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(1) {
        let lo = k + 1;
        let len = n - lo;
        let xnorm = (lo..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        let x0 = a[lo * n + k];
        if len == 1 || xnorm == 0.0 || (lo + 1..n).all(|i| a[i * n + k] == zero) {
            offdiag[k] = x0;
            continue;
        }
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let v = &mut v[..len];
        for (vi, i) in v.iter_mut().zip(lo..n) {
            *vi = a[i * n + k];
        }
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= vnorm);

        // Trailing block B ← H B H with H = I − 2vvᴴ, via q = Bv − (vᴴBv) v.
        let p = &mut p[..len];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &a[(lo + r) * n + lo..(lo + r + 1) * n];
            *pr = row.iter().zip(v.iter()).map(|(b, vi)| b * vi).sum();
        }
        let kappa: f64 = v.iter().zip(p.iter()).map(|(vi, pi)| (vi.conj() * pi).re).sum();
        for (pi, vi) in p.iter_mut().zip(v.iter()) {
            *pi -= vi * kappa;
        }
        for r in 0..len {
            let (vr, pr) = (v[r], p[r]);
            let row = &mut a[(lo + r) * n + lo..(lo + r + 1) * n];
            for (c, b) in row.iter_mut().enumerate() {
                *b -= (vr * p[c].conj() + pr * v[c].conj()) * 2.0;
            }
        }
        for i in lo..n {
            a[i * n + k] = zero;
            a[k * n + i] = zero;
        }
        a[lo * n + k] = alpha;
        a[k * n + lo] = alpha.conj();
        offdiag[k] = alpha;

        // Q ← Q H on columns lo..n.
        for i in 0..n {
            let row = &mut q[i * n + lo..(i + 1) * n];
            let s: C64 = row.iter().zip(v.iter()).map(|(qi, vi)| qi * vi).sum::<C64>() * 2.0;
            for (qi, vi) in row.iter_mut().zip(v.iter()) {
                *qi -= s * vi.conj();
            }
        }
    }
    let diag = (0..n).map(|i| a[i * n + i].re).collect();
    (diag, offdiag, q)
}

/// Implicit QL on the symmetric tridiagonal `(d, e)`, `e[i]` coupling `i` and `i + 1`.
/// Rotations are accumulated into the row-major `z`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) {
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l || iterations >= MAX_QL_ITERATIONS {
                break;
            }
            iterations += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dot, norm};

    #[test]
    fn two_by_two_real() {
        let h = DenseHermitian::from_fn(2, |i, j| C64::new(if i == j { 2.0 } else { 1.0 }, 0.0));
        let e = hermitian_eigen(&h);
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let v = e.vector(1);
        assert!((v[0].norm() - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn diagonal_and_one_by_one() {
        let e = hermitian_eigen(&DenseHermitian::from_real_diagonal(&[3.0, -1.0, 2.0]));
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
        assert!((e.vector(0)[1].norm() - 1.0).abs() < 1e-15);
        let e = hermitian_eigen(&DenseHermitian::from_real_diagonal(&[4.0]));
        assert_eq!(e.values, vec![4.0]);
    }

    fn check_decomposition(h: &DenseHermitian) {
        let n = h.dim();
        let e = hermitian_eigen(h);
        let scale = h.frobenius_norm().max(1.0);
        for k in 0..n {
            let v = e.vector(k);
            assert!((norm(v) - 1.0).abs() < 1e-12);
            let hv = h.apply_vec(v);
            let r: f64 = hv.iter().zip(v).map(|(a, b)| (a - b * e.values[k]).norm_sqr()).sum::<f64>().sqrt();
            assert!(r < 1e-12 * scale, "residual {r} for eigenpair {k}");
            for j in 0..k {
                assert!(dot(e.vector(j), v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn complex_eigenpairs_satisfy_definition() {
        let h = DenseHermitian::from_fn(4, |i, j| {
            C64::new((i + 2 * j) as f64 * 0.3 - 1.0, if i == j { 0.0 } else { (i as f64) - 0.7 * j as f64 })
        });
        check_decomposition(&h);
    }

    #[test]
    fn larger_complex_matrix() {
        let h = DenseHermitian::from_fn(40, |i, j| {
            let x = ((i * 31 + j * 17) % 23) as f64 / 7.0 - 1.5;
            let y = ((i * 13 + j * 29) % 19) as f64 / 5.0 - 1.8;
            C64::new(x, y)
        });
        check_decomposition(&h);
    }

    #[test]
    fn repeated_eigenvalues() {
        check_decomposition(&DenseHermitian::identity(5));
        let h = DenseHermitian::from_fn(6, |i, j| C64::new(if (i < 3) == (j < 3) { 1.0 } else { 0.0 }, 0.0));
        check_decomposition(&h);
    }
}
