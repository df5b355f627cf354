use super::vector::{norm, C64};

/// A Hermitian linear map on `ℂ^N`.
///
/// Implementations are immutable once built and can be shared between threads.
pub trait HermitianOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// `out ← H v`. Both slices have length [`dim`](Self::dim).
    fn apply(&self, v: &[C64], out: &mut [C64]);

    /// An upper bound `B` on the spectral radius: `‖Hv‖ ≤ B‖v‖`.
    fn spectral_bound(&self) -> f64;

    fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply(v, &mut out);
        out
    }
}

impl<T: HermitianOperator + ?Sized> HermitianOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, v: &[C64], out: &mut [C64]) {
        (**self).apply(v, out)
    }
    fn spectral_bound(&self) -> f64 {
        (**self).spectral_bound()
    }
}

/// Dense `N×N` Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    n: usize,
    data: Vec<C64>,
    bound: f64,
}

impl DenseHermitian {
    /// Builds from row-major entries. Only the upper triangle is read; the
    /// lower triangle is mirrored from it and diagonal imaginary parts dropped.
    pub fn from_upper(n: usize, mut data: Vec<C64>) -> Self {
        assert_eq!(data.len(), n * n, "expected {} entries, got {}", n * n, data.len());
        for i in 0..n {
            data[i * n + i].im = 0.0;
            for j in i + 1..n {
                data[j * n + i] = data[i * n + j].conj();
            }
        }
        let bound = frobenius(&data);
        Self { n, data, bound }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                data[i * n + j] = f(i, j);
            }
        }
        Self::from_upper(n, data)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; n])
    }

    /// Replaces the default Frobenius-norm bound with a tighter valid one.
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }

    pub fn shifted(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i].re += sigma;
        }
        out.bound = self.bound + sigma.abs();
        out
    }
}

fn frobenius(data: &[C64]) -> f64 {
    norm(data)
}

impl HermitianOperator for DenseHermitian {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, v: &[C64], out: &mut [C64]) {
        assert_eq!(v.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    fn spectral_bound(&self) -> f64 {
        self.bound
    }
}

/// `c·I` on `ℂ^n`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledIdentity {
    pub n: usize,
    pub scale: f64,
}

impl HermitianOperator for ScaledIdentity {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, v: &[C64], out: &mut [C64]) {
        for (o, x) in out.iter_mut().zip(v) {
            *o = x * self.scale;
        }
    }
    fn spectral_bound(&self) -> f64 {
        self.scale.abs()
    }
}
