use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VectorError {
    #[error("vector must have at least one entry")]
    Empty,
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
}

/// A nonempty vector of finite complex numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self, VectorError> {
        if entries.is_empty() {
            return Err(VectorError::Empty);
        }
        if let Some(index) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(VectorError::NonFinite { index });
        }
        Ok(Self(entries))
    }

    pub fn from_real(values: &[f64]) -> Result<Self, VectorError> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn basis(n: usize, k: usize) -> Self {
        assert!(k < n, "basis index {k} out of range for length {n}");
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[k] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    /// `⟨self, other⟩ = selfᴴ other`.
    pub fn dot(&self, other: &ComplexVector) -> C64 {
        dot(&self.0, &other.0)
    }

    pub fn normalized(&self) -> Option<Self> {
        let mut v = self.0.clone();
        (normalize(&mut v) > 0.0).then_some(Self(v))
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self(self.0.iter().map(|z| z * c).collect())
    }
}

impl TryFrom<Vec<C64>> for ComplexVector {
    type Error = VectorError;

    fn try_from(v: Vec<C64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<ComplexVector> for Vec<C64> {
    fn from(v: ComplexVector) -> Self {
        v.0
    }
}

impl AsRef<[C64]> for ComplexVector {
    fn as_ref(&self) -> &[C64] {
        &self.0
    }
}

#[inline]
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `y ← y + c·x`
#[inline]
pub fn axpy(c: C64, x: &[C64], y: &mut [C64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

/// Scales `v` to unit norm in place and returns the original norm.
/// A zero vector is left untouched.
pub fn normalize(v: &mut [C64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        let inv = 1.0 / n;
        v.iter_mut().for_each(|z| *z *= inv);
    }
    n
}

/// Rotates the global phase so the largest-magnitude entry (first one on ties)
/// is real and nonnegative.
pub fn canonicalize_phase(v: &mut [C64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm_sqr();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs <= 0.0 {
        return;
    }
    let pivot = v[best];
    let rot = pivot.conj() / pivot.norm();
    v.iter_mut().for_each(|z| *z *= rot);
    v[best] = C64::new(v[best].norm(), 0.0);
}

/// Draws a vector uniformly from the unit sphere of `ℂ^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> =
            (0..n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        if normalize(&mut v) > 0.0 {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        let err = ComplexVector::new(vec![C64::new(1.0, 0.0), C64::new(f64::NAN, 0.0)]);
        assert_eq!(err, Err(VectorError::NonFinite { index: 1 }));
        assert_eq!(ComplexVector::new(vec![]), Err(VectorError::Empty));
    }

    #[test]
    fn dot_is_conjugate_linear_in_first_argument() {
        let a = [C64::new(0.0, 1.0)];
        let b = [C64::new(1.0, 0.0)];
        assert_eq!(dot(&a, &b), C64::new(0.0, -1.0));
    }

    #[test]
    fn canonical_phase_makes_pivot_real() {
        let mut v = vec![C64::new(0.1, 0.0), C64::new(0.0, -2.0), C64::new(1.0, 1.0)];
        canonicalize_phase(&mut v);
        assert!(v[1].im.abs() < 1e-15 && v[1].re > 0.0);
        assert!((norm(&v) - (0.01f64 + 4.0 + 2.0).sqrt()).abs() < 1e-14);
    }
}
