//! Measurement ensembles and the lifted forward model.
//!
//! A measurement `y_m = |⟨a_m, z⟩|²` is linear in the lifted variable `zzᴴ`.
//! [`forward_lifted`] evaluates it, [`synthesize`] builds the weighted adjoint
//! `Y(t) = (1/M) Σ t_m a_m a_mᴴ`, [`gram_intensity`] forms `|AAᴴ|²` and
//! [`rip_probe`] samples the restricted-isometry ratio of the lifted map.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{dot, random_unit_vector, seeded_rng, DenseHermitian, HermitianOperator, Stream, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ensemble must have at least one row and one column")]
    EmptyEnsemble,
    #[error("measurement vector {0} has zero norm")]
    ZeroNormRow(usize),
    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("intensity {index} is {value}; intensities must be finite and nonnegative")]
    InvalidIntensity { index: usize, value: f64 },
    #[error("weight {index} is {value}; weights must be finite")]
    NonFiniteWeight { index: usize, value: f64 },
    #[error("number of probes must be at least 1")]
    NoProbes,
}

/// The `M×N` sampling matrix, stored row-major; row `m` is `a_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble {
    m: usize,
    n: usize,
    data: Vec<C64>,
    row_norms_sq: Vec<f64>,
    total_norm_sq: f64,
}

impl MeasurementEnsemble {
    pub fn new(m: usize, n: usize, data: Vec<C64>) -> Result<Self, ModelError> {
        if m == 0 || n == 0 {
            return Err(ModelError::EmptyEnsemble);
        }
        if data.len() != m * n {
            return Err(ModelError::DimensionMismatch { expected: m * n, found: data.len() });
        }
        if let Some(idx) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ModelError::NonFiniteEntry { row: idx / n, col: idx % n });
        }
        let row_norms_sq: Vec<f64> = data.chunks_exact(n).map(|row| row.iter().map(|z| z.norm_sqr()).sum()).collect();
        if let Some(idx) = row_norms_sq.iter().position(|&r| r <= 0.0) {
            return Err(ModelError::ZeroNormRow(idx));
        }
        let total_norm_sq = row_norms_sq.iter().sum();
        Ok(Self { m, n, data, row_norms_sq, total_norm_sq })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, ModelError> {
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(ModelError::DimensionMismatch { expected: n, found: bad.len() });
        }
        Self::new(rows.len(), n, rows.concat())
    }

    /// Rows `scale·e_1, …, scale·e_n`.
    pub fn scaled_identity(n: usize, scale: f64) -> Result<Self, ModelError> {
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = C64::new(scale, 0.0);
        }
        Self::new(n, n, data)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn row(&self, m: usize) -> &[C64] {
        &self.data[m * self.n..(m + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks_exact(self.n)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row_norms_sq(&self) -> &[f64] {
        &self.row_norms_sq
    }

    pub fn total_norm_sq(&self) -> f64 {
        self.total_norm_sq
    }

    /// `out_m = ⟨a_m, z⟩ = a_mᴴz`.
    pub fn apply_rows(&self, z: &[C64], out: &mut [C64]) {
        for (o, row) in out.iter_mut().zip(self.rows()) {
            *o = dot(row, z);
        }
    }

    fn check_len(&self, expected: usize, found: usize) -> Result<(), ModelError> {
        if expected == found {
            Ok(())
        } else {
            Err(ModelError::DimensionMismatch { expected, found })
        }
    }
}

/// Nonnegative phaseless measurements with their cached ℓ1 norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Intensities {
    values: Vec<f64>,
    l1_norm: f64,
}

impl Intensities {
    pub fn new(values: Vec<f64>) -> Result<Self, ModelError> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(ModelError::InvalidIntensity { index, value });
        }
        let l1_norm = values.iter().sum();
        Ok(Self { values, l1_norm })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// Sample mean `λ₀ = ‖y‖₁ / M`.
    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.l1_norm / self.values.len() as f64
        }
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for Intensities {
    type Error = ModelError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

impl From<Intensities> for Vec<f64> {
    fn from(y: Intensities) -> Self {
        y.values
    }
}

/// Real synthesis weights `t = T(y)`; entries may be negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProcessedWeights {
    values: Vec<f64>,
}

impl ProcessedWeights {
    pub fn new(values: Vec<f64>) -> Result<Self, ModelError> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(ModelError::NonFiniteWeight { index, value });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for ProcessedWeights {
    type Error = ModelError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

impl From<ProcessedWeights> for Vec<f64> {
    fn from(t: ProcessedWeights) -> Self {
        t.values
    }
}

/// `y_m = |⟨a_m, z⟩|²`.
pub fn forward_lifted(ens: &MeasurementEnsemble, z: &[C64]) -> Result<Intensities, ModelError> {
    ens.check_len(ens.n, z.len())?;
    let values = ens.rows().map(|row| dot(row, z).norm_sqr()).collect();
    Intensities::new(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Realization {
    /// Dense for `N ≤ 512`, matrix-free otherwise.
    #[default]
    Auto,
    Dense,
    MatrixFree,
}

pub const AUTO_DENSE_MAX_N: usize = 512;

impl Realization {
    pub fn resolve(self, n: usize) -> Self {
        match self {
            Realization::Auto if n <= AUTO_DENSE_MAX_N => Realization::Dense,
            Realization::Auto => Realization::MatrixFree,
            other => other,
        }
    }
}

/// `v ↦ (1/M) Aᴴ(t ⊙ Av)` without forming the `N×N` matrix.
#[derive(Debug, Clone)]
pub struct MatrixFreeOperator<'a> {
    ens: &'a MeasurementEnsemble,
    scaled_weights: Vec<f64>,
    bound: f64,
}

impl HermitianOperator for MatrixFreeOperator<'_> {
    fn dim(&self) -> usize {
        self.ens.n
    }

    fn apply(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        for (row, &w) in self.ens.rows().zip(&self.scaled_weights) {
            if w == 0.0 {
                continue;
            }
            let c = dot(row, v) * w;
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * c;
            }
        }
    }

    fn spectral_bound(&self) -> f64 {
        self.bound
    }
}

/// The weighted spectral matrix `Y(t)` in one of its two realizations.
#[derive(Debug, Clone)]
pub enum SpectralOperator<'a> {
    Dense(DenseHermitian),
    MatrixFree(MatrixFreeOperator<'a>),
}

impl SpectralOperator<'_> {
    pub fn as_dense(&self) -> Option<&DenseHermitian> {
        match self {
            SpectralOperator::Dense(d) => Some(d),
            SpectralOperator::MatrixFree(_) => None,
        }
    }
}

impl HermitianOperator for SpectralOperator<'_> {
    fn dim(&self) -> usize {
        match self {
            SpectralOperator::Dense(d) => d.dim(),
            SpectralOperator::MatrixFree(f) => f.dim(),
        }
    }

    fn apply(&self, v: &[C64], out: &mut [C64]) {
        match self {
            SpectralOperator::Dense(d) => d.apply(v, out),
            SpectralOperator::MatrixFree(f) => f.apply(v, out),
        }
    }

    fn spectral_bound(&self) -> f64 {
        match self {
            SpectralOperator::Dense(d) => d.spectral_bound(),
            SpectralOperator::MatrixFree(f) => f.spectral_bound(),
        }
    }
}

/// `Y(t) = (1/M) Σ t_m a_m a_mᴴ` with spectral bound `(1/M) Σ |t_m| ‖a_m‖²`.
pub fn synthesize<'a>(
    ens: &'a MeasurementEnsemble,
    t: &ProcessedWeights,
    realization: Realization,
) -> Result<SpectralOperator<'a>, ModelError> {
    ens.check_len(ens.m, t.len())?;
    let inv_m = 1.0 / ens.m as f64;
    let scaled_weights: Vec<f64> = t.values().iter().map(|w| w * inv_m).collect();
    let bound = scaled_weights.iter().zip(&ens.row_norms_sq).map(|(w, r)| w.abs() * r).sum();
    Ok(match realization.resolve(ens.n) {
        Realization::MatrixFree => SpectralOperator::MatrixFree(MatrixFreeOperator { ens, scaled_weights, bound }),
        _ => {
            let n = ens.n;
            let mut upper = vec![C64::new(0.0, 0.0); n * n];
            for (row, &w) in ens.rows().zip(&scaled_weights) {
                if w == 0.0 {
                    continue;
                }
                for i in 0..n {
                    let ai = row[i] * w;
                    let out = &mut upper[i * n + i..(i + 1) * n];
                    for (o, aj) in out.iter_mut().zip(&row[i..]) {
                        *o += ai * aj.conj();
                    }
                }
            }
            SpectralOperator::Dense(DenseHermitian::from_upper(n, upper).with_bound(bound))
        }
    })
}

/// The `M×M` matrix `G_ij = |⟨a_i, a_j⟩|²`.
pub fn gram_intensity(ens: &MeasurementEnsemble) -> DenseHermitian {
    let m = ens.m;
    let mut upper = vec![C64::new(0.0, 0.0); m * m];
    for i in 0..m {
        let ai = ens.row(i);
        upper[i * m + i] = C64::new(ens.row_norms_sq[i] * ens.row_norms_sq[i], 0.0);
        for j in i + 1..m {
            upper[i * m + j] = C64::new(dot(ai, ens.row(j)).norm_sqr(), 0.0);
        }
    }
    DenseHermitian::from_upper(m, upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipProbe {
    pub ratio_min: f64,
    pub ratio_max: f64,
}

impl RipProbe {
    /// `δ = max(|r_min − 2|, |r_max − 2|)`, the isometry constant for Gaussian ensembles.
    pub fn delta(&self) -> f64 {
        (self.ratio_min - 2.0).abs().max((self.ratio_max - 2.0).abs())
    }
}

/// Samples `r(z) = (1/M) Σ y_m(z)²` at uniformly random unit `z`.
pub fn rip_probe(ens: &MeasurementEnsemble, num_probes: usize, seed: u64) -> Result<RipProbe, ModelError> {
    if num_probes == 0 {
        return Err(ModelError::NoProbes);
    }
    let mut rng = seeded_rng(seed, Stream::Probe);
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    for _ in 0..num_probes {
        let z = random_unit_vector(&mut rng, ens.n);
        let r = lifted_ratio(ens, &z);
        ratio_min = ratio_min.min(r);
        ratio_max = ratio_max.max(r);
    }
    Ok(RipProbe { ratio_min, ratio_max })
}

/// `(1/M) ‖𝒜(zzᴴ)‖² / ‖zzᴴ‖_F²`.
pub fn lifted_ratio(ens: &MeasurementEnsemble, z: &[C64]) -> f64 {
    let z_sq: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let energy: f64 = ens.rows().map(|row| dot(row, z).norm_sqr().powi(2)).sum();
    energy / (ens.m as f64 * z_sq * z_sq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn forward_on_basis_rows() {
        let ens = MeasurementEnsemble::scaled_identity(2, 1.0).unwrap();
        let y = forward_lifted(&ens, &[c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert_eq!(y.values(), &[9.0, 16.0]);
        assert_eq!(y.l1_norm(), 25.0);
    }

    #[test]
    fn forward_orthogonal_row_gives_zero() {
        let ens = MeasurementEnsemble::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let y = forward_lifted(&ens, &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(y.values(), &[0.0]);
    }

    #[test]
    fn forward_uses_conjugated_row() {
        let ens = MeasurementEnsemble::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)]]).unwrap();
        let y = forward_lifted(&ens, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((y.values()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn forward_rejects_wrong_length() {
        let ens = MeasurementEnsemble::scaled_identity(2, 1.0).unwrap();
        assert_eq!(forward_lifted(&ens, &[c(1.0, 0.0)]), Err(ModelError::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn zero_row_is_rejected() {
        let rows = vec![vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]];
        assert_eq!(MeasurementEnsemble::from_rows(&rows), Err(ModelError::ZeroNormRow(1)));
    }

    #[test]
    fn single_row_outer_product() {
        let ens = MeasurementEnsemble::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let t = ProcessedWeights::new(vec![2.0]).unwrap();
        for realization in [Realization::Dense, Realization::MatrixFree] {
            let y = synthesize(&ens, &t, realization).unwrap();
            let col0 = y.apply_vec(&[c(1.0, 0.0), c(0.0, 0.0)]);
            let col1 = y.apply_vec(&[c(0.0, 0.0), c(1.0, 0.0)]);
            for v in col0.iter().chain(&col1) {
                assert!((v - c(2.0, 0.0)).norm() < 1e-15);
            }
            assert_eq!(y.spectral_bound(), 4.0);
        }
    }

    #[test]
    fn basis_rows_give_scaled_diagonal() {
        let ens = MeasurementEnsemble::scaled_identity(3, 1.0).unwrap();
        let t = ProcessedWeights::new(vec![3.0, -6.0, 9.0]).unwrap();
        let y = synthesize(&ens, &t, Realization::Dense).unwrap();
        let d = y.as_dense().unwrap();
        assert_eq!(d.get(0, 0), c(1.0, 0.0));
        assert_eq!(d.get(1, 1), c(-2.0, 0.0));
        assert_eq!(d.get(2, 2), c(3.0, 0.0));
        assert_eq!(d.get(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn gram_of_duplicate_rows() {
        let ens = MeasurementEnsemble::from_rows(&[vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap();
        let g = gram_intensity(&ens);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.get(i, j), c(1.0, 0.0));
            }
        }
    }

    #[test]
    fn rip_ratio_on_scaled_basis() {
        let n = 5;
        let ens = MeasurementEnsemble::scaled_identity(n, (n as f64).sqrt()).unwrap();
        let mut e1 = vec![c(0.0, 0.0); n];
        e1[0] = c(1.0, 0.0);
        assert!((lifted_ratio(&ens, &e1) - n as f64).abs() < 1e-12);
        assert_eq!(rip_probe(&ens, 0, 1), Err(ModelError::NoProbes));
        assert_eq!(rip_probe(&ens, 7, 3), rip_probe(&ens, 7, 3));
    }

    #[test]
    fn negative_intensities_rejected() {
        assert!(matches!(Intensities::new(vec![1.0, -0.5]), Err(ModelError::InvalidIntensity { index: 1, .. })));
        assert!(matches!(ProcessedWeights::new(vec![f64::NAN]), Err(ModelError::NonFiniteWeight { index: 0, .. })));
    }
}
