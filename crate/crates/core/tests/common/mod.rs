#![allow(dead_code)]

use bregspec::numerics::{DenseHermitian, C64};
use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn gaussian_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| gaussian_c64(rng)).collect()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> DenseHermitian {
    let raw = random_vector(rng, n * n);
    DenseHermitian::from_fn(n, |i, j| (raw[i * n + j] + raw[j * n + i].conj()) * 0.5)
}

pub fn to_nalgebra(h: &DenseHermitian) -> DMatrix<Complex<f64>> {
    let n = (h.as_slice().len() as f64).sqrt() as usize;
    DMatrix::from_fn(n, n, |i, j| h.get(i, j))
}

/// Dense reference eigenpairs `(ascending values, column eigenvectors)`.
pub fn dense_eigen(h: &DenseHermitian) -> (Vec<f64>, Vec<Vec<C64>>) {
    let eig = to_nalgebra(h).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order.iter().map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect();
    (values, vectors)
}

pub fn overlap(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm()
}
