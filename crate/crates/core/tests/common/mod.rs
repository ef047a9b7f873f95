#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qtomo::linalg::{CMatrix, CVector};
use qtomo::HermitianOperator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> CVector {
    CVector::from_fn(dim, |_, _| gaussian(rng))
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let m = random_matrix(dim, dim, rng);
    HermitianOperator::new((&m + m.adjoint()).scale(0.5)).unwrap()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
