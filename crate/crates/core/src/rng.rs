//! Seeded random generators for vectors, unitaries and states.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vector, CMatrix};
use crate::scalar::{c, Real};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for restart `index` of a search seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

pub fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(T::lit(re), T::lit(im))
}

/// Haar-random unit vector.
pub fn unit_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex<T>> {
    loop {
        let v: Vec<Complex<T>> = (0..dim).map(|_| complex_normal(rng)).collect();
        if let Some(u) = vector::normalized(&v) {
            return u;
        }
    }
}

pub fn ginibre<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-random unitary (Gram-Schmidt of a Ginibre matrix).
pub fn unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<T> {
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let v: Vec<Complex<T>> = (0..dim).map(|_| complex_normal(rng)).collect();
        if let Some(w) = vector::orthogonalize_against(&v, &cols) {
            cols.push(w);
        }
    }
    CMatrix::from_columns(dim, &cols)
}

/// Random Hermitian matrix `(G + G†)/2` with Ginibre `G`.
pub fn hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<T> {
    ginibre::<T, R>(rng, dim, dim).hermitian_part()
}
