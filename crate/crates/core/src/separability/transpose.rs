use crate::linalg::CMatrix;
use crate::scalar::Real;
use crate::state::{DensityMatrix, Side};

/// Partial transpose of an operator on `C^m ⊗ C^n`.
///
/// Side A: `⟨i,k|X^{T_A}|j,l⟩ = ⟨j,k|X|i,l⟩`; side B: `⟨i,k|X^{T_B}|j,l⟩ = ⟨i,l|X|j,k⟩`.
pub fn partial_transpose_matrix<T: Real>(x: &CMatrix<T>, m: usize, n: usize, side: Side) -> CMatrix<T> {
    assert_eq!(x.rows(), m * n, "operator size does not match dims");
    CMatrix::from_fn(m * n, m * n, |r, c| {
        let (i, k) = (r / n, r % n);
        let (j, l) = (c / n, c % n);
        match side {
            Side::A => x[(j * n + k, i * n + l)],
            Side::B => x[(i * n + l, j * n + k)],
        }
    })
}

/// `ρ^{T_A}` or `ρ^{T_B}`.
pub fn partial_transpose<T: Real>(rho: &DensityMatrix<T>, side: Side) -> CMatrix<T> {
    rho.partial_transpose(side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn involution_and_full_transpose() {
        let mut r = rng::seeded(1);
        let x = rng::ginibre::<f64, _>(&mut r, 6, 6);
        let a = partial_transpose_matrix(&x, 2, 3, Side::A);
        assert_eq!(partial_transpose_matrix(&a, 2, 3, Side::A), x);
        let ab = partial_transpose_matrix(&a, 2, 3, Side::B);
        assert!((&ab - &x.transpose()).max_abs() < 1e-15);
    }

    #[test]
    fn product_operator_transposes_alice_factor() {
        let mut r = rng::seeded(2);
        let a = rng::ginibre::<f64, _>(&mut r, 2, 2);
        let b = rng::ginibre::<f64, _>(&mut r, 3, 3);
        let pt = partial_transpose_matrix(&a.kron(&b), 2, 3, Side::A);
        assert!((&pt - &a.transpose().kron(&b)).max_abs() < 1e-15);
    }
}
