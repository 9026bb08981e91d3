//! Normal forms of complex antisymmetric and symmetric matrices under `w ↦ U·w·Uᵀ`.

use num_complex::Complex;

use super::eigen::eigh;
use super::matrix::CMatrix;
use super::vector;
use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// `w = U·J(z)·Uᵀ` with `J` made of 2×2 blocks `[[0, z_k], [−z_k, 0]]` and trailing zeros.
#[derive(Clone, Debug)]
pub struct BlockDiagonalForm<T: Real = f64> {
    pub unitary: CMatrix<T>,
    /// Block values, descending; length `⌊N/2⌋`.
    pub z: Vec<T>,
}

impl<T: Real> BlockDiagonalForm<T> {
    pub fn block_matrix(&self) -> CMatrix<T> {
        let n = self.unitary.rows();
        let mut j = CMatrix::zeros(n, n);
        for (k, &zk) in self.z.iter().enumerate() {
            j[(2 * k, 2 * k + 1)] = c(zk, T::zero());
            j[(2 * k + 1, 2 * k)] = c(-zk, T::zero());
        }
        j
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.unitary.matmul(&self.block_matrix()).matmul(&self.unitary.transpose())
    }
}

/// `v = U·diag(d)·Uᵀ` (Takagi factorisation).
#[derive(Clone, Debug)]
pub struct TakagiForm<T: Real = f64> {
    pub unitary: CMatrix<T>,
    /// Nonnegative, descending.
    pub d: Vec<T>,
}

impl<T: Real> TakagiForm<T> {
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.unitary.rows();
        let ud = CMatrix::from_fn(n, n, |i, j| self.unitary[(i, j)] * self.d[j]);
        ud.matmul(&self.unitary.transpose())
    }
}

pub fn antisymmetry_defect<T: Real>(w: &CMatrix<T>) -> T {
    let mut d = T::zero();
    for i in 0..w.rows() {
        for j in i..w.cols() {
            d = d.max((w[(i, j)] + w[(j, i)]).norm());
        }
    }
    d
}

pub fn symmetry_defect<T: Real>(v: &CMatrix<T>) -> T {
    let mut d = T::zero();
    for i in 0..v.rows() {
        for j in i..v.cols() {
            d = d.max((v[(i, j)] - v[(j, i)]).norm());
        }
    }
    d
}

/// Youla normal form of an antisymmetric complex matrix.
///
/// Pairs are peeled off one at a time: the leading eigenvector `u₁` of `w·w†`
/// (eigenvalue `z²`) is matched with `u₂ = −w·ū₁/z`, and the block is deflated.
pub fn antisymmetric_block_diagonalize<T: Real>(w: &CMatrix<T>, tol: T) -> Result<BlockDiagonalForm<T>> {
    if !w.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", w.rows(), w.cols())));
    }
    let defect = antisymmetry_defect(w);
    if defect > tol {
        return Err(Error::NotAntisymmetric { defect: defect.to_f64_lossy() });
    }
    let n = w.rows();
    let half = T::lit(0.5);
    let w0 = CMatrix::from_fn(n, n, |i, j| (w[(i, j)] - w[(j, i)]) * half);
    let scale = w0.max_abs();
    let cut = scale * T::epsilon().sqrt() * T::lit(1e-3);
    let mut cur = w0.clone();
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        let h = cur.matmul(&cur.adjoint());
        let e = eigh(&h);
        let z2 = e.max();
        if z2 <= T::zero() || z2.sqrt() <= cut {
            break;
        }
        let z = z2.sqrt();
        let Some(u1) = vector::orthogonalize_against(&e.vector(n - 1), &cols) else { break };
        let wu = cur.mul_vec(&vector::conj(&u1));
        let u2_raw: Vec<Complex<T>> = wu.iter().map(|&x| -x / z).collect();
        let mut with_u1 = cols.clone();
        with_u1.push(u1.clone());
        let Some(u2) = vector::orthogonalize_against(&u2_raw, &with_u1) else { break };
        let block = &CMatrix::outer(&u1, &vector::conj(&u2)) - &CMatrix::outer(&u2, &vector::conj(&u1));
        cur = &cur - &block.scale(z);
        cols.push(u1);
        cols.push(u2);
    }
    let m = cols.len() / 2;
    let basis = vector::complete_basis(&cols, n);
    let unitary = CMatrix::from_columns(n, &basis);
    // exact block values from the original matrix
    let mut z: Vec<T> = (0..m)
        .map(|k| {
            let a = &basis[2 * k];
            let b = vector::conj(&basis[2 * k + 1]);
            vector::inner(a, &w0.mul_vec(&b)).re.max(T::zero())
        })
        .collect();
    z.resize(n / 2, T::zero());
    Ok(BlockDiagonalForm { unitary, z })
}

/// Takagi factorisation of a complex symmetric matrix.
pub fn takagi<T: Real>(v: &CMatrix<T>, tol: T) -> Result<TakagiForm<T>> {
    if !v.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", v.rows(), v.cols())));
    }
    let defect = symmetry_defect(v);
    if defect > tol {
        return Err(Error::NotSymmetric { defect: defect.to_f64_lossy() });
    }
    let n = v.rows();
    let half = T::lit(0.5);
    let v0 = CMatrix::from_fn(n, n, |i, j| (v[(i, j)] + v[(j, i)]) * half);
    let cut = v0.max_abs() * T::epsilon().sqrt() * T::lit(1e-3);
    let mut cur = v0.clone();
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    for _ in 0..n {
        let e = eigh(&cur.matmul(&cur.adjoint()));
        let d2 = e.max();
        if d2 <= T::zero() || d2.sqrt() <= cut {
            break;
        }
        let d = d2.sqrt();
        let Some(u) = vector::orthogonalize_against(&e.vector(n - 1), &cols) else { break };
        let vu = cur.mul_vec(&vector::conj(&u));
        let y: Vec<Complex<T>> = vu.iter().zip(&u).map(|(&a, &b)| a + b * d).collect();
        let cand = if vector::norm(&y) > T::lit(1e-3) * d {
            y
        } else {
            u.iter().map(|&x| x * c(T::zero(), T::one())).collect()
        };
        let Some(uk) = vector::orthogonalize_against(&cand, &cols) else { break };
        let term = CMatrix::outer(&uk, &vector::conj(&uk)).scale(d);
        cur = &cur - &term;
        cols.push(uk);
    }
    let basis = vector::complete_basis(&cols, n);
    let unitary = CMatrix::from_columns(n, &basis);
    let mut d: Vec<T> = cols
        .iter()
        .map(|u| vector::inner(u, &v0.mul_vec(&vector::conj(u))).re.max(T::zero()))
        .collect();
    d.resize(n, T::zero());
    Ok(TakagiForm { unitary, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::czero;

    #[test]
    fn block_form_is_recovered() {
        let mut w = CMatrix::<f64>::zeros(4, 4);
        w[(0, 1)] = c(0.4, 0.0);
        w[(1, 0)] = c(-0.4, 0.0);
        w[(2, 3)] = c(0.2, 0.0);
        w[(3, 2)] = c(-0.2, 0.0);
        let f = antisymmetric_block_diagonalize(&w, 1e-12).unwrap();
        assert!((f.z[0] - 0.4).abs() < 1e-14 && (f.z[1] - 0.2).abs() < 1e-14);
        assert!((&f.reconstruct() - &w).max_abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_gives_zero_blocks() {
        let f = antisymmetric_block_diagonalize(&CMatrix::<f64>::zeros(5, 5), 1e-12).unwrap();
        assert_eq!(f.z, vec![0.0, 0.0]);
        let utu = f.unitary.adjoint().matmul(&f.unitary);
        assert!((&utu - &CMatrix::identity(5)).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_symmetric_input() {
        let w = CMatrix::<f64>::identity(2);
        assert!(matches!(antisymmetric_block_diagonalize(&w, 1e-10), Err(Error::NotAntisymmetric { .. })));
        assert!(matches!(takagi(&CMatrix::from_vec(2, 2, vec![czero(), c(1.0, 0.0), c(-1.0, 0.0), czero()]), 1e-10), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn takagi_of_diagonal_phase_matrix() {
        let v = CMatrix::<f64>::from_vec(2, 2, vec![c(0.0, 0.5), czero(), czero(), c(-0.3, 0.0)]);
        let t = takagi(&v, 1e-12).unwrap();
        assert!((t.d[0] - 0.5).abs() < 1e-14 && (t.d[1] - 0.3).abs() < 1e-14);
        assert!((&t.reconstruct() - &v).max_abs() < 1e-14);
    }
}
