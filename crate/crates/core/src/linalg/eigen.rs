//! Cyclic Jacobi eigensolver for Hermitian matrices and the spectral helpers built on it.

use num_complex::Complex;

use super::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

/// Default rank tolerance relative to the largest eigenvalue magnitude.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Eigen-decomposition `A = V·diag(values)·V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real = f64> {
    pub values: Vec<T>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column(k)
    }

    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    /// Largest eigenvalue magnitude, the scale for relative tolerances.
    pub fn spectral_radius(&self) -> T {
        self.min().abs().max(self.max().abs())
    }

    /// Number of eigenvalues above `rank_tol` times the spectral radius.
    pub fn rank(&self, rank_tol: T) -> usize {
        let cut = rank_tol * self.spectral_radius();
        self.values.iter().filter(|&&v| v > cut).count()
    }

    /// Eigenvectors whose eigenvalue magnitude does not exceed the rank cut.
    pub fn kernel(&self, rank_tol: T) -> Vec<Vec<Complex<T>>> {
        let cut = rank_tol * self.spectral_radius();
        (0..self.values.len()).filter(|&k| self.values[k].abs() <= cut).map(|k| self.vector(k)).collect()
    }

    /// Eigenvectors spanning the support (eigenvalues above the rank cut).
    pub fn range(&self, rank_tol: T) -> Vec<Vec<Complex<T>>> {
        let cut = rank_tol * self.spectral_radius();
        (0..self.values.len()).filter(|&k| self.values[k] > cut).map(|k| self.vector(k)).collect()
    }

    /// `V f(Λ) V†`.
    pub fn reassemble(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == T::zero() {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Moore-Penrose pseudo-inverse restricted to eigenvalues above the rank cut.
    pub fn pseudo_inverse(&self, rank_tol: T) -> CMatrix<T> {
        let cut = rank_tol * self.spectral_radius();
        self.reassemble(|l| if l.abs() > cut { T::one() / l } else { T::zero() })
    }

    /// Projector onto the kernel.
    pub fn kernel_projector(&self, rank_tol: T) -> CMatrix<T> {
        let cut = rank_tol * self.spectral_radius();
        self.reassemble(|l| if l.abs() <= cut { T::one() } else { T::zero() })
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eigensystem<T: Real>(a: &CMatrix<T>, tol: T) -> Result<HermitianEigen<T>> {
    if !a.is_square() {
        return Err(Error::Shape(format!("eigensystem of a {}x{} matrix", a.rows(), a.cols())));
    }
    let defect = a.hermiticity_defect();
    if defect > tol {
        return Err(Error::NonHermitian { defect: defect.to_f64_lossy(), tol: tol.to_f64_lossy() });
    }
    Ok(jacobi(a.hermitian_part()))
}

fn jacobi<T: Real>(mut a: CMatrix<T>) -> HermitianEigen<T> {
    let n = a.rows();
    let mut v = CMatrix::identity(n);
    for i in 0..n {
        a[(i, i)] = cr(a[(i, i)].re);
    }
    let scale = a.frobenius_norm();
    if scale == T::zero() || n < 2 {
        return finish(a, v);
    }
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= eps * scale * T::lit(0.25) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= eps * eps * scale {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, mag);
            }
        }
    }
    finish(a, v)
}

#[inline]
fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize, apq: Complex<T>, mag: T) {
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (mag + mag);
    let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
        T::one() / (theta + theta)
    } else {
        let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
        sgn / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;
    // G = [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]] on the (p, q) plane
    let phase = apq / mag; // e^{iφ}
    let phase_c = phase.conj();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)] * phase_c;
        a[(k, p)] = akp * cs - akq * sn;
        a[(k, q)] = akp * sn + akq * cs;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)] * phase_c;
        v[(k, p)] = vkp * cs - vkq * sn;
        v[(k, q)] = vkp * sn + vkq * cs;
    }
    for k in 0..n {
        let bpk = a[(p, k)];
        let bqk = a[(q, k)] * phase;
        a[(p, k)] = bpk * cs - bqk * sn;
        a[(q, k)] = bpk * sn + bqk * cs;
    }
    a[(p, q)] = cr(T::zero());
    a[(q, p)] = cr(T::zero());
    a[(p, p)] = cr(app - t * mag);
    a[(q, q)] = cr(aqq + t * mag);
}

fn finish<T: Real>(a: CMatrix<T>, v: CMatrix<T>) -> HermitianEigen<T> {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    HermitianEigen { values, vectors }
}

/// Orthonormal basis of `{v : ‖Av‖ ≤ rank_tol·‖A‖}` for a Hermitian PSD `A`.
pub fn kernel_basis<T: Real>(a: &CMatrix<T>, rank_tol: T) -> Result<Vec<Vec<Complex<T>>>> {
    let tol = T::lit(1e-8) * a.max_abs().max(T::one());
    Ok(hermitian_eigensystem(a, tol)?.kernel(rank_tol))
}

/// Smallest eigenpair of a Hermitian matrix (hermiticity is not re-checked).
pub fn smallest_eigenpair<T: Real>(a: &CMatrix<T>) -> (T, Vec<Complex<T>>) {
    let e = jacobi(a.hermitian_part());
    (e.values[0], e.vector(0))
}

/// Eigen-decomposition without the hermiticity check; the Hermitian part is used.
pub fn eigh<T: Real>(a: &CMatrix<T>) -> HermitianEigen<T> {
    jacobi(a.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn identity_has_unit_spectrum() {
        let e = hermitian_eigensystem(&CMatrix::<f64>::identity(4), 1e-12).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let e = hermitian_eigensystem(&CMatrix::<f64>::from_real_diagonal(&[3.0, -1.0, 0.0]), 1e-12).unwrap();
        assert_eq!(e.values, vec![-1.0, 0.0, 3.0]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::<f64>::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eigensystem(&m, 1e-10), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let m = CMatrix::<f64>::from_vec(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let e = hermitian_eigensystem(&m, 1e-12).unwrap();
        assert!((e.values[0]).abs() < 1e-14);
        assert!((e.values[1] - 2.0).abs() < 1e-14);
        let v = e.vector(0);
        let r = m.mul_vec(&v);
        assert!(r.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn kernel_of_rank_one_projector() {
        let v = vec![c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5)];
        let p = CMatrix::projector(&v);
        assert_eq!(kernel_basis(&p, 1e-9).unwrap().len(), 3);
        assert!(kernel_basis(&CMatrix::<f64>::identity(4).scale(0.25), 1e-9).unwrap().is_empty());
    }

    #[test]
    fn works_in_single_precision() {
        let m = CMatrix::<f32>::from_fn(3, 3, |i, j| {
            if i == j {
                c(i as f32 + 1.0, 0.0)
            } else if i < j {
                c(0.1, 0.2)
            } else {
                c(0.1, -0.2)
            }
        });
        let e = hermitian_eigensystem(&m, 1e-6).unwrap();
        let rec = e.reassemble(|l| l);
        assert!((&rec - &m).max_abs() < 1e-5);
    }
}
