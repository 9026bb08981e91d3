//! One-sided (Hestenes) Jacobi singular value decomposition.

use num_complex::Complex;

use super::matrix::CMatrix;
use super::vector;
use crate::scalar::{czero, Real};

/// Thin SVD `A = U·diag(s)·V†`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd<T: Real = f64> {
    /// `rows × k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: CMatrix<T>,
    pub s: Vec<T>,
    /// `cols × k` with orthonormal columns.
    pub v: CMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn reconstruct(&self) -> CMatrix<T> {
        let k = self.s.len();
        let us = CMatrix::from_fn(self.u.rows(), k, |i, j| self.u[(i, j)] * self.s[j]);
        us.matmul(&self.v.adjoint())
    }
}

pub fn svd<T: Real>(a: &CMatrix<T>) -> Svd<T> {
    if a.rows() < a.cols() {
        let t = svd_tall(&a.adjoint());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    svd_tall(a)
}

fn svd_tall<T: Real>(a: &CMatrix<T>) -> Svd<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex<T>>> = (0..n)
        .map(|j| {
            let mut e = vec![czero(); n];
            e[j] = Complex::new(T::one(), T::zero());
            e
        })
        .collect();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = cols[p].iter().map(|z| z.norm_sqr()).sum::<T>();
                let beta = cols[q].iter().map(|z| z.norm_sqr()).sum::<T>();
                let gamma = vector::inner(&cols[p], &cols[q]);
                let mag = gamma.norm();
                if mag <= eps * (alpha * beta).sqrt() || mag == T::zero() {
                    continue;
                }
                rotated = true;
                let theta = (beta - alpha) / (mag + mag);
                let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
                let t = sgn / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                let phase_c = (gamma / mag).conj();
                for (xp, xq) in column_pair(&mut cols, p, q) {
                    let a0 = *xp;
                    let b0 = *xq * phase_c;
                    *xp = a0 * cs - b0 * sn;
                    *xq = a0 * sn + b0 * cs;
                }
                for (xp, xq) in column_pair(&mut v, p, q) {
                    let a0 = *xp;
                    let b0 = *xq * phase_c;
                    *xp = a0 * cs - b0 * sn;
                    *xq = a0 * sn + b0 * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = cols.iter().map(|c| vector::norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let smax = norms.iter().fold(T::zero(), |a, &b| a.max(b));
    let cut = smax * eps * T::lit(n.max(m) as f64);
    let mut us: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for &j in &order {
        s.push(norms[j]);
        vs.push(v[j].clone());
        if norms[j] > cut {
            us.push(cols[j].iter().map(|&z| z / norms[j]).collect());
        } else {
            pending.push(us.len());
            us.push(Vec::new());
        }
    }
    if !pending.is_empty() {
        let known: Vec<Vec<Complex<T>>> = us.iter().filter(|u| !u.is_empty()).cloned().collect();
        let full = vector::complete_basis(&known, m);
        let mut extra = full.into_iter().skip(known.len());
        for idx in pending {
            us[idx] = extra.next().expect("tall matrix has room for completion");
        }
    }
    Svd { u: CMatrix::from_columns(m, &us), s, v: CMatrix::from_columns(n, &vs) }
}

fn column_pair<T: Real>(
    cols: &mut [Vec<Complex<T>>],
    p: usize,
    q: usize,
) -> impl Iterator<Item = (&mut Complex<T>, &mut Complex<T>)> {
    debug_assert!(p < q);
    let (left, right) = cols.split_at_mut(q);
    left[p].iter_mut().zip(right[0].iter_mut())
}
