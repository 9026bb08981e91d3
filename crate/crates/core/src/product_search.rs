//! Multi-start alternating minimisation of `⟨e,f|H|e,f⟩` over product vectors.
//!
//! With one factor fixed the objective is a Hermitian form in the other
//! factor, minimised exactly by its smallest eigenvector. Alternating the two
//! solves never increases the objective. The result is an upper bound on the
//! true minimum over product vectors.

use num_complex::Complex;
use rayon::prelude::*;

use crate::linalg::{eigh, smallest_eigenpair, vector, CMatrix};
use crate::rng;
use crate::scalar::{czero, Real};
use crate::state::{ProductVector, PureState};

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop a run once one sweep improves the value by less than this (absolute).
    pub tol: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 64, max_iter: 500, tol: 1e-15, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct ProductMinimum<T: Real = f64> {
    pub value: T,
    pub argmin: ProductVector<T>,
    pub restarts: usize,
}

/// `(⟨e| ⊗ 1) H (|e⟩ ⊗ 1)`, an `N × N` matrix.
pub fn reduce_alice<T: Real>(h: &CMatrix<T>, m: usize, n: usize, e: &[Complex<T>]) -> CMatrix<T> {
    let mut out = CMatrix::zeros(n, n);
    for i in 0..m {
        let ei = e[i].conj();
        if ei.norm_sqr() == T::zero() {
            continue;
        }
        for j in 0..m {
            let w = ei * e[j];
            if w.norm_sqr() == T::zero() {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    out[(k, l)] = out[(k, l)] + w * h[(i * n + k, j * n + l)];
                }
            }
        }
    }
    out
}

/// `(1 ⊗ ⟨f|) H (1 ⊗ |f⟩)`, an `M × M` matrix.
pub fn reduce_bob<T: Real>(h: &CMatrix<T>, m: usize, n: usize, f: &[Complex<T>]) -> CMatrix<T> {
    let mut out = CMatrix::zeros(m, m);
    for k in 0..n {
        let fk = f[k].conj();
        if fk.norm_sqr() == T::zero() {
            continue;
        }
        for l in 0..n {
            let w = fk * f[l];
            if w.norm_sqr() == T::zero() {
                continue;
            }
            for i in 0..m {
                for j in 0..m {
                    out[(i, j)] = out[(i, j)] + w * h[(i * n + k, j * n + l)];
                }
            }
        }
    }
    out
}

pub fn product_expectation<T: Real>(h: &CMatrix<T>, pv: &ProductVector<T>) -> T {
    h.expectation(&pv.ket())
}

/// Runs the alternating iteration from `start` until it stalls.
pub fn alternate_from<T: Real>(
    h: &CMatrix<T>,
    m: usize,
    n: usize,
    start: &ProductVector<T>,
    max_iter: usize,
    tol: T,
) -> (T, ProductVector<T>) {
    let mut e = start.e.clone();
    let mut f = start.f.clone();
    let mut value = h.expectation(&vector::kron(&e, &f));
    for _ in 0..max_iter {
        let (_, fnew) = smallest_eigenpair(&reduce_alice(h, m, n, &e));
        f = fnew;
        let (v, enew) = smallest_eigenpair(&reduce_bob(h, m, n, &f));
        e = enew;
        let improvement = value - v;
        value = v;
        if improvement.abs() <= tol {
            break;
        }
    }
    let value = h.expectation(&vector::kron(&e, &f));
    (value, ProductVector { e, f })
}

/// Alternates until both factors stop moving (phase-aligned step length `≤ step_tol`).
///
/// Used when the target is a zero of a PSD-on-products form, where the value
/// itself cannot resolve the distance to the zero set below `√ε`.
pub fn alternate_to_fixpoint<T: Real>(
    h: &CMatrix<T>,
    m: usize,
    n: usize,
    start: &ProductVector<T>,
    max_iter: usize,
    step_tol: T,
) -> (T, ProductVector<T>) {
    let mut e = start.e.clone();
    let mut f = start.f.clone();
    for _ in 0..max_iter {
        let (_, fnew) = smallest_eigenpair(&reduce_alice(h, m, n, &e));
        let (_, enew) = smallest_eigenpair(&reduce_bob(h, m, n, &fnew));
        let moved = aligned_distance(&e, &enew) + aligned_distance(&f, &fnew);
        e = enew;
        f = fnew;
        if moved <= step_tol {
            break;
        }
    }
    let value = h.expectation(&vector::kron(&e, &f));
    (value, ProductVector { e, f })
}

/// `min_φ ‖b − e^{iφ}a‖` for unit vectors.
fn aligned_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    let ov = vector::inner(a, b);
    let mag = ov.norm();
    if mag == T::zero() {
        return T::lit(2.0).sqrt();
    }
    let ph = ov / mag;
    a.iter().zip(b).map(|(&x, &y)| (y - x * ph).norm_sqr()).sum::<T>().sqrt()
}

/// Deterministic starting points: leading Schmidt pairs of the lowest eigenvectors.
pub fn spectral_starts<T: Real>(h: &CMatrix<T>, m: usize, n: usize, count: usize) -> Vec<ProductVector<T>> {
    let eig = eigh(h);
    let mut out = Vec::new();
    for k in 0..count.min(eig.values.len()) {
        let Ok(psi) = PureState::normalized(m, n, eig.vector(k)) else { continue };
        let sd = psi.schmidt_decomposition();
        out.push(ProductVector { e: sd.left[0].clone(), f: sd.right[0].clone() });
        if sd.coefficients.len() > 1 && sd.coefficients[1] > T::lit(1e-6) {
            out.push(ProductVector { e: sd.left[1].clone(), f: sd.right[1].clone() });
        }
    }
    out
}

/// Best value over spectral starts plus `opts.restarts` random starts.
///
/// Restarts run in parallel; the reduction takes the smallest value and breaks
/// ties by start index, so the outcome depends only on `opts`.
pub fn minimize_product_expectation<T: Real>(
    h: &CMatrix<T>,
    m: usize,
    n: usize,
    opts: &SearchOptions,
) -> ProductMinimum<T> {
    minimize_with_starts(h, m, n, opts, &spectral_starts(h, m, n, 2))
}

pub fn minimize_with_starts<T: Real>(
    h: &CMatrix<T>,
    m: usize,
    n: usize,
    opts: &SearchOptions,
    extra_starts: &[ProductVector<T>],
) -> ProductMinimum<T> {
    let tol = T::lit(opts.tol);
    let total = extra_starts.len() + opts.restarts;
    let best = (0..total)
        .into_par_iter()
        .map(|i| {
            let start = if i < extra_starts.len() {
                extra_starts[i].clone()
            } else {
                let mut r = rng::stream(opts.seed, i as u64);
                ProductVector::random(&mut r, m, n)
            };
            let (v, pv) = alternate_from(h, m, n, &start, opts.max_iter, tol);
            (v, i, pv)
        })
        .reduce_with(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    match best {
        Some((value, _, argmin)) => ProductMinimum { value, argmin, restarts: total },
        None => {
            let mut e = vec![czero(); m];
            e[0] = Complex::new(T::one(), T::zero());
            let mut f = vec![czero(); n];
            f[0] = Complex::new(T::one(), T::zero());
            let argmin = ProductVector { e, f };
            ProductMinimum { value: product_expectation(h, &argmin), argmin, restarts: 0 }
        }
    }
}
