//! Helpers for complex vectors stored as plain slices.

use num_complex::Complex;

use crate::scalar::{czero, Real};

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(czero(), |acc, (&x, &y)| acc + x.conj() * y)
}

pub fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Returns `a/‖a‖`, or `None` for a vector of (numerically) zero norm.
pub fn normalized<T: Real>(a: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
    let n = norm(a);
    if n <= T::min_positive_value().sqrt() {
        return None;
    }
    Some(a.iter().map(|&z| z / n).collect())
}

pub fn conj<T: Real>(a: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().map(|z| z.conj()).collect()
}

/// `a ⊗ b` with the index `(i, k) ↦ i·len(b) + k`.
pub fn kron<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y).norm_sqr()).sum::<T>().sqrt()
}

/// Orthonormalises `v` against `basis` (assumed orthonormal); `None` if nothing survives.
pub fn orthogonalize_against<T: Real>(v: &[Complex<T>], basis: &[Vec<Complex<T>>]) -> Option<Vec<Complex<T>>> {
    let mut w = v.to_vec();
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let p = inner(b, &w);
            for (wi, &bi) in w.iter_mut().zip(b) {
                *wi = *wi - p * bi;
            }
        }
    }
    let n = norm(&w);
    if n <= T::lit(1e-8) * norm(v).max(T::one()) {
        return None;
    }
    Some(w.into_iter().map(|z| z / n).collect())
}

/// Extends an orthonormal set to an orthonormal basis of `C^dim`.
pub fn complete_basis<T: Real>(basis: &[Vec<Complex<T>>], dim: usize) -> Vec<Vec<Complex<T>>> {
    let mut out: Vec<Vec<Complex<T>>> = basis.to_vec();
    for k in 0..dim {
        if out.len() == dim {
            break;
        }
        let mut e = vec![czero(); dim];
        e[k] = Complex::new(T::one(), T::zero());
        if let Some(w) = orthogonalize_against(&e, &out) {
            out.push(w);
        }
    }
    out
}
