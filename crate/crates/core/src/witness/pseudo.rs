//! Pseudo-mixtures `W = Σ c_i |a_i⟩⟨a_i| ⊗ |b_i⟩⟨b_i|` with `Σ c_i = 1`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::solve::lstsq;
use crate::linalg::{vector, CMatrix};
use crate::scalar::{c, cone, czero, Real};

use super::Witness;

#[derive(Clone, Debug)]
pub struct PseudoTerm<T: Real = f64> {
    pub c: T,
    pub a: Vec<Complex<T>>,
    pub b: Vec<Complex<T>>,
}

#[derive(Clone, Debug)]
pub struct PseudoMixture<T: Real = f64> {
    pub terms: Vec<PseudoTerm<T>>,
}

impl<T: Real> PseudoMixture<T> {
    pub fn reconstruct(&self) -> CMatrix<T> {
        let d = self.terms.first().map_or(0, |t| t.a.len() * t.b.len());
        let mut acc = CMatrix::zeros(d, d);
        for t in &self.terms {
            acc = &acc + &CMatrix::projector(&vector::kron(&t.a, &t.b)).scale(t.c);
        }
        acc
    }

    pub fn coefficient_sum(&self) -> T {
        self.terms.iter().map(|t| t.c).sum()
    }

    pub fn negative_count(&self) -> usize {
        self.terms.iter().filter(|t| t.c < T::zero()).count()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Overcomplete projector frame on `C^d`: the basis states and
/// `(|i⟩ ± |j⟩)/√2`, `(|i⟩ ± i|j⟩)/√2` for `i < j`, `d(2d−1)` vectors in total
/// (the six Pauli eigenstates for a qubit).
pub fn local_frame<T: Real>(d: usize) -> Vec<Vec<Complex<T>>> {
    let mut out = Vec::with_capacity(d * (2 * d - 1));
    for i in 0..d {
        let mut v = vec![czero(); d];
        v[i] = cone();
        out.push(v);
    }
    let s = T::one() / T::lit(2.0).sqrt();
    for i in 0..d {
        for j in (i + 1)..d {
            for phase in [c(T::one(), T::zero()), c(-T::one(), T::zero()), c(T::zero(), T::one()), c(T::zero(), -T::one())] {
                let mut v = vec![czero(); d];
                v[i] = c(s, T::zero());
                v[j] = phase * s;
                out.push(v);
            }
        }
    }
    out
}

/// Expands the trace-normalised witness in the product frame.
///
/// Terms are picked by orthogonal matching pursuit and then pruned while the
/// reconstruction residual stays below `1e-12·‖W‖`; the trace fixes `Σ c_i = 1`.
pub fn local_decomposition<T: Real>(w: &Witness<T>) -> Result<PseudoMixture<T>> {
    let tr = w.trace();
    if tr <= T::lit(1e-12) {
        return Err(Error::InvariantViolation(format!("witness trace {} is not positive", tr.to_f64_lossy())));
    }
    let target = w.operator.scale(T::one() / tr);
    let fa = local_frame::<T>(w.m);
    let fb = local_frame::<T>(w.n);
    let mut pairs = Vec::with_capacity(fa.len() * fb.len());
    for a in &fa {
        for b in &fb {
            pairs.push((a.clone(), b.clone()));
        }
    }
    let flatten = |x: &CMatrix<T>| -> Vec<T> {
        let mut out: Vec<T> = x.as_slice().iter().map(|z| z.re).collect();
        out.extend(x.as_slice().iter().map(|z| z.im));
        out
    };
    let columns: Vec<Vec<T>> = pairs.iter().map(|(a, b)| flatten(&CMatrix::projector(&vector::kron(a, b)))).collect();
    let norms: Vec<T> = columns.iter().map(|col| dot(col, col).sqrt()).collect();
    let rhs = flatten(&target);
    let stop = T::lit(1e-12) * dot(&rhs, &rhs).sqrt().max(T::one());

    let mut chosen: Vec<usize> = Vec::new();
    let mut coeffs: Vec<T> = Vec::new();
    let mut residual = rhs.clone();
    let limit = columns.len().min(rhs.len());
    while chosen.len() < limit && dot(&residual, &residual).sqrt() > stop {
        let next = (0..columns.len())
            .filter(|j| !chosen.contains(j))
            .map(|j| (j, dot(&columns[j], &residual).abs() / norms[j]))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let Some((j, score)) = next else { break };
        if score <= stop {
            break;
        }
        chosen.push(j);
        let sub: Vec<Vec<T>> = chosen.iter().map(|&k| columns[k].clone()).collect();
        coeffs = lstsq(&sub, &rhs).0;
        residual = residual_of(&sub, &coeffs, &rhs);
    }
    if dot(&residual, &residual).sqrt() > stop {
        return Err(Error::SingularFrame);
    }

    // pruning pass
    let mut k = 0;
    while k < chosen.len() {
        let mut trial = chosen.clone();
        trial.remove(k);
        let sub: Vec<Vec<T>> = trial.iter().map(|&j| columns[j].clone()).collect();
        let (x, res) = lstsq(&sub, &rhs);
        if res <= stop {
            chosen = trial;
            coeffs = x;
        } else {
            k += 1;
        }
    }

    let terms = chosen
        .iter()
        .zip(&coeffs)
        .filter(|(_, &cf)| cf != T::zero())
        .map(|(&j, &cf)| PseudoTerm { c: cf, a: pairs[j].0.clone(), b: pairs[j].1.clone() })
        .collect();
    Ok(PseudoMixture { terms })
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn residual_of<T: Real>(cols: &[Vec<T>], x: &[T], b: &[T]) -> Vec<T> {
    let mut r = b.to_vec();
    for (col, &xi) in cols.iter().zip(x) {
        for (ri, &ci) in r.iter_mut().zip(col) {
            *ri -= xi * ci;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::maximally_entangled;
    use crate::witness::projector_witness;

    #[test]
    fn qubit_frame_has_six_states() {
        let f = local_frame::<f64>(2);
        assert_eq!(f.len(), 6);
        assert_eq!(local_frame::<f64>(3).len(), 15);
    }

    #[test]
    fn product_projector_is_one_term() {
        let a = vec![cone::<f64>(), czero()];
        let b = vec![czero(), cone::<f64>()];
        let op = CMatrix::projector(&vector::kron(&a, &b));
        let w = Witness { operator: op, m: 2, n: 2, sep_floor: 0.0, search_restarts: 0, detected_value: None };
        let pm = local_decomposition(&w).unwrap();
        assert_eq!(pm.len(), 1);
        assert!((pm.terms[0].c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_witness_has_negative_terms() {
        let w = projector_witness(&maximally_entangled::<f64>(2), 8, 0).unwrap();
        let pm = local_decomposition(&w).unwrap();
        let target = w.operator.scale(1.0 / w.trace());
        assert!((&pm.reconstruct() - &target).frobenius_norm() < 1e-10);
        assert!((pm.coefficient_sum() - 1.0).abs() < 1e-10);
        assert!(pm.negative_count() >= 1);
    }
}
