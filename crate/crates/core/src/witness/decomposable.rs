//! Heuristic test for `W = P + Q^{T_A}` with `P, Q ≥ 0`.

use crate::linalg::{eigh, CMatrix};
use crate::scalar::Real;
use crate::separability::{is_ppt, partial_transpose_matrix};
use crate::state::{DensityMatrix, Side};

use super::{Witness, DETECTION_TOL};

/// Split residuals at or below this count as a decomposition.
pub const SPLIT_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub enum Decomposability<T: Real = f64> {
    Decomposable { p: CMatrix<T>, q: CMatrix<T>, residual: T },
    /// No split found; this is not a proof of non-decomposability.
    Unknown { residual: T },
    /// The witness detects a PPT state, which no decomposable witness can do.
    NonDecomposableCertified { state: DensityMatrix<T>, value: T },
}

impl<T: Real> Decomposability<T> {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Decomposable { .. } => "decomposable",
            Self::Unknown { .. } => "unknown",
            Self::NonDecomposableCertified { .. } => "non-decomposable",
        }
    }
}

fn psd_part<T: Real>(x: &CMatrix<T>) -> CMatrix<T> {
    eigh(x).reassemble(|v| v.max(T::zero()))
}

/// Alternating projections `Q ← [(W − P)^{T_A}]₊`, `P ← [W − Q^{T_A}]₊`, from
/// both `P = 0` and `Q = 0`. PPT states in `probes` that `W` detects are
/// checked first and settle the question.
pub fn is_decomposable<T: Real>(w: &Witness<T>, budget: usize, probes: &[DensityMatrix<T>]) -> Decomposability<T> {
    for probe in probes {
        let value = w.value_on(probe);
        if value < -T::lit(DETECTION_TOL) && is_ppt(probe, T::lit(1e-9)).ppt {
            return Decomposability::NonDecomposableCertified { state: probe.clone(), value };
        }
    }
    let (m, n) = w.dims();
    let pt = |x: &CMatrix<T>| partial_transpose_matrix(x, m, n, Side::A);
    let resid = |p: &CMatrix<T>, q: &CMatrix<T>| (&(&w.operator - p) - &pt(q)).frobenius_norm();
    let tol = T::lit(SPLIT_TOL);
    let mut best = T::infinity();
    for start_with_q in [true, false] {
        let mut p = if start_with_q { CMatrix::zeros(m * n, m * n) } else { psd_part(&w.operator) };
        for _ in 0..budget.max(1) {
            let q = psd_part(&pt(&(&w.operator - &p)));
            p = psd_part(&(&w.operator - &pt(&q)));
            let r = resid(&p, &q);
            if r <= tol {
                return Decomposability::Decomposable { p, q, residual: r };
            }
            best = best.min(r);
        }
    }
    Decomposability::Unknown { residual: best }
}
