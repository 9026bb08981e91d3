//! Witness optimisation by subtracting product projectors.
//!
//! `W ↦ (W − λ|e,f⟩⟨e,f|)·tr W/(tr W − λ)` makes every `tr(Wρ)` smaller before
//! the positive rescaling, so the set of detected states can only grow. `λ` is
//! the largest weight keeping the searched product floor above `−1e-7`. The
//! fixpoint (no subtractable projector found) is only a local notion of
//! optimality.

use crate::scalar::Real;
use crate::state::DensityMatrix;

use super::{min_product_expectation, Witness, FLOOR_TOL};

#[derive(Clone, Copy, Debug)]
pub struct OptimizeOptions {
    /// Maximum number of subtraction steps.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Only projectors with `⟨e,f|W|e,f⟩ > gap` are considered.
    pub gap: f64,
    /// Steps with a smaller weight are not taken.
    pub min_weight: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { budget: 16, restarts: 24, seed: 0, gap: 1e-6, min_weight: 1e-6 }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizedWitness<T: Real = f64> {
    pub witness: Witness<T>,
    /// Subtracted weights in order.
    pub steps: Vec<T>,
    /// `true` when the last search found nothing to subtract.
    pub fixpoint: bool,
}

pub fn optimize_witness<T: Real>(
    w: &Witness<T>,
    opts: &OptimizeOptions,
    probes: &[DensityMatrix<T>],
) -> OptimizedWitness<T> {
    let (m, n) = w.dims();
    // bisection runs against a tighter floor: the final rescale by
    // `tr W/(tr W − λ)` and a fresh search both move the value down a little
    let floor = -T::lit(FLOOR_TOL * 0.01);
    let mut op = w.operator.clone();
    let mut steps = Vec::new();
    let mut fixpoint = false;
    let trace0 = w.trace();
    let detected: Vec<bool> = probes.iter().map(|p| w.detects(p)).collect();

    for step in 0..opts.budget {
        let seed = opts.seed.wrapping_add(step as u64 * 7919);
        // candidate: the product vector with the largest expectation
        let top = min_product_expectation(&op.scale(-T::one()), m, n, opts.restarts, seed);
        let peak = -top.value;
        if peak <= T::lit(opts.gap) {
            fixpoint = true;
            break;
        }
        let d = top.argmin.projector();
        let admissible = |lam: T| min_product_expectation(&(&op - &d.scale(lam)), m, n, opts.restarts, seed ^ 0xD1).value >= floor;
        let (mut lo, mut hi) = (T::zero(), peak);
        if admissible(hi) {
            lo = hi;
        } else {
            for _ in 0..40 {
                let mid = (lo + hi) * T::lit(0.5);
                if admissible(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= T::lit(1e-9) * peak {
                    break;
                }
            }
        }
        let tr = op.trace().re;
        if lo <= T::lit(opts.min_weight) || tr - lo <= T::zero() {
            fixpoint = true;
            break;
        }
        let next = (&op - &d.scale(lo)).scale(trace0 / (tr - lo));
        let trial = Witness { operator: next.clone(), ..w.clone() };
        let keeps = probes.iter().zip(&detected).all(|(p, &was)| !was || trial.detects(p));
        if !keeps {
            break;
        }
        op = next;
        steps.push(lo);
    }

    let sep = min_product_expectation(&op, m, n, opts.restarts, opts.seed ^ 0x0F);
    let witness = Witness {
        operator: op,
        m,
        n,
        sep_floor: sep.value,
        search_restarts: sep.restarts,
        detected_value: None,
    };
    OptimizedWitness { witness, steps, fixpoint }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::state::maximally_entangled;
    use crate::witness::projector_witness;

    #[test]
    fn optimal_projector_witness_is_a_fixpoint() {
        let w = projector_witness(&maximally_entangled::<f64>(2), 16, 0).unwrap();
        let out = optimize_witness(&w, &OptimizeOptions { budget: 3, ..Default::default() }, &[]);
        assert!((&out.witness.operator - &w.operator).max_abs() < 1e-6);
        assert!(out.fixpoint);
    }

    #[test]
    fn slack_witness_improves() {
        let psi = maximally_entangled::<f64>(2);
        let p = CMatrix::projector(psi.amplitudes());
        let op = &CMatrix::identity(4).scale(0.375) - &p.scale(0.5);
        let w = Witness::from_operator(op, 2, 2, 16, 0).unwrap();
        let target = DensityMatrix::from_pure(&psi);
        let before = w.value_on(&target);
        let out = optimize_witness(&w, &OptimizeOptions { budget: 4, ..Default::default() }, &[target.clone()]);
        let after = out.witness.value_on(&target);
        assert!(after < before - 1e-3, "{before} -> {after}");
        assert!(out.witness.sep_floor >= -1e-7, "floor {}", out.witness.sep_floor);
    }
}
