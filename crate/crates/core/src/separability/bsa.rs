//! Greedy best separable approximation `ρ = λσ + (1−λ)δ`.
//!
//! Each step searches for the product vector whose projector can be removed
//! with the largest weight and subtracts it. In PPT-constrained mode the
//! partial transpose of the remainder must stay positive as well, so the
//! remainder stays PPT throughout.

use rayon::prelude::*;

use crate::linalg::{eigh, CMatrix};
use crate::product_search::{alternate_from, alternate_to_fixpoint, spectral_starts};
use crate::rng;
use crate::scalar::{cone, czero, Real};
use crate::state::{DensityMatrix, ProductVector, PureState, Side};

use super::subtract::SubtractionGeometry;
use super::{is_ppt, Tolerances};

/// Remainders with trace below this are absorbed into the separable part.
const ABSORB_TRACE: f64 = 1e-10;
/// A step whose weight relative to the remaining trace falls below this ends the search.
const EDGE_WEIGHT: f64 = 1e-7;

#[derive(Clone, Copy, Debug)]
pub struct BsaOptions {
    pub ppt_constrained: bool,
    /// Maximum number of greedy subtraction steps.
    pub budget: usize,
    /// Random restarts of the product-vector search in each step.
    pub restarts: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

impl Default for BsaOptions {
    fn default() -> Self {
        Self { ppt_constrained: true, budget: 64, restarts: 24, seed: 0, tol: Tolerances::default() }
    }
}

/// `ρ = λσ + (1−λ)δ` with `σ = Σ w_i |e_i,f_i⟩⟨e_i,f_i|`, `Σ w_i = 1`.
#[derive(Clone, Debug)]
pub struct Decomposition<T: Real = f64> {
    pub lambda: T,
    /// Normalised weights and product vectors of `σ`.
    pub separable_part: Vec<(T, ProductVector<T>)>,
    /// `δ`; `None` when `λ = 1`.
    pub edge_part: Option<DensityMatrix<T>>,
    /// Absolute weights in subtraction order (`λ·w_i`).
    pub steps: Vec<T>,
    pub budget_exhausted: bool,
    /// Set when PPT-constrained mode was requested for an NPPT input; nothing is subtracted then.
    pub input_not_ppt: bool,
}

impl<T: Real> Decomposition<T> {
    pub fn reconstruct(&self) -> CMatrix<T> {
        let d = self.separable_part.first().map(|(_, pv)| pv.e.len() * pv.f.len()).unwrap_or_else(|| {
            self.edge_part.as_ref().map(|e| e.dim()).unwrap_or(0)
        });
        let mut acc = CMatrix::zeros(d, d);
        for (w, pv) in &self.separable_part {
            acc = &acc + &pv.projector().scale(*w * self.lambda);
        }
        if let Some(delta) = &self.edge_part {
            acc = &acc + &delta.matrix().scale(T::one() - self.lambda);
        }
        acc
    }

    /// `σ` as a matrix.
    pub fn separable_matrix(&self, dim: usize) -> CMatrix<T> {
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, pv) in &self.separable_part {
            acc = &acc + &pv.projector().scale(*w);
        }
        acc
    }

    pub fn term_count(&self) -> usize {
        self.separable_part.len()
    }
}

/// Best subtractable product vector of the remainder described by `geo`, with its certified weight.
pub(crate) fn best_subtractable<T: Real>(
    geo: &SubtractionGeometry<T>,
    restarts: usize,
    seed: u64,
    range_tol: T,
) -> Option<(T, ProductVector<T>)> {
    let (m, n) = (geo.m, geo.n);
    let q = geo.range_form();
    let has_kernel = geo.eig.kernel(T::lit(1e-9)).len() > 0 || geo.ppt.is_some();
    let inv = geo.inverse_form();
    let inv_scale = eigh(&inv).spectral_radius().max(T::epsilon());
    let h = &inv + &q.scale(inv_scale * T::lit(1e4));

    let mut starts: Vec<ProductVector<T>> = Vec::new();
    // Schmidt pairs of the leading eigenvectors of the remainder lie close to its range.
    let neg = geo.matrix.scale(-T::one());
    starts.extend(spectral_starts(&neg, m, n, 3));
    starts.extend(spectral_starts(&h, m, n, 2));
    let fixed = starts.len();
    let total = fixed + restarts;
    let tight = T::lit(1e-13);

    let best = (0..total)
        .into_par_iter()
        .map(|i| {
            let start = if i < fixed {
                starts[i].clone()
            } else {
                let mut r = rng::stream(seed, i as u64);
                ProductVector::random(&mut r, m, n)
            };
            let mut pv = start;
            if has_kernel {
                pv = alternate_to_fixpoint(&q, m, n, &pv, 3000, tight).1;
            }
            pv = alternate_from(&h, m, n, &pv, 300, T::lit(1e-14) * inv_scale).1;
            if has_kernel {
                pv = alternate_to_fixpoint(&q, m, n, &pv, 3000, tight).1;
            }
            let lam = if geo.range_residual(&pv) <= range_tol { geo.lambda_formula(&pv) } else { T::zero() };
            (lam, i, pv)
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })?;
    let (lam, _, pv) = best;
    if lam <= T::zero() {
        return None;
    }
    let certified = geo.certified_lambda(&pv);
    (certified > T::zero()).then_some((certified, pv))
}

struct GreedyRun<T: Real> {
    terms: Vec<(T, ProductVector<T>)>,
    remainder: CMatrix<T>,
    exhausted: bool,
}

fn greedy<T: Real>(start: CMatrix<T>, m: usize, n: usize, opts: &BsaOptions, seed: u64, budget: usize) -> GreedyRun<T> {
    let mut remainder = start;
    let mut terms = Vec::new();
    let range_tol = T::lit(opts.tol.range);
    let mut exhausted = false;
    loop {
        let t = remainder.trace().re;
        if t <= T::lit(ABSORB_TRACE) {
            break;
        }
        if terms.len() >= budget {
            exhausted = true;
            break;
        }
        let mut geo = SubtractionGeometry::new(remainder.clone(), m, n, opts.ppt_constrained, &opts.tol);
        geo.psd_tol = T::lit(opts.tol.psd) * t;
        let step_seed = seed.wrapping_add((terms.len() as u64).wrapping_mul(0x9E37_79B9));
        let Some((lam, pv)) = best_subtractable(&geo, opts.restarts, step_seed, range_tol * t.sqrt()) else { break };
        if lam / t < T::lit(EDGE_WEIGHT) {
            break;
        }
        remainder = &remainder - &pv.projector().scale(lam);
        terms.push((lam, pv));
    }
    GreedyRun { terms, remainder, exhausted }
}

/// Greedy decomposition with a pairwise re-optimisation pass.
///
/// The separable weight `λ` is a certified lower bound on the optimum: every
/// subtraction leaves a PSD (and, if constrained, PPT) remainder. With a fixed
/// seed, raising `budget` never lowers `λ`.
pub fn best_separable_approximation<T: Real>(rho: &DensityMatrix<T>, opts: &BsaOptions) -> Decomposition<T> {
    let (m, n) = rho.dims();
    if opts.ppt_constrained && !is_ppt(rho, T::lit(opts.tol.psd)).ppt {
        return Decomposition {
            lambda: T::zero(),
            separable_part: Vec::new(),
            edge_part: Some(rho.clone()),
            steps: Vec::new(),
            budget_exhausted: false,
            input_not_ppt: true,
        };
    }
    let mut run = greedy(rho.matrix().clone(), m, n, opts, opts.seed, opts.budget);

    if !run.exhausted && run.remainder.trace().re > T::lit(ABSORB_TRACE) {
        // pairwise pass: return the last k terms to the remainder and redo them
        for k in 2..=run.terms.len().min(4) {
            let keep = run.terms.len() - k;
            let mut merged = run.remainder.clone();
            let removed: T = run.terms[keep..].iter().map(|(w, _)| *w).sum();
            for (w, pv) in &run.terms[keep..] {
                merged = &merged + &pv.projector().scale(*w);
            }
            let redo = greedy(merged, m, n, opts, opts.seed ^ (0xA5A5_0000 + k as u64), usize::MAX);
            let gained: T = redo.terms.iter().map(|(w, _)| *w).sum();
            if gained > removed + T::lit(1e-12) {
                run.terms.truncate(keep);
                run.terms.extend(redo.terms);
                run.remainder = redo.remainder;
            }
        }
    }

    assemble(rho, run)
}

/// `ρ = c·1 + (1 − c·MN)·X` with `c` the smaller of the least eigenvalues of
/// `ρ` and `ρ^{T_A}`; the identity part is the computational product basis and
/// `X` (PPT, singular) goes through [`best_separable_approximation`].
///
/// Full-rank states deep inside the separable set can stall the plain greedy
/// search at a near-singular remainder; `X` has an exact kernel instead, which
/// the range conditions exploit. Returns `None` unless `c > 0`.
pub fn identity_peeled_approximation<T: Real>(rho: &DensityMatrix<T>, opts: &BsaOptions) -> Option<Decomposition<T>> {
    let (m, n) = rho.dims();
    let d = m * n;
    let c = eigh(rho.matrix()).min().min(eigh(&rho.partial_transpose(Side::A)).min());
    if c <= T::lit(opts.tol.psd) {
        return None;
    }
    let s = T::one() - c * T::lit(d as f64);
    if s <= T::lit(ABSORB_TRACE) {
        // ρ is the maximally mixed state
        let run = GreedyRun { terms: basis_terms(m, n, c), remainder: CMatrix::zeros(d, d), exhausted: false };
        return Some(assemble(rho, run));
    }
    let x = (rho.matrix() - &CMatrix::identity(d).scale(c)).scale(T::one() / s);
    let x = DensityMatrix::from_unnormalized(m, n, x).ok()?;
    let inner = best_separable_approximation(&x, &BsaOptions { ppt_constrained: true, ..*opts });
    let mut terms = basis_terms(m, n, c);
    terms.extend(inner.steps.iter().zip(&inner.separable_part).map(|(w, (_, pv))| (*w * s, pv.clone())));
    let remainder = inner.edge_part.map_or_else(|| CMatrix::zeros(d, d), |e| e.into_matrix().scale(s * (T::one() - inner.lambda)));
    Some(assemble(rho, GreedyRun { terms, remainder, exhausted: inner.budget_exhausted }))
}

fn basis_terms<T: Real>(m: usize, n: usize, c: T) -> Vec<(T, ProductVector<T>)> {
    let unit = |dim: usize, k: usize| {
        let mut v = vec![czero(); dim];
        v[k] = cone();
        v
    };
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        for k in 0..n {
            out.push((c, ProductVector::new(unit(m, i), unit(n, k)).expect("unit vectors")));
        }
    }
    out
}

fn assemble<T: Real>(rho: &DensityMatrix<T>, run: GreedyRun<T>) -> Decomposition<T> {
    let (m, n) = rho.dims();
    let t = run.remainder.trace().re;
    let steps: Vec<T> = run.terms.iter().map(|(w, _)| *w).collect();
    let subtracted: T = steps.iter().copied().sum();
    if run.terms.is_empty() {
        return Decomposition {
            lambda: T::zero(),
            separable_part: Vec::new(),
            edge_part: Some(rho.clone()),
            steps,
            budget_exhausted: run.exhausted,
            input_not_ppt: false,
        };
    }
    let (lambda, edge_part) = if t <= T::lit(ABSORB_TRACE) {
        (T::one(), None)
    } else {
        let lambda = T::one() - t;
        (lambda, Some(DensityMatrix::from_trusted(m, n, run.remainder)))
    };
    let separable_part = run.terms.into_iter().map(|(w, pv)| (w / subtracted, pv)).collect();
    Decomposition { lambda, separable_part, edge_part, steps, budget_exhausted: run.exhausted, input_not_ppt: false }
}

/// Pure input: its range is one-dimensional, so nothing is subtractable unless it is a product.
pub fn pure_state_decomposition<T: Real>(psi: &PureState<T>, opts: &BsaOptions) -> Decomposition<T> {
    best_separable_approximation(&DensityMatrix::from_pure(psi), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{maximally_entangled, werner_2x2};

    #[test]
    fn separable_werner_reaches_one() {
        let rho = werner_2x2::<f64>(0.2);
        let d = best_separable_approximation(&rho, &BsaOptions::default());
        assert!(d.lambda >= 1.0 - 1e-6, "lambda = {}", d.lambda);
        assert!((&d.reconstruct() - rho.matrix()).frobenius_norm() < 1e-8);
    }

    #[test]
    fn pure_entangled_gives_zero() {
        let psi = maximally_entangled::<f64>(2);
        let d = pure_state_decomposition(&psi, &BsaOptions { ppt_constrained: false, ..Default::default() });
        assert_eq!(d.lambda, 0.0);
        assert!(d.edge_part.is_some());
    }

    #[test]
    fn npt_input_in_constrained_mode_is_flagged() {
        let d = best_separable_approximation(&werner_2x2::<f64>(0.9), &BsaOptions::default());
        assert!(d.input_not_ppt);
        assert_eq!(d.lambda, 0.0);
    }

    #[test]
    fn identity_peeling_certifies_interior_states() {
        let mm = DensityMatrix::<f64>::maximally_mixed(2, 3);
        let d = identity_peeled_approximation(&mm, &BsaOptions::default()).unwrap();
        assert_eq!(d.lambda, 1.0);
        assert!((&d.reconstruct() - mm.matrix()).max_abs() < 1e-14);

        let rho = werner_2x2::<f64>(0.2);
        let d = identity_peeled_approximation(&rho, &BsaOptions::default()).unwrap();
        assert!(d.lambda >= 1.0 - 1e-6, "{}", d.lambda);
        assert!((&d.reconstruct() - rho.matrix()).frobenius_norm() < 1e-8);
    }
}
