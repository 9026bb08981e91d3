//! Constructive separability for PPT states of low rank.
//!
//! Product vectors in `R(ρ)` are the common zeros of `⟨k|e,f⟩` over the
//! kernel vectors `k`. When one party is a qubit, `e = (1, α)` turns the
//! condition into `det A(α) = 0` for a pencil `A(α) = A₀ + αA₁`, solved through
//! companion-matrix roots. Other dimensions (and degenerate pencils) use a
//! multi-start zero search. The candidates are then fitted to `ρ` with
//! nonnegative least squares; a fit within tolerance is a separability
//! certificate.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::solve::{determinant, nnls, polynomial_roots};
use crate::linalg::{eigh, smallest_eigenpair, vector, CMatrix};
use crate::product_search::{alternate_from, alternate_to_fixpoint};
use crate::rng;
use crate::scalar::{cone, czero, Real};
use crate::state::{DensityMatrix, ProductVector, PureState};

use super::bsa::Decomposition;
use super::subtract::SubtractionGeometry;
use super::{is_ppt, SeparabilityVerdict, Tolerances};
use crate::state::Side;

/// Root residuals above this are spurious roots of the randomly compressed pencil.
const SPURIOUS: f64 = 1e-4;
/// Root residuals above this (but below `SPURIOUS`) are counted as marginal.
const MARGINAL: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct LowRankOptions {
    /// Starts of the numeric zero search.
    pub restarts: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

impl Default for LowRankOptions {
    fn default() -> Self {
        Self { restarts: 96, seed: 0, tol: Tolerances::default() }
    }
}

/// Which of the rank conditions admitted the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankCondition {
    /// `r(ρ) ≤ max(M, N)`.
    RankAtMostN,
    /// `r(ρ) + r(ρ^{T_A}) ≤ 2MN − M − N + 2`.
    SumOfRanks,
    None,
}

pub fn rank_condition<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerances) -> RankCondition {
    let (m, n) = rho.dims();
    let rank_tol = T::lit(tol.rank);
    let r = rho.rank(rank_tol);
    if r <= m.max(n) {
        return RankCondition::RankAtMostN;
    }
    let rt = eigh(&rho.partial_transpose(Side::A)).rank(rank_tol);
    if r + rt <= 2 * m * n - m - n + 2 {
        RankCondition::SumOfRanks
    } else {
        RankCondition::None
    }
}

struct Candidates<T: Real> {
    vectors: Vec<ProductVector<T>>,
    marginal: usize,
    worst_marginal: T,
}

impl<T: Real> Candidates<T> {
    fn new() -> Self {
        Self { vectors: Vec::new(), marginal: 0, worst_marginal: T::zero() }
    }

    fn push(&mut self, pv: ProductVector<T>, residual: T) {
        if residual > T::lit(SPURIOUS) {
            return;
        }
        if residual > T::lit(MARGINAL) {
            self.marginal += 1;
            self.worst_marginal = self.worst_marginal.max(residual);
            return;
        }
        let ket = pv.ket();
        let dup = self.vectors.iter().any(|q| vector::inner(&q.ket(), &ket).norm() > T::one() - T::lit(1e-9));
        if !dup {
            self.vectors.push(pv);
        }
    }
}

/// Separability of a PPT state from the product vectors in its range.
///
/// Returns `Separable` with a `λ = 1` decomposition when the fit succeeds,
/// `PptUndecided` when neither rank condition holds or no fit is found, and
/// `NumericallyIllConditioned` when the fit fails while some roots were only
/// marginally accurate.
pub fn low_rank_separability<T: Real>(rho: &DensityMatrix<T>, opts: &LowRankOptions) -> Result<SeparabilityVerdict<T>> {
    let check = is_ppt(rho, T::lit(opts.tol.psd));
    if !check.ppt {
        return Err(Error::NotPpt { min_eigenvalue: check.min_eigenvalue.to_f64_lossy() });
    }
    if rank_condition(rho, &opts.tol) == RankCondition::None {
        return Ok(SeparabilityVerdict::PptUndecided);
    }
    let (m, n) = rho.dims();
    if rho.rank(T::lit(opts.tol.rank)) == 1 {
        // a PPT pure state is a product; its leading Schmidt pair is the certificate
        let top = rho.eigen().vector(rho.dim() - 1);
        let sd = PureState::normalized(m, n, top)?.schmidt_decomposition();
        let pv = ProductVector::new(sd.left[0].clone(), sd.right[0].clone())?;
        if let Some(d) = fit(rho, &[pv], &opts.tol) {
            return Ok(SeparabilityVerdict::Separable(d));
        }
    }
    let geo = SubtractionGeometry::new(rho.matrix().clone(), m, n, true, &opts.tol);
    let kernel = rho.kernel(T::lit(opts.tol.rank));
    let mut cands = Candidates::new();

    if m == 2 || n == 2 {
        if let Some(found) = pencil_roots(&kernel, m, n, opts.seed) {
            for pv in found {
                let pv = polish(&geo, m, n, pv);
                let res = geo.range_residual(&pv);
                cands.push(pv, res);
            }
        }
        if let Some(d) = fit(rho, &cands.vectors, &opts.tol) {
            return Ok(SeparabilityVerdict::Separable(d));
        }
    }

    for (pv, res) in numeric_zeros(&geo, m, n, opts.restarts, opts.seed) {
        cands.push(pv, res);
    }
    if let Some(d) = fit(rho, &cands.vectors, &opts.tol) {
        return Ok(SeparabilityVerdict::Separable(d));
    }
    if cands.marginal > 0 {
        return Err(Error::NumericallyIllConditioned { residual: cands.worst_marginal.to_f64_lossy() });
    }
    Ok(SeparabilityVerdict::PptUndecided)
}

/// Roots of the kernel pencil with the qubit party parameterised as `(1, α)`.
///
/// Returns `None` when the pencil is singular for every `α` (a continuum of
/// product vectors), which the numeric search handles instead.
fn pencil_roots<T: Real>(kernel: &[Vec<Complex<T>>], m: usize, n: usize, seed: u64) -> Option<Vec<ProductVector<T>>> {
    if kernel.is_empty() {
        return None;
    }
    let qubit_is_alice = m == 2;
    let other = if qubit_is_alice { n } else { m };
    // coefficient of the qubit amplitude q and other-party amplitude j in ⟨k|·⟩
    let entry = |k: &Vec<Complex<T>>, q: usize, j: usize| {
        let idx = if qubit_is_alice { q * n + j } else { j * n + q };
        k[idx].conj()
    };
    let rows = kernel.len();
    if rows < other {
        return None;
    }
    let a0 = CMatrix::from_fn(rows, other, |r, j| entry(&kernel[r], 0, j));
    let a1 = CMatrix::from_fn(rows, other, |r, j| entry(&kernel[r], 1, j));
    let (c0, c1) = if rows > other {
        let mut r = rng::seeded(seed ^ 0x51_7E_C0DE);
        let mix = rng::ginibre::<T, _>(&mut r, other, rows);
        (mix.matmul(&a0), mix.matmul(&a1))
    } else {
        (a0.clone(), a1.clone())
    };

    // det(C₀ + αC₁) sampled on roots of unity, coefficients by inverse DFT
    let deg = other;
    let pts = deg + 1;
    let tau = T::lit(2.0) * T::PI() / T::lit(pts as f64);
    let samples: Vec<Complex<T>> = (0..pts)
        .map(|k| {
            let w = Complex::from_polar(T::one(), tau * T::lit(k as f64));
            determinant(&(&c0 + &c1.scale_c(w)))
        })
        .collect();
    let coeffs: Vec<Complex<T>> = (0..pts)
        .map(|j| {
            let s: Complex<T> = (0..pts)
                .map(|k| samples[k] * Complex::from_polar(T::one(), -tau * T::lit((j * k) as f64)))
                .fold(czero(), |a, b| a + b);
            s / T::lit(pts as f64)
        })
        .collect();
    let scale = coeffs.iter().fold(T::zero(), |a, z| a.max(z.norm()));
    let size = c0.max_abs().max(c1.max_abs()).max(T::epsilon());
    if scale <= T::lit(1e-10) * size.powi(deg as i32) {
        return None;
    }

    let mut alphas: Vec<Option<Complex<T>>> = polynomial_roots(&coeffs, T::lit(1e-12)).into_iter().map(Some).collect();
    alphas.push(None); // α = ∞, i.e. qubit vector (0, 1)
    let found = alphas
        .into_iter()
        .map(|a| {
            let q = match a {
                Some(a) => vec![cone(), a],
                None => vec![czero(), cone()],
            };
            let q = vector::normalized(&q).unwrap_or_else(|| vec![cone(), czero()]);
            let pencil = &a0.scale_c(q[0]) + &a1.scale_c(q[1]);
            let (_, g) = smallest_eigenpair(&pencil.adjoint().matmul(&pencil));
            if qubit_is_alice {
                ProductVector { e: q, f: g }
            } else {
                ProductVector { e: g, f: q }
            }
        })
        .collect();
    Some(found)
}

fn polish<T: Real>(geo: &SubtractionGeometry<T>, m: usize, n: usize, pv: ProductVector<T>) -> ProductVector<T> {
    alternate_to_fixpoint(&geo.kernel, m, n, &pv, 200, T::lit(1e-14)).1
}

/// Zeros of `⟨e,f|Π_K + (Π_{K'})^{T_A}|e,f⟩` from random starts, with their residuals.
fn numeric_zeros<T: Real>(
    geo: &SubtractionGeometry<T>,
    m: usize,
    n: usize,
    restarts: usize,
    seed: u64,
) -> Vec<(ProductVector<T>, T)> {
    let q = geo.range_form();
    (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let start = ProductVector::random(&mut r, m, n);
            let (v, pv) = alternate_from(&q, m, n, &start, 300, T::lit(1e-15));
            let pv = if v < T::lit(1e-5) { alternate_to_fixpoint(&q, m, n, &pv, 3000, T::lit(1e-14)).1 } else { pv };
            let res = geo.range_residual(&pv);
            (pv, res)
        })
        .collect()
}

/// Nonnegative fit of `ρ` by the candidate projectors.
fn fit<T: Real>(rho: &DensityMatrix<T>, cands: &[ProductVector<T>], tol: &Tolerances) -> Option<Decomposition<T>> {
    if cands.is_empty() {
        return None;
    }
    let flatten = |x: &CMatrix<T>| -> Vec<T> {
        let mut out = Vec::with_capacity(2 * x.as_slice().len());
        out.extend(x.as_slice().iter().map(|z| z.re));
        out.extend(x.as_slice().iter().map(|z| z.im));
        out
    };
    let columns: Vec<Vec<T>> = cands.iter().map(|pv| flatten(&pv.projector())).collect();
    let b = flatten(rho.matrix());
    let (x, _) = nnls(&columns, &b, 10 * cands.len() + 20);
    let mut recon = CMatrix::zeros(rho.dim(), rho.dim());
    let mut terms = Vec::new();
    for (w, pv) in x.iter().zip(cands) {
        if *w > T::zero() {
            recon = &recon + &pv.projector().scale(*w);
            terms.push((*w, pv.clone()));
        }
    }
    let residual = (&recon - rho.matrix()).frobenius_norm();
    if residual > T::lit(tol.reconstruction) {
        return None;
    }
    let total: T = terms.iter().map(|(w, _)| *w).sum();
    let steps: Vec<T> = terms.iter().map(|(w, _)| *w).collect();
    Some(Decomposition {
        lambda: T::one(),
        separable_part: terms.into_iter().map(|(w, pv)| (w / total, pv)).collect(),
        edge_part: None,
        steps,
        budget_exhausted: false,
        input_not_ppt: false,
    })
}

/// Exchanges the parties of an operator on `C^m ⊗ C^n`.
pub fn swap_parties<T: Real>(x: &CMatrix<T>, m: usize, n: usize) -> CMatrix<T> {
    CMatrix::from_fn(m * n, m * n, |r, col| {
        let (k, i) = (r / m, r % m);
        let (l, j) = (col / m, col % m);
        x[(i * n + k, j * n + l)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::random_separable;

    fn assert_recovers(m: usize, n: usize, terms: usize, seed: u64) {
        let mut r = rng::seeded(seed);
        let (rho, _) = random_separable::<f64, _>(&mut r, m, n, terms);
        match low_rank_separability(&rho, &LowRankOptions::default()).unwrap() {
            SeparabilityVerdict::Separable(d) => {
                assert!((&d.reconstruct() - rho.matrix()).frobenius_norm() < 1e-8);
            }
            other => panic!("{m}x{n} with {terms} terms: {}", other.label()),
        }
    }

    #[test]
    fn recovers_2xn_mixtures() {
        assert_recovers(2, 3, 3, 1);
        assert_recovers(2, 4, 4, 2);
        assert_recovers(2, 3, 2, 3);
        assert_recovers(3, 2, 3, 4);
    }

    #[test]
    fn recovers_3x3_rank_three() {
        assert_recovers(3, 3, 3, 5);
    }

    #[test]
    fn full_rank_3x3_is_undecided() {
        let rho = DensityMatrix::<f64>::maximally_mixed(3, 3);
        assert!(matches!(
            low_rank_separability(&rho, &LowRankOptions::default()).unwrap(),
            SeparabilityVerdict::PptUndecided
        ));
    }

    #[test]
    fn swap_parties_is_involutive() {
        let mut r = rng::seeded(6);
        let x = rng::ginibre::<f64, _>(&mut r, 6, 6);
        assert_eq!(swap_parties(&swap_parties(&x, 2, 3), 3, 2), x);
    }
}
