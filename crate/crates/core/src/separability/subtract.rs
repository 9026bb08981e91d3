//! Subtraction of product projectors from a (PPT) state.

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, HermitianEigen};
use crate::scalar::Real;
use crate::state::{DensityMatrix, ProductVector, Side};

use super::transpose::partial_transpose_matrix;
use super::Tolerances;

/// Spectral data of an (unnormalised) remainder needed to evaluate subtractable weights.
///
/// All forms are expressed on `|e,f⟩`: the PPT-side forms are partially
/// transposed so that `⟨e,f|X^{T_A}|e,f⟩ = ⟨e*,f|X|e*,f⟩`.
#[derive(Clone, Debug)]
pub(crate) struct SubtractionGeometry<T: Real> {
    pub m: usize,
    pub n: usize,
    pub matrix: CMatrix<T>,
    pub eig: HermitianEigen<T>,
    pub inverse: CMatrix<T>,
    pub kernel: CMatrix<T>,
    pub ppt: Option<PptSide<T>>,
    pub psd_tol: T,
}

#[derive(Clone, Debug)]
pub(crate) struct PptSide<T: Real> {
    pub pt: CMatrix<T>,
    pub inverse_t: CMatrix<T>,
    pub kernel_t: CMatrix<T>,
}

impl<T: Real> SubtractionGeometry<T> {
    pub fn new(matrix: CMatrix<T>, m: usize, n: usize, ppt_constrained: bool, tol: &Tolerances) -> Self {
        let rank_tol = T::lit(tol.rank);
        let eig = eigh(&matrix);
        let inverse = eig.pseudo_inverse(rank_tol);
        let kernel = eig.kernel_projector(rank_tol);
        let ppt = ppt_constrained.then(|| {
            let pt = partial_transpose_matrix(&matrix, m, n, Side::A);
            let e2 = eigh(&pt);
            PptSide {
                inverse_t: partial_transpose_matrix(&e2.pseudo_inverse(rank_tol), m, n, Side::A),
                kernel_t: partial_transpose_matrix(&e2.kernel_projector(rank_tol), m, n, Side::A),
                pt,
            }
        });
        Self { m, n, matrix, eig, inverse, kernel, ppt, psd_tol: T::lit(tol.psd) }
    }

    /// `⟨v|Π_K|v⟩ + ⟨v*|Π_{K'}|v*⟩`, the squared distance from the admissible ranges.
    pub fn range_form(&self) -> CMatrix<T> {
        match &self.ppt {
            Some(p) => &self.kernel + &p.kernel_t,
            None => self.kernel.clone(),
        }
    }

    pub fn inverse_form(&self) -> CMatrix<T> {
        match &self.ppt {
            Some(p) => &self.inverse + &p.inverse_t,
            None => self.inverse.clone(),
        }
    }

    pub fn range_residual(&self, pv: &ProductVector<T>) -> T {
        self.range_form().expectation(&pv.ket()).max(T::zero()).sqrt()
    }

    /// Closed-form largest weight, `min(1/⟨v|R⁺|v⟩, 1/⟨v*|(R^{T_A})⁺|v*⟩)`.
    pub fn lambda_formula(&self, pv: &ProductVector<T>) -> T {
        let ket = pv.ket();
        let a = self.inverse.expectation(&ket);
        let mut lam = if a > T::zero() { T::one() / a } else { T::zero() };
        if let Some(p) = &self.ppt {
            let b = p.inverse_t.expectation(&ket);
            lam = lam.min(if b > T::zero() { T::one() / b } else { T::zero() });
        }
        lam
    }

    /// Smallest eigenvalue of the remainder (and of its partial transpose when constrained).
    pub fn min_after(&self, lambda: T, pv: &ProductVector<T>) -> T {
        let p = pv.projector().scale(lambda);
        let mut min = eigh(&(&self.matrix - &p)).min();
        if let Some(side) = &self.ppt {
            let q = pv.conj_alice().projector().scale(lambda);
            min = min.min(eigh(&(&side.pt - &q)).min());
        }
        min
    }

    /// Closed-form weight, backed off by bisection until the remainder is PSD within tolerance.
    pub fn certified_lambda(&self, pv: &ProductVector<T>) -> T {
        let lam = self.lambda_formula(pv);
        if lam <= T::zero() {
            return T::zero();
        }
        let floor = -self.psd_tol * T::lit(0.1);
        if self.min_after(lam, pv) >= floor {
            return lam;
        }
        let (mut lo, mut hi) = (T::zero(), lam);
        for _ in 0..60 {
            let mid = (lo + hi) * T::lit(0.5);
            if self.min_after(mid, pv) >= floor {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// What is left after subtracting the maximal weight.
#[derive(Clone, Debug)]
pub enum Remainder<T: Real = f64> {
    /// `(ρ − λ|e,f⟩⟨e,f|)/(1 − λ)`.
    State(DensityMatrix<T>),
    /// Nothing is left (λ = 1).
    Degenerate,
}

#[derive(Clone, Debug)]
pub struct Subtraction<T: Real = f64> {
    pub lambda_max: T,
    pub remainder: Remainder<T>,
}

/// Largest `λ` with `ρ − λ|e,f⟩⟨e,f| ≥ 0` (and, if `ppt_constrained`,
/// `ρ^{T_A} − λ|e*,f⟩⟨e*,f| ≥ 0`), using the pseudo-inverse on the range.
pub fn max_subtractable_weight<T: Real>(
    rho: &DensityMatrix<T>,
    pv: &ProductVector<T>,
    ppt_constrained: bool,
    tol: &Tolerances,
) -> Result<Subtraction<T>> {
    let (m, n) = rho.dims();
    if pv.e.len() != m || pv.f.len() != n {
        return Err(Error::Shape("product vector does not match state dimensions".into()));
    }
    let geo = SubtractionGeometry::new(rho.matrix().clone(), m, n, ppt_constrained, tol);
    let residual = geo.range_residual(pv);
    if residual > T::lit(tol.range) {
        return Err(Error::NotInRange { residual: residual.to_f64_lossy() });
    }
    let lambda_max = geo.certified_lambda(pv);
    let rest = T::one() - lambda_max;
    let remainder = if rest <= T::lit(1e-12) {
        Remainder::Degenerate
    } else {
        let diff = rho.matrix() - &pv.projector().scale(lambda_max);
        Remainder::State(DensityMatrix::from_trusted(m, n, diff))
    };
    Ok(Subtraction { lambda_max, remainder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::state::{maximally_entangled, random_state};

    #[test]
    fn product_state_subtracts_fully() {
        let mut r = rng::seeded(7);
        let pv = ProductVector::<f64>::random(&mut r, 2, 3);
        let rho = DensityMatrix::from_product(&pv);
        for ppt in [false, true] {
            let s = max_subtractable_weight(&rho, &pv, ppt, &Tolerances::default()).unwrap();
            assert!((s.lambda_max - 1.0).abs() < 1e-10);
            assert!(matches!(s.remainder, Remainder::Degenerate));
        }
    }

    #[test]
    fn pure_entangled_state_has_no_range_products() {
        let rho = DensityMatrix::from_pure(&maximally_entangled::<f64>(2));
        let mut r = rng::seeded(8);
        for _ in 0..10 {
            let pv = ProductVector::random(&mut r, 2, 2);
            assert!(matches!(
                max_subtractable_weight(&rho, &pv, false, &Tolerances::default()),
                Err(Error::NotInRange { .. })
            ));
        }
    }

    #[test]
    fn remainder_stays_psd() {
        let mut r = rng::seeded(9);
        for _ in 0..20 {
            let rho = random_state::<f64, _>(&mut r, 2, 3, 6);
            let pv = ProductVector::random(&mut r, 2, 3);
            let s = max_subtractable_weight(&rho, &pv, false, &Tolerances::default()).unwrap();
            let diff = rho.matrix() - &pv.projector().scale(s.lambda_max);
            assert!(eigh(&diff).min() >= -1e-9);
        }
    }
}
