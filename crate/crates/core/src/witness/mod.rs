//! Entanglement witnesses: construction, search-certified product floor,
//! subtraction-based optimisation, local pseudo-mixtures and decomposability.
//!
//! Witnesses are stored unnormalised, exactly as constructed, so that the
//! detected values keep their natural scale (`tr(Wδ) = −ε` for the canonical
//! edge witness). [`local_decomposition`] normalises to unit trace itself.

mod decomposable;
mod optimize;
mod pseudo;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::product_search::{minimize_product_expectation, ProductMinimum, SearchOptions};
use crate::scalar::Real;
use crate::separability::{is_ppt, partial_transpose_matrix};
use crate::state::{DensityMatrix, PureState, Side};

pub use decomposable::{is_decomposable, Decomposability};
pub use optimize::{optimize_witness, OptimizeOptions, OptimizedWitness};
pub use pseudo::{local_decomposition, local_frame, PseudoMixture, PseudoTerm};

/// Witness values at or below this count as detection.
pub const DETECTION_TOL: f64 = 1e-9;
/// Product floors at or above this count as a valid witness.
pub const FLOOR_TOL: f64 = 1e-7;
/// Safety factor applied to the canonical-witness shift.
pub const EPSILON_SAFETY: f64 = 0.99;

/// Hermitian operator with nonnegative product expectations (checked by search).
#[derive(Clone, Debug)]
pub struct Witness<T: Real = f64> {
    pub operator: CMatrix<T>,
    pub m: usize,
    pub n: usize,
    /// Smallest `⟨e,f|W|e,f⟩` found by the search (an upper bound on the true minimum).
    pub sep_floor: T,
    /// Restarts behind `sep_floor`.
    pub search_restarts: usize,
    /// `tr(Wρ)` for the state the witness was built for.
    pub detected_value: Option<T>,
}

impl<T: Real> Witness<T> {
    /// Wraps an operator and certifies its product floor by search.
    pub fn from_operator(operator: CMatrix<T>, m: usize, n: usize, restarts: usize, seed: u64) -> Result<Self> {
        if operator.rows() != m * n || !operator.is_square() {
            return Err(Error::Shape(format!("witness must be {0}x{0}", m * n)));
        }
        let defect = operator.hermiticity_defect();
        if defect > T::lit(1e-10) {
            return Err(Error::NonHermitian { defect: defect.to_f64_lossy(), tol: 1e-10 });
        }
        let operator = operator.hermitian_part();
        let floor = min_product_expectation(&operator, m, n, restarts, seed);
        Ok(Self { operator, m, n, sep_floor: floor.value, search_restarts: floor.restarts, detected_value: None })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    /// `tr(Wρ)`.
    pub fn value_on(&self, rho: &DensityMatrix<T>) -> T {
        rho.expectation(&self.operator)
    }

    pub fn detects(&self, rho: &DensityMatrix<T>) -> bool {
        self.value_on(rho) < -T::lit(DETECTION_TOL)
    }

    pub fn is_valid(&self) -> bool {
        self.sep_floor >= -T::lit(FLOOR_TOL)
    }

    pub fn trace(&self) -> T {
        self.operator.trace().re
    }

    fn with_target(mut self, target: &DensityMatrix<T>) -> Self {
        self.detected_value = Some(self.value_on(target));
        self
    }
}

/// Multi-start alternating search for `min ⟨e,f|W|e,f⟩`.
pub fn min_product_expectation<T: Real>(w: &CMatrix<T>, m: usize, n: usize, restarts: usize, seed: u64) -> ProductMinimum<T> {
    let opts = SearchOptions { restarts, seed, ..SearchOptions::default() };
    minimize_product_expectation(w, m, n, &opts)
}

/// `W = α·1 − |ψ⟩⟨ψ|` with `α` the largest squared Schmidt coefficient of `ψ`.
pub fn projector_witness<T: Real>(psi: &PureState<T>, restarts: usize, seed: u64) -> Result<Witness<T>> {
    let (m, n) = psi.dims();
    let sd = psi.schmidt_decomposition();
    if sd.rank(T::lit(1e-9)) < 2 {
        return Err(Error::ProductStateInput);
    }
    let alpha = sd.coefficients[0] * sd.coefficients[0];
    let op = &CMatrix::identity(m * n).scale(alpha) - &CMatrix::projector(psi.amplitudes());
    let target = DensityMatrix::from_pure(psi);
    Ok(Witness::from_operator(op, m, n, restarts, seed)?.with_target(&target))
}

/// `W = |v⟩⟨v|^{T_A}` for the eigenvector `v` of the most negative eigenvalue
/// of `ρ^{T_A}`; detects every NPPT state and is decomposable by construction.
pub fn npt_witness<T: Real>(rho: &DensityMatrix<T>, restarts: usize, seed: u64) -> Result<Witness<T>> {
    let check = is_ppt(rho, T::lit(DETECTION_TOL));
    if check.ppt {
        return Err(Error::NonDetecting { value: check.min_eigenvalue.to_f64_lossy() });
    }
    let (m, n) = rho.dims();
    let op = partial_transpose_matrix(&CMatrix::projector(&check.eigenvector), m, n, Side::A);
    Ok(Witness::from_operator(op, m, n, restarts, seed)?.with_target(rho))
}

/// Canonical witness `W = P + Q^{T_A} − ε·1` of an edge state `δ`.
///
/// `P` and `Q` project onto the kernels of `δ` and `δ^{T_A}`, and `ε` is the
/// product minimum of `P + Q^{T_A}` shrunk by [`EPSILON_SAFETY`]. Fails with
/// `EdgePreconditionFailed` if `δ` is NPPT, has no kernel, or the search finds
/// a product vector on which `P + Q^{T_A}` vanishes; with `NonDetecting` if
/// `tr(W·target) ≥ 0`.
pub fn canonical_edge_witness<T: Real>(
    delta: &DensityMatrix<T>,
    target: &DensityMatrix<T>,
    restarts: usize,
    seed: u64,
) -> Result<Witness<T>> {
    let (m, n) = delta.dims();
    if target.dims() != (m, n) {
        return Err(Error::Shape("target dimensions differ from the edge state".into()));
    }
    let check = is_ppt(delta, T::lit(1e-9));
    if !check.ppt {
        return Err(Error::EdgePreconditionFailed(format!(
            "state is not PPT (min eigenvalue {:.3e})",
            check.min_eigenvalue.to_f64_lossy()
        )));
    }
    let rank_tol = T::lit(1e-9);
    let p = delta.eigen().kernel_projector(rank_tol);
    let q = crate::linalg::eigh(&delta.partial_transpose(Side::A)).kernel_projector(rank_tol);
    if p.max_abs() == T::zero() && q.max_abs() == T::zero() {
        return Err(Error::EdgePreconditionFailed("state and its partial transpose have full rank".into()));
    }
    let b = &p + &partial_transpose_matrix(&q, m, n, Side::A);
    let found = min_product_expectation(&b, m, n, restarts, seed);
    if found.value <= T::lit(DETECTION_TOL) {
        return Err(Error::EdgePreconditionFailed(format!(
            "a product vector satisfies both range conditions (form value {:.3e})",
            found.value.to_f64_lossy()
        )));
    }
    let eps = found.value * T::lit(EPSILON_SAFETY);
    let op = &b - &CMatrix::identity(m * n).scale(eps);
    let w = Witness {
        operator: op,
        m,
        n,
        sep_floor: found.value - eps,
        search_restarts: found.restarts,
        detected_value: None,
    }
    .with_target(target);
    let value = w.detected_value.unwrap_or(T::zero());
    if value >= -T::lit(DETECTION_TOL) {
        return Err(Error::NonDetecting { value: value.to_f64_lossy() });
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::state::{maximally_entangled, swap_operator, werner_2x2};

    #[test]
    fn identity_floor_is_one() {
        let w = Witness::<f64>::from_operator(CMatrix::identity(4), 2, 2, 8, 0).unwrap();
        assert!((w.sep_floor - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swap_floor_matches_grid() {
        let f = swap_operator::<f64>(2);
        let found = min_product_expectation(&f, 2, 2, 16, 1).value;
        // ⟨e,f|F|e,f⟩ = |⟨e|f⟩|², minimum 0 on orthogonal pairs
        assert!(found.abs() < 1e-6);
    }

    #[test]
    fn projector_witness_detects_its_state() {
        let psi = maximally_entangled::<f64>(2);
        let w = projector_witness(&psi, 16, 0).unwrap();
        assert!((w.detected_value.unwrap() + 0.5).abs() < 1e-12);
        assert!(w.is_valid());
        assert!(w.sep_floor.abs() < 1e-9);
    }

    #[test]
    fn projector_witness_rejects_products() {
        let mut r = rng::seeded(3);
        let pv = crate::state::ProductVector::<f64>::random(&mut r, 2, 2);
        let psi = PureState::new(2, 2, pv.ket()).unwrap();
        assert!(matches!(projector_witness(&psi, 4, 0), Err(Error::ProductStateInput)));
    }

    #[test]
    fn npt_witness_detects() {
        let rho = werner_2x2::<f64>(0.6);
        let w = npt_witness(&rho, 16, 0).unwrap();
        assert!((w.detected_value.unwrap() - (1.0 - 1.8) / 4.0).abs() < 1e-12);
        assert!(w.is_valid());
    }
}
