//! Bipartite density matrices, pure states, product vectors and the named state families.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{eigh, svd, vector, CMatrix, HermitianEigen};
use crate::rng;
use crate::scalar::{cr, czero, Real};
use crate::separability::transpose::partial_transpose_matrix;

/// Hermiticity tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = 1e-9;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Allowed deviation of a vector norm from one.
pub const NORM_TOL: f64 = 1e-12;

/// Which party a partial operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Hermitian, positive semi-definite, unit-trace operator on `C^M ⊗ C^N`.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T: Real = f64> {
    m: usize,
    n: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates and wraps `matrix` (size `MN × MN`, Alice-major indexing).
    pub fn new(m: usize, n: usize, matrix: CMatrix<T>) -> Result<Self> {
        check_dims(m, n, &matrix)?;
        let defect = matrix.hermiticity_defect();
        if defect > T::lit(HERMITIAN_TOL) {
            return Err(Error::InvariantViolation(format!(
                "matrix is not Hermitian (max |A[i,j] - conj(A[j,i])| = {:.3e})",
                defect.to_f64_lossy()
            )));
        }
        let tr = matrix.trace().re;
        if (tr - T::one()).abs() > T::lit(TRACE_TOL) {
            return Err(Error::InvariantViolation(format!("trace is {} instead of 1", tr.to_f64_lossy())));
        }
        let matrix = matrix.hermitian_part();
        let min = eigh(&matrix).min();
        if min < -T::lit(PSD_TOL) {
            return Err(Error::InvariantViolation(format!(
                "matrix is not positive semi-definite (min eigenvalue {:.3e})",
                min.to_f64_lossy()
            )));
        }
        Ok(Self { m, n, matrix })
    }

    /// Divides by the trace, then validates.
    pub fn from_unnormalized(m: usize, n: usize, matrix: CMatrix<T>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.abs() <= T::epsilon() {
            return Err(Error::InvariantViolation("matrix has zero trace".into()));
        }
        Self::new(m, n, matrix.scale(T::one() / tr))
    }

    /// Wraps a matrix that is known to be a state up to rounding; only the
    /// Hermitian part is kept and the trace renormalised.
    pub(crate) fn from_trusted(m: usize, n: usize, matrix: CMatrix<T>) -> Self {
        let tr = matrix.trace().re;
        Self { m, n, matrix: matrix.hermitian_part().scale(T::one() / tr) }
    }

    pub fn maximally_mixed(m: usize, n: usize) -> Self {
        let d = m * n;
        Self { m, n, matrix: CMatrix::identity(d).scale(T::one() / T::lit(d as f64)) }
    }

    pub fn from_pure(psi: &PureState<T>) -> Self {
        Self { m: psi.m, n: psi.n, matrix: CMatrix::projector(&psi.amplitudes) }
    }

    pub fn from_product(pv: &ProductVector<T>) -> Self {
        Self { m: pv.e.len(), n: pv.f.len(), matrix: CMatrix::projector(&pv.ket()) }
    }

    /// `Σ w_i |e_i,f_i⟩⟨e_i,f_i|` with weights renormalised to sum to one.
    pub fn from_product_mixture(m: usize, n: usize, terms: &[(T, ProductVector<T>)]) -> Result<Self> {
        let mut acc = CMatrix::zeros(m * n, m * n);
        for (w, pv) in terms {
            if pv.e.len() != m || pv.f.len() != n {
                return Err(Error::Shape("product vector dimensions do not match".into()));
            }
            acc = &acc + &CMatrix::projector(&pv.ket()).scale(*w);
        }
        Self::from_unnormalized(m, n, acc)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn eigen(&self) -> HermitianEigen<T> {
        eigh(&self.matrix)
    }

    /// `r(ρ) = MN − dim K(ρ)`.
    pub fn rank(&self, rank_tol: T) -> usize {
        self.eigen().rank(rank_tol)
    }

    /// Orthonormal basis of the kernel `K(ρ)`.
    pub fn kernel(&self, rank_tol: T) -> Vec<Vec<Complex<T>>> {
        self.eigen().kernel(rank_tol)
    }

    pub fn partial_transpose(&self, side: Side) -> CMatrix<T> {
        partial_transpose_matrix(&self.matrix, self.m, self.n, side)
    }

    /// Whether `|e,f⟩` is orthogonal (to within `tol`) to every kernel vector.
    pub fn range_contains_product(&self, pv: &ProductVector<T>, tol: T) -> bool {
        range_residual(&self.eigen(), &pv.ket(), T::lit(crate::linalg::DEFAULT_RANK_TOL)) <= tol
    }

    /// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`.
    pub fn apply_local_unitaries(&self, ua: &CMatrix<T>, ub: &CMatrix<T>) -> Self {
        let u = ua.kron(ub);
        Self { m: self.m, n: self.n, matrix: u.matmul(&self.matrix).matmul(&u.adjoint()).hermitian_part() }
    }

    /// Convex combination `p·self + (1−p)·other`.
    pub fn mix(&self, other: &Self, p: T) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(Error::Shape("cannot mix states of different dimensions".into()));
        }
        let m = &self.matrix.scale(p) + &other.matrix.scale(T::one() - p);
        Ok(Self::from_trusted(self.m, self.n, m))
    }

    /// `tr(Aρ)`.
    pub fn expectation(&self, op: &CMatrix<T>) -> T {
        op.trace_product(&self.matrix).re
    }
}

fn check_dims<T: Real>(m: usize, n: usize, matrix: &CMatrix<T>) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(Error::InvariantViolation(format!("party dimensions must be at least 2, got {m}x{n}")));
    }
    if matrix.rows() != m * n || matrix.cols() != m * n {
        return Err(Error::InvariantViolation(format!(
            "matrix is {}x{} but dims {m}x{n} require {}x{}",
            matrix.rows(),
            matrix.cols(),
            m * n,
            m * n
        )));
    }
    Ok(())
}

/// Norm of the component of `v` lying in the kernel described by `eig`.
pub fn range_residual<T: Real>(eig: &HermitianEigen<T>, v: &[Complex<T>], rank_tol: T) -> T {
    eig.kernel(rank_tol).iter().map(|k| vector::inner(k, v).norm_sqr()).sum::<T>().sqrt()
}

/// `|e⟩ ⊗ |f⟩` with unit-norm factors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductVector<T: Real = f64> {
    pub e: Vec<Complex<T>>,
    pub f: Vec<Complex<T>>,
}

impl<T: Real> ProductVector<T> {
    /// Normalises both factors; fails on a zero factor.
    pub fn new(e: Vec<Complex<T>>, f: Vec<Complex<T>>) -> Result<Self> {
        let e = vector::normalized(&e).ok_or_else(|| Error::InvariantViolation("zero Alice factor".into()))?;
        let f = vector::normalized(&f).ok_or_else(|| Error::InvariantViolation("zero Bob factor".into()))?;
        Ok(Self { e, f })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Self {
        Self { e: rng::unit_vector(rng, m), f: rng::unit_vector(rng, n) }
    }

    pub fn ket(&self) -> Vec<Complex<T>> {
        vector::kron(&self.e, &self.f)
    }

    /// `|e*,f⟩`, the partner vector in the range of `ρ^{T_A}`.
    pub fn conj_alice(&self) -> Self {
        Self { e: vector::conj(&self.e), f: self.f.clone() }
    }

    pub fn projector(&self) -> CMatrix<T> {
        CMatrix::projector(&self.ket())
    }
}

/// Unit vector in `C^M ⊗ C^N`.
#[derive(Clone, Debug)]
pub struct PureState<T: Real = f64> {
    m: usize,
    n: usize,
    amplitudes: Vec<Complex<T>>,
}

/// `ψ = Σ_k c_k |u_k⟩|v_k⟩`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition<T: Real = f64> {
    /// Nonnegative, descending.
    pub coefficients: Vec<T>,
    pub left: Vec<Vec<Complex<T>>>,
    pub right: Vec<Vec<Complex<T>>>,
}

impl<T: Real> SchmidtDecomposition<T> {
    pub fn rank(&self, rank_tol: T) -> usize {
        self.coefficients.iter().filter(|&&c| c > rank_tol).count()
    }

    pub fn reconstruct(&self) -> Vec<Complex<T>> {
        let mut out = vec![czero(); self.left[0].len() * self.right[0].len()];
        for ((c, u), v) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for (o, x) in out.iter_mut().zip(vector::kron(u, v)) {
                *o = *o + x * *c;
            }
        }
        out
    }
}

impl<T: Real> PureState<T> {
    pub fn new(m: usize, n: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != m * n {
            return Err(Error::Shape(format!("{} amplitudes for dims {m}x{n}", amplitudes.len())));
        }
        let nrm = vector::norm(&amplitudes);
        if (nrm - T::one()).abs() > T::lit(NORM_TOL) {
            return Err(Error::InvariantViolation(format!("state norm is {}", nrm.to_f64_lossy())));
        }
        Ok(Self { m, n, amplitudes })
    }

    pub fn normalized(m: usize, n: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let v = vector::normalized(&amplitudes).ok_or_else(|| Error::InvariantViolation("zero vector".into()))?;
        Self::new(m, n, v)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Self {
        Self { m, n, amplitudes: rng::unit_vector(rng, m * n) }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// Coefficients are the singular values of the `M × N` reshaping.
    pub fn schmidt_decomposition(&self) -> SchmidtDecomposition<T> {
        let c = CMatrix::from_vec(self.m, self.n, self.amplitudes.clone());
        let d = svd(&c);
        let k = d.s.len();
        SchmidtDecomposition {
            coefficients: d.s.clone(),
            left: (0..k).map(|j| d.u.column(j)).collect(),
            right: (0..k).map(|j| vector::conj(&d.v.column(j))).collect(),
        }
    }

    pub fn schmidt_rank(&self, rank_tol: T) -> usize {
        self.schmidt_decomposition().rank(rank_tol)
    }

    pub fn apply_local_unitaries(&self, ua: &CMatrix<T>, ub: &CMatrix<T>) -> Self {
        Self { m: self.m, n: self.n, amplitudes: ua.kron(ub).mul_vec(&self.amplitudes) }
    }
}

/// `(1/√M) Σ_i |i,i⟩`.
pub fn maximally_entangled<T: Real>(m: usize) -> PureState<T> {
    let a = T::one() / T::lit(m as f64).sqrt();
    let mut amps = vec![czero(); m * m];
    for i in 0..m {
        amps[i * m + i] = cr(a);
    }
    PureState { m, n: m, amplitudes: amps }
}

/// The swap operator `F|i,j⟩ = |j,i⟩` on `C^d ⊗ C^d`.
pub fn swap_operator<T: Real>(d: usize) -> CMatrix<T> {
    let mut f = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = cr(T::one());
        }
    }
    f
}

/// Projectors `(P_sym, P_anti) = ((1 ± F)/2)` on `C^d ⊗ C^d`.
pub fn symmetric_projectors<T: Real>(d: usize) -> (CMatrix<T>, CMatrix<T>) {
    let id = CMatrix::identity(d * d);
    let f = swap_operator::<T>(d);
    let half = T::lit(0.5);
    ((&id + &f).scale(half), (&id - &f).scale(half))
}

/// `λ·P_anti/tr P_anti + (1−λ)·P_sym/tr P_sym`.
pub fn sym_antisym_family<T: Real>(d: usize, lambda: T) -> DensityMatrix<T> {
    let (ps, pa) = symmetric_projectors::<T>(d);
    let ds = T::lit((d * (d + 1) / 2) as f64);
    let da = T::lit((d * (d - 1) / 2) as f64);
    let m = &pa.scale(lambda / da) + &ps.scale((T::one() - lambda) / ds);
    DensityMatrix::from_trusted(d, d, m)
}

/// Two-qubit Werner state `p|Ψ⁻⟩⟨Ψ⁻| + (1−p)·1/4`.
pub fn werner_2x2<T: Real>(p: T) -> DensityMatrix<T> {
    let s = T::one() / T::lit(2.0).sqrt();
    let singlet = vec![czero(), cr(s), cr(-s), czero()];
    let m = &CMatrix::projector(&singlet).scale(p) + &CMatrix::identity(4).scale((T::one() - p) / T::lit(4.0));
    DensityMatrix::from_trusted(2, 2, m)
}

/// Names of the generated state families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    MaximallyEntangled,
    Werner2x2,
    SymAntisym,
    /// Ginibre-random state of a chosen rank.
    Random,
    /// Random mixture of product projectors; always PPT.
    RandomSeparable,
}

impl Family {
    pub const NAMES: [&'static str; 5] = ["maximally_entangled", "werner_2x2", "sym_antisym", "random", "random_separable"];

    pub fn name(self) -> &'static str {
        match self {
            Self::MaximallyEntangled => Self::NAMES[0],
            Self::Werner2x2 => Self::NAMES[1],
            Self::SymAntisym => Self::NAMES[2],
            Self::Random => Self::NAMES[3],
            Self::RandomSeparable => Self::NAMES[4],
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maximally_entangled" => Ok(Self::MaximallyEntangled),
            "werner_2x2" | "werner" => Ok(Self::Werner2x2),
            "sym_antisym" => Ok(Self::SymAntisym),
            "random" => Ok(Self::Random),
            "random_separable" => Ok(Self::RandomSeparable),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// Isotropic state `F|Ψ_max⟩⟨Ψ_max| + (1−F)(1 − |Ψ_max⟩⟨Ψ_max|)/(d²−1)`; a test-only extra.
pub fn isotropic<T: Real>(d: usize, fidelity: T) -> DensityMatrix<T> {
    let p = CMatrix::projector(maximally_entangled::<T>(d).amplitudes());
    let rest = &CMatrix::identity(d * d) - &p;
    let m = &p.scale(fidelity) + &rest.scale((T::one() - fidelity) / T::lit((d * d - 1) as f64));
    DensityMatrix::from_trusted(d, d, m)
}

/// Random state `G·G†/tr` with `G` an `MN × rank` Ginibre matrix.
pub fn random_state<T: Real, R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, rank: usize) -> DensityMatrix<T> {
    let g = rng::ginibre::<T, R>(rng, m * n, rank.max(1));
    DensityMatrix::from_trusted(m, n, g.matmul(&g.adjoint()))
}

/// Random mixture of `terms` product projectors, returned with its decomposition.
pub fn random_separable<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    terms: usize,
) -> (DensityMatrix<T>, Vec<(T, ProductVector<T>)>) {
    let mut weights: Vec<T> = (0..terms).map(|_| T::lit(rng.gen_range(0.05..1.0))).collect();
    let total: T = weights.iter().copied().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let decomposition: Vec<(T, ProductVector<T>)> =
        weights.into_iter().map(|w| (w, ProductVector::random(rng, m, n))).collect();
    let mut acc = CMatrix::zeros(m * n, m * n);
    for (w, pv) in &decomposition {
        acc = &acc + &pv.projector().scale(*w);
    }
    (DensityMatrix::from_trusted(m, n, acc), decomposition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn maximally_entangled_qubits() {
        let psi = maximally_entangled::<f64>(2);
        let s = 1.0 / 2f64.sqrt();
        assert_eq!(psi.amplitudes(), &[c(s, 0.0), czero(), czero(), c(s, 0.0)]);
        assert_eq!(psi.schmidt_rank(1e-9), 2);
    }

    #[test]
    fn maximally_entangled_qutrit_schmidt_coefficients() {
        let sd = maximally_entangled::<f64>(3).schmidt_decomposition();
        for c in &sd.coefficients {
            assert!((c - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn product_state_has_one_schmidt_coefficient() {
        let mut r = rng::seeded(3);
        let pv = ProductVector::<f64>::random(&mut r, 2, 3);
        let psi = PureState::new(2, 3, pv.ket()).unwrap();
        let sd = psi.schmidt_decomposition();
        assert!((sd.coefficients[0] - 1.0).abs() < 1e-13);
        assert_eq!(sd.rank(1e-9), 1);
    }

    #[test]
    fn rejects_bad_matrices() {
        let mut m = CMatrix::<f64>::identity(4).scale(0.25);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(2, 2, m), Err(Error::InvariantViolation(_))));
        let neg = CMatrix::from_real_diagonal(&[0.5, 0.6, 0.1, -0.2]);
        assert!(DensityMatrix::new(2, 2, neg).is_err());
        assert!(DensityMatrix::new(2, 2, CMatrix::<f64>::identity(4)).is_err());
        assert!(DensityMatrix::new(2, 3, CMatrix::<f64>::identity(4).scale(0.25)).is_err());
    }

    #[test]
    fn range_membership() {
        let mut r = rng::seeded(5);
        let pv = ProductVector::<f64>::random(&mut r, 2, 2);
        let rho = DensityMatrix::from_product(&pv);
        assert!(rho.range_contains_product(&pv, 1e-10));
        let full = DensityMatrix::<f64>::maximally_mixed(2, 2);
        assert!(full.range_contains_product(&ProductVector::random(&mut r, 2, 2), 1e-10));
        let e_perp = vec![-pv.e[1].conj(), pv.e[0].conj()];
        let orth = ProductVector::new(e_perp, pv.f.clone()).unwrap();
        assert!(!rho.range_contains_product(&orth, 1e-6));
    }

    #[test]
    fn families_are_states() {
        for p in [0.0, 0.3, 1.0] {
            let w = werner_2x2::<f64>(p);
            assert!(DensityMatrix::new(2, 2, w.matrix().clone()).is_ok());
        }
        for d in 2..5 {
            for lam in [0.0, 0.5, 1.0] {
                let s = sym_antisym_family::<f64>(d, lam);
                assert!(DensityMatrix::new(d, d, s.matrix().clone()).is_ok());
            }
        }
        let iso = isotropic::<f64>(3, 0.6);
        assert!(DensityMatrix::new(3, 3, iso.matrix().clone()).is_ok());
    }

    #[test]
    fn sym_antisym_maximally_mixed_point() {
        for d in 2..5usize {
            let lam = (d as f64 - 1.0) / (2.0 * d as f64);
            let s = sym_antisym_family::<f64>(d, lam);
            let mm = DensityMatrix::<f64>::maximally_mixed(d, d);
            assert!((s.matrix() - mm.matrix()).max_abs() < 1e-14);
        }
    }

    #[test]
    fn family_names_round_trip() {
        for name in Family::NAMES {
            assert_eq!(name.parse::<Family>().unwrap().name(), name);
        }
        assert!(matches!("ghz".parse::<Family>(), Err(Error::UnknownFamily(_))));
    }
}
