//! Two identical fermions or bosons.
//!
//! A fermionic state `|w⟩ = Σ_ij w_ij f†_i f†_j |Ω⟩` is an antisymmetric
//! coefficient matrix with `Σ|w_ij|² = 1/2`; its Slater normal form is the
//! block diagonalisation `w = U·J(z)·Uᵀ` with `Σ z_k² = 1/4`. For four modes
//! the concurrence is `|8·Pf(w)| = |⟨w̃|w⟩|`, which is 0 exactly on single
//! Slater determinants and 1 for `z₁ = z₂`. Bosons use symmetric `v` and the
//! Takagi factorisation instead.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::youla::{antisymmetry_defect, symmetry_defect};
use crate::linalg::{antisymmetric_block_diagonalize, eigh, takagi, BlockDiagonalForm, CMatrix, TakagiForm};
use crate::rng;
use crate::scalar::{cr, czero, Real};

/// Antisymmetry tolerance on coefficient matrices.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Allowed deviation of `Σ|w_ij|²` from 1/2.
pub const NORM_TOL: f64 = 1e-10;

// never tighter than what the scalar can resolve
fn resolvable<T: Real>(tol: f64) -> T {
    T::lit(tol).max(T::epsilon() * T::lit(64.0))
}

/// Lexicographic mode pairs spanning the antisymmetric space of four modes.
pub const PAIRS4: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn coefficient_norm<T: Real>(w: &CMatrix<T>) -> T {
    w.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Pure two-fermion state.
#[derive(Clone, Debug)]
pub struct FermionState<T: Real = f64> {
    w: CMatrix<T>,
}

impl<T: Real> FermionState<T> {
    /// Checks antisymmetry and `Σ|w_ij|² = 1/2`.
    pub fn new(w: CMatrix<T>) -> Result<Self> {
        let s = Self::unnormalized(w)?;
        let norm = coefficient_norm(&s.w);
        if (norm - T::lit(0.5)).abs() > resolvable::<T>(NORM_TOL) {
            return Err(Error::NotAState(format!("sum of |w_ij|^2 is {} instead of 1/2", norm.to_f64_lossy())));
        }
        Ok(s)
    }

    /// Checks antisymmetry only.
    pub fn unnormalized(w: CMatrix<T>) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::Shape("coefficient matrix must be square".into()));
        }
        let defect = antisymmetry_defect(&w);
        if defect > resolvable::<T>(SYMMETRY_TOL) {
            return Err(Error::NotAntisymmetric { defect: defect.to_f64_lossy() });
        }
        Ok(Self { w })
    }

    /// Rescales to `Σ|w_ij|² = 1/2`.
    pub fn normalized(w: CMatrix<T>) -> Result<Self> {
        let norm = coefficient_norm(&w);
        if norm <= T::epsilon() {
            return Err(Error::NotAState("zero coefficient matrix".into()));
        }
        Self::new(w.scale((T::lit(0.5) / norm).sqrt()))
    }

    /// `f†_i f†_j |Ω⟩`, i.e. `w_ij = −w_ji = 1/2`.
    pub fn elementary(n_modes: usize, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= n_modes || j >= n_modes {
            return Err(Error::Shape(format!("invalid mode pair ({i}, {j}) for {n_modes} modes")));
        }
        let mut w = CMatrix::zeros(n_modes, n_modes);
        w[(i, j)] = cr(T::lit(0.5));
        w[(j, i)] = cr(T::lit(-0.5));
        Self::new(w)
    }

    /// Normal form `J(z)` in the first modes.
    pub fn from_block_values(n_modes: usize, z: &[T]) -> Result<Self> {
        if 2 * z.len() > n_modes {
            return Err(Error::Shape("too many blocks for the mode count".into()));
        }
        let mut w = CMatrix::zeros(n_modes, n_modes);
        for (k, &zk) in z.iter().enumerate() {
            w[(2 * k, 2 * k + 1)] = cr(zk);
            w[(2 * k + 1, 2 * k)] = cr(-zk);
        }
        Self::new(w)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_modes: usize) -> Self {
        let g = rng::ginibre::<T, R>(rng, n_modes, n_modes);
        Self::normalized(&g - &g.transpose()).expect("Ginibre sample is nonzero")
    }

    /// Same state in another single-particle basis, `w ↦ V·w·Vᵀ`.
    pub fn transform(&self, v: &CMatrix<T>) -> Self {
        Self { w: v.matmul(&self.w).matmul(&v.transpose()) }
    }

    pub fn n_modes(&self) -> usize {
        self.w.rows()
    }

    pub fn w(&self) -> &CMatrix<T> {
        &self.w
    }

    /// Amplitudes `2·w_ij` on the pairs `i < j` in lexicographic order (unit norm when normalised).
    pub fn pair_amplitudes(&self) -> Vec<Complex<T>> {
        let n = self.n_modes();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.w[(i, j)] * T::lit(2.0));
            }
        }
        out
    }

    pub fn from_pair_amplitudes(n_modes: usize, amps: &[Complex<T>]) -> Result<Self> {
        if amps.len() != n_modes * (n_modes.saturating_sub(1)) / 2 {
            return Err(Error::Shape("amplitude count does not match the mode count".into()));
        }
        let mut w = CMatrix::zeros(n_modes, n_modes);
        let mut it = amps.iter();
        for i in 0..n_modes {
            for j in (i + 1)..n_modes {
                let a = *it.next().expect("length checked") * T::lit(0.5);
                w[(i, j)] = a;
                w[(j, i)] = -a;
            }
        }
        Self::unnormalized(w)
    }
}

/// `w = U·J(z)·Uᵀ`; `Σ z_k² = 1/4` for normalised states.
pub fn slater_decompose<T: Real>(state: &FermionState<T>) -> Result<BlockDiagonalForm<T>> {
    antisymmetric_block_diagonalize(&state.w, resolvable::<T>(SYMMETRY_TOL))
}

/// Number of blocks with `z_k > tol`.
pub fn slater_rank<T: Real>(state: &FermionState<T>, tol: T) -> Result<usize> {
    Ok(slater_decompose(state)?.z.iter().filter(|&&z| z > tol).count())
}

fn require_four<T: Real>(state: &FermionState<T>) -> Result<()> {
    if state.n_modes() != 4 {
        return Err(Error::WrongModeCount { expected: 4, got: state.n_modes() });
    }
    Ok(())
}

/// `Pf(w)` of a 4×4 antisymmetric matrix.
pub fn pfaffian4<T: Real>(w: &CMatrix<T>) -> Complex<T> {
    w[(0, 1)] * w[(2, 3)] - w[(0, 2)] * w[(1, 3)] + w[(0, 3)] * w[(1, 2)]
}

/// Pfaffian of the 4×4 principal submatrix on modes `i < j < k < l`.
fn sub_pfaffian<T: Real>(w: &CMatrix<T>, i: usize, j: usize, k: usize, l: usize) -> Complex<T> {
    w[(i, j)] * w[(k, l)] - w[(i, k)] * w[(j, l)] + w[(i, l)] * w[(j, k)]
}

/// `C = |8·Pf(w)|` for four modes.
pub fn fermionic_concurrence<T: Real>(state: &FermionState<T>) -> Result<T> {
    require_four(state)?;
    Ok((pfaffian4(&state.w) * T::lit(8.0)).norm())
}

/// `w̃_ij = ½ Σ_kl ε^{ijkl} conj(w_kl)`, so that `⟨w̃|w⟩ = 8·Pf(w)`.
pub fn dual_state<T: Real>(state: &FermionState<T>) -> Result<FermionState<T>> {
    require_four(state)?;
    let w = &state.w;
    let mut d = CMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let mut s = czero();
            for k in 0..4 {
                for l in 0..4 {
                    let e = levi_civita([i, j, k, l]);
                    if e != 0 {
                        s = s + w[(k, l)].conj() * T::lit(e as f64);
                    }
                }
            }
            d[(i, j)] = s * T::lit(0.5);
        }
    }
    FermionState::unnormalized(d)
}

/// `⟨a|b⟩` between two-fermion states, `Σ_{i<j} conj(2a_ij)·2b_ij`.
pub fn fermion_overlap<T: Real>(a: &FermionState<T>, b: &FermionState<T>) -> Complex<T> {
    a.pair_amplitudes().iter().zip(b.pair_amplitudes()).map(|(x, y)| x.conj() * y).fold(czero(), |s, t| s + t)
}

fn levi_civita(idx: [usize; 4]) -> i32 {
    let mut p = idx;
    let mut sign = 1;
    for a in 0..4 {
        for b in (a + 1)..4 {
            if p[a] == p[b] {
                return 0;
            }
        }
    }
    for a in 0..4 {
        while p[a] != a {
            let t = p[a];
            p.swap(a, t);
            sign = -sign;
        }
    }
    sign
}

/// `true` iff every 4×4 sub-Pfaffian of `w` vanishes (within `tol`), i.e. the
/// state is a single Slater determinant.
pub fn slater_rank_one_test<T: Real>(state: &FermionState<T>, tol: T) -> bool {
    let w = &state.w;
    let n = state.n_modes();
    if coefficient_norm(w) <= T::epsilon() {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                for l in (k + 1)..n {
                    if sub_pfaffian(w, i, j, k, l).norm() > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Convention for the tilde map in the mixed-state concurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TildeConvention {
    /// `ρ̃ = E·conj(ρ)·E`, mirroring the conjugated dual state.
    #[default]
    Conjugated,
    /// `ρ̃ = E·ρ·E`.
    Plain,
}

/// Which spectrum enters `max(0, λ₁ − Σ_{i>1} λ_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LambdaConvention {
    /// Square roots of the eigenvalues of `ρρ̃`.
    #[default]
    SquareRoot,
    /// The eigenvalues of `ρρ̃` themselves.
    Eigenvalue,
}

/// Density operator on the six-dimensional antisymmetric space of four modes
/// (basis [`PAIRS4`]).
#[derive(Clone, Debug)]
pub struct MixedFermionState<T: Real = f64> {
    rho: CMatrix<T>,
}

impl<T: Real> MixedFermionState<T> {
    pub fn new(rho: CMatrix<T>) -> Result<Self> {
        if rho.rows() != 6 || !rho.is_square() {
            return Err(Error::NotAState("operator must be 6x6".into()));
        }
        if rho.hermiticity_defect() > T::lit(1e-10) {
            return Err(Error::NotAState("operator is not Hermitian".into()));
        }
        let rho = rho.hermitian_part();
        if (rho.trace().re - T::one()).abs() > T::lit(1e-10) {
            return Err(Error::NotAState("trace differs from 1".into()));
        }
        if eigh(&rho).min() < -T::lit(1e-9) {
            return Err(Error::NotAState("operator is not positive semi-definite".into()));
        }
        Ok(Self { rho })
    }

    pub fn pure(state: &FermionState<T>) -> Result<Self> {
        Self::from_ensemble(&[(T::one(), state.clone())])
    }

    /// `Σ p_i |w_i⟩⟨w_i|`.
    pub fn from_ensemble(ensemble: &[(T, FermionState<T>)]) -> Result<Self> {
        let total: T = ensemble.iter().map(|(p, _)| *p).sum();
        if ensemble.iter().any(|(p, _)| *p < T::zero()) || (total - T::one()).abs() > T::lit(1e-10) {
            return Err(Error::NotAState("probabilities do not form a distribution".into()));
        }
        let mut rho = CMatrix::zeros(6, 6);
        for (p, s) in ensemble {
            require_four(s)?;
            let s = FermionState::new(s.w.clone()).map_err(|e| Error::NotAState(e.to_string()))?;
            rho = &rho + &CMatrix::projector(&s.pair_amplitudes()).scale(*p);
        }
        Self::new(rho)
    }

    pub fn maximally_mixed() -> Self {
        Self { rho: CMatrix::identity(6).scale(T::one() / T::lit(6.0)) }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.rho
    }
}

/// The real symmetric pairing `E` with `ψ̃ = E·conj(ψ)` on [`PAIRS4`] amplitudes.
pub fn tilde_pairing<T: Real>() -> CMatrix<T> {
    let mut e = CMatrix::zeros(6, 6);
    for (a, &(i, j)) in PAIRS4.iter().enumerate() {
        for (b, &(k, l)) in PAIRS4.iter().enumerate() {
            let s = levi_civita([i, j, k, l]);
            if s != 0 {
                e[(a, b)] = cr(T::lit(s as f64));
            }
        }
    }
    e
}

/// `max(0, λ₁ − λ₂ − … − λ₆)` from the spectrum of `ρρ̃`.
pub fn mixed_fermionic_concurrence<T: Real>(
    state: &MixedFermionState<T>,
    tilde: TildeConvention,
    lambda: LambdaConvention,
) -> T {
    let e = tilde_pairing::<T>();
    let rho = &state.rho;
    let base = match tilde {
        TildeConvention::Conjugated => rho.conj(),
        TildeConvention::Plain => rho.clone(),
    };
    let rho_t = e.matmul(&base).matmul(&e);
    // ρρ̃ is similar to √ρ·ρ̃·√ρ, which is Hermitian PSD. Eigenvalues at the
    // roundoff level are zeroed first: their square roots would be ~1e-8.
    let clip = |eig: &crate::linalg::HermitianEigen<T>| {
        let floor = T::epsilon() * T::lit(64.0) * eig.spectral_radius().max(T::min_positive_value());
        move |v: T| if v <= floor { T::zero() } else { v }
    };
    let re = eigh(rho);
    let cut = clip(&re);
    let sqrt = re.reassemble(|v| cut(v).sqrt());
    let h = sqrt.matmul(&rho_t).matmul(&sqrt).hermitian_part();
    let he = eigh(&h);
    let cut = clip(&he);
    let mut vals: Vec<T> = he
        .values
        .iter()
        .map(|&v| {
            let v = cut(v);
            match lambda {
                LambdaConvention::SquareRoot => v.sqrt(),
                LambdaConvention::Eigenvalue => v,
            }
        })
        .collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let rest: T = vals[1..].iter().copied().sum();
    (vals[0] - rest).max(T::zero())
}

/// Pure two-boson state `|v⟩ = Σ v_ij b†_i b†_j |Ω⟩`, `v` symmetric, `Σ|v_ij|² = 1/2`.
#[derive(Clone, Debug)]
pub struct BosonState<T: Real = f64> {
    v: CMatrix<T>,
}

impl<T: Real> BosonState<T> {
    pub fn new(v: CMatrix<T>) -> Result<Self> {
        let s = Self::unnormalized(v)?;
        let norm = coefficient_norm(&s.v);
        if (norm - T::lit(0.5)).abs() > resolvable::<T>(NORM_TOL) {
            return Err(Error::NotAState(format!("sum of |v_ij|^2 is {} instead of 1/2", norm.to_f64_lossy())));
        }
        Ok(s)
    }

    pub fn unnormalized(v: CMatrix<T>) -> Result<Self> {
        if !v.is_square() {
            return Err(Error::Shape("coefficient matrix must be square".into()));
        }
        let defect = symmetry_defect(&v);
        if defect > resolvable::<T>(SYMMETRY_TOL) {
            return Err(Error::NotSymmetric { defect: defect.to_f64_lossy() });
        }
        Ok(Self { v })
    }

    pub fn normalized(v: CMatrix<T>) -> Result<Self> {
        let norm = coefficient_norm(&v);
        if norm <= T::epsilon() {
            return Err(Error::NotAState("zero coefficient matrix".into()));
        }
        Self::new(v.scale((T::lit(0.5) / norm).sqrt()))
    }

    /// Both bosons in mode `i`.
    pub fn doubly_occupied(n_modes: usize, i: usize) -> Result<Self> {
        if i >= n_modes {
            return Err(Error::Shape(format!("mode {i} out of range")));
        }
        let mut v = CMatrix::zeros(n_modes, n_modes);
        v[(i, i)] = cr(T::lit(0.5).sqrt());
        Self::new(v)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_modes: usize) -> Self {
        let g = rng::ginibre::<T, R>(rng, n_modes, n_modes);
        Self::normalized(&g + &g.transpose()).expect("Ginibre sample is nonzero")
    }

    pub fn transform(&self, u: &CMatrix<T>) -> Self {
        Self { v: u.matmul(&self.v).matmul(&u.transpose()) }
    }

    pub fn n_modes(&self) -> usize {
        self.v.rows()
    }

    pub fn v(&self) -> &CMatrix<T> {
        &self.v
    }
}

/// `v = U·diag(d)·Uᵀ`.
pub fn bosonic_decompose<T: Real>(state: &BosonState<T>) -> Result<TakagiForm<T>> {
    takagi(&state.v, resolvable::<T>(SYMMETRY_TOL))
}

pub fn bosonic_slater_rank<T: Real>(state: &BosonState<T>, tol: T) -> Result<usize> {
    Ok(bosonic_decompose(state)?.d.iter().filter(|&&d| d > tol).count())
}

/// Two-mode boson concurrence `4·|det v|`: zero iff the Takagi rank is one,
/// one for `d₁ = d₂`.
pub fn bosonic_concurrence<T: Real>(state: &BosonState<T>) -> Result<T> {
    if state.n_modes() != 2 {
        return Err(Error::WrongModeCount { expected: 2, got: state.n_modes() });
    }
    let v = &state.v;
    Ok(((v[(0, 0)] * v[(1, 1)] - v[(0, 1)] * v[(1, 0)]) * T::lit(4.0)).norm())
}
