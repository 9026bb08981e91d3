//! K-copy distillability: minimise `⟨ψ|(ρ^{T_A})^{⊗K}|ψ⟩` over Schmidt-rank-2 vectors.
//!
//! Copies are regrouped Alice-major, `(A₁…A_K)(B₁…B_K)`. With Alice's pair
//! `E = [e₁ e₂]` fixed, `ψ = (E ⊗ 1)g` and the best `g` is the smallest
//! eigenvector of a `2N^K` reduced matrix; the roles are then swapped using the
//! Schmidt pair of the current `ψ`. Each half-step keeps the current vector
//! feasible, so the value never increases.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eigh, smallest_eigenpair, vector, CMatrix};
use crate::rng;
use crate::scalar::{czero, Real};
use crate::separability::is_ppt;
use crate::state::{sym_antisym_family, DensityMatrix, PureState, Side};

/// Default cap on the total K-copy dimension `(MN)^K`.
pub const DIMENSION_CAP: usize = 4096;
/// Values at or below this count as negative.
pub const NEGATIVITY_TOL: f64 = 1e-9;

/// `ψ = a|e₁⟩|f₁⟩ + b|e₂⟩|f₂⟩` in the K-copy space.
#[derive(Clone, Debug)]
pub struct SchmidtTwoVector<T: Real = f64> {
    pub a: T,
    pub b: T,
    pub e1: Vec<Complex<T>>,
    pub e2: Vec<Complex<T>>,
    pub f1: Vec<Complex<T>>,
    pub f2: Vec<Complex<T>>,
}

impl<T: Real> SchmidtTwoVector<T> {
    pub fn ket(&self) -> Vec<Complex<T>> {
        let p = vector::kron(&self.e1, &self.f1);
        let q = vector::kron(&self.e2, &self.f2);
        p.iter().zip(&q).map(|(x, y)| x * self.a + y * self.b).collect()
    }

    fn from_ket(psi: &[Complex<T>], ma: usize, nb: usize) -> Self {
        let sd = PureState::normalized(ma, nb, psi.to_vec())
            .expect("nonzero vector")
            .schmidt_decomposition();
        let left = vector::complete_basis(&sd.left[..sd.left.len().min(2)], ma);
        let right = vector::complete_basis(&sd.right[..sd.right.len().min(2)], nb);
        let coeff = |k: usize| sd.coefficients.get(k).copied().unwrap_or(T::zero());
        let (a, b) = (coeff(0), coeff(1));
        let norm = (a * a + b * b).sqrt();
        Self {
            a: a / norm,
            b: b / norm,
            e1: left[0].clone(),
            e2: left[1].clone(),
            f1: right[0].clone(),
            f2: right[1].clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KCopyMinimum<T: Real = f64> {
    /// `⟨ψ|X|ψ⟩` re-evaluated from `argmin`.
    pub value: T,
    pub argmin: SchmidtTwoVector<T>,
    pub restarts: usize,
}

/// `(ρ^{T_A})^{⊗K}` with rows ordered `(a₁…a_K, b₁…b_K)`.
pub fn kcopy_operator<T: Real>(rho: &DensityMatrix<T>, k: usize) -> CMatrix<T> {
    let (m, n) = rho.dims();
    let pt = rho.partial_transpose(Side::A);
    let mut x = pt.clone();
    for _ in 1..k {
        x = x.kron(&pt);
    }
    let perm = alice_major(m, n, k);
    CMatrix::from_fn(x.rows(), x.cols(), |r, c| x[(perm[r], perm[c])])
}

/// Maps an Alice-major index to the copy-major index of the plain tensor power.
fn alice_major(m: usize, n: usize, k: usize) -> Vec<usize> {
    let nb = n.pow(k as u32);
    let total = (m * n).pow(k as u32);
    (0..total)
        .map(|idx| {
            let (mut a, mut b) = (idx / nb, idx % nb);
            let mut digits = vec![(0, 0); k];
            for slot in (0..k).rev() {
                digits[slot] = (a % m, b % n);
                a /= m;
                b /= n;
            }
            digits.iter().fold(0, |acc, &(ai, bi)| acc * m * n + ai * n + bi)
        })
        .collect()
}

/// `(E ⊗ 1)† X (E ⊗ 1)` for an `ma × 2` Alice pair, indices `(i, b)`.
fn reduce_with_alice<T: Real>(x: &CMatrix<T>, e: &[Vec<Complex<T>>; 2], ma: usize, nb: usize) -> CMatrix<T> {
    // Y = X (E ⊗ 1): rows (a,b), columns (j,b')
    let mut y = CMatrix::zeros(ma * nb, 2 * nb);
    for r in 0..ma * nb {
        for j in 0..2 {
            for bp in 0..nb {
                let mut s = czero();
                for ap in 0..ma {
                    s = s + x[(r, ap * nb + bp)] * e[j][ap];
                }
                y[(r, j * nb + bp)] = s;
            }
        }
    }
    let mut out = CMatrix::zeros(2 * nb, 2 * nb);
    for i in 0..2 {
        for b in 0..nb {
            for col in 0..2 * nb {
                let mut s = czero();
                for a in 0..ma {
                    s = s + e[i][a].conj() * y[(a * nb + b, col)];
                }
                out[(i * nb + b, col)] = s;
            }
        }
    }
    out
}

/// `(1 ⊗ F)† X (1 ⊗ F)` for an `nb × 2` Bob pair, indices `(a, j)`.
fn reduce_with_bob<T: Real>(x: &CMatrix<T>, f: &[Vec<Complex<T>>; 2], ma: usize, nb: usize) -> CMatrix<T> {
    let mut y = CMatrix::zeros(ma * nb, ma * 2);
    for r in 0..ma * nb {
        for ap in 0..ma {
            for j in 0..2 {
                let mut s = czero();
                for bp in 0..nb {
                    s = s + x[(r, ap * nb + bp)] * f[j][bp];
                }
                y[(r, ap * 2 + j)] = s;
            }
        }
    }
    let mut out = CMatrix::zeros(2 * ma, 2 * ma);
    for a in 0..ma {
        for i in 0..2 {
            for col in 0..2 * ma {
                let mut s = czero();
                for b in 0..nb {
                    s = s + f[i][b].conj() * y[(a * nb + b, col)];
                }
                out[(a * 2 + i, col)] = s;
            }
        }
    }
    out
}

fn expand_alice<T: Real>(e: &[Vec<Complex<T>>; 2], g: &[Complex<T>], ma: usize, nb: usize) -> Vec<Complex<T>> {
    let mut psi = vec![czero(); ma * nb];
    for a in 0..ma {
        for b in 0..nb {
            psi[a * nb + b] = e[0][a] * g[b] + e[1][a] * g[nb + b];
        }
    }
    psi
}

fn expand_bob<T: Real>(f: &[Vec<Complex<T>>; 2], h: &[Complex<T>], ma: usize, nb: usize) -> Vec<Complex<T>> {
    let mut psi = vec![czero(); ma * nb];
    for a in 0..ma {
        for b in 0..nb {
            psi[a * nb + b] = h[a * 2] * f[0][b] + h[a * 2 + 1] * f[1][b];
        }
    }
    psi
}

fn alternate<T: Real>(x: &CMatrix<T>, start: SchmidtTwoVector<T>, ma: usize, nb: usize, max_iter: usize) -> (T, Vec<Complex<T>>) {
    let mut psi = start.ket();
    let mut cur = start;
    let mut value = x.expectation(&psi);
    for _ in 0..max_iter {
        let e = [cur.e1.clone(), cur.e2.clone()];
        let (_, g) = smallest_eigenpair(&reduce_with_alice(x, &e, ma, nb));
        let mid = SchmidtTwoVector::from_ket(&expand_alice(&e, &g, ma, nb), ma, nb);
        let f = [mid.f1.clone(), mid.f2.clone()];
        let (v, h) = smallest_eigenpair(&reduce_with_bob(x, &f, ma, nb));
        psi = expand_bob(&f, &h, ma, nb);
        cur = SchmidtTwoVector::from_ket(&psi, ma, nb);
        let gain = value - v;
        value = v;
        if gain.abs() <= T::lit(1e-15) * (T::one() + value.abs()) {
            break;
        }
    }
    (value, psi)
}

/// Starting vectors from the most negative eigenvectors of the K-copy operator.
///
/// These are Kronecker products of eigenvectors of `ρ^{T_A}`, so only the
/// single-copy spectrum is needed.
fn spectral_starts<T: Real>(rho: &DensityMatrix<T>, k: usize, count: usize) -> Vec<SchmidtTwoVector<T>> {
    let (m, n) = rho.dims();
    let eig = eigh(&rho.partial_transpose(Side::A));
    let d = m * n;
    let total = d.pow(k as u32);
    let mut tuples: Vec<(T, usize)> = (0..total)
        .map(|t| {
            let mut rest = t;
            let mut v = T::one();
            for _ in 0..k {
                v *= eig.values[rest % d];
                rest /= d;
            }
            (v, t)
        })
        .collect();
    tuples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    let perm = alice_major(m, n, k);
    let (ma, nb) = (m.pow(k as u32), n.pow(k as u32));
    tuples
        .into_iter()
        .take(count)
        .map(|(_, t)| {
            let mut rest = t;
            let mut ket = vec![Complex::new(T::one(), T::zero())];
            for _ in 0..k {
                ket = vector::kron(&ket, &eig.vector(rest % d));
                rest /= d;
            }
            let reordered: Vec<Complex<T>> = perm.iter().map(|&p| ket[p]).collect();
            SchmidtTwoVector::from_ket(&reordered, ma, nb)
        })
        .collect()
}

/// Best value of the K-copy form over Schmidt-rank-2 vectors (an upper bound on the minimum).
pub fn kcopy_min_expectation<T: Real>(
    rho: &DensityMatrix<T>,
    k: usize,
    restarts: usize,
    seed: u64,
    cap: usize,
) -> Result<KCopyMinimum<T>> {
    let (m, n) = rho.dims();
    let k = k.max(1);
    let dim = (m * n).checked_pow(k as u32).unwrap_or(usize::MAX);
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let (ma, nb) = (m.pow(k as u32), n.pow(k as u32));
    let x = kcopy_operator(rho, k);
    let mut starts = spectral_starts(rho, k, 3);
    let fixed = starts.len();
    for i in 0..restarts {
        let mut r = rng::stream(seed, i as u64);
        let g = rng::ginibre::<T, _>(&mut r, ma * nb, 1).column(0);
        starts.push(SchmidtTwoVector::from_ket(&g, ma, nb));
    }
    let best = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| {
            let (_, psi) = alternate(&x, s, ma, nb, 200);
            let arg = SchmidtTwoVector::from_ket(&psi, ma, nb);
            let v = x.expectation(&arg.ket());
            (v, i, arg)
        })
        .reduce_with(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .expect("at least one start");
    Ok(KCopyMinimum { value: best.0, argmin: best.2, restarts: fixed + restarts })
}

#[derive(Clone, Debug)]
pub enum DistillabilityVerdict<T: Real = f64> {
    Distillable { k: usize, value: T, argmin: SchmidtTwoVector<T> },
    /// PPT states are never distillable.
    UndistillablePpt,
    /// No negative value found up to `kmax`; the search is not a proof.
    Inconclusive { kmax: usize, best_value: T },
}

impl<T: Real> DistillabilityVerdict<T> {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Distillable { .. } => "distillable",
            Self::UndistillablePpt => "undistillable-ppt",
            Self::Inconclusive { .. } => "inconclusive",
        }
    }
}

pub fn classify_distillability<T: Real>(
    rho: &DensityMatrix<T>,
    kmax: usize,
    restarts: usize,
    seed: u64,
) -> Result<DistillabilityVerdict<T>> {
    if is_ppt(rho, T::lit(NEGATIVITY_TOL)).ppt {
        return Ok(DistillabilityVerdict::UndistillablePpt);
    }
    let mut best = T::infinity();
    let mut reached = 0;
    for k in 1..=kmax.max(1) {
        let res = match kcopy_min_expectation(rho, k, restarts, seed, DIMENSION_CAP) {
            Ok(r) => r,
            Err(Error::DimensionCap { .. }) if k > 1 => break,
            Err(e) => return Err(e),
        };
        reached = k;
        if res.value <= -T::lit(NEGATIVITY_TOL) {
            return Ok(DistillabilityVerdict::Distillable { k, value: res.value, argmin: res.argmin });
        }
        best = best.min(res.value);
    }
    Ok(DistillabilityVerdict::Inconclusive { kmax: reached, best_value: best })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub lambda: f64,
    pub ppt: bool,
    pub min_expectation: f64,
    pub restarts_used: usize,
    pub seed: u64,
}

/// K-copy search over the symmetric/antisymmetric family on `d × d`.
pub fn family_scan(d: usize, grid: &[f64], k: usize, restarts: usize, seed: u64) -> Result<Vec<ScanRow>> {
    if !(2..=4).contains(&d) {
        return Err(Error::DimensionOutOfScope { m: d, n: d });
    }
    grid.par_iter()
        .map(|&lambda| {
            let rho = sym_antisym_family::<f64>(d, lambda);
            let ppt = is_ppt(&rho, NEGATIVITY_TOL).ppt;
            let res = kcopy_min_expectation(&rho, k, restarts, seed, DIMENSION_CAP)?;
            Ok(ScanRow { lambda, ppt, min_expectation: res.value, restarts_used: res.restarts, seed })
        })
        .collect()
}

/// Comma-separated table with a header line.
pub fn scan_table(rows: &[ScanRow]) -> String {
    let mut out = String::from("lambda,ppt,min_expectation,restarts_used,seed\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.12e},{},{}\n", r.lambda, r.ppt, r.min_expectation, r.restarts_used, r.seed));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{maximally_entangled, werner_2x2};

    #[test]
    fn alice_major_permutation_for_one_copy_is_identity() {
        assert_eq!(alice_major(2, 3, 1), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn two_copy_operator_is_hermitian_with_product_spectrum() {
        let rho = werner_2x2::<f64>(0.7);
        let x = kcopy_operator(&rho, 2);
        assert!(x.is_hermitian(1e-14));
        let one = eigh(&rho.partial_transpose(Side::A)).min();
        let two = eigh(&x).min();
        assert!((two - one * eigh(&rho.partial_transpose(Side::A)).max()).abs() < 1e-12);
    }

    #[test]
    fn singlet_value_is_minus_half() {
        let rho = DensityMatrix::from_pure(&maximally_entangled::<f64>(2));
        let r = kcopy_min_expectation(&rho, 1, 8, 0, DIMENSION_CAP).unwrap();
        assert!((r.value + 0.5).abs() < 1e-10);
        assert!((rho.partial_transpose(Side::A).expectation(&r.argmin.ket()) - r.value).abs() < 1e-10);
    }

    #[test]
    fn cap_is_enforced() {
        let rho = DensityMatrix::<f64>::maximally_mixed(3, 3);
        assert!(matches!(kcopy_min_expectation(&rho, 4, 1, 0, DIMENSION_CAP), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn werner_verdicts() {
        assert!(matches!(
            classify_distillability(&werner_2x2::<f64>(0.9), 2, 8, 0).unwrap(),
            DistillabilityVerdict::Distillable { k: 1, .. }
        ));
        assert!(matches!(
            classify_distillability(&werner_2x2::<f64>(0.2), 2, 8, 0).unwrap(),
            DistillabilityVerdict::UndistillablePpt
        ));
    }

    #[test]
    fn one_copy_scan_follows_the_closed_form_in_the_npt_region() {
        let grid = [0.4, 0.55, 0.7, 0.85, 1.0];
        let rows = family_scan(3, &grid, 1, 8, 0).unwrap();
        for (r, w) in rows.iter().zip(rows.iter().skip(1)) {
            assert!(w.min_expectation <= r.min_expectation + 1e-12);
        }
        for r in &rows {
            assert!((r.min_expectation - (3.0 - 5.0 * r.lambda) / 12.0).abs() < 1e-9, "{r:?}");
        }
        assert_eq!(scan_table(&rows).lines().count(), grid.len() + 1);
    }
}
