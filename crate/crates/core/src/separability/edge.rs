//! Heuristic edge-state test.
//!
//! `δ` is an edge state when no `|e,f⟩ ∈ R(δ)` has `|e*,f⟩ ∈ R(δ^{T_A})`.
//! Both conditions together are the zero set of the product form
//! `⟨e,f|Π_K + (Π_{K'})^{T_A}|e,f⟩`, which is searched from random starts.
//! Finding a zero refutes the edge property; not finding one is only evidence.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::product_search::{alternate_from, alternate_to_fixpoint};
use crate::rng;
use crate::scalar::Real;
use crate::state::{DensityMatrix, ProductVector};

use super::subtract::SubtractionGeometry;
use super::{is_ppt, Tolerances};

#[derive(Clone, Debug)]
pub struct EdgeCheck<T: Real = f64> {
    /// `true` means no qualifying product vector was found within the budget.
    pub is_edge: bool,
    /// A qualifying product vector and the weight that can be subtracted along it.
    pub evidence: Option<(ProductVector<T>, T)>,
    pub restarts: usize,
    /// Smallest range residual seen.
    pub best_residual: T,
}

pub fn is_edge_state<T: Real>(rho: &DensityMatrix<T>, restarts: usize, seed: u64, tol: &Tolerances) -> Result<EdgeCheck<T>> {
    let check = is_ppt(rho, T::lit(tol.psd));
    if !check.ppt {
        return Err(Error::NotPpt { min_eigenvalue: check.min_eigenvalue.to_f64_lossy() });
    }
    let (m, n) = rho.dims();
    let geo = SubtractionGeometry::new(rho.matrix().clone(), m, n, true, tol);
    let q = geo.range_form();
    let range_tol = T::lit(tol.range);
    let weight_floor = T::lit(1e-7);

    let results: Vec<(usize, T, ProductVector<T>)> = (0..restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let start = ProductVector::random(&mut r, m, n);
            let (v, pv) = alternate_from(&q, m, n, &start, 200, T::lit(1e-15));
            // only runs heading for a zero are worth resolving below √ε
            let pv = if v < T::lit(1e-6) { alternate_to_fixpoint(&q, m, n, &pv, 2000, T::lit(1e-13)).1 } else { pv };
            (i, geo.range_residual(&pv), pv)
        })
        .collect();

    let mut best_residual = T::infinity();
    let mut evidence = None;
    for (_, res, pv) in results {
        best_residual = best_residual.min(res);
        if evidence.is_none() && res <= range_tol {
            let lam = geo.certified_lambda(&pv);
            if lam > weight_floor {
                evidence = Some((pv, lam));
            }
        }
    }
    Ok(EdgeCheck { is_edge: evidence.is_none(), evidence, restarts: restarts.max(1), best_residual })
}
