#![allow(dead_code)]

use rand::Rng;
use sepkit::linalg::{vector, CMatrix};
use sepkit::state::{random_state, DensityMatrix, PureState};
use sepkit::{rng, C64};

/// `|Ψ⁻⟩ = (|01⟩ − |10⟩)/√2`.
pub fn singlet() -> PureState {
    let s = 1.0 / 2f64.sqrt();
    PureState::new(2, 2, vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(0.0, 0.0)]).unwrap()
}

fn ket(v: &[f64]) -> Vec<C64> {
    let k: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
    vector::normalized(&k).unwrap()
}

/// The five "Tiles" product vectors on 3×3; no product vector is orthogonal to all of them.
pub fn tiles() -> Vec<(Vec<C64>, Vec<C64>)> {
    vec![
        (ket(&[1.0, 0.0, 0.0]), ket(&[1.0, -1.0, 0.0])),
        (ket(&[1.0, -1.0, 0.0]), ket(&[0.0, 0.0, 1.0])),
        (ket(&[0.0, 0.0, 1.0]), ket(&[0.0, 1.0, -1.0])),
        (ket(&[0.0, 1.0, -1.0]), ket(&[1.0, 0.0, 0.0])),
        (ket(&[1.0, 1.0, 1.0]), ket(&[1.0, 1.0, 1.0])),
    ]
}

/// `(1 − Σ|ψ_i⟩⟨ψ_i|)/4` for the Tiles vectors: PPT and entangled, rank 4.
pub fn tiles_state() -> DensityMatrix {
    let mut m = CMatrix::identity(9);
    for (a, b) in tiles() {
        m = &m - &CMatrix::projector(&vector::kron(&a, &b));
    }
    DensityMatrix::new(3, 3, m.scale(0.25)).unwrap()
}

/// A random state of varying rank; odd indices are blended with the
/// maximally mixed state so that a good share of samples is PPT.
pub fn sample_state(m: usize, n: usize, salt: u64, i: u64) -> DensityMatrix {
    let mut r = rng::stream(salt, i);
    let rank = 1 + (i as usize) % (m * n);
    let rho: DensityMatrix = random_state(&mut r, m, n, rank);
    if i % 2 == 1 {
        let t: f64 = r.gen_range(0.0..1.0);
        rho.mix(&DensityMatrix::maximally_mixed(m, n), 1.0 - t).unwrap()
    } else {
        rho
    }
}
