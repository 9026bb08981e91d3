mod common;

use proptest::prelude::*;
use sepkit::distill::kcopy_min_expectation;
use sepkit::fermion::{fermionic_concurrence, slater_decompose, BosonState, bosonic_concurrence, bosonic_decompose, FermionState};
use sepkit::io::{parse_state, state_to_string};
use sepkit::linalg::{eigh, vector};
use sepkit::rng;
use sepkit::separability::{is_ppt, partial_transpose_matrix};
use sepkit::state::{random_state, DensityMatrix, ProductVector, Side};
use sepkit::witness::min_product_expectation;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 2)), Just((2, 3)), Just((3, 2)), Just((3, 3)), Just((2, 4))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn state_files_round_trip((m, n) in dims(), rank in 1usize..6, seed in any::<u64>()) {
        let rho: DensityMatrix = random_state(&mut rng::seeded(seed), m, n, rank);
        let back: DensityMatrix = parse_state(&state_to_string(&rho)).unwrap();
        prop_assert!((back.matrix() - rho.matrix()).max_abs() <= 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution_and_keeps_the_trace((m, n) in dims(), seed in any::<u64>()) {
        let rho: DensityMatrix = random_state(&mut rng::seeded(seed), m, n, m * n);
        let pt = rho.partial_transpose(Side::A);
        prop_assert!((pt.trace().re - 1.0).abs() < 1e-12);
        let back = partial_transpose_matrix(&pt, m, n, Side::A);
        prop_assert!((&back - rho.matrix()).max_abs() < 1e-15);
        // transposing either side gives the same spectrum
        let a = eigh(&pt).values;
        let b = eigh(&rho.partial_transpose(Side::B)).values;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn product_expectation_of_the_partial_transpose_conjugates_alice((m, n) in dims(), seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let x = rng::hermitian::<f64, _>(&mut r, m * n);
        let pv: ProductVector = ProductVector::random(&mut r, m, n);
        let lhs = partial_transpose_matrix(&x, m, n, Side::A).expectation(&pv.ket());
        let rhs = x.expectation(&vector::kron(&vector::conj(&pv.e), &pv.f));
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn product_floor_bounds_every_sampled_product((m, n) in dims(), seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let w = rng::hermitian::<f64, _>(&mut r, m * n);
        let floor = min_product_expectation(&w, m, n, 12, seed).value;
        for _ in 0..200 {
            let pv: ProductVector = ProductVector::random(&mut r, m, n);
            prop_assert!(w.expectation(&pv.ket()) >= floor - 1e-9);
        }
    }

    #[test]
    fn one_copy_minimum_is_negative_exactly_for_npt_qubit_pairs(seed in any::<u64>(), rank in 1usize..5) {
        let rho: DensityMatrix = random_state(&mut rng::seeded(seed), 2, 2, rank);
        let ppt = is_ppt(&rho, 1e-9).ppt;
        let v = kcopy_min_expectation(&rho, 1, 16, seed, 4096).unwrap().value;
        prop_assert_eq!(ppt, v >= -1e-9, "ppt {} value {}", ppt, v);
    }

    #[test]
    fn slater_values_survive_mode_transformations(seed in any::<u64>(), modes in 4usize..7) {
        let mut r = rng::seeded(seed);
        let s: FermionState = FermionState::random(&mut r, modes);
        let form = slater_decompose(&s).unwrap();
        prop_assert!((&form.reconstruct() - s.w()).frobenius_norm() < 1e-10);
        let sum: f64 = form.z.iter().map(|z| z * z).sum();
        prop_assert!((sum - 0.25).abs() < 1e-12);
        let moved = slater_decompose(&s.transform(&rng::unitary(&mut r, modes))).unwrap();
        for (a, b) in form.z.iter().zip(&moved.z) {
            prop_assert!((a - b).abs() < 1e-8);
        }
        if modes == 4 {
            let c = fermionic_concurrence(&s).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
            prop_assert!((c - 8.0 * form.z[0] * form.z[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn boson_takagi_reconstructs(seed in any::<u64>(), modes in 2usize..5) {
        let mut r = rng::seeded(seed);
        let b: BosonState = BosonState::random(&mut r, modes);
        let form = bosonic_decompose(&b).unwrap();
        prop_assert!((&form.reconstruct() - b.v()).frobenius_norm() < 1e-10);
        if modes == 2 {
            let c = bosonic_concurrence(&b).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
        }
    }
}

#[test]
fn tiles_state_is_ppt_and_has_no_product_vector_in_its_range() {
    let rho = common::tiles_state();
    assert!(is_ppt(&rho, 1e-12).ppt);
    assert_eq!(rho.rank(1e-9), 4);
    // the kernel projector has a strictly positive product floor
    let p = rho.eigen().kernel_projector(1e-9);
    assert!(min_product_expectation(&p, 3, 3, 200, 1).value > 1e-3);
}
