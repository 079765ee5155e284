//! Cross-module consistency: the same objects built along independent paths.

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use pseudoboson::deformed_hermite::{deformed_coeffs, dual_coeffs};
use pseudoboson::displacement_quant::{bicoherent, coherent_coeffs, displacement_matrix};
use pseudoboson::fock_ops::{ladder_b, pseudo_pair};
use pseudoboson::gl2_rep::GL2Matrix;
use pseudoboson::hermite_core::hermite_expand;
use pseudoboson::index_maps::{beta_inv, truncation_dim};
use pseudoboson::serial::{matrix_from_le_bytes, matrix_from_rows, matrix_to_le_bytes};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel_dev(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    let scale = b.iter().map(|c| c.norm()).fold(1.0, f64::max);
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max) / scale
}

fn draw(seed: u64) -> GL2Matrix {
    GL2Matrix::random_well_conditioned(&mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Operator-side vectors match the polynomial families expanded in the Hermite basis.
    #[test]
    fn pair_vectors_are_expanded_polynomials(seed in any::<u64>()) {
        let g = draw(seed);
        let l_max = 5;
        let pair = pseudo_pair(&g, l_max).unwrap();
        for n in 0..truncation_dim(l_max) {
            let idx = beta_inv(n as u64);
            prop_assert!(rel_dev(&pair.phi(n), &hermite_expand(&deformed_coeffs(&g, idx), l_max)) <= 1e-10);
            prop_assert!(rel_dev(&pair.psi(n), &hermite_expand(&dual_coeffs(&g, idx), l_max)) <= 1e-10);
        }
    }

    /// The first column of the displacement matrix is the coherent-state sequence.
    #[test]
    fn displaced_vacuum_is_coherent(re in -1.5f64..1.5, im in -1.5f64..1.5) {
        let z = Complex64::new(re, im);
        let l_max = 20;
        let d = displacement_matrix(z, l_max);
        let c = coherent_coeffs(z, truncation_dim(l_max));
        let col = d.mat.column(0).into_owned();
        prop_assert!(rel_dev(&col, &c) <= 1e-12);
    }
}

#[test]
fn bicoherent_vector_is_the_mapped_coherent_sequence() {
    let g = GL2Matrix::from_real(1.0, 0.5, 0.0, 1.0).unwrap();
    let pair = pseudo_pair(&g, 25).unwrap();
    let z = Complex64::new(0.4, -0.3);
    let state = bicoherent(z, &pair, 1e-12).unwrap();
    let expected = pair.t.apply(&state.coeffs);
    assert!(rel_dev(&state.phi_vec, &expected) <= 1e-12);
    assert!((state.overlap() - 1.0).norm() <= 1e-9);
}

#[test]
fn operators_survive_json_and_binary_round_trips() {
    let (b, _) = ladder_b(6).unwrap();
    let v: serde_json::Value = serde_json::to_value(&b).unwrap();
    assert_eq!(v["dim"], truncation_dim(6));
    assert_eq!(v["safe_dim"], truncation_dim(5));
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(v["mat"].clone()).unwrap();
    assert_eq!(matrix_from_rows(&rows).unwrap(), b.mat);

    let d = displacement_matrix(Complex64::new(0.3, 0.7), 8);
    assert_eq!(matrix_from_le_bytes(&matrix_to_le_bytes(&d.mat)).unwrap(), d.mat);
    assert!(matrix_from_le_bytes(&matrix_to_le_bytes(&d.mat)[..40]).is_err());
}
