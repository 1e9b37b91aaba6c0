use kslab_core::dense::{self, CMatrix};
use kslab_core::hv_oracle::Assignment;
use kslab_core::inequalities::two_partite_report;
use kslab_core::pauli::{commutes, lambda_element, pauli_mul, LambdaIndex, PauliString};
use kslab_core::states::{bell_fidelity, bell_fidelity_direct, f_value, StateModel};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word(max_n: usize) -> impl Strategy<Value = PauliString> {
    (1..=max_n).prop_flat_map(|n| {
        let mask = (1u64 << n) - 1;
        (Just(n), any::<u64>(), any::<u64>(), 0u8..4)
            .prop_map(move |(n, z, x, ph)| PauliString::new(n, z & mask, x & mask, ph).unwrap())
    })
}

fn word_pair(max_n: usize) -> impl Strategy<Value = (PauliString, PauliString)> {
    (1..=max_n).prop_flat_map(|n| {
        let mask = (1u64 << n) - 1;
        let w = move || (any::<u64>(), any::<u64>(), 0u8..4).prop_map(move |(z, x, ph)| PauliString::new(n, z & mask, x & mask, ph).unwrap());
        (w(), w())
    })
}

proptest! {
    #[test]
    fn text_round_trip(w in word(20)) {
        let back: PauliString = w.to_string().parse().unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn products_are_canonical((a, b) in word_pair(12)) {
        let p = pauli_mul(&a, &b).unwrap();
        let again: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(again, p);
        // (ab)b⁻¹ = a with b⁻¹ = b³ up to the scalar b⁴ = I
        let b_inv = pauli_mul(&pauli_mul(&b, &b).unwrap(), &b).unwrap();
        prop_assert_eq!(pauli_mul(&p, &b_inv).unwrap(), a);
    }

    #[test]
    fn product_matches_dense((a, b) in word_pair(4)) {
        let sym = dense::pauli_matrix(&pauli_mul(&a, &b).unwrap()).unwrap();
        let mat = dense::pauli_matrix(&a).unwrap() * dense::pauli_matrix(&b).unwrap();
        prop_assert!(dense::max_abs_diff(&sym, &mat) < 1e-14);
    }

    #[test]
    fn commutation_matches_dense((a, b) in word_pair(4)) {
        let (ma, mb) = (dense::pauli_matrix(&a).unwrap(), dense::pauli_matrix(&b).unwrap());
        prop_assert_eq!(commutes(&a, &b).unwrap(), dense::commutator_norm(&ma, &mb) < 1e-12);
    }

    #[test]
    fn hermitian_iff_dense_hermitian(w in word(4)) {
        let m = dense::pauli_matrix(&w).unwrap();
        prop_assert_eq!(w.is_hermitian(), dense::hermiticity_residual(&m) < 1e-14);
        let sq = pauli_mul(&w, &w).unwrap();
        prop_assert!(sq.is_scalar());
        if w.is_hermitian() {
            prop_assert!(sq.is_identity());
        }
    }

    #[test]
    fn ghz_f_value_is_constant(n in 2usize..=16, theta in 0.0f64..std::f64::consts::TAU, phi in 0.0f64..std::f64::consts::TAU, psi in 0.0f64..std::f64::consts::TAU) {
        let alpha = Complex64::from_polar(theta.cos().abs(), phi);
        let beta = Complex64::from_polar(theta.sin().abs(), psi);
        let s = StateModel::ghz(n, alpha, beta).unwrap();
        prop_assert!((f_value(&s).unwrap() - (1u64 << (n - 1)) as f64).abs() < 1e-9);
    }

    #[test]
    fn assignment_flip_keeps_g(n in 2usize..=20, bits in any::<u64>()) {
        let a = Assignment::from_interleaved(n, bits & ((1u64 << (2 * n)) - 1));
        prop_assert_eq!(a.g_value(), a.flipped().g_value());
    }
}

#[test]
fn lambda_elements_hermitian_involutive_traceless() {
    for n in 1..=6 {
        for p in 0..1u64 << n {
            let o = lambda_element(LambdaIndex::new(n, p).unwrap());
            assert!(o.is_hermitian());
            assert!(pauli_mul(&o, &o).unwrap().is_identity());
            let m = dense::pauli_matrix(&o).unwrap();
            let tr = m.trace();
            if p == 0 {
                assert!((tr.re - (1u64 << n) as f64).abs() < 1e-12);
            } else {
                assert!(tr.norm() < 1e-12, "n={n} p={p}");
            }
        }
    }
}

#[test]
fn lambda_map_is_injective() {
    for n in 1..=10 {
        let mut words: Vec<PauliString> = (0..1u64 << n).map(|p| lambda_element(LambdaIndex::new(n, p).unwrap())).collect();
        words.sort();
        words.dedup();
        assert_eq!(words.len(), 1 << n);
    }
}

#[test]
fn lambda_lower_half_sums_to_hn() {
    for n in 2..=6 {
        let dim = 1usize << n;
        let mut sum = CMatrix::zeros(dim, dim);
        for p in 0..1u64 << (n - 1) {
            sum += dense::lambda_matrix(LambdaIndex::new(n, p).unwrap()).unwrap();
        }
        let hn = kslab_core::states::hn_matrix(n).unwrap();
        assert!(dense::max_abs_diff(&sum, &hn) < 1e-12);
    }
}

#[test]
fn two_partite_lhs_is_four_times_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let s = StateModel::dense(2, dense::random_density(4, &mut rng)).unwrap();
        let report = two_partite_report(&s).unwrap();
        assert!((report.lhs - 4.0 * bell_fidelity(&s).unwrap()).abs() < 1e-10);
        assert!((report.lhs - 4.0 * bell_fidelity_direct(&s).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn random_ghz_pairs_give_constant_f() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in [3usize, 8, 12] {
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let v = dense::random_pure(2, &mut rng);
            let s = StateModel::ghz(n, v[0], v[1]).unwrap();
            worst = worst.max((f_value(&s).unwrap() - (1u64 << (n - 1)) as f64).abs());
        }
        assert!(worst < 1e-9, "n={n}: {worst}");
    }
}
