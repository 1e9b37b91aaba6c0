//! Frozen values from independent dense and enumeration oracles.

use kslab_core::dense::{self, kron_sites, sigma_x, sigma_y, sigma_z, CMatrix};
use kslab_core::hv_oracle::{ghz_certificate, peres_mermin_certificate, Assignment};
use kslab_core::pauli::{lambda_element, pauli_mul, r_element, LambdaIndex, PauliString, RIndex};
use kslab_core::states::{expectation, StateModel};
use num_complex::Complex64;

fn w(s: &str) -> PauliString {
    s.parse().unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn zz_xx_product_matches_dense_oracle() {
    let zz = kron_sites(&[sigma_z(), sigma_z()]);
    let xx = kron_sites(&[sigma_x(), sigma_x()]);
    let minus_yy = kron_sites(&[sigma_y(), sigma_y()]) * c(-1.0);
    assert!(dense::max_abs_diff(&(zz * xx), &minus_yy) < 1e-15);
    assert_eq!(pauli_mul(&w("ZZ"), &w("XX")).unwrap(), w("-YY"));
}

#[test]
fn assumed_rule_xy_yx_is_zz() {
    let xy = kron_sites(&[sigma_x(), sigma_y()]);
    let yx = kron_sites(&[sigma_y(), sigma_x()]);
    let zz = kron_sites(&[sigma_z(), sigma_z()]);
    assert!(dense::max_abs_diff(&(xy * yx), &zz) < 1e-15);
    assert_eq!(pauli_mul(&w("XY"), &w("YX")).unwrap(), w("ZZ"));
}

#[test]
fn o2_3_is_minus_yy_and_r_elements() {
    let o3 = dense::lambda_matrix(LambdaIndex::new(2, 3).unwrap()).unwrap();
    let yy = kron_sites(&[sigma_y(), sigma_y()]);
    assert!(dense::max_abs_diff(&o3, &(yy * c(-1.0))).abs() < 1e-15);
    assert_eq!(lambda_element(LambdaIndex::new(2, 3).unwrap()).letter_phase(), 2);

    // R²_0 + R²_1 = Z¹ + Z²
    let sum = dense::r_matrix(RIndex::new(2, 0).unwrap()).unwrap() + dense::r_matrix(RIndex::new(2, 1).unwrap()).unwrap();
    let expected = kron_sites(&[sigma_z(), dense::identity2()]) + kron_sites(&[dense::identity2(), sigma_z()]);
    assert!(dense::max_abs_diff(&sum, &expected) < 1e-15);

    // R²_2 = σ¹_x (iσ²_y)
    let r2 = dense::r_matrix(RIndex::new(2, 2).unwrap()).unwrap();
    let expected = kron_sites(&[sigma_x(), sigma_y()]) * Complex64::new(0.0, 1.0);
    assert!(dense::max_abs_diff(&r2, &expected) < 1e-15);
    assert_eq!(r_element(RIndex::new(2, 2).unwrap()), w("+iXY"));
}

#[test]
fn o2_1_times_o2_2_is_o2_3_densely() {
    let m = |p| dense::lambda_matrix(LambdaIndex::new(2, p).unwrap()).unwrap();
    assert!(dense::max_abs_diff(&(m(1) * m(2)), &m(3)) < 1e-15);
}

#[test]
fn werner_and_ghz_expectations_against_dense() {
    let rho = StateModel::werner(0.5).unwrap().to_density_matrix().unwrap();
    for (word, mats, expected) in [
        ("XX", [sigma_x(), sigma_x()], 0.5),
        ("YY", [sigma_y(), sigma_y()], 0.5),
        ("ZZ", [sigma_z(), sigma_z()], -0.5),
    ] {
        let oracle = dense::trace_product(&rho, &kron_sites(&mats)).re;
        assert!((oracle - expected).abs() < 1e-12);
        let engine = expectation(&StateModel::werner(0.5).unwrap(), &w(word)).unwrap().re;
        assert!((engine - expected).abs() < 1e-12);
    }
    let ghz = StateModel::ghz_balanced(3).unwrap();
    let xxx = kron_sites(&[sigma_x(), sigma_x(), sigma_x()]);
    assert!((dense::trace_product(&ghz.to_density_matrix().unwrap(), &xxx).re - 1.0).abs() < 1e-12);
}

#[test]
fn mixed_state_fidelity_oracle() {
    let rho = CMatrix::identity(4, 4) * c(0.25);
    let s = StateModel::dense(2, rho).unwrap();
    assert!((kslab_core::states::bell_fidelity(&s).unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn certificate_products_are_minus_and_plus_identity() {
    let id4 = CMatrix::identity(4, 4);
    let (x, y, z) = (sigma_x(), sigma_y(), sigma_z());
    let k = |a: &CMatrix, b: &CMatrix| kron_sites(&[a.clone(), b.clone()]);
    let first = k(&x, &x) * k(&y, &y) * k(&z, &z);
    let second = k(&x, &y) * k(&y, &x) * k(&z, &z);
    assert!(dense::max_abs_diff(&first, &(&id4 * c(-1.0))) < 1e-15);
    assert!(dense::max_abs_diff(&second, &id4) < 1e-15);

    let k3 = |a: &CMatrix, b: &CMatrix, d: &CMatrix| kron_sites(&[a.clone(), b.clone(), d.clone()]);
    let ghz = k3(&x, &y, &y) * k3(&y, &x, &y) * k3(&y, &y, &x) * k3(&x, &x, &x);
    assert!(dense::max_abs_diff(&ghz, &(CMatrix::identity(8, 8) * c(-1.0))) < 1e-15);

    let pm = peres_mermin_certificate().unwrap();
    let forced: Vec<i64> = pm.constraints.iter().filter_map(|r| r.forced_value).collect();
    assert_eq!(forced, vec![-1, 1]);
    assert_eq!(ghz_certificate().unwrap().constraints.last().unwrap().forced_value, Some(-1));
}

#[test]
fn ghz_factorized_product_is_identically_plus_one() {
    let words = ["XYY", "YXY", "YYX", "XXX"].map(w);
    for bits in 0..64 {
        let a = Assignment::from_interleaved(3, bits);
        let y: i64 = words.iter().map(|word| a.word_value(word).unwrap()).product();
        assert_eq!(y, 1);
    }
}

#[test]
fn g_value_enumeration_n3() {
    let mut values: Vec<i64> = (0..64).map(|b| Assignment::from_interleaved(3, b).g_value()).collect();
    values.sort();
    values.dedup();
    assert!(values.iter().all(|v| [-2, 0, 2].contains(v)));
    assert_eq!(*values.last().unwrap(), 2);
}
