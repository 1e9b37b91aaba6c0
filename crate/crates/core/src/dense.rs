//! Dense complex matrices built literally from Kronecker products.
//!
//! These routines are deliberately naive: they serve as oracles for the
//! bitmask algebra and as the backend for small explicit density matrices.
//! Kronecker factors are ordered site `n` first, so site `j` lands on bit
//! `j - 1` of the basis index.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pauli::{LambdaIndex, PauliString, RIndex};

pub type CMatrix = DMatrix<Complex64>;

/// Largest site count for which density matrices are stored.
pub const DENSE_STATE_LIMIT: usize = 10;

/// Largest site count for dense operator-identity checks.
pub const DENSE_IDENTITY_LIMIT: usize = 6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn dim_checked(n: usize, limit: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidSiteCount(n));
    }
    if n > limit {
        return Err(Error::DenseLimit { n, limit });
    }
    Ok(1 << n)
}

pub fn identity2() -> CMatrix {
    CMatrix::identity(2, 2)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Kronecker product of per-site factors; `factors[j - 1]` acts on site `j`.
pub fn kron_sites(factors: &[CMatrix]) -> CMatrix {
    factors
        .iter()
        .rev()
        .fold(CMatrix::from_element(1, 1, ONE), |acc, f| acc.kronecker(f))
}

/// A single-site operator embedded on `site` (1-based) of `n`.
pub fn embed(n: usize, site: usize, op: &CMatrix) -> Result<CMatrix> {
    dim_checked(n, DENSE_STATE_LIMIT)?;
    if site == 0 || site > n {
        return Err(Error::IndexOutOfRange { n, p: site as u64 });
    }
    let factors: Vec<CMatrix> = (1..=n).map(|j| if j == site { op.clone() } else { identity2() }).collect();
    Ok(kron_sites(&factors))
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// `i^phase · ∏_{z_j} σ_z^j · ∏_{x_j} σ_x^j` by explicit matrix products.
pub fn pauli_matrix(word: &PauliString) -> Result<CMatrix> {
    let n = word.n();
    let dim = dim_checked(n, DENSE_STATE_LIMIT)?;
    let mut acc = CMatrix::identity(dim, dim) * i_pow(word.phase_exp());
    for site in 1..=n {
        if word.z_mask() >> (site - 1) & 1 == 1 {
            acc *= embed(n, site, &sigma_z())?;
        }
    }
    for site in 1..=n {
        if word.x_mask() >> (site - 1) & 1 == 1 {
            acc *= embed(n, site, &sigma_x())?;
        }
    }
    Ok(acc)
}

fn product_from_bits(n: usize, bits: &[u8]) -> Result<CMatrix> {
    let dim = dim_checked(n, DENSE_STATE_LIMIT)?;
    let mut acc = CMatrix::identity(dim, dim);
    for j in 1..=n {
        if bits[j] == 1 {
            acc *= embed(n, j, &sigma_z())?;
        }
    }
    if bits[0] == 1 {
        for j in 1..=n {
            acc *= embed(n, j, &sigma_x())?;
        }
    }
    Ok(acc)
}

/// `O^n_p` assembled directly from its index bits.
pub fn lambda_matrix(idx: LambdaIndex) -> Result<CMatrix> {
    product_from_bits(idx.n(), &idx.bits())
}

/// `R^n_p` assembled directly from its index bits.
pub fn r_matrix(idx: RIndex) -> Result<CMatrix> {
    product_from_bits(idx.n(), &idx.bits())
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `Tr[A·B]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let dim = a.nrows();
    let mut acc = ZERO;
    for r in 0..dim {
        for c in 0..dim {
            acc += a[(r, c)] * b[(c, r)];
        }
    }
    acc
}

pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    let comm = a * b - b * a;
    comm.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

/// Projector `|v⟩⟨v|` for a state vector.
pub fn projector(v: &[Complex64]) -> CMatrix {
    let dim = v.len();
    CMatrix::from_fn(dim, dim, |r, c| v[r] * v[c].conj())
}

fn gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = gaussian_matrix(dim, rng).qr();
    let (q, r) = qr.unpack();
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |k, _| {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            ONE
        }
    }));
    q * phases
}

/// Random full-rank density matrix `G G† / Tr[G G†]`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(dim, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Random pure state as a unit vector.
pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{pauli_mul, lambda_element};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn products_agree_with_matrix_multiplication() {
        for (a, b) in [("ZZ", "XX"), ("XY", "YX"), ("XYZ", "ZZY"), ("-iYI", "XZ")] {
            let (a, b) = (w(a), w(b));
            let sym = pauli_matrix(&pauli_mul(&a, &b).unwrap()).unwrap();
            let mat = pauli_matrix(&a).unwrap() * pauli_matrix(&b).unwrap();
            assert!(max_abs_diff(&sym, &mat) < 1e-14);
        }
    }

    #[test]
    fn letters_match_textbook_matrices() {
        assert!(max_abs_diff(&pauli_matrix(&w("Y")).unwrap(), &sigma_y()) < 1e-15);
        let yy = kron_sites(&[sigma_y(), sigma_y()]);
        assert!(max_abs_diff(&pauli_matrix(&w("-YY")).unwrap(), &(-yy)) < 1e-15);
    }

    #[test]
    fn lambda_matrix_matches_mask_form() {
        for n in 1..=4 {
            for p in 0..1u64 << n {
                let idx = LambdaIndex::new(n, p).unwrap();
                let lit = lambda_matrix(idx).unwrap();
                let masked = pauli_matrix(&lambda_element(idx)).unwrap();
                assert!(max_abs_diff(&lit, &masked) < 1e-15);
                assert!(hermiticity_residual(&lit) < 1e-15);
            }
        }
    }

    #[test]
    fn random_objects_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary(4, &mut rng);
        assert!(max_abs_diff(&(&u * u.adjoint()), &CMatrix::identity(4, 4)) < 1e-12);
        let rho = random_density(4, &mut rng);
        assert!((rho.trace() - ONE).norm() < 1e-12);
        assert!(hermiticity_residual(&rho) < 1e-12);
    }

    #[test]
    fn dense_limit_enforced() {
        assert!(matches!(dim_checked(11, DENSE_STATE_LIMIT), Err(Error::DenseLimit { .. })));
    }
}
