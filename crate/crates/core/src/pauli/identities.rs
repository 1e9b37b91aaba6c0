//! The four sum identities linking products of local factors to partial sums
//! over `Λₙ` and the companion family `R^n_p`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use serde::Serialize;

use super::group::{lambda_element, r_element, LambdaIndex, RIndex};
use super::string::{Letter, PauliString};
use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};

type Gaussian = Complex<i64>;

fn i_pow(k: u8) -> Gaussian {
    match k % 4 {
        0 => Gaussian::new(1, 0),
        1 => Gaussian::new(0, 1),
        2 => Gaussian::new(-1, 0),
        _ => Gaussian::new(0, -1),
    }
}

/// A linear combination of Pauli words with Gaussian-integer coefficients.
///
/// Keys are `(z_mask, x_mask)` of the phase-free Z-before-X word; all phases
/// live in the coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<(u64, u64), Gaussian>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn from_word(word: &PauliString, coeff: Gaussian) -> Self {
        let mut sum = Self::zero(word.n());
        sum.add_word(word, coeff);
        sum
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_word(&mut self, word: &PauliString, coeff: Gaussian) {
        let c = coeff * i_pow(word.phase_exp());
        let entry = self.terms.entry((word.z_mask(), word.x_mask())).or_insert(Gaussian::new(0, 0));
        *entry += c;
        if *entry == Gaussian::new(0, 0) {
            self.terms.remove(&(word.z_mask(), word.x_mask()));
        }
    }

    pub fn add(&self, other: &Self, sign: i64) -> Self {
        let mut out = self.clone();
        for (&(z, x), &c) in &other.terms {
            let word = PauliString::new(self.n, z, x, 0).expect("same site count");
            out.add_word(&word, c * sign);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SiteMismatch { left: self.n, right: other.n });
        }
        let mut out = Self::zero(self.n);
        for (&(z1, x1), &c1) in &self.terms {
            let a = PauliString::new(self.n, z1, x1, 0)?;
            for (&(z2, x2), &c2) in &other.terms {
                let b = PauliString::new(self.n, z2, x2, 0)?;
                out.add_word(&a.try_mul(&b)?, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Exact division by two; fails if any coefficient is odd.
    pub fn halve(&self) -> Result<Self> {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            if c.re % 2 != 0 || c.im % 2 != 0 {
                return Err(Error::Inconsistent(format!("coefficient {c} is not divisible by 2")));
            }
            *c = Gaussian::new(c.re / 2, c.im / 2);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as (letter-form word with `+` prefix, coefficient on that word).
    pub fn letter_terms(&self) -> Vec<(PauliString, Gaussian)> {
        self.terms
            .iter()
            .map(|(&(z, x), &c)| {
                let raw = PauliString::new(self.n, z, x, 0).expect("valid masks");
                let letters = raw.unsigned();
                // raw = i^{-phase(letters)} · letters
                (letters, c * i_pow((4 - letters.phase_exp()) % 4))
            })
            .collect()
    }

    /// First word whose coefficient differs, rendered for reports.
    fn first_difference(&self, other: &Self) -> Option<String> {
        let diff = self.add(other, -1);
        diff.letter_terms().into_iter().next().map(|(word, c)| {
            let lhs = coefficient_of(&self.letter_terms(), &word);
            let rhs = coefficient_of(&other.letter_terms(), &word);
            format!("{word}: lhs {lhs} vs rhs {rhs} (difference {c})")
        })
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        let dim = dense::dim_checked(self.n, dense::DENSE_IDENTITY_LIMIT)?;
        let mut out = CMatrix::zeros(dim, dim);
        for (&(z, x), &c) in &self.terms {
            let word = PauliString::new(self.n, z, x, 0)?;
            out += dense::pauli_matrix(&word)? * num_complex::Complex64::new(c.re as f64, c.im as f64);
        }
        Ok(out)
    }
}

fn coefficient_of(terms: &[(PauliString, Gaussian)], word: &PauliString) -> Gaussian {
    terms.iter().find(|(w, _)| w == word).map(|&(_, c)| c).unwrap_or(Gaussian::new(0, 0))
}

/// Which of the four identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SumIdentity {
    /// `½(∏(I+σ_z) + ∏(I−σ_z)) = Σ_{p<2^{n-1}} O_p`
    ZPlusLambda,
    /// `½(∏(I+σ_z) − ∏(I−σ_z)) = Σ_{p<2^{n-1}} R_p`
    ZMinusR,
    /// `½(∏(σ_x+iσ_y) + ∏(σ_x−iσ_y)) = Σ_{p≥2^{n-1}} O_p`
    XyPlusLambda,
    /// `½(∏(σ_x+iσ_y) − ∏(σ_x−iσ_y)) = Σ_{p≥2^{n-1}} R_p`
    XyMinusR,
}

impl SumIdentity {
    pub const ALL: [SumIdentity; 4] =
        [SumIdentity::ZPlusLambda, SumIdentity::ZMinusR, SumIdentity::XyPlusLambda, SumIdentity::XyMinusR];

    fn uses_xy(self) -> bool {
        matches!(self, SumIdentity::XyPlusLambda | SumIdentity::XyMinusR)
    }

    fn sign(self) -> i64 {
        match self {
            SumIdentity::ZPlusLambda | SumIdentity::XyPlusLambda => 1,
            _ => -1,
        }
    }

    fn upper_half(self) -> bool {
        self.uses_xy()
    }

    fn uses_r(self) -> bool {
        matches!(self, SumIdentity::ZMinusR | SumIdentity::XyMinusR)
    }
}

impl fmt::Display for SumIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SumIdentity::ZPlusLambda => "(prod(I+Z) + prod(I-Z))/2 = sum O_p, p < 2^(n-1)",
            SumIdentity::ZMinusR => "(prod(I+Z) - prod(I-Z))/2 = sum R_p, p < 2^(n-1)",
            SumIdentity::XyPlusLambda => "(prod(X+iY) + prod(X-iY))/2 = sum O_p, p >= 2^(n-1)",
            SumIdentity::XyMinusR => "(prod(X+iY) - prod(X-iY))/2 = sum R_p, p >= 2^(n-1)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub identity: SumIdentity,
    pub holds: bool,
    pub first_mismatch: Option<String>,
    /// Max-entry residual; only set on the dense path.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub symbolic: Vec<IdentityCheck>,
    pub dense: Option<Vec<IdentityCheck>>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.symbolic.iter().chain(self.dense.iter().flatten()).all(|c| c.holds)
    }
}

/// Local factor `I ± σ_z` or `σ_x ± iσ_y` on one site.
fn site_factor(n: usize, site: usize, xy: bool, sign: i64) -> Result<PauliSum> {
    let one = Gaussian::new(1, 0);
    let (first, second, coeff) = if xy {
        (Letter::X, Letter::Y, Gaussian::new(0, sign))
    } else {
        (Letter::I, Letter::Z, Gaussian::new(sign, 0))
    };
    let mut sum = PauliSum::from_word(&PauliString::single(n, site, first)?, one);
    sum.add_word(&PauliString::single(n, site, second)?, coeff);
    Ok(sum)
}

fn local_product(n: usize, xy: bool, sign: i64) -> Result<PauliSum> {
    let mut acc = PauliSum::from_word(&PauliString::identity(n)?, Gaussian::new(1, 0));
    for site in 1..=n {
        acc = acc.mul(&site_factor(n, site, xy, sign)?)?;
    }
    Ok(acc)
}

fn half_range(n: usize, upper: bool) -> std::ops::Range<u64> {
    let half = 1u64 << (n - 1);
    if upper {
        half..2 * half
    } else {
        0..half
    }
}

/// Expands the left-hand side of an identity into Pauli words with exact coefficients.
pub fn identity_lhs(n: usize, identity: SumIdentity) -> Result<PauliSum> {
    let plus = local_product(n, identity.uses_xy(), 1)?;
    let minus = local_product(n, identity.uses_xy(), -1)?;
    plus.add(&minus, identity.sign()).halve()
}

pub fn identity_rhs(n: usize, identity: SumIdentity) -> Result<PauliSum> {
    let mut sum = PauliSum::zero(n);
    for p in half_range(n, identity.upper_half()) {
        let word = if identity.uses_r() {
            r_element(RIndex::new(n, p)?)
        } else {
            lambda_element(LambdaIndex::new(n, p)?)
        };
        sum.add_word(&word, Gaussian::new(1, 0));
    }
    Ok(sum)
}

fn dense_factor(n: usize, site: usize, xy: bool, sign: f64) -> Result<CMatrix> {
    let one = num_complex::Complex64::new(1.0, 0.0);
    Ok(if xy {
        dense::embed(n, site, &dense::sigma_x())? + dense::embed(n, site, &dense::sigma_y())? * num_complex::Complex64::new(0.0, sign)
    } else {
        dense::embed(n, site, &dense::identity2())? + dense::embed(n, site, &dense::sigma_z())? * (one * sign)
    })
}

fn dense_check(n: usize, identity: SumIdentity) -> Result<IdentityCheck> {
    let dim = dense::dim_checked(n, dense::DENSE_IDENTITY_LIMIT)?;
    let product = |sign: f64| -> Result<CMatrix> {
        let mut acc = CMatrix::identity(dim, dim);
        for site in 1..=n {
            acc *= dense_factor(n, site, identity.uses_xy(), sign)?;
        }
        Ok(acc)
    };
    let lhs = (product(1.0)? + product(-1.0)? * num_complex::Complex64::new(identity.sign() as f64, 0.0))
        * num_complex::Complex64::new(0.5, 0.0);
    let mut rhs = CMatrix::zeros(dim, dim);
    for p in half_range(n, identity.upper_half()) {
        rhs += if identity.uses_r() {
            dense::r_matrix(RIndex::new(n, p)?)?
        } else {
            dense::lambda_matrix(LambdaIndex::new(n, p)?)?
        };
    }
    let residual = dense::max_abs_diff(&lhs, &rhs);
    let holds = residual < crate::IDENTITY_TOL;
    Ok(IdentityCheck {
        identity,
        holds,
        first_mismatch: (!holds).then(|| format!("max entry residual {residual:e}")),
        residual: Some(residual),
    })
}

/// Checks all four identities symbolically and, for `n ≤ 6`, with dense matrices.
pub fn verify_sum_identities(n: usize) -> Result<IdentityReport> {
    if !(2..=super::MAX_SITES).contains(&n) {
        return Err(Error::InvalidSiteCount(n));
    }
    let symbolic = SumIdentity::ALL
        .iter()
        .map(|&identity| {
            let lhs = identity_lhs(n, identity)?;
            let rhs = identity_rhs(n, identity)?;
            let first_mismatch = lhs.first_difference(&rhs);
            Ok(IdentityCheck { identity, holds: first_mismatch.is_none(), first_mismatch, residual: None })
        })
        .collect::<Result<Vec<_>>>()?;
    let dense = if n <= dense::DENSE_IDENTITY_LIMIT {
        Some(SumIdentity::ALL.iter().map(|&id| dense_check(n, id)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    Ok(IdentityReport { n, symbolic, dense })
}
