use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::assignment::{Assignment, CompiledWord};
use crate::error::{Error, Result};
use crate::pauli::{lambda_element, r_element, LambdaIndex, RIndex};

pub const DEFAULT_SAMPLE_SEED: u64 = 0x6b73_6c61_6231;

#[derive(Debug, Clone, Serialize)]
pub struct HvknReport {
    pub n: usize,
    pub exhaustive: bool,
    pub tested: u64,
    /// Generator seed when assignments were sampled.
    pub seed: Option<u64>,
    pub passed: bool,
    pub first_failure: Option<String>,
}

/// Checks, per assignment, `Re ∏(v_x + i v_y) = Σ_{p≥2^{n-1}} f(O_p)` and
/// `Im ∏(v_x + i v_y) = Σ_{p≥2^{n-1}} f(R_p / i)`.
///
/// Exhaustive when `4^n ≤ sample_budget`, otherwise `sample_budget` uniform
/// draws from a ChaCha8 generator seeded with `seed`.
pub fn verify_hvkn(n: usize, sample_budget: u64, seed: u64) -> Result<HvknReport> {
    if !(2..=31).contains(&n) {
        return Err(Error::InvalidSiteCount(n));
    }
    let half = 1u64 << (n - 1);
    let lambda_words = (half..2 * half)
        .map(|p| CompiledWord::new(&lambda_element(LambdaIndex::new(n, p)?)))
        .collect::<Result<Vec<_>>>()?;
    // R_p is anti-Hermitian in the upper half; R_p / i = i^3 · R_p.
    let r_words = (half..2 * half)
        .map(|p| CompiledWord::new(&r_element(RIndex::new(n, p)?).times_i_pow(3)))
        .collect::<Result<Vec<_>>>()?;

    let space = 1u64 << (2 * n);
    let exhaustive = space <= sample_budget;
    let samples: Vec<u64> = if exhaustive {
        (0..space).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..sample_budget).map(|_| rng.random_range(0..space)).collect()
    };

    let check = |&bits: &u64| -> Option<String> {
        let a = Assignment::from_interleaved(n, bits);
        let prod = a.gaussian_product();
        let re: i64 = lambda_words.iter().map(|w| w.value(a.neg_x(), a.neg_y())).sum();
        let im: i64 = r_words.iter().map(|w| w.value(a.neg_x(), a.neg_y())).sum();
        (re != prod.re || im != prod.im).then(|| {
            format!("vx={:?} vy={:?}: product {prod}, sums {re} + {im}i", a.vx_all(), a.vy_all())
        })
    };
    let first_failure = samples.par_iter().map(check).find_first(Option::is_some).flatten();

    Ok(HvknReport {
        n,
        exhaustive,
        tested: samples.len() as u64,
        seed: (!exhaustive).then_some(seed),
        passed: first_failure.is_none(),
        first_failure,
    })
}
