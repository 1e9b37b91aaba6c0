use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::assignment::{Assignment, CompiledWord};
use crate::error::{Error, Result};
use crate::inequalities::multipartite_bound_exact;
use crate::pauli::{lambda_element, LambdaIndex};

/// Largest `n` enumerated by default (`2^28` assignments).
pub const DEFAULT_ENUMERATION_CAP: usize = 14;

/// Largest `n` for which the term-by-term sum over `Λₙ` is also enumerated.
pub const CROSS_CHECK_LIMIT: usize = 8;

/// Low assignment bits walked in Gray order inside one work chunk.
const CHUNK_BITS: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub bound_formula: i64,
    pub bound_bruteforce: i64,
    /// Smallest `G` seen; auxiliary, no bound is claimed for it.
    pub min_bruteforce: i64,
    pub witness_assignment: Assignment,
    pub assignments: u64,
    /// Max over assignments of `Σ_{p<2^{n-1}} f(O_p)`, when `n ≤ CROSS_CHECK_LIMIT`.
    pub cross_check_max: Option<i64>,
    /// Assignments where `Σ_{p<2^{n-1}} f(O_p) ≠ G`.
    pub cross_check_mismatches: Option<u64>,
    #[serde(rename = "elapsed")]
    pub elapsed_secs: f64,
}

impl BoundReport {
    pub fn agrees(&self) -> bool {
        self.bound_formula == self.bound_bruteforce
            && self.cross_check_max.is_none_or(|m| m == self.bound_formula)
            && self.cross_check_mismatches.is_none_or(|m| m == 0)
    }
}

#[derive(Debug, Clone, Copy)]
struct ChunkExtremes {
    max: i64,
    max_bits: u64,
    min: i64,
}

#[inline]
fn bit_sign(bits: u64, pos: usize) -> i64 {
    1 - 2 * ((bits >> pos) & 1) as i64
}

/// Walks the `2^low` assignments sharing high bits `prefix`, one value flip per step.
fn scan_chunk(n: usize, prefix: u64, low: usize) -> ChunkExtremes {
    let mut bits = prefix << low;
    let start = Assignment::from_interleaved(n, bits);
    let mut prod: Complex<i64> = start.gaussian_product();
    let mut x_sign = if start.neg_x().count_ones() % 2 == 0 { 1 } else { -1 };
    let g = prod.re * x_sign;
    let mut out = ChunkExtremes { max: g, max_bits: bits, min: g };
    for k in 1u64..1 << low {
        let pos = k.trailing_zeros() as usize;
        let site = pos / 2;
        let a = bit_sign(bits, 2 * site);
        let b = bit_sign(bits, 2 * site + 1);
        // Flipping v_x maps (a + ib) to (−a + ib) = (a + ib)·(i·a·b);
        // flipping v_y maps it to (a − ib) = (a + ib)·(−i·a·b).
        let s = if pos % 2 == 0 {
            x_sign = -x_sign;
            a * b
        } else {
            -a * b
        };
        prod = Complex::new(-prod.im * s, prod.re * s);
        bits ^= 1 << pos;
        let g = prod.re * x_sign;
        if g > out.max {
            out.max = g;
            out.max_bits = bits;
        }
        out.min = out.min.min(g);
    }
    out
}

fn cross_check(n: usize) -> Result<(i64, u64)> {
    let half = 1u64 << (n - 1);
    let compile = |p| CompiledWord::new(&lambda_element(LambdaIndex::new(n, p)?));
    let top = compile(half)?;
    let partners = (0..half).map(|p| compile(p ^ half)).collect::<Result<Vec<_>>>()?;
    let results: Vec<(i64, u64)> = (0..1u64 << (2 * n))
        .into_par_iter()
        .map(|bits| {
            let a = Assignment::from_interleaved(n, bits);
            let top_value = top.value(a.neg_x(), a.neg_y());
            let sum: i64 = partners.iter().map(|w| w.value(a.neg_x(), a.neg_y()) * top_value).sum();
            (sum, u64::from(sum != a.g_value()))
        })
        .collect();
    let max = results.iter().map(|r| r.0).max().unwrap_or(i64::MIN);
    let mismatches = results.iter().map(|r| r.1).sum();
    Ok((max, mismatches))
}

pub fn bruteforce_bound(n: usize) -> Result<BoundReport> {
    bruteforce_bound_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

/// Maximum of `G` over all `4^n` assignments.
pub fn bruteforce_bound_with_cap(n: usize, cap: usize) -> Result<BoundReport> {
    let bound_formula = multipartite_bound_exact(n)?;
    if n > cap || n > 31 {
        return Err(Error::EnumerationCap { n, cap });
    }
    let started = Instant::now();
    let total_bits = 2 * n;
    let low = total_bits.min(CHUNK_BITS);
    let high = total_bits - low;
    let chunks: Vec<ChunkExtremes> = (0..1u64 << high).into_par_iter().map(|prefix| scan_chunk(n, prefix, low)).collect();
    // Sequential reduction keeps the witness independent of scheduling.
    let mut best = chunks[0];
    let mut min = chunks[0].min;
    for c in &chunks[1..] {
        if c.max > best.max {
            best = *c;
        }
        min = min.min(c.min);
    }
    let (cross_check_max, cross_check_mismatches) = if n <= CROSS_CHECK_LIMIT {
        let (m, bad) = cross_check(n)?;
        (Some(m), Some(bad))
    } else {
        (None, None)
    };
    Ok(BoundReport {
        n,
        bound_formula,
        bound_bruteforce: best.max,
        min_bruteforce: min,
        witness_assignment: Assignment::from_interleaved(n, best.max_bits),
        assignments: 1u64 << total_bits,
        cross_check_max,
        cross_check_mismatches,
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_max(n: usize) -> i64 {
        (0..1u64 << (2 * n)).map(|b| Assignment::from_interleaved(n, b).g_value()).max().unwrap()
    }

    #[test]
    fn small_bounds() {
        for (n, expected) in [(2, 2), (3, 2), (4, 4), (5, 4), (6, 8)] {
            let r = bruteforce_bound(n).unwrap();
            assert_eq!(r.bound_bruteforce, expected, "n={n}");
            assert_eq!(r.bound_bruteforce, direct_max(n));
            assert_eq!(r.witness_assignment.g_value(), expected);
            assert!(r.agrees(), "{r:?}");
        }
    }

    #[test]
    fn gray_walk_visits_every_value() {
        // A chunk split at n = 10 exercises nonzero prefixes.
        let r = bruteforce_bound(10).unwrap();
        assert_eq!(r.bound_bruteforce, 32);
        assert_eq!(r.min_bruteforce, -32);
        assert_eq!(r.witness_assignment.g_value(), 32);
        assert_eq!(r.cross_check_max, None);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(bruteforce_bound_with_cap(9, 8), Err(Error::EnumerationCap { .. })));
        assert!(bruteforce_bound(1).is_err());
    }
}
