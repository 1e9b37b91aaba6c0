//! Exhaustive proofs that no single valuation satisfies a set of
//! operator-product constraints.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::assignment::CompiledWord;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    PeresMermin,
    Ghz,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::PeresMermin => "peres-mermin",
            Scenario::Ghz => "ghz",
        })
    }
}

/// Observables valued `±1`, tied together by two kinds of constraint:
///
/// - factorization: `f(w) = ∏` of its site values (only for X/Y words);
/// - product: `∏_{w ∈ S} f(w)` equals the scalar `±1` that the operator
///   product `∏_{w ∈ S} w` is.
///
/// Words without an active factorization constraint are free variables.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    n: usize,
    words: Vec<PauliString>,
    factorized: Vec<bool>,
    products: Vec<(Vec<usize>, i64)>,
}

impl ConstraintSystem {
    pub fn new(words: Vec<PauliString>) -> Result<Self> {
        let n = words.first().map(PauliString::n).ok_or(Error::InvalidSiteCount(0))?;
        if let Some(w) = words.iter().find(|w| w.n() != n) {
            return Err(Error::SiteMismatch { left: n, right: w.n() });
        }
        let factorized = words.iter().map(|w| CompiledWord::new(w).is_ok()).collect();
        Ok(Self { n, words, factorized, products: Vec::new() })
    }

    /// Adds a product constraint; the forced value is read off the operator product.
    pub fn add_product(&mut self, members: Vec<usize>) -> Result<()> {
        let mut product = PauliString::identity(self.n)?;
        for &k in &members {
            product = product.try_mul(&self.words[k])?;
        }
        let forced = match (product.is_scalar(), product.sign()) {
            (true, Some(s)) => s,
            _ => return Err(Error::Inconsistent(format!("operator product {product} is not ±I"))),
        };
        self.products.push((members, forced));
        Ok(())
    }

    /// Number of constraints: active factorizations first, then products.
    pub fn constraint_count(&self) -> usize {
        self.factorized.iter().filter(|&&f| f).count() + self.products.len()
    }

    /// A copy with constraint `k` (in `constraint_count` order) removed.
    pub fn without(&self, k: usize) -> Self {
        let mut out = self.clone();
        let active: Vec<usize> = (0..self.words.len()).filter(|&i| self.factorized[i]).collect();
        if k < active.len() {
            out.factorized[active[k]] = false;
        } else {
            out.products.remove(k - active.len());
        }
        out
    }

    pub fn rows(&self) -> Vec<ConstraintRow> {
        let mut rows: Vec<ConstraintRow> = self
            .words
            .iter()
            .zip(&self.factorized)
            .filter(|(_, &f)| f)
            .map(|(w, _)| ConstraintRow { constraint: format!("f({w}) = product of site values"), forced_value: None })
            .collect();
        for (members, forced) in &self.products {
            let names: Vec<String> = members.iter().map(|&k| self.words[k].to_string()).collect();
            rows.push(ConstraintRow { constraint: format!("f({})", names.join(") f(")), forced_value: Some(*forced) });
        }
        rows
    }

    fn site_values(&self, word: usize, site_bits: u64) -> i64 {
        let compiled = CompiledWord::new(&self.words[word]).expect("factorized words compile");
        let neg_x = (0..self.n).fold(0u64, |acc, j| acc | (site_bits >> (2 * j) & 1) << j);
        let neg_y = (0..self.n).fold(0u64, |acc, j| acc | (site_bits >> (2 * j + 1) & 1) << j);
        compiled.value(neg_x, neg_y)
    }

    /// Enumerates site values and free word values. Returns the number of
    /// satisfying points, the total enumerated, and for each product
    /// constraint the set of values its factorized product took.
    pub fn enumerate(&self) -> (u64, u64, Vec<BTreeSet<i64>>) {
        let free: Vec<usize> = (0..self.words.len()).filter(|&i| !self.factorized[i]).collect();
        let site_count = 1u64 << (2 * self.n);
        let free_count = 1u64 << free.len();
        let mut satisfying = 0;
        let mut seen = vec![BTreeSet::new(); self.products.len()];
        let mut values = vec![0i64; self.words.len()];
        for site_bits in 0..site_count {
            for (i, v) in values.iter_mut().enumerate() {
                if self.factorized[i] {
                    *v = self.site_values(i, site_bits);
                }
            }
            for free_bits in 0..free_count {
                for (k, &i) in free.iter().enumerate() {
                    values[i] = 1 - 2 * ((free_bits >> k) & 1) as i64;
                }
                let mut ok = true;
                for ((members, forced), seen) in self.products.iter().zip(seen.iter_mut()) {
                    let product: i64 = members.iter().map(|&k| values[k]).product();
                    seen.insert(product);
                    ok &= product == *forced;
                }
                satisfying += u64::from(ok);
            }
        }
        (satisfying, site_count * free_count, seen)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstraintRow {
    pub constraint: String,
    pub forced_value: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContradictionCertificate {
    pub scenario: Scenario,
    pub constraints: Vec<ConstraintRow>,
    pub satisfying_count: u64,
    pub enumerated: u64,
    /// Values taken by each product constraint's left side over the enumeration.
    pub product_values: Vec<Vec<i64>>,
    /// Satisfying counts with each single constraint removed.
    pub relaxed_counts: Vec<u64>,
    pub conclusion: String,
}

impl ContradictionCertificate {
    fn from_system(scenario: Scenario, system: &ConstraintSystem) -> Self {
        let (satisfying_count, enumerated, seen) = system.enumerate();
        let relaxed_counts = (0..system.constraint_count()).map(|k| system.without(k).enumerate().0).collect();
        let conclusion = if satisfying_count == 0 {
            format!("no ±1 valuation satisfies all constraints ({enumerated} points enumerated)")
        } else {
            format!("{satisfying_count} of {enumerated} points satisfy all constraints")
        };
        Self {
            scenario,
            constraints: system.rows(),
            satisfying_count,
            enumerated,
            product_values: seen.into_iter().map(|s| s.into_iter().collect()).collect(),
            relaxed_counts,
            conclusion,
        }
    }

    pub fn holds(&self) -> bool {
        self.satisfying_count == 0
    }
}

impl fmt::Display for ContradictionCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario: {}", self.scenario)?;
        writeln!(f, "{:<40} forced", "constraint")?;
        for row in &self.constraints {
            let forced = row.forced_value.map_or("-".to_string(), |v| format!("{v:+}"));
            writeln!(f, "{:<40} {forced}", row.constraint)?;
        }
        writeln!(f, "satisfying: {} / {}", self.satisfying_count, self.enumerated)?;
        write!(f, "{}", self.conclusion)
    }
}

fn words(list: &[&str]) -> Result<Vec<PauliString>> {
    list.iter().map(|s| s.parse()).collect()
}

pub fn peres_mermin_system() -> Result<ConstraintSystem> {
    let mut system = ConstraintSystem::new(words(&["XX", "YY", "ZZ", "XY", "YX"])?)?;
    system.add_product(vec![0, 1, 2])?;
    system.add_product(vec![3, 4, 2])?;
    Ok(system)
}

pub fn ghz_system() -> Result<ConstraintSystem> {
    let mut system = ConstraintSystem::new(words(&["XYY", "YXY", "YYX", "XXX"])?)?;
    system.add_product(vec![0, 1, 2, 3])?;
    Ok(system)
}

/// `XX·YY·ZZ = −I` and `XY·YX·ZZ = +I` cannot both be honoured by factorized values.
pub fn peres_mermin_certificate() -> Result<ContradictionCertificate> {
    Ok(ContradictionCertificate::from_system(Scenario::PeresMermin, &peres_mermin_system()?))
}

/// `XYY·YXY·YYX·XXX = −I`, while the factorized product is identically `+1`.
pub fn ghz_certificate() -> Result<ContradictionCertificate> {
    Ok(ContradictionCertificate::from_system(Scenario::Ghz, &ghz_system()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peres_mermin() {
        let c = peres_mermin_certificate().unwrap();
        assert_eq!(c.satisfying_count, 0);
        assert_eq!(c.enumerated, 32);
        let forced: Vec<_> = c.constraints.iter().filter_map(|r| r.forced_value).collect();
        assert_eq!(forced, vec![-1, 1]);
        assert_eq!(c.relaxed_counts.len(), 6);
        assert!(c.relaxed_counts.iter().all(|&k| k > 0));
    }

    #[test]
    fn ghz() {
        let c = ghz_certificate().unwrap();
        assert_eq!(c.satisfying_count, 0);
        assert_eq!(c.enumerated, 64);
        assert_eq!(c.product_values, vec![vec![1]]);
        assert_eq!(c.constraints.last().unwrap().forced_value, Some(-1));
        assert!(c.relaxed_counts.iter().all(|&k| k > 0));
        assert!(c.to_string().contains("XYY"));
    }

    #[test]
    fn non_scalar_products_are_rejected() {
        let mut s = ConstraintSystem::new(words(&["XX", "ZZ"]).unwrap()).unwrap();
        assert!(s.add_product(vec![0]).is_err());
    }
}
