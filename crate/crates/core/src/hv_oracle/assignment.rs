use num_complex::Complex;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pauli::{lambda_element, LambdaIndex, PauliString, MAX_SITES};

/// `±1` values of `σ_x^j` and `σ_y^j` on every site.
///
/// Stored as two masks; bit `j - 1` set means the value on site `j` is `−1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    neg_x: u64,
    neg_y: u64,
}

fn sign_of(negative: bool) -> i64 {
    if negative {
        -1
    } else {
        1
    }
}

impl Assignment {
    pub fn new(vx: &[i64], vy: &[i64]) -> Result<Self> {
        let n = vx.len();
        if n == 0 || n > MAX_SITES || vy.len() != n {
            return Err(Error::InvalidSiteCount(n));
        }
        let mut neg_x = 0;
        let mut neg_y = 0;
        for (j, (&x, &y)) in vx.iter().zip(vy).enumerate() {
            for v in [x, y] {
                if v != 1 && v != -1 {
                    return Err(Error::Inconsistent(format!("assignment value {v} is not ±1")));
                }
            }
            neg_x |= u64::from(x < 0) << j;
            neg_y |= u64::from(y < 0) << j;
        }
        Ok(Self { n, neg_x, neg_y })
    }

    pub fn from_masks(n: usize, neg_x: u64, neg_y: u64) -> Self {
        Self { n, neg_x, neg_y }
    }

    /// Decodes the enumeration layout: bit `2(j-1)` is `σ_x^j`, bit `2(j-1)+1` is `σ_y^j`.
    pub fn from_interleaved(n: usize, bits: u64) -> Self {
        let mut neg_x = 0;
        let mut neg_y = 0;
        for j in 0..n {
            neg_x |= (bits >> (2 * j) & 1) << j;
            neg_y |= (bits >> (2 * j + 1) & 1) << j;
        }
        Self { n, neg_x, neg_y }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neg_x(&self) -> u64 {
        self.neg_x
    }

    pub fn neg_y(&self) -> u64 {
        self.neg_y
    }

    pub fn vx(&self, site: usize) -> i64 {
        sign_of(self.neg_x >> (site - 1) & 1 == 1)
    }

    pub fn vy(&self, site: usize) -> i64 {
        sign_of(self.neg_y >> (site - 1) & 1 == 1)
    }

    pub fn vx_all(&self) -> Vec<i64> {
        (1..=self.n).map(|j| self.vx(j)).collect()
    }

    pub fn vy_all(&self) -> Vec<i64> {
        (1..=self.n).map(|j| self.vy(j)).collect()
    }

    /// Every value negated.
    pub fn flipped(&self) -> Self {
        let all = (1u64 << self.n) - 1;
        Self { n: self.n, neg_x: self.neg_x ^ all, neg_y: self.neg_y ^ all }
    }

    /// `∏_j (v_x^j + i v_y^j)` in exact Gaussian integers.
    pub fn gaussian_product(&self) -> Complex<i64> {
        (1..=self.n).fold(Complex::new(1, 0), |acc, j| acc * Complex::new(self.vx(j), self.vy(j)))
    }

    /// `G = Re(∏_j (v_x^j + i v_y^j)) · ∏_j v_x^j`.
    pub fn g_value(&self) -> i64 {
        self.gaussian_product().re * sign_of(self.neg_x.count_ones() % 2 == 1)
    }

    /// Product-rule value of a Hermitian word built from `I`, `X` and `Y` letters.
    pub fn word_value(&self, word: &PauliString) -> Result<i64> {
        Ok(CompiledWord::new(word)?.value(self.neg_x, self.neg_y))
    }

    /// Value of `O^n_p`. Words with `σ_z` letters (`p < 2^{n-1}`) are valued
    /// through `O_p = O_{p⊕2^{n-1}} · O_{2^{n-1}}`, both factors being X/Y words.
    pub fn lambda_value(&self, p: u64) -> Result<i64> {
        let half = 1u64 << (self.n - 1);
        let word = |q| LambdaIndex::new(self.n, q).map(lambda_element);
        if p >= half {
            self.word_value(&word(p)?)
        } else {
            Ok(self.word_value(&word(p ^ half)?)? * self.word_value(&word(half)?)?)
        }
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Assignment", 2)?;
        s.serialize_field("vx", &self.vx_all())?;
        s.serialize_field("vy", &self.vy_all())?;
        s.end()
    }
}

/// A Hermitian X/Y word reduced to masks for fast product-rule evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompiledWord {
    x_sites: u64,
    y_sites: u64,
    sign: i64,
}

impl CompiledWord {
    pub fn new(word: &PauliString) -> Result<Self> {
        let sign = word.sign().ok_or_else(|| Error::NotHermitian(word.to_string()))?;
        if word.z_mask() & !word.x_mask() != 0 {
            return Err(Error::Inconsistent(format!("{word} has σ_z letters with no assigned value")));
        }
        Ok(Self { x_sites: word.x_mask() & !word.z_mask(), y_sites: word.x_mask() & word.z_mask(), sign })
    }

    #[inline]
    pub fn value(&self, neg_x: u64, neg_y: u64) -> i64 {
        let flips = (neg_x & self.x_sites).count_ones() + (neg_y & self.y_sites).count_ones();
        if flips % 2 == 0 {
            self.sign
        } else {
            -self.sign
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_value_examples() {
        let a = Assignment::new(&[1, 1], &[1, 1]).unwrap();
        assert_eq!(a.g_value(), 0);
        let b = Assignment::new(&[1, 1], &[1, -1]).unwrap();
        assert_eq!(b.g_value(), 2);
    }

    #[test]
    fn g_values_n3() {
        for bits in 0..64 {
            let v = Assignment::from_interleaved(3, bits).g_value();
            assert!([-2, 0, 2].contains(&v), "{v}");
        }
    }

    #[test]
    fn global_flip_invariance() {
        for n in 2..=6 {
            for bits in 0..1u64 << (2 * n) {
                let a = Assignment::from_interleaved(n, bits);
                assert_eq!(a.g_value(), a.flipped().g_value());
            }
        }
    }

    #[test]
    fn word_values_carry_sign() {
        let a = Assignment::new(&[1, -1], &[-1, 1]).unwrap();
        assert_eq!(a.word_value(&"XX".parse().unwrap()).unwrap(), -1);
        assert_eq!(a.word_value(&"-YY".parse().unwrap()).unwrap(), 1);
        assert_eq!(a.word_value(&"XI".parse().unwrap()).unwrap(), 1);
        assert!(a.word_value(&"ZZ".parse().unwrap()).is_err());
        assert!(a.word_value(&"iXY".parse().unwrap()).is_err());
        // O²_1 = ZZ = O²_3 · O²_2 = (−YY)(XX)
        assert_eq!(a.lambda_value(1).unwrap(), -a.vy(1) * a.vy(2) * a.vx(1) * a.vx(2));
    }

    #[test]
    fn constructor_validation() {
        assert!(Assignment::new(&[1, 0], &[1, 1]).is_err());
        assert!(Assignment::new(&[1], &[1, 1]).is_err());
    }
}
