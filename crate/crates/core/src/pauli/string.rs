use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported site count. Group indices `p < 2^n` must fit in a `u64`.
pub const MAX_SITES: usize = 63;

/// A single-site Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// An `n`-site Pauli word in phase + binary-mask form.
///
/// The represented operator is `i^phase_exp · Z^z_mask · X^x_mask`, Z-part on
/// the left. The letter form used for display differs from it by
/// `i^{|z ∧ x|}`, because `σ_z σ_x = i σ_y` on every site carrying both bits;
/// see [`PauliString::letter_phase`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    z: u64,
    x: u64,
    phase: u8,
}

fn site_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn new(n: usize, z_mask: u64, x_mask: u64, phase_exp: u8) -> Result<Self> {
        if n == 0 || n > MAX_SITES {
            return Err(Error::InvalidSiteCount(n));
        }
        let mask = site_mask(n);
        if z_mask & !mask != 0 || x_mask & !mask != 0 {
            return Err(Error::ParseWord {
                text: format!("z={z_mask:#b} x={x_mask:#b}"),
                reason: format!("mask has bits beyond {n} sites"),
            });
        }
        Ok(Self { n, z: z_mask, x: x_mask, phase: phase_exp % 4 })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0, 0, 0)
    }

    /// A single letter on `site` (1-based) with identity elsewhere and letter phase `+1`.
    pub fn single(n: usize, site: usize, letter: Letter) -> Result<Self> {
        if site == 0 || site > n {
            return Err(Error::IndexOutOfRange { n, p: site as u64 });
        }
        let bit = 1u64 << (site - 1);
        match letter {
            Letter::I => Self::new(n, 0, 0, 0),
            Letter::X => Self::new(n, 0, bit, 0),
            Letter::Z => Self::new(n, bit, 0, 0),
            // σ_y = -i σ_z σ_x
            Letter::Y => Self::new(n, bit, bit, 3),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    /// Phase exponent of the Z-before-X form.
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    /// Number of sites carrying a `σ_y` letter.
    pub fn y_count(&self) -> u32 {
        (self.z & self.x).count_ones()
    }

    pub fn weight(&self) -> u32 {
        (self.z | self.x).count_ones()
    }

    /// Phase exponent relative to the letter word, e.g. `2` for `-YY`.
    pub fn letter_phase(&self) -> u8 {
        ((self.phase as u32 + self.y_count()) % 4) as u8
    }

    pub fn is_hermitian(&self) -> bool {
        self.letter_phase() % 2 == 0
    }

    /// `±1` prefactor of the letter word when the word is Hermitian.
    pub fn sign(&self) -> Option<i64> {
        match self.letter_phase() {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.z == 0 && self.x == 0 && self.phase == 0
    }

    /// True when the word is a scalar multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        self.z == 0 && self.x == 0
    }

    pub fn letter(&self, site: usize) -> Letter {
        let bit = 1u64 << (site - 1);
        match (self.z & bit != 0, self.x & bit != 0) {
            (false, false) => Letter::I,
            (false, true) => Letter::X,
            (true, false) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    /// Multiplies the word by `i^k`.
    pub fn times_i_pow(self, k: u8) -> Self {
        Self { phase: (self.phase + k % 4) % 4, ..self }
    }

    /// The same masks with phase chosen so the letter word has prefactor `+1`.
    pub fn unsigned(self) -> Self {
        Self { phase: ((4 - self.y_count() % 4) % 4) as u8, ..self }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SiteMismatch { left: self.n, right: other.n });
        }
        // Z^a X^b Z^c X^d = (-1)^{|b ∧ c|} Z^{a⊕c} X^{b⊕d}
        let swaps = (self.x & other.z).count_ones();
        let phase = (self.phase as u32 + other.phase as u32 + 2 * swaps) % 4;
        Ok(Self { n: self.n, z: self.z ^ other.z, x: self.x ^ other.x, phase: phase as u8 })
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::SiteMismatch { left: self.n, right: other.n });
        }
        let form = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        Ok(form % 2 == 0)
    }
}

/// Operator product `a · b`.
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.try_mul(b)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.letter_phase() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for site in 1..=self.n {
            write!(f, "{}", self.letter(site).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[+|-][i]` followed by one of `IXYZ` per site. A missing sign means `+`.
    fn from_str(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::ParseWord { text: text.to_string(), reason: reason.to_string() };
        let trimmed = text.trim();
        let (negative, rest) = match trimmed.as_bytes().first() {
            Some(b'+') => (false, &trimmed[1..]),
            Some(b'-') => (true, &trimmed[1..]),
            _ => (false, trimmed),
        };
        let (imaginary, letters) = match rest.strip_prefix('i') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let n = letters.chars().count();
        if n == 0 {
            return Err(err("no site letters"));
        }
        if n > MAX_SITES {
            return Err(err("too many sites"));
        }
        let (mut z, mut x) = (0u64, 0u64);
        for (idx, c) in letters.chars().enumerate() {
            let bit = 1u64 << idx;
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= bit,
                'Z' => z |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                }
                _ => return Err(err(&format!("unexpected letter {c:?}"))),
            }
        }
        let letter_phase = (if negative { 2 } else { 0 }) + u32::from(imaginary);
        let y = (z & x).count_ones();
        let phase = (letter_phase + 4 - y % 4) % 4;
        PauliString::new(n, z, x, phase as u8)
    }
}
