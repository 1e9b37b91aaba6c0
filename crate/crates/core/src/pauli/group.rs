use super::string::{PauliString, MAX_SITES};
use crate::error::{Error, Result};

fn check_index(n: usize, p: u64) -> Result<()> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::InvalidSiteCount(n));
    }
    if p >> n != 0 {
        return Err(Error::IndexOutOfRange { n, p });
    }
    Ok(())
}

/// Index bits `b_0 … b_n`: `b_0 … b_{n-1}` is the binary representation of
/// `p` with `b_0` most significant, and `b_n` closes the parity of `b_1 … b_n`
/// to `target_parity`.
fn index_bits(n: usize, p: u64, target_parity: u32) -> Vec<u8> {
    let mut bits: Vec<u8> = (0..n).map(|k| ((p >> (n - 1 - k)) & 1) as u8).collect();
    let inner: u32 = bits[1..].iter().map(|&b| u32::from(b)).sum();
    bits.push(((inner + target_parity) % 2) as u8);
    bits
}

/// Z-mask (site `j` at bit `j - 1`) and the all-sites X flag for `b_0 … b_n`.
fn masks_from_bits(n: usize, bits: &[u8]) -> (u64, u64) {
    let z = (1..=n).fold(0u64, |acc, j| acc | (u64::from(bits[j]) << (j - 1)));
    let x = if bits[0] == 1 { (1u64 << n) - 1 } else { 0 };
    (z, x)
}

/// Index of an element `O^n_p` of the commutative group `Λₙ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LambdaIndex {
    n: usize,
    p: u64,
}

impl LambdaIndex {
    pub fn new(n: usize, p: u64) -> Result<Self> {
        check_index(n, p)?;
        Ok(Self { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `b_0, b_1, …, b_n`; the parity of `b_1 … b_n` is even.
    pub fn bits(&self) -> Vec<u8> {
        index_bits(self.n, self.p, 0)
    }

    pub fn all(n: usize) -> Result<impl Iterator<Item = LambdaIndex>> {
        check_index(n, 0)?;
        Ok((0..1u64 << n).map(move |p| LambdaIndex { n, p }))
    }
}

/// Index of a companion word `R^n_p`, whose z-parity is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RIndex {
    n: usize,
    p: u64,
}

impl RIndex {
    pub fn new(n: usize, p: u64) -> Result<Self> {
        check_index(n, p)?;
        Ok(Self { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `e_0, e_1, …, e_n`; the parity of `e_1 … e_n` is odd.
    pub fn bits(&self) -> Vec<u8> {
        index_bits(self.n, self.p, 1)
    }
}

/// `O^n_p = ∏_j (σ_z^j)^{b_j} · ∏_j (σ_x^j)^{b_0}`.
pub fn lambda_element(idx: LambdaIndex) -> PauliString {
    let (z, x) = masks_from_bits(idx.n, &idx.bits());
    let word = PauliString::new(idx.n, z, x, 0).expect("masks fit the site count");
    debug_assert!(word.is_hermitian());
    word
}

/// `R^n_p = ∏_j (σ_z^j)^{e_j} · ∏_j (σ_x^j)^{e_0}`; anti-Hermitian for `p ≥ 2^{n-1}`.
pub fn r_element(idx: RIndex) -> PauliString {
    let (z, x) = masks_from_bits(idx.n, &idx.bits());
    PauliString::new(idx.n, z, x, 0).expect("masks fit the site count")
}

/// Group law of `Λₙ`: returns `p ⊕ q` after confirming `O_p · O_q = O_{p⊕q}` exactly.
pub fn group_product(p: LambdaIndex, q: LambdaIndex) -> Result<LambdaIndex> {
    if p.n != q.n {
        return Err(Error::SiteMismatch { left: p.n, right: q.n });
    }
    let r = LambdaIndex { n: p.n, p: p.p ^ q.p };
    let product = lambda_element(p).try_mul(&lambda_element(q))?;
    let expected = lambda_element(r);
    if product != expected {
        return Err(Error::Inconsistent(format!(
            "O_{} · O_{} = {product}, expected O_{} = {expected}",
            p.p, q.p, r.p
        )));
    }
    Ok(r)
}

pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.commutes_with(b)
}
