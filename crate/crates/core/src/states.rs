//! State models and the expectation engine `Tr[ψ·P]`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::dense::{self, CMatrix, DENSE_STATE_LIMIT};
use crate::error::{Error, Result};
use crate::pauli::{lambda_element, LambdaIndex, PauliString};

const NORM_TOL: f64 = 1e-10;

/// A quantum state on `n` qubits.
///
/// `|+⟩` and `|−⟩` are the `σ_z` eigenstates, basis values 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub enum StateModel {
    /// Explicit `2^n × 2^n` density matrix.
    Dense { n: usize, rho: CMatrix },
    /// Uncorrelated state given by one Bloch vector `(r_x, r_y, r_z)` per site.
    Product { bloch: Vec<[f64; 3]> },
    /// `α|+…+⟩ + β|−…−⟩`.
    Ghz { n: usize, alpha: Complex64, beta: Complex64 },
    /// `λ|π⟩⟨π| + (1−λ)I/4` with `|π⟩ = (|+−⟩ + |−+⟩)/√2`.
    Werner { lambda: f64 },
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn parity_sign(bits: u64) -> f64 {
    if bits.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `⟨row|P|col⟩` for computational basis states; nonzero only when `row = col ⊕ x`.
fn word_element(word: &PauliString, row: usize, col: usize) -> Complex64 {
    let row = row as u64;
    if row != (col as u64) ^ word.x_mask() {
        return Complex64::new(0.0, 0.0);
    }
    i_pow(word.phase_exp()) * parity_sign(word.z_mask() & row)
}

/// `⟨v|P|v⟩` for a vector given by its nonzero amplitudes.
fn sparse_pure_expectation(amplitudes: &[(usize, Complex64)], word: &PauliString) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(row, a_row) in amplitudes {
        for &(col, a_col) in amplitudes {
            acc += a_row.conj() * a_col * word_element(word, row, col);
        }
    }
    acc
}

fn pi_amplitudes() -> [(usize, Complex64); 2] {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    // |+_1 −_2⟩ has site 2 set (index 2); |−_1 +_2⟩ has index 1.
    [(2, a), (1, a)]
}

impl StateModel {
    pub fn dense(n: usize, rho: CMatrix) -> Result<Self> {
        let dim = dense::dim_checked(n, DENSE_STATE_LIMIT)?;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::InvalidState(format!("expected a {dim}x{dim} matrix, got {}x{}", rho.nrows(), rho.ncols())));
        }
        let herm = dense::hermiticity_residual(&rho);
        if herm > NORM_TOL {
            return Err(Error::InvalidState(format!("matrix is not Hermitian (residual {herm:e})")));
        }
        let tr = rho.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min_eig = rho.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -NORM_TOL {
            return Err(Error::InvalidState(format!("matrix is not positive semidefinite (eigenvalue {min_eig:e})")));
        }
        Ok(StateModel::Dense { n, rho })
    }

    pub fn product(bloch: Vec<[f64; 3]>) -> Result<Self> {
        if bloch.is_empty() || bloch.len() > crate::pauli::MAX_SITES {
            return Err(Error::InvalidSiteCount(bloch.len()));
        }
        for (j, r) in bloch.iter().enumerate() {
            let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            if norm > 1.0 + NORM_TOL || r.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidState(format!("site {} Bloch vector {r:?} has norm {norm} > 1", j + 1)));
            }
        }
        Ok(StateModel::Product { bloch })
    }

    /// Product of `σ_z` eigenstates: `true` selects `|+⟩`.
    pub fn product_z(plus: &[bool]) -> Result<Self> {
        Self::product(plus.iter().map(|&up| [0.0, 0.0, if up { 1.0 } else { -1.0 }]).collect())
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        Self::product(vec![[0.0; 3]; n])
    }

    pub fn ghz(n: usize, alpha: Complex64, beta: Complex64) -> Result<Self> {
        if n == 0 || n > crate::pauli::MAX_SITES {
            return Err(Error::InvalidSiteCount(n));
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("|alpha|^2 + |beta|^2 = {norm}, expected 1")));
        }
        Ok(StateModel::Ghz { n, alpha, beta })
    }

    /// The balanced GHZ state `(|+…+⟩ + |−…−⟩)/√2`.
    pub fn ghz_balanced(n: usize) -> Result<Self> {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::ghz(n, a, a)
    }

    pub fn werner(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidState(format!("Werner weight {lambda} outside [0, 1]")));
        }
        Ok(StateModel::Werner { lambda })
    }

    /// The Bell state `|π⟩` as a pure state.
    pub fn bell_pi() -> Self {
        StateModel::Werner { lambda: 1.0 }
    }

    pub fn n(&self) -> usize {
        match self {
            StateModel::Dense { n, .. } | StateModel::Ghz { n, .. } => *n,
            StateModel::Product { bloch } => bloch.len(),
            StateModel::Werner { .. } => 2,
        }
    }

    /// Explicit density matrix, for `n ≤ 10`.
    pub fn to_density_matrix(&self) -> Result<CMatrix> {
        let n = self.n();
        let dim = dense::dim_checked(n, DENSE_STATE_LIMIT)?;
        Ok(match self {
            StateModel::Dense { rho, .. } => rho.clone(),
            StateModel::Product { bloch } => {
                let factors: Vec<CMatrix> = bloch
                    .iter()
                    .map(|r| {
                        (dense::identity2()
                            + dense::sigma_x() * Complex64::from(r[0])
                            + dense::sigma_y() * Complex64::from(r[1])
                            + dense::sigma_z() * Complex64::from(r[2]))
                            * Complex64::from(0.5)
                    })
                    .collect();
                dense::kron_sites(&factors)
            }
            StateModel::Ghz { alpha, beta, .. } => {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[0] += *alpha;
                v[dim - 1] += *beta;
                dense::projector(&v)
            }
            StateModel::Werner { lambda } => {
                let mut v = vec![Complex64::new(0.0, 0.0); 4];
                for (idx, a) in pi_amplitudes() {
                    v[idx] = a;
                }
                dense::projector(&v) * Complex64::from(*lambda)
                    + CMatrix::identity(4, 4) * Complex64::from((1.0 - lambda) / 4.0)
            }
        })
    }

    /// Reads the `dense:@file` format: first line `n`, then `2^n` rows of
    /// `2^n` whitespace-separated `re,im` pairs.
    pub fn read_dense_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let bad = |reason: String| Error::StateSpec { spec: path.display().to_string(), reason };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| bad("empty file".into()))?
            .trim()
            .parse()
            .map_err(|e| bad(format!("site count: {e}")))?;
        let dim = dense::dim_checked(n, DENSE_STATE_LIMIT)?;
        let mut entries = Vec::with_capacity(dim * dim);
        for row in 0..dim {
            let line = lines.next().ok_or_else(|| bad(format!("missing row {row}")))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != dim {
                return Err(bad(format!("row {row} has {} entries, expected {dim}", fields.len())));
            }
            for field in fields {
                let (re, im) = field.split_once(',').ok_or_else(|| bad(format!("entry {field:?} is not re,im")))?;
                let re: f64 = re.parse().map_err(|e| bad(format!("{field:?}: {e}")))?;
                let im: f64 = im.parse().map_err(|e| bad(format!("{field:?}: {e}")))?;
                entries.push(Complex64::new(re, im));
            }
        }
        Self::dense(n, CMatrix::from_row_slice(dim, dim, &entries))
    }

    pub fn write_dense_file(&self, path: &Path) -> Result<()> {
        let rho = self.to_density_matrix()?;
        let mut out = format!("{}\n", self.n());
        for r in 0..rho.nrows() {
            let row: Vec<String> = (0..rho.ncols()).map(|c| format!("{},{}", rho[(r, c)].re, rho[(r, c)].im)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        fs::write(path, out)?;
        Ok(())
    }
}

/// Parses a state spec: `ghz:n=5,alpha=0.6,beta=0.8`, `product:+-+`,
/// `werner:lambda=0.5`, `mixed:n=3`, or `dense:@path`.
pub fn parse_state_spec(spec: &str) -> Result<StateModel> {
    let bad = |reason: &str| Error::StateSpec { spec: spec.to_string(), reason: reason.to_string() };
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let params = || -> Result<Vec<(&str, &str)>> {
        args.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|kv| kv.split_once('=').map(|(k, v)| (k.trim(), v.trim())).ok_or_else(|| bad("expected key=value")))
            .collect()
    };
    let number = |v: &str| -> Result<f64> { v.parse::<f64>().map_err(|_| bad(&format!("not a number: {v:?}"))) };
    match kind.trim() {
        "ghz" => {
            let (mut n, mut alpha, mut beta) = (None, None, None);
            for (k, v) in params()? {
                match k {
                    "n" => n = Some(v.parse::<usize>().map_err(|_| bad("n must be a positive integer"))?),
                    "alpha" => alpha = Some(number(v)?),
                    "beta" => beta = Some(number(v)?),
                    _ => return Err(bad(&format!("unknown key {k:?}"))),
                }
            }
            let n = n.ok_or_else(|| bad("missing n"))?;
            let (alpha, beta) = match (alpha, beta) {
                (None, None) => (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
                (Some(a), Some(b)) => (a, b),
                _ => return Err(bad("give both alpha and beta or neither")),
            };
            StateModel::ghz(n, Complex64::from(alpha), Complex64::from(beta))
        }
        "product" => {
            let plus = args
                .trim()
                .chars()
                .map(|c| match c {
                    '+' => Ok(true),
                    '-' => Ok(false),
                    _ => Err(bad("product sites must be '+' or '-'")),
                })
                .collect::<Result<Vec<_>>>()?;
            StateModel::product_z(&plus)
        }
        "werner" => {
            let mut lambda = 0.5;
            for (k, v) in params()? {
                match k {
                    "lambda" => lambda = number(v)?,
                    _ => return Err(bad(&format!("unknown key {k:?}"))),
                }
            }
            StateModel::werner(lambda)
        }
        "mixed" => {
            let mut n = None;
            for (k, v) in params()? {
                match k {
                    "n" => n = Some(v.parse::<usize>().map_err(|_| bad("n must be a positive integer"))?),
                    _ => return Err(bad(&format!("unknown key {k:?}"))),
                }
            }
            StateModel::maximally_mixed(n.ok_or_else(|| bad("missing n"))?)
        }
        "dense" => {
            let path = args.trim().strip_prefix('@').ok_or_else(|| bad("expected dense:@path"))?;
            StateModel::read_dense_file(Path::new(path))
        }
        other => Err(bad(&format!("unknown state kind {other:?}"))),
    }
}

/// `Tr[ψ·word]`.
pub fn expectation(state: &StateModel, word: &PauliString) -> Result<Complex64> {
    let n = state.n();
    if word.n() != n {
        return Err(Error::SiteMismatch { left: n, right: word.n() });
    }
    let phase = i_pow(word.phase_exp());
    Ok(match state {
        StateModel::Dense { rho, .. } => {
            let x = word.x_mask() as usize;
            let mut acc = Complex64::new(0.0, 0.0);
            // Tr[ρP] = Σ_r ρ[r, r⊕x] · ⟨r⊕x|P|r⟩
            for r in 0..rho.nrows() {
                let c = r ^ x;
                acc += rho[(r, c)] * parity_sign(word.z_mask() & c as u64);
            }
            acc * phase
        }
        StateModel::Product { bloch } => {
            let mut acc = phase;
            for (j, r) in bloch.iter().enumerate() {
                let bit = 1u64 << j;
                acc *= match (word.z_mask() & bit != 0, word.x_mask() & bit != 0) {
                    (false, false) => Complex64::new(1.0, 0.0),
                    (true, false) => Complex64::new(r[2], 0.0),
                    (false, true) => Complex64::new(r[0], 0.0),
                    // σ_z σ_x = iσ_y
                    (true, true) => Complex64::new(0.0, r[1]),
                };
            }
            acc
        }
        StateModel::Ghz { n, alpha, beta } => {
            let all = if *n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
            let z_sign = parity_sign(word.z_mask());
            if word.x_mask() == 0 {
                phase * (alpha.norm_sqr() + z_sign * beta.norm_sqr())
            } else if word.x_mask() == all {
                phase * (alpha * beta.conj() * z_sign + beta * alpha.conj())
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
        StateModel::Werner { lambda } => {
            let pure = sparse_pure_expectation(&pi_amplitudes(), word);
            let mixed = if word.is_scalar() { phase } else { Complex64::new(0.0, 0.0) };
            pure * *lambda + mixed * (1.0 - lambda)
        }
    })
}

/// `F^ψ = Σ_{p<2^{n-1}} Tr[ψ O^n_p]`, summed term by term.
pub fn f_value(state: &StateModel) -> Result<f64> {
    let n = state.n();
    let mut total = 0.0;
    for p in 0..1u64 << (n - 1) {
        total += expectation(state, &lambda_element(LambdaIndex::new(n, p)?))?.re;
    }
    Ok(total)
}

/// `Tr[ψ H_n]` with `H_n = 2^{n-1}(|+…+⟩⟨+…+| + |−…−⟩⟨−…−|)`, from the two
/// diagonal populations of the state.
pub fn f_value_via_hn(state: &StateModel) -> Result<f64> {
    let n = state.n();
    let scale = (1u64 << (n - 1)) as f64;
    let populations = match state {
        StateModel::Dense { rho, .. } => rho[(0, 0)].re + rho[(rho.nrows() - 1, rho.ncols() - 1)].re,
        StateModel::Product { bloch } => {
            let up: f64 = bloch.iter().map(|r| (1.0 + r[2]) / 2.0).product();
            let down: f64 = bloch.iter().map(|r| (1.0 - r[2]) / 2.0).product();
            up + down
        }
        StateModel::Ghz { alpha, beta, .. } => alpha.norm_sqr() + beta.norm_sqr(),
        // |π⟩ has no weight on |++⟩ or |−−⟩
        StateModel::Werner { lambda } => 2.0 * (1.0 - lambda) / 4.0,
    };
    Ok(scale * populations)
}

/// Dense `H_n`, for `n ≤ 6`.
pub fn hn_matrix(n: usize) -> Result<CMatrix> {
    let dim = dense::dim_checked(n, dense::DENSE_IDENTITY_LIMIT)?;
    let mut h = CMatrix::zeros(dim, dim);
    let scale = Complex64::from((dim / 2) as f64);
    h[(0, 0)] = scale;
    h[(dim - 1, dim - 1)] = scale;
    Ok(h)
}

fn two_site_correlators(state: &StateModel) -> Result<[f64; 3]> {
    if state.n() != 2 {
        return Err(Error::WrongSiteCount { expected: 2, actual: state.n() });
    }
    let mut out = [0.0; 3];
    for (slot, word) in out.iter_mut().zip(["XX", "YY", "ZZ"]) {
        *slot = expectation(state, &word.parse()?)?.re;
    }
    Ok(out)
}

/// Fidelity with `|π⟩` from correlators: `(1 + ⟨XX⟩ + ⟨YY⟩ − ⟨ZZ⟩)/4`.
pub fn bell_fidelity(state: &StateModel) -> Result<f64> {
    let [xx, yy, zz] = two_site_correlators(state)?;
    Ok((1.0 + xx + yy - zz) / 4.0)
}

/// Fidelity with `|π⟩` as `⟨π|ρ|π⟩` from the density matrix.
pub fn bell_fidelity_direct(state: &StateModel) -> Result<f64> {
    if state.n() != 2 {
        return Err(Error::WrongSiteCount { expected: 2, actual: state.n() });
    }
    let rho = state.to_density_matrix()?;
    let pi = pi_amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for &(r, ar) in &pi {
        for &(c, ac) in &pi {
            acc += ar.conj() * rho[(r, c)] * ac;
        }
    }
    Ok(acc.re)
}

/// Two-site correlators `⟨XX⟩, ⟨YY⟩, ⟨ZZ⟩`.
pub fn correlators(state: &StateModel) -> Result<[f64; 3]> {
    two_site_correlators(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{r_element, RIndex};

    fn w(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn dense_expectation(state: &StateModel, word: &PauliString) -> Complex64 {
        dense::trace_product(&state.to_density_matrix().unwrap(), &dense::pauli_matrix(word).unwrap())
    }

    #[test]
    fn maximally_mixed_is_traceless_on_words() {
        let s = StateModel::maximally_mixed(3).unwrap();
        assert_eq!(expectation(&s, &w("XYZ")).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(expectation(&s, &w("-III")).unwrap().re, -1.0);
        assert!((f_value(&s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn werner_half_correlators() {
        let s = StateModel::werner(0.5).unwrap();
        for (word, expected) in [("XX", 0.5), ("YY", 0.5), ("ZZ", -0.5)] {
            let v = expectation(&s, &w(word)).unwrap();
            assert!((v.re - expected).abs() < 1e-12 && v.im.abs() < 1e-12, "{word}");
            assert!((dense_expectation(&s, &w(word)).re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_xxx_is_one() {
        let s = StateModel::ghz_balanced(3).unwrap();
        let o4 = lambda_element(LambdaIndex::new(3, 4).unwrap());
        assert!((expectation(&s, &o4).unwrap().re - 1.0).abs() < 1e-12);
        assert!((dense_expectation(&s, &o4).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_paths_match_dense_on_lambda_and_r() {
        let states = vec![
            StateModel::ghz(4, Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap(),
            StateModel::ghz(3, Complex64::new(0.28, -0.96), Complex64::new(0.0, 0.0)).unwrap(),
            StateModel::product(vec![[0.3, -0.4, 0.5], [0.0, 1.0, 0.0], [-0.6, 0.0, 0.8]]).unwrap(),
            StateModel::werner(0.3).unwrap(),
        ];
        for s in &states {
            let n = s.n();
            let dense_state = StateModel::dense(n, s.to_density_matrix().unwrap()).unwrap();
            for p in 0..1u64 << n {
                for word in [lambda_element(LambdaIndex::new(n, p).unwrap()), r_element(RIndex::new(n, p).unwrap())] {
                    let a = expectation(s, &word).unwrap();
                    let d = dense_expectation(s, &word);
                    let e = expectation(&dense_state, &word).unwrap();
                    assert!((a - d).norm() < 1e-10, "{s:?} {word}: {a} vs {d}");
                    assert!((e - d).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn f_value_routes_agree() {
        for s in [
            StateModel::ghz_balanced(5).unwrap(),
            StateModel::product_z(&[true, false, true]).unwrap(),
            StateModel::werner(0.7).unwrap(),
        ] {
            assert!((f_value(&s).unwrap() - f_value_via_hn(&s).unwrap()).abs() < 1e-10);
        }
        let ghz = StateModel::ghz_balanced(6).unwrap();
        assert!((f_value(&ghz).unwrap() - 32.0).abs() < 1e-9);
    }

    #[test]
    fn fidelities() {
        let werner = StateModel::werner(0.5).unwrap();
        assert!((bell_fidelity(&werner).unwrap() - 0.625).abs() < 1e-12);
        assert!((bell_fidelity(&StateModel::bell_pi()).unwrap() - 1.0).abs() < 1e-12);
        let mixed = StateModel::maximally_mixed(2).unwrap();
        assert!((bell_fidelity(&mixed).unwrap() - 0.25).abs() < 1e-12);
        assert!((bell_fidelity_direct(&mixed).unwrap() - 0.25).abs() < 1e-12);
        for lambda in [0.0, 0.5, 1.0] {
            let s = StateModel::werner(lambda).unwrap();
            let expected = (3.0 * lambda + 1.0) / 4.0;
            assert!((bell_fidelity(&s).unwrap() - expected).abs() < 1e-12);
            assert!((bell_fidelity_direct(&s).unwrap() - expected).abs() < 1e-12);
        }
        assert!(bell_fidelity(&StateModel::ghz_balanced(3).unwrap()).is_err());
    }

    #[test]
    fn validation() {
        assert!(StateModel::ghz(3, Complex64::from(1.0), Complex64::from(1.0)).is_err());
        assert!(StateModel::werner(1.5).is_err());
        assert!(StateModel::product(vec![[1.0, 1.0, 0.0]]).is_err());
        let not_psd = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::from(1.5),
            Complex64::from(-0.5),
        ]));
        assert!(StateModel::dense(1, not_psd).is_err());
        let s = StateModel::ghz_balanced(2).unwrap();
        assert!(matches!(expectation(&s, &w("XXX")), Err(Error::SiteMismatch { .. })));
    }

    #[test]
    fn state_specs() {
        assert_eq!(parse_state_spec("werner:lambda=0.5").unwrap(), StateModel::werner(0.5).unwrap());
        assert_eq!(parse_state_spec("product:+-").unwrap().n(), 2);
        let ghz = parse_state_spec("ghz:n=5,alpha=0.6,beta=0.8").unwrap();
        assert!((f_value(&ghz).unwrap() - 16.0).abs() < 1e-9);
        assert!(parse_state_spec("ghz:n=5,alpha=0.6").is_err());
        assert!(parse_state_spec("bogus:1").is_err());
        assert!(parse_state_spec("product:+x").is_err());
    }

    #[test]
    fn dense_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rho.txt");
        let s = StateModel::werner(0.5).unwrap();
        s.write_dense_file(&path).unwrap();
        let back = parse_state_spec(&format!("dense:@{}", path.display())).unwrap();
        assert!((bell_fidelity(&back).unwrap() - 0.625).abs() < 1e-12);
    }
}
