//! Finite classical probability models for commuting families.
//!
//! For a family of pairwise commuting observables a common eigenbasis gives a
//! finite sample space `Ω`; the state supplies weights `μ(ω) = ⟨ω|ψ|ω⟩` and
//! each observable `A` the value table `f_A(ω) = ⟨ω|A|ω⟩`. The checks below
//! compare model-side measures against spectral projectors computed
//! independently from each operator's own eigendecomposition.
//!
//! "Almost everywhere" is read as "on every point with weight above
//! [`SUPPORT_WEIGHT`]".

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::states::StateModel;

/// Weight below which a sample point is treated as outside the support.
pub const SUPPORT_WEIGHT: f64 = 1e-14;

/// Tolerance for model-versus-quantum probability comparisons.
pub const MODEL_TOL: f64 = 1e-9;

/// Eigenvalues closer than this are treated as one spectral value.
const CLUSTER_TOL: f64 = 1e-8;

const COMMUTATOR_TOL: f64 = 1e-10;
const BASIS_SEED: u64 = 0x5eed_ba5e;
const MAX_MODEL_SITES: usize = 6;

/// A Hermitian observable, optionally known as a Pauli word.
#[derive(Debug, Clone)]
pub struct Observable {
    pub name: String,
    pub matrix: CMatrix,
    pub pauli: Option<PauliString>,
}

impl Observable {
    pub fn from_pauli(word: &PauliString) -> Result<Self> {
        if !word.is_hermitian() {
            return Err(Error::NotHermitian(word.to_string()));
        }
        Ok(Self { name: word.to_string(), matrix: dense::pauli_matrix(word)?, pauli: Some(*word) })
    }

    pub fn from_matrix(name: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        let name = name.into();
        if !matrix.is_square() || dense::hermiticity_residual(&matrix) > COMMUTATOR_TOL {
            return Err(Error::NotHermitian(name));
        }
        Ok(Self { name, matrix, pauli: None })
    }

    fn commutes_with(&self, other: &Self) -> Result<bool> {
        match (&self.pauli, &other.pauli) {
            (Some(a), Some(b)) => a.commutes_with(b),
            _ => Ok(dense::commutator_norm(&self.matrix, &other.matrix) < COMMUTATOR_TOL),
        }
    }
}

/// Distinct eigenvalues of a Hermitian matrix (ascending) with their projectors.
pub fn spectral_decomposition(matrix: &CMatrix) -> Vec<(f64, CMatrix)> {
    let eig = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let dim = matrix.nrows();
    let mut out: Vec<(f64, CMatrix, usize)> = Vec::new();
    for k in order {
        let value = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k);
        let proj = CMatrix::from_fn(dim, dim, |r, c| v[r] * v[c].conj());
        match out.last_mut() {
            Some((last, p, count)) if (value - *last).abs() < CLUSTER_TOL => {
                *last = (*last * *count as f64 + value) / (*count as f64 + 1.0);
                *p += proj;
                *count += 1;
            }
            _ => out.push((value, proj, 1)),
        }
    }
    out.into_iter().map(|(v, p, _)| (v, p)).collect()
}

fn in_subset(value: f64, subset: &[f64]) -> bool {
    subset.iter().any(|d| (value - d).abs() < CLUSTER_TOL)
}

/// `χ_Δ(A)`: sum of the spectral projectors of `A` whose eigenvalue lies in `Δ`.
pub fn indicator_operator(matrix: &CMatrix, subset: &[f64]) -> CMatrix {
    let dim = matrix.nrows();
    spectral_decomposition(matrix)
        .into_iter()
        .filter(|(v, _)| in_subset(*v, subset))
        .fold(CMatrix::zeros(dim, dim), |acc, (_, p)| acc + p)
}

/// `g(A) = Σ_λ g(λ) P_λ`.
pub fn spectral_function(matrix: &CMatrix, g: impl Fn(f64) -> f64) -> CMatrix {
    let dim = matrix.nrows();
    spectral_decomposition(matrix)
        .into_iter()
        .fold(CMatrix::zeros(dim, dim), |acc, (v, p)| acc + p * Complex64::from(g(v)))
}

/// Handle to an operator registered in a [`FiniteHVModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OpId(pub usize);

#[derive(Debug, Clone, Serialize)]
pub struct RegisteredOperator {
    pub name: String,
    #[serde(skip)]
    pub matrix: CMatrix,
    pub spectrum: Vec<f64>,
    pub values: Vec<f64>,
}

/// A finite sample space with weights and per-operator value tables.
#[derive(Debug, Clone)]
pub struct FiniteHVModel {
    n: usize,
    state: CMatrix,
    basis: CMatrix,
    weights: Vec<f64>,
    operators: Vec<RegisteredOperator>,
}

#[derive(Serialize)]
struct ModelDump<'a> {
    omega: usize,
    weights: &'a [f64],
    operators: &'a [RegisteredOperator],
}

/// Splits the column block `cols` of `basis` into joint eigenspaces of `op`.
fn refine_block(basis: &mut CMatrix, cols: &[usize], op: &CMatrix) -> Vec<Vec<usize>> {
    if cols.len() == 1 {
        return vec![cols.to_vec()];
    }
    let dim = basis.nrows();
    let block = CMatrix::from_fn(dim, cols.len(), |r, c| basis[(r, cols[c])]);
    let restricted = block.adjoint() * op * &block;
    let eig = SymmetricEigen::new(restricted);
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let rotated = &block * &eig.eigenvectors;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NAN;
    for (slot, &k) in order.iter().enumerate() {
        let target = cols[slot];
        basis.set_column(target, &rotated.column(k));
        let value = eig.eigenvalues[k];
        match groups.last_mut() {
            Some(g) if (value - last).abs() < CLUSTER_TOL => g.push(target),
            _ => groups.push(vec![target]),
        }
        last = value;
    }
    groups
}

/// Builds `(Ω, μ_ψ, f)` for a pairwise commuting family on at most six qubits.
pub fn build_model(state: &StateModel, family: &[Observable]) -> Result<FiniteHVModel> {
    let n = state.n();
    let dim = dense::dim_checked(n, MAX_MODEL_SITES)?;
    for obs in family {
        if obs.matrix.nrows() != dim {
            return Err(Error::SiteMismatch { left: dim, right: obs.matrix.nrows() });
        }
    }
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            if !a.commutes_with(b)? {
                return Err(Error::NotCommuting(a.name.clone(), b.name.clone()));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(BASIS_SEED);
    let mut combination = CMatrix::zeros(dim, dim);
    for obs in family {
        combination += &obs.matrix * Complex64::from(rng.random_range(0.5..1.5));
    }
    let mut basis = CMatrix::identity(dim, dim);
    let mut blocks = refine_block(&mut basis, &(0..dim).collect::<Vec<_>>(), &combination);
    for obs in family {
        blocks = blocks.iter().flat_map(|b| refine_block(&mut basis, b, &obs.matrix)).collect();
    }

    let rho = state.to_density_matrix()?;
    let weights = (0..dim)
        .map(|k| {
            let v = basis.column(k);
            (v.adjoint() * &rho * v)[(0, 0)].re.max(0.0)
        })
        .collect();
    let mut model = FiniteHVModel { n, state: rho, basis, weights, operators: Vec::new() };
    for obs in family {
        model.register(obs)?;
    }
    Ok(model)
}

impl FiniteHVModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega_size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn operators(&self) -> &[RegisteredOperator] {
        &self.operators
    }

    pub fn ids(&self) -> impl Iterator<Item = OpId> {
        (0..self.operators.len()).map(OpId)
    }

    pub fn id(&self, name: &str) -> Option<OpId> {
        self.operators.iter().position(|o| o.name == name).map(OpId)
    }

    fn op(&self, id: OpId) -> Result<&RegisteredOperator> {
        self.operators.get(id.0).ok_or_else(|| Error::UnknownOperator(format!("#{}", id.0)))
    }

    pub fn spectrum(&self, id: OpId) -> Result<&[f64]> {
        Ok(&self.op(id)?.spectrum)
    }

    pub fn values(&self, id: OpId) -> Result<&[f64]> {
        Ok(&self.op(id)?.values)
    }

    fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.weights.len()).filter(|&w| self.weights[w] > SUPPORT_WEIGHT)
    }

    /// Adds an observable that is diagonal in the model basis.
    pub fn register(&mut self, obs: &Observable) -> Result<OpId> {
        let dim = self.omega_size();
        if obs.matrix.nrows() != dim {
            return Err(Error::SiteMismatch { left: dim, right: obs.matrix.nrows() });
        }
        let diag = self.basis.adjoint() * &obs.matrix * &self.basis;
        let residual = (0..dim)
            .flat_map(|r| (0..dim).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| diag[(r, c)].norm())
            .fold(0.0, f64::max);
        if residual > CLUSTER_TOL {
            return Err(Error::Degeneracy { name: obs.name.clone(), residual });
        }
        let spectrum: Vec<f64> = spectral_decomposition(&obs.matrix).into_iter().map(|(v, _)| v).collect();
        let values = (0..dim)
            .map(|k| {
                let raw = diag[(k, k)].re;
                *spectrum
                    .iter()
                    .min_by(|a, b| (*a - raw).abs().total_cmp(&(*b - raw).abs()))
                    .expect("nonempty spectrum")
            })
            .collect();
        self.operators.push(RegisteredOperator { name: obs.name.clone(), matrix: obs.matrix.clone(), spectrum, values });
        Ok(OpId(self.operators.len() - 1))
    }

    /// `Tr[ψA]`.
    pub fn quantum_expectation(&self, id: OpId) -> Result<f64> {
        Ok(dense::trace_product(&self.state, &self.op(id)?.matrix).re)
    }

    /// `E_ψ(A) = Σ_ω μ(ω) f_A(ω)`.
    pub fn model_expectation(&self, id: OpId) -> Result<f64> {
        let op = self.op(id)?;
        Ok(self.weights.iter().zip(&op.values).map(|(w, v)| w * v).sum())
    }

    /// `Tr[ψA] = E_ψ(A)` within tolerance.
    pub fn check_expectation(&self, id: OpId) -> Result<bool> {
        Ok((self.quantum_expectation(id)? - self.model_expectation(id)?).abs() <= MODEL_TOL)
    }

    fn measure_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        (0..self.weights.len()).filter(|&w| pred(w)).map(|w| self.weights[w]).sum()
    }

    /// Distribution rule: `μ(f_A^{-1}(Δ)) = Tr[ψ χ_Δ(A)]`.
    pub fn check_d(&self, a: OpId, delta: &[f64]) -> Result<bool> {
        let op = self.op(a)?;
        let model = self.measure_where(|w| in_subset(op.values[w], delta));
        let quantum = dense::trace_product(&self.state, &indicator_operator(&op.matrix, delta)).re;
        Ok((model - quantum).abs() <= MODEL_TOL)
    }

    /// Joint distribution rule: `μ(f_A^{-1}(Δ) ∩ f_B^{-1}(Δ')) = Tr[ψ χ_Δ(A) χ_Δ'(B)]`.
    pub fn check_jd(&self, a: OpId, b: OpId, delta: &[f64], delta_b: &[f64]) -> Result<bool> {
        let (oa, ob) = (self.op(a)?, self.op(b)?);
        let model = self.measure_where(|w| in_subset(oa.values[w], delta) && in_subset(ob.values[w], delta_b));
        let joint = indicator_operator(&oa.matrix, delta) * indicator_operator(&ob.matrix, delta_b);
        let quantum = dense::trace_product(&self.state, &joint).re;
        Ok((model - quantum).abs() <= MODEL_TOL)
    }

    /// Functional rule: registers `g(A)` and checks `f_{g(A)} = g ∘ f_A` on the support.
    ///
    /// `table[k]` is `g` at `spectrum(a)[k]`; only the restriction of `g` to the
    /// spectrum matters.
    pub fn check_func(&mut self, a: OpId, table: &[f64]) -> Result<bool> {
        let op = self.op(a)?.clone();
        if table.len() != op.spectrum.len() {
            return Err(Error::Inconsistent(format!(
                "function table has {} entries for a spectrum of {}",
                table.len(),
                op.spectrum.len()
            )));
        }
        let g = |x: f64| {
            let k = op.spectrum.iter().position(|s| (s - x).abs() < CLUSTER_TOL).expect("x in spectrum");
            table[k]
        };
        let ga = Observable::from_matrix(format!("g({})", op.name), spectral_function(&op.matrix, g))?;
        let id = self.register(&ga)?;
        let fg = self.values(id)?.to_vec();
        Ok(self.support().all(|w| (fg[w] - g(op.values[w])).abs() <= MODEL_TOL))
    }

    /// Product rule: registers `AB` and checks `f_{AB} = f_A · f_B` on the support.
    pub fn check_prod(&mut self, a: OpId, b: OpId) -> Result<bool> {
        let (oa, ob) = (self.op(a)?.clone(), self.op(b)?.clone());
        let product = Observable::from_matrix(format!("{}*{}", oa.name, ob.name), &oa.matrix * &ob.matrix)?;
        let id = self.register(&product)?;
        let fab = self.values(id)?.to_vec();
        Ok(self.support().all(|w| (fab[w] - oa.values[w] * ob.values[w]).abs() <= MODEL_TOL))
    }

    /// Registers `χ_Δ(A)` and checks its values lie in `{0, 1}` on the support.
    pub fn check_indicator_values(&mut self, a: OpId, delta: &[f64]) -> Result<bool> {
        let oa = self.op(a)?.clone();
        let chi = Observable::from_matrix(format!("chi({})", oa.name), indicator_operator(&oa.matrix, delta))?;
        let id = self.register(&chi)?;
        let values = self.values(id)?.to_vec();
        Ok(self.support().all(|w| values[w].abs() <= MODEL_TOL || (values[w] - 1.0).abs() <= MODEL_TOL))
    }

    pub fn dump_json(&self) -> serde_json::Value {
        serde_json::to_value(ModelDump { omega: self.omega_size(), weights: &self.weights, operators: &self.operators })
            .expect("model dump serializes")
    }
}

/// `Tr[ψ χ_Δ(g(A))] = Tr[ψ χ_{g^{-1}(Δ)}(A)]`, each side from its own diagonalization.
pub fn check_indicator_pullback(state: &StateModel, a: &CMatrix, g: impl Fn(f64) -> f64, delta: &[f64]) -> Result<bool> {
    let rho = state.to_density_matrix()?;
    let ga = spectral_function(a, &g);
    let lhs = dense::trace_product(&rho, &indicator_operator(&ga, delta)).re;
    let preimage: Vec<f64> =
        spectral_decomposition(a).into_iter().map(|(v, _)| v).filter(|&v| in_subset(g(v), delta)).collect();
    let rhs = dense::trace_product(&rho, &indicator_operator(a, &preimage)).re;
    Ok((lhs - rhs).abs() <= crate::SCALAR_TOL)
}

/// `μ(S ∩ T) = μ(S' ∩ T')` whenever `μ(S̄∩S')`, `μ(S̄'∩S)`, `μ(T̄∩T')` and
/// `μ(T̄'∩T)` all vanish. Sets are membership masks over the sample space.
///
/// Fails with [`Error::Hypothesis`] if a hypothesis measure is nonzero. Sums
/// run in index order, so the two sides differ only by exact zeros.
pub fn check_measure_lemma(mu: &[f64], s: &[bool], s2: &[bool], t: &[bool], t2: &[bool]) -> Result<bool> {
    let len = mu.len();
    if [s, s2, t, t2].iter().any(|set| set.len() != len) || mu.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::Hypothesis("sets must match the sample space and weights must be nonnegative".into()));
    }
    let measure = |pred: &dyn Fn(usize) -> bool| -> f64 { (0..len).filter(|&w| pred(w)).map(|w| mu[w]).sum() };
    let hypotheses = [
        measure(&|w| !s[w] && s2[w]),
        measure(&|w| !s2[w] && s[w]),
        measure(&|w| !t[w] && t2[w]),
        measure(&|w| !t2[w] && t[w]),
    ];
    if hypotheses.iter().any(|&h| h != 0.0) {
        return Err(Error::Hypothesis(format!("hypothesis measures {hypotheses:?} are not all zero")));
    }
    Ok(measure(&|w| s[w] && t[w]) == measure(&|w| s2[w] && t2[w]))
}

/// Subsets of a spectrum to sweep: all of them when `|S| ≤ 8`, otherwise
/// singletons, their complements, and 32 random subsets.
pub fn delta_subsets<R: Rng + ?Sized>(spectrum: &[f64], rng: &mut R) -> Vec<Vec<f64>> {
    let k = spectrum.len();
    let pick = |mask: u64| -> Vec<f64> { (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| spectrum[i]).collect() };
    if k <= 8 {
        return (0..1u64 << k).map(pick).collect();
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..k {
        out.push(vec![spectrum[i]]);
        out.push(spectrum.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect());
    }
    for _ in 0..32 {
        out.push(spectrum.iter().copied().filter(|_| rng.random_bool(0.5)).collect());
    }
    out
}

/// Random commuting family `U D_k U†` with small-integer, often degenerate spectra.
pub fn random_commuting_family<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Result<Vec<Observable>> {
    let dim = dense::dim_checked(n, MAX_MODEL_SITES)?;
    let u = dense::random_unitary(dim, rng);
    (0..size)
        .map(|k| {
            let levels = rng.random_range(1..=3);
            let diag = nalgebra::DVector::from_fn(dim, |_, _| Complex64::from(rng.random_range(0..levels) as f64 - 1.0));
            let m = &u * CMatrix::from_diagonal(&diag) * u.adjoint();
            let m = (&m + m.adjoint()) * Complex64::from(0.5);
            Observable::from_matrix(format!("A{k}"), m)
        })
        .collect()
}

/// Random pairwise-commuting Hermitian Pauli words.
pub fn random_commuting_paulis<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Result<Vec<Observable>> {
    let mask = (1u64 << n) - 1;
    let mut chosen: Vec<PauliString> = Vec::new();
    for _ in 0..64 * size {
        if chosen.len() == size {
            break;
        }
        let word = PauliString::new(n, rng.random::<u64>() & mask, rng.random::<u64>() & mask, 0)?.unsigned();
        let word = if rng.random_bool(0.5) { word.times_i_pow(2) } else { word };
        if chosen.iter().all(|c| c.commutes_with(&word).unwrap_or(false)) && !chosen.contains(&word) {
            chosen.push(word);
        }
    }
    chosen.iter().map(Observable::from_pauli).collect()
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepReport {
    pub operators: usize,
    pub d_checks: usize,
    pub jd_checks: usize,
    pub func_checks: usize,
    pub prod_checks: usize,
    pub indicator_checks: usize,
    pub expectation_checks: usize,
    pub failures: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the distribution, joint-distribution, functional, product, indicator
/// and expectation checks over every operator (pair) and subset of the family.
pub fn sweep<R: Rng + ?Sized>(model: &mut FiniteHVModel, rng: &mut R) -> Result<SweepReport> {
    let family: Vec<OpId> = model.ids().collect();
    let mut report = SweepReport { operators: family.len(), ..Default::default() };
    let fail = |report: &mut SweepReport, what: String| report.failures.push(what);
    for &a in &family {
        let name = model.op(a)?.name.clone();
        let spectrum = model.spectrum(a)?.to_vec();
        let subsets = delta_subsets(&spectrum, rng);
        for delta in &subsets {
            report.d_checks += 1;
            if !model.check_d(a, delta)? {
                fail(&mut report, format!("D: {name} on {delta:?}"));
            }
            report.indicator_checks += 1;
            if !model.check_indicator_values(a, delta)? {
                fail(&mut report, format!("indicator values: {name} on {delta:?}"));
            }
        }
        for &b in &family {
            let spectrum_b = model.spectrum(b)?.to_vec();
            let subsets_b = delta_subsets(&spectrum_b, rng);
            for delta in &subsets {
                for delta_b in &subsets_b {
                    report.jd_checks += 1;
                    if !model.check_jd(a, b, delta, delta_b)? {
                        fail(&mut report, format!("JD: {name}, {} on {delta:?}, {delta_b:?}", model.op(b)?.name));
                    }
                }
            }
            report.prod_checks += 1;
            if !model.check_prod(a, b)? {
                fail(&mut report, format!("PROD: {name} * {}", model.op(b)?.name));
            }
        }
        let squares: Vec<f64> = spectrum.iter().map(|x| x * x).collect();
        let (slope, offset) = (rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
        let affine: Vec<f64> = spectrum.iter().map(|x| slope * x + offset).collect();
        let mut shuffled = spectrum.clone();
        shuffled.shuffle(rng);
        for table in [spectrum.clone(), squares, affine, shuffled] {
            report.func_checks += 1;
            if !model.check_func(a, &table)? {
                fail(&mut report, format!("FUNC: {name} with table {table:?}"));
            }
        }
    }
    for id in model.ids().collect::<Vec<_>>() {
        report.expectation_checks += 1;
        if !model.check_expectation(id)? {
            fail(&mut report, format!("expectation: {}", model.op(id)?.name));
        }
    }
    Ok(report)
}
