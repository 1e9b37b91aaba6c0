//! Measured correlators in, inequality reports out.
//!
//! Input is CSV with header `word,value,sigma`. Each word is a Pauli word in
//! letter form (an optional sign is honoured: a `-YY` row holds `−⟨YY⟩`).

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequalities::{multipartite_bound, InequalityKind, InequalityReport};
use crate::pauli::{lambda_element, LambdaIndex, PauliString};
use crate::states::{expectation, StateModel};

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorRecord {
    pub word: PauliString,
    pub value: f64,
    pub sigma: f64,
}

#[derive(Debug, Deserialize, Serialize)]
struct Row {
    word: String,
    value: f64,
    sigma: f64,
}

fn letters(word: &PauliString) -> String {
    word.unsigned().to_string().trim_start_matches('+').to_string()
}

pub fn parse_correlators<R: Read>(input: R) -> Result<Vec<CorrelatorRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["word", "value", "sigma"] {
        return Err(Error::Record { line: 1, reason: format!("expected header word,value,sigma, got {headers:?}") });
    }
    let mut seen: HashMap<(u64, u64), u64> = HashMap::new();
    let mut records = Vec::new();
    for result in reader.records() {
        let raw = result?;
        let line = raw.position().map_or(0, |p| p.line());
        let bad = |reason: String| Error::Record { line, reason };
        let row: Row = raw.deserialize(Some(&headers)).map_err(|e| bad(e.to_string()))?;
        let word: PauliString = row.word.parse().map_err(|e: Error| bad(e.to_string()))?;
        if word.sign().is_none() {
            return Err(bad(format!("word {} is not Hermitian", row.word)));
        }
        if !(row.sigma >= 0.0) {
            return Err(bad(format!("sigma {} must be nonnegative", row.sigma)));
        }
        if !row.value.is_finite() || row.value.abs() > 1.0 + 3.0 * row.sigma + crate::SCALAR_TOL {
            return Err(bad(format!("value {} is outside [-1, 1] beyond 3 sigma", row.value)));
        }
        if let Some(first) = seen.insert((word.z_mask(), word.x_mask()), line) {
            return Err(bad(format!("duplicate word {} (first on line {first})", row.word)));
        }
        records.push(CorrelatorRecord { word, value: row.value, sigma: row.sigma });
    }
    Ok(records)
}

pub fn ingest_correlators(path: &Path) -> Result<Vec<CorrelatorRecord>> {
    parse_correlators(File::open(path)?)
}

pub fn write_correlators<W: Write>(records: &[CorrelatorRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(Row { word: letters(&r.word), value: r.value, sigma: r.sigma })?;
    }
    writer.flush()?;
    Ok(())
}

/// Non-identity terms of the inequality as (letter word, coefficient on its expectation).
pub fn required_terms(kind: InequalityKind, n: usize) -> Result<Vec<(PauliString, f64)>> {
    match kind {
        InequalityKind::TwoPartite => {
            if n != 2 {
                return Err(Error::WrongSiteCount { expected: 2, actual: n });
            }
            Ok(vec![("XX".parse()?, 1.0), ("YY".parse()?, 1.0), ("ZZ".parse()?, -1.0)])
        }
        InequalityKind::Multipartite => {
            multipartite_bound(n)?;
            (1..1u64 << (n - 1))
                .map(|p| {
                    let word = lambda_element(LambdaIndex::new(n, p)?);
                    let sign = word.sign().expect("Λ elements are Hermitian") as f64;
                    Ok((word.unsigned(), sign))
                })
                .collect()
        }
    }
}

/// Evaluates the inequality's left side from measured correlators, with
/// standard errors combined in quadrature. The identity term is exactly 1; an
/// identity row in the input is accepted and ignored.
pub fn evaluate_experiment(
    records: &[CorrelatorRecord],
    kind: InequalityKind,
    n: usize,
    sigmas: f64,
) -> Result<InequalityReport> {
    let terms = required_terms(kind, n)?;
    if let Some(r) = records.iter().find(|r| r.word.n() != n) {
        return Err(Error::SiteMismatch { left: n, right: r.word.n() });
    }
    let required: Vec<String> = terms.iter().map(|(w, _)| letters(w)).collect();
    let by_masks: HashMap<(u64, u64), &CorrelatorRecord> =
        records.iter().map(|r| ((r.word.z_mask(), r.word.x_mask()), r)).collect();

    let missing: Vec<String> = terms
        .iter()
        .filter(|(w, _)| !by_masks.contains_key(&(w.z_mask(), w.x_mask())))
        .map(|(w, _)| letters(w))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingCorrelators { missing, required });
    }
    let unknown: Vec<String> = records
        .iter()
        .filter(|r| !r.word.is_scalar())
        .filter(|r| !terms.iter().any(|(w, _)| w.z_mask() == r.word.z_mask() && w.x_mask() == r.word.x_mask()))
        .map(|r| letters(&r.word))
        .collect();
    if !unknown.is_empty() {
        return Err(Error::UnknownCorrelators { unknown, required });
    }

    let mut lhs = 1.0;
    let mut variance = 0.0;
    for (word, coeff) in &terms {
        let record = by_masks[&(word.z_mask(), word.x_mask())];
        let record_sign = record.word.sign().expect("checked at ingestion") as f64;
        lhs += coeff * record_sign * record.value;
        variance += record.sigma * record.sigma;
    }
    let bound = match kind {
        InequalityKind::TwoPartite => 2.0,
        InequalityKind::Multipartite => multipartite_bound(n)?,
    };
    Ok(InequalityReport::new(kind, n, lhs, bound, Some(variance.sqrt()), sigmas))
}

/// Noiseless records for the required words, computed from a state model.
pub fn synthetic_records(state: &StateModel, kind: InequalityKind, sigma: f64) -> Result<Vec<CorrelatorRecord>> {
    required_terms(kind, state.n())?
        .into_iter()
        .map(|(word, _)| Ok(CorrelatorRecord { word, value: expectation(state, &word)?.re, sigma }))
        .collect()
}
