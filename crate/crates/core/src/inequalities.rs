//! The two-partite and multipartite inequalities.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{self, StateModel};
use crate::SCALAR_TOL;

/// Guard band for `violated` when no uncertainty is attached.
pub const GUARD_BAND: f64 = 1e-9;

/// Default number of standard errors required to call a violation.
pub const DEFAULT_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    TwoPartite,
    Multipartite,
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityKind::TwoPartite => "two-partite",
            InequalityKind::Multipartite => "multipartite",
        })
    }
}

impl FromStr for InequalityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" | "two-partite" => Ok(InequalityKind::TwoPartite),
            "multi" | "multipartite" => Ok(InequalityKind::Multipartite),
            _ => Err(Error::Inconsistent(format!("unknown inequality kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub kind: InequalityKind,
    pub n: usize,
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
    pub violated: bool,
    #[serde(rename = "sigma")]
    pub uncertainty: Option<f64>,
}

impl InequalityReport {
    /// Builds a report; with an uncertainty `σ > 0`, a violation needs
    /// `lhs − bound > k·σ`, otherwise `lhs − bound > GUARD_BAND`.
    pub fn new(kind: InequalityKind, n: usize, lhs: f64, bound: f64, uncertainty: Option<f64>, sigmas: f64) -> Self {
        let margin = match uncertainty {
            Some(sigma) if sigma > 0.0 => sigmas * sigma,
            _ => GUARD_BAND,
        };
        Self { kind, n, lhs, bound, ratio: lhs / bound, violated: lhs - bound > margin, uncertainty }
    }
}

/// `1 + ⟨XX⟩ + ⟨YY⟩ − ⟨ZZ⟩ ≤ 2`, with the fidelity cross-check `lhs = 4·⟨π|ρ|π⟩`.
pub fn two_partite_report(state: &StateModel) -> Result<InequalityReport> {
    let [xx, yy, zz] = states::correlators(state)?;
    let lhs = 1.0 + xx + yy - zz;
    let fidelity = states::bell_fidelity_direct(state)?;
    if (lhs - 4.0 * fidelity).abs() > SCALAR_TOL {
        return Err(Error::Inconsistent(format!("lhs {lhs} differs from 4 x fidelity {}", 4.0 * fidelity)));
    }
    Ok(InequalityReport::new(InequalityKind::TwoPartite, 2, lhs, 2.0, None, DEFAULT_SIGMAS))
}

/// Classical bound: `2^{n/2}` for even `n`, `2^{(n−1)/2}` for odd `n`.
pub fn multipartite_bound(n: usize) -> Result<f64> {
    Ok(multipartite_bound_exact(n)? as f64)
}

/// The bound as an exact integer; both branches are integral powers of two.
pub fn multipartite_bound_exact(n: usize) -> Result<i64> {
    if !(2..=crate::pauli::MAX_SITES).contains(&n) {
        return Err(Error::InvalidSiteCount(n));
    }
    Ok(1i64 << (n / 2))
}

pub fn multipartite_report(state: &StateModel) -> Result<InequalityReport> {
    let n = state.n();
    let bound = multipartite_bound(n)?;
    let lhs = states::f_value(state)?;
    Ok(InequalityReport::new(InequalityKind::Multipartite, n, lhs, bound, None, DEFAULT_SIGMAS))
}

/// One scan row: a labelled multipartite report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub state: String,
    pub kind: InequalityKind,
    pub n: usize,
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
    pub violated: bool,
    pub sigma: Option<f64>,
}

impl ScanRow {
    pub fn new(state: &str, report: &InequalityReport) -> Self {
        Self {
            state: state.to_string(),
            kind: report.kind,
            n: report.n,
            lhs: report.lhs,
            bound: report.bound,
            ratio: report.ratio,
            violated: report.violated,
            sigma: report.uncertainty,
        }
    }

    pub fn report(&self) -> InequalityReport {
        InequalityReport {
            kind: self.kind,
            n: self.n,
            lhs: self.lhs,
            bound: self.bound,
            ratio: self.ratio,
            violated: self.violated,
            uncertainty: self.sigma,
        }
    }
}

/// Multipartite reports for the balanced GHZ state and `|+…+⟩`, for each `n` in range.
pub fn scan(n_min: usize, n_max: usize) -> Result<Vec<ScanRow>> {
    if n_min < 2 || n_min > n_max {
        return Err(Error::Inconsistent(format!("invalid scan range {n_min}..={n_max}")));
    }
    let rows: Vec<Vec<ScanRow>> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let ghz = multipartite_report(&StateModel::ghz_balanced(n)?)?;
            let product = multipartite_report(&StateModel::product_z(&vec![true; n])?)?;
            Ok(vec![ScanRow::new("ghz", &ghz), ScanRow::new("product", &product)])
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_scan_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_scan_csv<R: Read>(input: R) -> Result<Vec<ScanRow>> {
    let mut reader = csv::Reader::from_reader(input);
    Ok(reader.deserialize().collect::<std::result::Result<Vec<ScanRow>, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn werner_point() {
        let r = two_partite_report(&StateModel::werner(0.5).unwrap()).unwrap();
        assert!((r.lhs - 2.5).abs() < 1e-10);
        assert!(r.violated);
    }

    #[test]
    fn mixed_and_pure_pi() {
        let r = two_partite_report(&StateModel::maximally_mixed(2).unwrap()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && !r.violated);
        let r = two_partite_report(&StateModel::bell_pi()).unwrap();
        assert!((r.lhs - 4.0).abs() < 1e-12 && (r.ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bounds() {
        assert_eq!(multipartite_bound(2).unwrap(), 2.0);
        assert_eq!(multipartite_bound(3).unwrap(), 2.0);
        assert_eq!(multipartite_bound(4).unwrap(), 4.0);
        assert_eq!(multipartite_bound(11).unwrap(), 32.0);
        assert!(multipartite_bound(1).is_err());
    }

    #[test]
    fn ghz_and_product_n3() {
        let r = multipartite_report(&StateModel::ghz_balanced(3).unwrap()).unwrap();
        assert!((r.lhs - 4.0).abs() < 1e-12);
        assert_eq!((r.bound, r.violated), (2.0, true));
        assert!((r.ratio - 2.0).abs() < 1e-12);
        let r = multipartite_report(&StateModel::product_z(&[true; 3]).unwrap()).unwrap();
        assert!((r.lhs - 4.0).abs() < 1e-12 && r.violated);
    }

    #[test]
    fn n2_never_violated() {
        for s in [
            StateModel::ghz_balanced(2).unwrap(),
            StateModel::bell_pi(),
            StateModel::werner(0.5).unwrap(),
            StateModel::product_z(&[false, false]).unwrap(),
        ] {
            let r = multipartite_report(&s).unwrap();
            assert!(r.lhs <= 2.0 + 1e-12 && !r.violated);
        }
    }

    #[test]
    fn scan_ratios() {
        let rows = scan(2, 10).unwrap();
        let ghz: Vec<f64> = rows.iter().filter(|r| r.state == "ghz").map(|r| r.ratio).collect();
        for (got, want) in ghz.iter().zip([1.0, 2.0, 2.0, 4.0, 4.0, 8.0, 8.0, 16.0, 16.0]) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        assert!(scan(1, 3).is_err());
        assert!(scan(5, 4).is_err());
    }

    #[test]
    fn guard_band_and_sigma() {
        let r = InequalityReport::new(InequalityKind::TwoPartite, 2, 2.0 + 5e-10, 2.0, None, 3.0);
        assert!(!r.violated);
        let r = InequalityReport::new(InequalityKind::TwoPartite, 2, 2.2, 2.0, Some(0.1), 3.0);
        assert!(!r.violated);
        let r = InequalityReport::new(InequalityKind::TwoPartite, 2, 2.2, 2.0, Some(0.1), 1.0);
        assert!(r.violated);
    }

    #[test]
    fn scan_csv_round_trip() {
        let rows = scan(2, 8).unwrap();
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let header = String::from_utf8(buf.clone()).unwrap();
        assert!(header.starts_with("state,kind,n,lhs,bound,ratio,violated,sigma"));
        assert_eq!(read_scan_csv(buf.as_slice()).unwrap(), rows);
    }
}
