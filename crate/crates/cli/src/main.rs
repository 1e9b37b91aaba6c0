//! `kslab`: command-line front end for the Kochen-Specker verification lab.
//!
//! Every subcommand writes a machine-readable report to stdout. Exit status is
//! 0 when everything checked out, 2 when a verification failed and 1 on usage
//! or input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use kslab_core::dense;
use kslab_core::fine_model::{self, random_commuting_family, random_commuting_paulis, sweep};
use kslab_core::hv_oracle::{
    bruteforce_bound_with_cap, ghz_certificate, peres_mermin_certificate, verify_hvkn, DEFAULT_ENUMERATION_CAP,
    DEFAULT_SAMPLE_SEED,
};
use kslab_core::inequalities::{multipartite_bound_exact, multipartite_report, scan, two_partite_report, write_scan_csv, DEFAULT_SIGMAS};
use kslab_core::pauli::{lambda_element, pauli_mul, verify_sum_identities, LambdaIndex};
use kslab_core::states::{bell_fidelity, parse_state_spec};
use kslab_core::{evaluate_experiment, ingest_correlators, InequalityKind, StateModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

const EXIT_FAILURE: u8 = 2;
const EXIT_USAGE: u8 = 1;

/// Largest n for which `group` checks all 4^n products.
const GROUP_TABLE_LIMIT: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "kslab", version, about = "Kochen-Specker inequality verification lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the elements of Λ_N and check the group law.
    Group {
        #[arg(long)]
        n: usize,
    },
    /// Classical bound of the multipartite inequality, optionally by exhaustive search.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bruteforce: bool,
        /// Refuse exhaustive search above this many sites.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Evaluate an inequality on a state given in the state mini-language.
    Violate {
        #[arg(long)]
        state: String,
        /// Defaults to `two` for two-site states and `multi` otherwise.
        #[arg(long)]
        kind: Option<Kind>,
    },
    /// Multipartite inequality on GHZ and product states over a range of n.
    Scan {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate an inequality on measured correlators from a CSV file.
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        kind: Kind,
        /// Number of sites; inferred from the first record when omitted.
        #[arg(long)]
        n: Option<usize>,
        /// Significance in standard errors required to call a violation.
        #[arg(long, default_value_t = DEFAULT_SIGMAS)]
        k: f64,
    },
    /// Run one of the built-in verification suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Largest n for the identity and HVKN suites.
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Two,
    Multi,
}

impl From<Kind> for InequalityKind {
    fn from(kind: Kind) -> Self {
        match kind {
            Kind::Two => InequalityKind::TwoPartite,
            Kind::Multi => InequalityKind::Multipartite,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Identities,
    Hvkn,
    Fine,
    Certificates,
}

enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(err) = configure_threads() {
        eprintln!("error: {err:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(EXIT_FAILURE),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("KS_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().with_context(|| format!("KS_LAB_THREADS={value:?} is not a count"))?;
    if threads == 0 {
        bail!("KS_LAB_THREADS must be positive");
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn emit<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Group { n } => group(n),
        Command::Bound { n, bruteforce, cap } => bound(n, bruteforce, cap),
        Command::Violate { state, kind } => violate(&state, kind),
        Command::Scan { from, to, format } => {
            if from > to {
                bail!("--from {from} exceeds --to {to}");
            }
            let rows = scan(from, to)?;
            match format {
                Format::Csv => write_scan_csv(&rows, std::io::stdout().lock())?,
                Format::Json => emit(&rows)?,
            }
            Ok(Outcome::Pass)
        }
        Command::Check { file, kind, n, k } => check(&file, kind.into(), n, k),
        Command::Verify { suite, max_n, seed } => verify(suite, max_n, seed),
    }
}

fn group(n: usize) -> anyhow::Result<Outcome> {
    if n > GROUP_TABLE_LIMIT {
        bail!("group table is limited to n <= {GROUP_TABLE_LIMIT}");
    }
    let elements: Vec<_> = LambdaIndex::all(n)?.map(lambda_element).collect();
    let table: Vec<_> = elements
        .iter()
        .enumerate()
        .map(|(p, word)| json!({ "p": p, "word": word.to_string(), "hermitian": word.is_hermitian() }))
        .collect();
    let mut failures = Vec::new();
    for (p, a) in elements.iter().enumerate() {
        for (q, b) in elements.iter().enumerate() {
            if pauli_mul(a, b)? != elements[p ^ q] {
                failures.push(json!({ "p": p, "q": q }));
            }
        }
    }
    let closed = failures.is_empty();
    emit(&json!({ "n": n, "order": elements.len(), "elements": table, "closed": closed, "failures": failures }))?;
    Ok(Outcome::from_bool(closed))
}

fn bound(n: usize, bruteforce: bool, cap: usize) -> anyhow::Result<Outcome> {
    if !bruteforce {
        emit(&json!({ "n": n, "bound_formula": multipartite_bound_exact(n)? }))?;
        return Ok(Outcome::Pass);
    }
    let report = bruteforce_bound_with_cap(n, cap)?;
    let agree = report.agrees();
    let mut value = serde_json::to_value(&report)?;
    value["agree"] = json!(agree);
    emit(&value)?;
    Ok(Outcome::from_bool(agree))
}

fn violate(spec: &str, kind: Option<Kind>) -> anyhow::Result<Outcome> {
    let state = parse_state_spec(spec)?;
    let kind = kind.map(InequalityKind::from).unwrap_or(if state.n() == 2 {
        InequalityKind::TwoPartite
    } else {
        InequalityKind::Multipartite
    });
    let mut value = match kind {
        InequalityKind::TwoPartite => {
            let report = two_partite_report(&state)?;
            let mut value = serde_json::to_value(&report)?;
            value["fidelity"] = json!(bell_fidelity(&state)?);
            value
        }
        InequalityKind::Multipartite => serde_json::to_value(multipartite_report(&state)?)?,
    };
    value["state"] = json!(spec);
    emit(&value)?;
    Ok(Outcome::Pass)
}

fn check(file: &std::path::Path, kind: InequalityKind, n: Option<usize>, k: f64) -> anyhow::Result<Outcome> {
    let records = ingest_correlators(file).with_context(|| format!("reading {}", file.display()))?;
    let n = match (n, records.first()) {
        (Some(n), _) => n,
        (None, Some(first)) => first.word.n(),
        (None, None) => bail!("{} holds no correlators", file.display()),
    };
    let report = evaluate_experiment(&records, kind, n, k)?;
    let mut value = serde_json::to_value(&report)?;
    value["k"] = json!(k);
    value["records"] = json!(records.len());
    emit(&value)?;
    Ok(Outcome::Pass)
}

fn verify(suite: Suite, max_n: usize, seed: u64) -> anyhow::Result<Outcome> {
    match suite {
        Suite::Identities => {
            if max_n < 2 {
                bail!("--max-n must be at least 2");
            }
            let reports = (2..=max_n).map(verify_sum_identities).collect::<Result<Vec<_>, _>>()?;
            let passed = reports.iter().all(|r| r.all_hold());
            emit(&json!({ "suite": "identities", "passed": passed, "reports": reports }))?;
            Ok(Outcome::from_bool(passed))
        }
        Suite::Hvkn => {
            let reports = (2..=max_n.max(2)).map(|n| verify_hvkn(n, 100_000, seed)).collect::<Result<Vec<_>, _>>()?;
            let passed = reports.iter().all(|r| r.passed);
            emit(&json!({ "suite": "hvkn", "passed": passed, "reports": reports }))?;
            Ok(Outcome::from_bool(passed))
        }
        Suite::Fine => verify_fine(seed),
        Suite::Certificates => {
            let certificates = [peres_mermin_certificate()?, ghz_certificate()?];
            for certificate in &certificates {
                eprintln!("{certificate}");
            }
            let passed = certificates.iter().all(|c| c.holds());
            emit(&json!({ "suite": "certificates", "passed": passed, "certificates": certificates }))?;
            Ok(Outcome::from_bool(passed))
        }
    }
}

fn verify_fine(seed: u64) -> anyhow::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for trial in 0..12 {
        let n = 1 + trial % 3;
        let family = if trial % 2 == 0 {
            random_commuting_family(n, 3, &mut rng)?
        } else {
            random_commuting_paulis(n, 3, &mut rng)?
        };
        let state = StateModel::dense(n, dense::random_density(1 << n, &mut rng))?;
        let mut model = fine_model::build_model(&state, &family)?;
        let report = sweep(&mut model, &mut rng)?;
        failures.extend(report.failures.iter().map(|f| format!("trial {trial}: {f}")));
        runs.push(json!({ "trial": trial, "n": n, "omega": model.omega_size(), "report": report }));
    }
    let passed = failures.is_empty();
    emit(&json!({ "suite": "fine", "seed": seed, "passed": passed, "runs": runs, "failures": failures }))?;
    Ok(Outcome::from_bool(passed))
}
