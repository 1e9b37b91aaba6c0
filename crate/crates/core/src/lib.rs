//! Verification toolkit for Kochen-Specker type inequalities on qubit systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`pauli`]: exact phase-tracked Pauli words, the commutative group `Λₙ` of
//!   words `O^n_p`, its odd-parity companion family `R^n_p`, and the four
//!   sum identities relating them to products of local projector-like factors.
//! - [`dense`]: small dense complex-matrix helpers used as independent oracles.
//! - [`states`]: state models (dense, product, GHZ superposition, Werner) and
//!   the expectation engine `Tr[ψ·P]`.
//! - [`inequalities`]: the two-partite and multipartite inequalities, their
//!   classical bounds and violation reports.
//! - [`hv_oracle`]: exhaustive deterministic hidden-variable search and
//!   contradiction certificates.
//! - [`fine_model`]: finite classical probability models built from commuting
//!   families, with checks of the distribution, joint-distribution, functional
//!   and product rules.
//! - [`experiment`]: correlator ingestion and evaluation with uncertainty.
//!
//! Site `j` (1-based) of a Pauli word is bit `j - 1` of its masks, and bit
//! `j - 1` of a computational-basis index. Basis value 0 on a site is the
//! `σ_z = +1` eigenstate `|+⟩`.

pub mod dense;
pub mod error;
pub mod experiment;
pub mod fine_model;
pub mod hv_oracle;
pub mod inequalities;
pub mod pauli;
pub mod states;

pub use error::{Error, Result};
pub use experiment::{evaluate_experiment, ingest_correlators, CorrelatorRecord};
pub use fine_model::{build_model, FiniteHVModel, Observable, OpId};
pub use hv_oracle::{Assignment, BoundReport, ContradictionCertificate};
pub use inequalities::{InequalityKind, InequalityReport};
pub use pauli::{LambdaIndex, PauliString, RIndex};
pub use states::StateModel;

/// Absolute tolerance for scalar comparisons between evaluation routes.
pub const SCALAR_TOL: f64 = 1e-10;

/// Residual tolerance for exact operator identities checked with dense matrices.
pub const IDENTITY_TOL: f64 = 1e-12;
