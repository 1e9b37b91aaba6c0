//! Deterministic hidden-variable valuations searched exhaustively.
//!
//! An [`Assignment`] gives `±1` to every single-site `σ_x` and `σ_y`; values
//! of compound words follow from the product rule, including the word's own
//! `±1` prefactor.

mod assignment;
mod bound;
mod certificate;
mod hvkn;

pub use assignment::{Assignment, CompiledWord};
pub use bound::{bruteforce_bound, bruteforce_bound_with_cap, BoundReport, CROSS_CHECK_LIMIT, DEFAULT_ENUMERATION_CAP};
pub use certificate::{
    ghz_certificate, peres_mermin_certificate, ConstraintRow, ConstraintSystem, ContradictionCertificate, Scenario,
};
pub use hvkn::{verify_hvkn, HvknReport, DEFAULT_SAMPLE_SEED};
