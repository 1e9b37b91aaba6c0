//! Exact algebra of phase-tracked Pauli words.
//!
//! A [`PauliString`] on `n` sites stores the operator
//! `i^phase · ∏_j (σ_z^j)^{z_j} · ∏_j (σ_x^j)^{x_j}` with every `σ_z` factor
//! written to the left of every `σ_x` factor. In that ordering the group `Λₙ`
//! multiplies by a plain XOR of masks with no phase correction.

mod group;
mod identities;
mod string;

pub use group::{commutes, group_product, lambda_element, r_element, LambdaIndex, RIndex};
pub use identities::{verify_sum_identities, IdentityCheck, IdentityReport, PauliSum, SumIdentity};
pub use string::{pauli_mul, Letter, PauliString, MAX_SITES};
