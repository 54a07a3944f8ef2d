//! First cohomology of a matrix group with coefficients in `(Z/p^n)^2`.
//!
//! `Z^1` is computed from the values on the generators: every element's value is a
//! linear expression in those `2g` unknowns, obtained by walking the element's word,
//! and each Cayley edge not on the spanning tree adds two linear constraints.
//! `H^1_loc` restricts further to cocycles whose value at every `σ` lies in the image
//! of `σ - 1`.

mod cocycle;
mod normalize;
pub mod oracle;
mod space;

pub use cocycle::{coboundary, Cocycle, LocalConditions};
pub use normalize::{normalize, Normalized};
pub use oracle::{oracle_cohomology, OracleReport};
pub use space::{
    coboundary_space, cocycle_space, h1, h1_loc, local_cocycle_space, module_contains, CocycleModule, H1Report,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("expected {expected} values, got {got}")]
    IncompleteCocycle { expected: usize, got: usize },
    #[error("map does not satisfy the cocycle identity")]
    NotACocycle,
    #[error("cocycle does not satisfy the local conditions")]
    NotLocallyTrivial,
    #[error("normalization obstructed: {0}")]
    NormalizationObstructed(String),
    #[error("{what} too large for enumeration (cap {cap})")]
    OracleTooLarge { what: &'static str, cap: usize },
}
