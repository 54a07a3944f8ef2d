//! Local conditions and first cohomology for subgroups of `GL_2(Z/p^n)` acting on
//! `(Z/p^n)^2`.
//!
//! - [`modring`]: residues mod `p^n`, Howell and Smith forms, kernels and quotients.
//! - [`matgroup`]: closure of generated groups, words, reductions, fixed points.
//! - [`cohomology`]: `Z^1`, `B^1`, `H^1` and the locally trivial part `H^1_loc`, plus an
//!   enumeration oracle for small groups.
//! - [`structure`]: the reductions mod `p` and `p^2` and the parameters `i, j, m, h`.
//! - [`families`]: explicit groups with nonzero `H^1_loc`, the vanishing grid and the
//!   `n = 2` search.
//! - [`report`]: JSON reports used by the command line.

pub mod cohomology;
pub mod families;
pub mod matgroup;
pub mod modring;
pub mod report;
pub mod structure;

pub use cohomology::{h1_loc, Cocycle, CohomologyError, H1Report};
pub use families::{build_family, verify_counterexample, CounterexampleCertificate, FamilyCase, FamilyError, FamilySpec};
pub use matgroup::{close_group, GroupError, Mat2, MatrixGroup, RawMat2, TorsionPoint, Triangularity};
pub use modring::{ModError, Modulus, ResidueInt};
pub use structure::{extract_parameters, ParameterProfile, StructureError};
