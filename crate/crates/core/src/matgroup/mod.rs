//! Finite subgroups of `GL_2(Z/p^n)` acting on `(Z/p^n)^2`.

mod group;
mod mat2;

pub use group::{close_group, cyclic_subgroups, fixed_points, reduce_mod, triangularity, CyclicSubgroup, FixedPoints, MatrixGroup, Triangularity, DEFAULT_CAP};
pub use mat2::{Mat2, RawMat2, TorsionPoint};
pub(crate) use mat2::{image_constraints, solve2, vec2};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group exceeds the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("generator {0} is not invertible")]
    NonInvertibleGenerator(Mat2),
    #[error("matrix {0} is not invertible")]
    NonInvertible(Mat2),
    #[error("generators use different moduli")]
    ModulusMismatch,
}
