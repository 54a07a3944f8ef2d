//! Exact arithmetic in `Z/p^n Z` and linear algebra over that ring.
//!
//! Everything here works with residues stored as `u64` in `[0, p^n)`. Products go
//! through `u128`, so any modulus below `2^62` is safe. `ResidueInt` is the checked
//! public scalar type; the matrix and solver routines operate on raw residues tagged
//! with a single shared [`Modulus`].

mod abelian;
mod howell;
mod kernel;
mod matrix;
mod residue;
mod smith;

pub use abelian::{abelian_structure, quotient_decomposition, CyclicFactor};
pub use howell::{howell_form, in_row_space, HowellForm};
pub use kernel::KernelBuilder;
pub use matrix::ModMatrix;
pub use residue::{Modulus, ResidueInt};
pub use smith::{smith_form, SmithForm};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("{p}^{n} does not fit the residue carrier")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("residues belong to different moduli ({0} and {1})")]
    ModulusMismatch(u64, u64),
    #[error("{value} is not a unit modulo {modulus}")]
    NonUnit { value: u64, modulus: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subgroup is not contained in the span of the generators")]
    SubgroupNotContained,
}

/// Particular solution plus generators of the homogeneous solution module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub particular: Vec<u64>,
    pub kernel: Vec<Vec<u64>>,
}

/// Solves `A x = b` over `Z/p^n`.
///
/// Returns `Ok(None)` when `b` is not in the column space of `A`. The kernel
/// generators span `{x : A x = 0}` as a module.
pub fn solve_linear(a: &ModMatrix, b: &[u64]) -> Result<Option<SolutionSet>, ModError> {
    if b.len() != a.rows() {
        return Err(ModError::DimensionMismatch(format!(
            "matrix has {} rows, right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let m = a.modulus();
    let unknowns = a.cols();
    let eqs = a.rows();

    // Rows of [A^T | I] record which combination of columns of A produced them.
    let mut rows: Vec<Vec<u64>> = (0..unknowns)
        .map(|k| {
            let mut row = vec![0u64; eqs + unknowns];
            for r in 0..eqs {
                row[r] = a.get_raw(r, k);
            }
            row[eqs + k] = 1;
            row
        })
        .collect();
    howell::howell_rows(&mut rows, m);

    let mut target = vec![0u64; eqs + unknowns];
    target[..eqs].copy_from_slice(b);
    for row in rows.iter() {
        let Some(c) = row.iter().position(|&x| x != 0) else { continue };
        if c >= eqs {
            break;
        }
        let v = m.val(row[c]);
        let e = target[c];
        if e == 0 {
            continue;
        }
        if m.val(e) < v {
            return Ok(None);
        }
        let f = e / m.pow_p(v);
        m.axpy_neg(&mut target, f, row);
    }
    if target[..eqs].iter().any(|&x| x != 0) {
        return Ok(None);
    }
    let particular = target[eqs..].iter().map(|&x| m.neg(x)).collect();
    let kernel = rows
        .iter()
        .filter(|row| row[..eqs].iter().all(|&x| x == 0))
        .map(|row| row[eqs..].to_vec())
        .filter(|row| row.iter().any(|&x| x != 0))
        .collect();
    Ok(Some(SolutionSet { particular, kernel }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn md(p: u64, n: u32) -> Modulus {
        Modulus::new(p, n).unwrap()
    }

    #[test]
    fn solve_identity() {
        let m = md(5, 2);
        let a = ModMatrix::identity(m, 2);
        let s = solve_linear(&a, &[7, 13]).unwrap().unwrap();
        assert_eq!(s.particular, vec![7, 13]);
        assert!(s.kernel.is_empty());
    }

    #[test]
    fn solve_scalar_non_unit() {
        let m = md(5, 2);
        let a = ModMatrix::from_rows(m, &[vec![5]]).unwrap();
        let s = solve_linear(&a, &[10]).unwrap().unwrap();
        assert_eq!(s.particular, vec![2]);
        assert_eq!(s.kernel, vec![vec![5]]);
        assert_eq!(solve_linear(&a, &[1]).unwrap(), None);
    }

    #[test]
    fn solve_dimension_mismatch() {
        let m = md(5, 2);
        let a = ModMatrix::identity(m, 2);
        assert!(matches!(solve_linear(&a, &[1]), Err(ModError::DimensionMismatch(_))));
    }

    // brute-force enumeration of all x in (Z/25)^2
    fn brute_solutions(a: &ModMatrix, b: &[u64]) -> Vec<Vec<u64>> {
        let m = a.modulus();
        let q = m.value();
        let mut out = vec![];
        for x0 in 0..q {
            for x1 in 0..q {
                let x = [x0, x1];
                if a.mul_vec(&x) == b {
                    out.push(x.to_vec());
                }
            }
        }
        out
    }

    fn span_size(gens: &[Vec<u64>], m: Modulus, dim: usize) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![vec![0u64; dim]];
        seen.insert(vec![0u64; dim]);
        while let Some(v) = stack.pop() {
            for g in gens {
                let w: Vec<u64> = v.iter().zip(g).map(|(&a, &b)| m.add(a, b)).collect();
                if seen.insert(w.clone()) {
                    stack.push(w);
                }
            }
        }
        seen.len()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn solver_matches_enumeration(entries in proptest::collection::vec(0u64..25, 6), x in proptest::collection::vec(0u64..25, 2), pick_b in any::<bool>(), b_raw in proptest::collection::vec(0u64..25, 3)) {
            let m = md(5, 2);
            let a = ModMatrix::from_rows(m, &[entries[0..2].to_vec(), entries[2..4].to_vec(), entries[4..6].to_vec()]).unwrap();
            let b = if pick_b { a.mul_vec(&x) } else { b_raw };
            let brute = brute_solutions(&a, &b);
            match solve_linear(&a, &b).unwrap() {
                None => prop_assert!(brute.is_empty()),
                Some(sol) => {
                    prop_assert_eq!(a.mul_vec(&sol.particular), b.clone());
                    for k in &sol.kernel {
                        prop_assert!(a.mul_vec(k).iter().all(|&v| v == 0));
                    }
                    // particular + span(kernel) is the whole solution set
                    prop_assert_eq!(span_size(&sol.kernel, m, 2), brute.len());
                }
            }
        }
    }
}
