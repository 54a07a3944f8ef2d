//! Standing assumptions on a group and the parameters `i, j, m, h` read off its elements.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matgroup::{reduce_mod, triangularity, GroupError, Mat2, MatrixGroup, Triangularity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    /// Every diagonal element has `(1,1)` entry exactly 1, so `m = n`.
    #[error("no diagonal element deviates from 1 in the (1,1) entry (m = n)")]
    NoDiagonalDeviation { i: u32, j: u32 },
}

/// How to read "entries c > 1" when locating the smallest power of `p` among the
/// off-diagonal entries of strictly triangular elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryReading {
    /// Every nonzero entry counts.
    #[default]
    NonZero,
    /// Nonzero entries other than the residue 1 count.
    GreaterThanOne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreconditionReport {
    pub g1_order: usize,
    pub g1_cyclic_ok: bool,
    pub g1_generator: Option<Mat2>,
    pub lambda1: Option<u64>,
    pub ord_lambda1: u64,
    /// `G_1` is generated by a matrix `diag(1, λ_1)`.
    pub basis_ok: bool,
    pub g2_triangularity: Triangularity,
    pub notes: Vec<String>,
}

impl PreconditionReport {
    pub fn satisfied(&self) -> bool {
        self.g1_cyclic_ok && self.basis_ok && self.ord_lambda1 >= 3 && self.g2_triangularity != Triangularity::None
    }
}

/// Tests the standing assumptions on the reductions mod `p` and mod `p^2`.
pub fn check_preconditions(g: &MatrixGroup) -> PreconditionReport {
    let m = g.modulus();
    let g1 = reduce_mod(g, 1);
    let m1 = g1.modulus();
    let g1_order = g1.order();
    let mut notes = Vec::new();

    let cyclic_gens: Vec<usize> = (0..g1_order).filter(|&k| g1.element_order(k) as usize == g1_order).collect();
    let g1_cyclic_ok = !cyclic_gens.is_empty();
    let diag_gen = cyclic_gens.iter().copied().find(|&k| {
        let e = g1.element(k);
        e.is_diagonal() && e.a11() == 1
    });
    let basis_ok = diag_gen.is_some();
    let g1_generator = diag_gen.or(cyclic_gens.first().copied()).map(|k| *g1.element(k));
    let lambda1 = diag_gen.map(|k| g1.element(k).a22());
    let ord_lambda1 = lambda1.map_or(0, |l| m1.order(l));

    if !g1_cyclic_ok {
        notes.push("G1 is not cyclic; H1_loc vanishes by the reduction for non-cyclic G1".into());
    } else if g1_order == 1 {
        notes.push("G1 is trivial (diagonal); no lift diag(1, lambda1) of order >= 3 exists".into());
    } else if !basis_ok {
        notes.push("G1 is cyclic but not generated by a matrix diag(1, lambda1) in this basis".into());
    } else if ord_lambda1 < 3 {
        notes.push(format!(
            "ord(lambda1) = {ord_lambda1} < 3; H1_loc vanishes by the reduction for small G1"
        ));
    }

    let g2 = if m.n() >= 2 { reduce_mod(g, 2) } else { g1.clone() };
    let g2_triangularity = triangularity(&g2);
    match g2_triangularity {
        Triangularity::None => {
            notes.push("G2 is neither upper nor lower triangular; H1_loc vanishes by the reduction for such G2".into())
        }
        Triangularity::Diagonal => notes.push("G2 is diagonal".into()),
        _ => {}
    }
    if triangularity(g).is_upper() {
        notes.push("G is upper triangular; H1_loc vanishes".into());
    }

    PreconditionReport { g1_order, g1_cyclic_ok, g1_generator, lambda1, ord_lambda1, basis_ok, g2_triangularity, notes }
}

/// The parameters `i, j, m, h` and the matrices realising them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterProfile {
    pub p: u64,
    pub n: u32,
    pub i: u32,
    pub j: u32,
    pub m: u32,
    pub h: u32,
    /// Unit with `δ_22 = 1 + p^h d` (1 when `δ_22 = 1`).
    pub d: u64,
    pub lambda1: u64,
    pub delta: Mat2,
    pub delta_tilde: Mat2,
    pub tau_l: Mat2,
    pub tau_u: Mat2,
    pub rho: Mat2,
    pub k_exp: u64,
    pub l_exp: u64,
    pub entry_reading: EntryReading,
    pub notes: Vec<String>,
}

impl fmt::Display for ParameterProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i={} j={} m={} h={} d={} lambda1={}", self.i, self.j, self.m, self.h, self.d, self.lambda1)
    }
}

/// `i <= h + |j - m|`, the sufficient condition for `H^1_loc` to vanish.
pub fn criterion_holds(profile: &ParameterProfile) -> bool {
    vanishing_predicate(profile.i, profile.j, profile.m, profile.h)
}

pub fn vanishing_predicate(i: u32, j: u32, m: u32, h: u32) -> bool {
    i <= h + j.abs_diff(m)
}

// Minimal valuation of the off-diagonal entry over strictly triangular elements, and an
// element attaining it with entry exactly p^v.
fn unipotent_parameter(g: &MatrixGroup, slot: usize, reading: EntryReading) -> (u32, Mat2) {
    let m = g.modulus();
    let other = 3 - slot;
    let mut best = m.n();
    for e in g.elements() {
        let r = e.raw();
        if r[0] != 1 || r[3] != 1 || r[other] != 0 || r[slot] == 0 {
            continue;
        }
        if reading == EntryReading::GreaterThanOne && r[slot] == 1 {
            continue;
        }
        best = best.min(m.val(r[slot]));
    }
    if best == m.n() {
        return (best, Mat2::identity(m));
    }
    let mut raw = [1, 0, 0, 1];
    raw[slot] = m.pow_p(best);
    let gen = Mat2::from_raw(m, raw);
    debug_assert!(g.contains(&gen), "strictly triangular part is cyclic");
    (best, gen)
}

pub fn extract_parameters(g: &MatrixGroup) -> Result<ParameterProfile, StructureError> {
    extract_parameters_with(g, EntryReading::default())
}

/// Reads the parameters off every element of the group, in its fixed basis.
pub fn extract_parameters_with(g: &MatrixGroup, reading: EntryReading) -> Result<ParameterProfile, StructureError> {
    let pre = check_preconditions(g);
    if !pre.satisfied() {
        return Err(StructureError::PreconditionViolated(pre.notes.join("; ")));
    }
    let md = g.modulus();
    let (p, n) = (md.p(), md.n());
    let lambda1 = pre.lambda1.expect("basis_ok");
    let ord1 = pre.ord_lambda1;
    let mut notes = Vec::new();

    let (j, tau_l) = unipotent_parameter(g, 2, reading);
    let (i, tau_u) = unipotent_parameter(g, 1, reading);

    let mut best: Option<(u32, Mat2)> = None;
    let mut skipped_one = false;
    for e in g.elements().iter().filter(|e| e.is_diagonal()) {
        if e.a11() == 1 {
            skipped_one |= !e.is_identity();
            continue;
        }
        let t = md.val(md.sub(e.a11(), 1));
        if best.map_or(true, |(v, _)| t < v) {
            best = Some((t, *e));
        }
    }
    if skipped_one {
        notes.push("diagonal elements with (1,1) entry equal to 1 are excluded from m".into());
    }
    let Some((m, delta_tilde)) = best else {
        return Err(StructureError::NoDiagonalDeviation { i, j });
    };
    if m == 0 {
        return Err(StructureError::PreconditionViolated("a diagonal (1,1) entry is not 1 mod p".into()));
    }

    let lifts: Vec<&Mat2> = g
        .elements()
        .iter()
        .filter(|e| e.is_diagonal() && e.a11() == 1 && e.a22() % p == lambda1)
        .collect();
    let rho = **lifts
        .iter()
        .find(|e| md.order(e.a22()) % p != 0)
        .or(lifts.first())
        .ok_or_else(|| StructureError::PreconditionViolated("no element diag(1, lambda) lifts the generator of G1".into()))?;
    let lambda = rho.a22();

    let mu1 = delta_tilde.a22() % p;
    let m1 = md.with_exponent(1);
    let k_exp = (0..ord1)
        .find(|&k| m1.pow(lambda1, k) == mu1)
        .ok_or_else(|| StructureError::PreconditionViolated("delta entry is not a power of lambda1 mod p".into()))?;

    let target = md.add(1, md.pow_p(m));
    let base = delta_tilde.a11();
    let mut acc = base;
    let mut l_exp = 1u64;
    while acc != target {
        acc = md.mul(acc, base);
        l_exp += 1;
        assert!(l_exp <= md.pow_p(n - m), "1 + p^m lies in the cyclic group of 1 + p^m a");
    }
    let rho_inv_k = Mat2::from_raw(md, [1, 0, 0, md.pow(md.inv(lambda).expect("unit"), k_exp)]);
    let delta = delta_tilde.mul(&rho_inv_k).pow(l_exp);
    debug_assert_eq!(delta.a11(), target);
    debug_assert!(g.contains(&delta));

    let dev = md.sub(delta.a22(), 1);
    let (h, d) = if dev == 0 { (n, 1) } else {
        let h = md.val(dev);
        (h, dev / md.pow_p(h))
    };
    if h == 0 {
        return Err(StructureError::PreconditionViolated("delta (2,2) entry is not 1 mod p".into()));
    }

    Ok(ParameterProfile {
        p,
        n,
        i,
        j,
        m,
        h,
        d,
        lambda1,
        delta,
        delta_tilde,
        tau_l,
        tau_u,
        rho,
        k_exp,
        l_exp,
        entry_reading: reading,
        notes,
    })
}

/// The group generated by `M g M^-1` over the generators `g`.
pub fn conjugate(g: &MatrixGroup, m: &Mat2) -> Result<MatrixGroup, GroupError> {
    g.conjugate(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::{close_group, DEFAULT_CAP};
    use crate::modring::Modulus;

    fn md(p: u64, n: u32) -> Modulus {
        Modulus::new(p, n).unwrap()
    }

    #[test]
    fn preconditions_small_lower_group() {
        let m = md(5, 2);
        let g = close_group(m, &[Mat2::diag(m, 1, 2), Mat2::new(m, 1, 0, 5, 1)], DEFAULT_CAP).unwrap();
        let r = check_preconditions(&g);
        assert!(r.g1_cyclic_ok && r.basis_ok);
        assert_eq!(r.ord_lambda1, 4);
        assert_eq!(r.g2_triangularity, Triangularity::Lower);
        assert!(r.satisfied());
    }

    #[test]
    fn noncyclic_g1() {
        let m = md(5, 1);
        let g = close_group(m, &[Mat2::new(m, 1, 1, 0, 1), Mat2::new(m, 1, 0, 1, 1), Mat2::diag(m, 2, 1)], DEFAULT_CAP).unwrap();
        let r = check_preconditions(&g);
        assert!(!r.g1_cyclic_ok);
        assert!(!r.satisfied());
        assert!(matches!(extract_parameters(&g), Err(StructureError::PreconditionViolated(_))));
    }

    #[test]
    fn trivial_g1_is_reported() {
        let m = md(5, 2);
        let g = close_group(m, &[Mat2::new(m, 1, 0, 5, 1)], DEFAULT_CAP).unwrap();
        let r = check_preconditions(&g);
        assert_eq!(r.g1_order, 1);
        assert!(!r.satisfied());
        assert!(r.notes.iter().any(|n| n.contains("trivial")));
    }

    #[test]
    fn diagonal_group_parameters() {
        let m = md(5, 2);
        let g = close_group(m, &[Mat2::diag(m, 6, 6), Mat2::diag(m, 1, 2)], DEFAULT_CAP).unwrap();
        let prof = extract_parameters(&g).unwrap();
        assert_eq!((prof.i, prof.j, prof.m, prof.h), (2, 2, 1, 1));
        assert_eq!(prof.delta.a11(), 6);
        assert!(prof.delta.is_diagonal());
    }

    #[test]
    fn no_diagonal_deviation() {
        let m = md(5, 2);
        let g = close_group(m, &[Mat2::diag(m, 1, 2), Mat2::new(m, 1, 0, 5, 1)], DEFAULT_CAP).unwrap();
        assert_eq!(extract_parameters(&g), Err(StructureError::NoDiagonalDeviation { i: 2, j: 1 }));
    }

    #[test]
    fn delta_construction_from_non_normalized_element() {
        // δ̃ = diag(1 + 2p, λ1): needs both the ρ correction and the power l.
        let m = md(5, 3);
        let g = close_group(m, &[Mat2::diag(m, 11, 2), Mat2::new(m, 1, 0, 25, 1)], DEFAULT_CAP).unwrap();
        let prof = extract_parameters(&g).unwrap();
        assert_eq!(prof.m, 1);
        assert_eq!(prof.delta.a11(), 6);
        assert!(g.contains(&prof.delta));
        assert_eq!(prof.delta.a22(), m.add(1, m.mul(m.pow_p(prof.h), prof.d)));
        assert_eq!(prof.j, 2);
        assert_eq!(prof.tau_l, Mat2::new(m, 1, 0, 25, 1));
        assert_eq!(prof.i, 3);
    }

    #[test]
    fn predicate_examples() {
        assert!(vanishing_predicate(1, 1, 1, 1));
        assert!(!vanishing_predicate(3, 1, 2, 1));
        assert!(vanishing_predicate(2, 2, 1, 1));
    }

    #[test]
    fn entry_reading_flag() {
        let m = md(5, 2);
        // Lower unipotent entries 5k: the two readings agree since 1 never occurs.
        let g = close_group(m, &[Mat2::diag(m, 6, 1), Mat2::diag(m, 1, 2), Mat2::new(m, 1, 0, 5, 1)], DEFAULT_CAP).unwrap();
        let a = extract_parameters_with(&g, EntryReading::NonZero).unwrap();
        let b = extract_parameters_with(&g, EntryReading::GreaterThanOne).unwrap();
        assert_eq!(a.j, b.j);
    }
}
