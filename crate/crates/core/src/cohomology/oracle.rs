//! Enumeration backend used to cross-check the generator-value solver.
//!
//! Unknowns are the `2|G|` coordinates of a full value map, constrained by the cocycle
//! identity on every ordered pair. The resulting modules are then enumerated element by
//! element: local conditions are tested against explicitly enumerated images of
//! `σ - 1`, and invariant factors are recovered by counting.

use std::collections::HashSet;

use crate::matgroup::MatrixGroup;
use crate::modring::{KernelBuilder, Modulus};

use super::CohomologyError;

/// Largest group the pair system is built for.
pub const ORACLE_MAX_ORDER: usize = 200;

/// Structures computed by enumeration. Same conventions as the generator-value report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub group_order: usize,
    pub z1_structure: Vec<u64>,
    pub b1_structure: Vec<u64>,
    pub h1_structure: Vec<u64>,
    pub z1loc_structure: Vec<u64>,
    pub h1loc_structure: Vec<u64>,
}

type Point = Vec<u64>;

fn span(m: Modulus, dim: usize, gens: &[Point], cap: usize) -> Result<HashSet<Point>, CohomologyError> {
    let zero = vec![0u64; dim];
    let mut seen = HashSet::new();
    seen.insert(zero.clone());
    let mut stack = vec![zero];
    while let Some(v) = stack.pop() {
        for g in gens {
            let w: Point = v.iter().zip(g).map(|(&a, &b)| m.add(a, b)).collect();
            if !seen.contains(&w) {
                if seen.len() >= cap {
                    return Err(CohomologyError::OracleTooLarge { what: "cocycle module", cap });
                }
                seen.insert(w.clone());
                stack.push(w);
            }
        }
    }
    Ok(seen)
}

/// Invariant factors of `x / y` for finite modules given as element sets.
///
/// `#{v ∈ x : p^t v ∈ y} / |y|` counts the elements of the quotient killed by `p^t`;
/// consecutive ratios give the number of factors of order at least `p^t`.
pub fn structure_by_counting(m: Modulus, x: &HashSet<Point>, y: &HashSet<Point>) -> Vec<u64> {
    let counts: Vec<usize> = (0..=m.n())
        .map(|t| {
            let pt = m.p_power(t);
            x.iter().filter(|v| y.contains(&v.iter().map(|&a| m.mul(a, pt)).collect::<Point>())).count() / y.len()
        })
        .collect();
    let n = m.n() as usize;
    let mut at_least = vec![0usize; n + 2];
    for t in 1..=n {
        let mut ratio = counts[t] / counts[t - 1];
        while ratio > 1 {
            ratio /= m.p() as usize;
            at_least[t] += 1;
        }
    }
    let mut out = Vec::new();
    for t in 1..=n {
        for _ in 0..at_least[t] - at_least[t + 1] {
            out.push(m.pow_p(t as u32));
        }
    }
    out
}

/// `Z^1`, `B^1`, `H^1`, `Z^1_loc`, `H^1_loc` by enumeration; `cap` bounds module sizes.
pub fn oracle_cohomology(g: &MatrixGroup, cap: usize) -> Result<OracleReport, CohomologyError> {
    if g.order() > ORACLE_MAX_ORDER {
        return Err(CohomologyError::OracleTooLarge { what: "group", cap: ORACLE_MAX_ORDER });
    }
    let m = g.modulus();
    let order = g.order();
    let dim = 2 * order;

    let mut kb = KernelBuilder::new(m, dim);
    let mut row = vec![0u64; dim];
    for r in 0..2 {
        row.fill(0);
        row[r] = 1;
        kb.constrain(&row);
    }
    for (a, sa) in g.elements().iter().enumerate() {
        let s = sa.raw();
        for (b, sb) in g.elements().iter().enumerate() {
            let ab = g.index_of(&sa.mul(sb)).expect("closed group");
            for r in 0..2 {
                row.fill(0);
                // Z_ab - Z_a - σ_a Z_b
                row[2 * ab + r] = m.add(row[2 * ab + r], 1);
                row[2 * a + r] = m.sub(row[2 * a + r], 1);
                row[2 * b] = m.sub(row[2 * b], s[2 * r]);
                row[2 * b + 1] = m.sub(row[2 * b + 1], s[2 * r + 1]);
                kb.constrain(&row);
            }
        }
    }
    let z1 = span(m, dim, kb.generators(), cap)?;

    let mut b1 = HashSet::new();
    for x in 0..m.value() {
        for y in 0..m.value() {
            let v: Point = g
                .elements()
                .iter()
                .flat_map(|s| {
                    let d = s.minus_identity();
                    [m.add(m.mul(d[0], x), m.mul(d[1], y)), m.add(m.mul(d[2], x), m.mul(d[3], y))]
                })
                .collect();
            b1.insert(v);
        }
    }

    let images: Vec<HashSet<[u64; 2]>> = g
        .elements()
        .iter()
        .map(|s| {
            let d = s.minus_identity();
            let mut img = HashSet::new();
            for x in 0..m.value() {
                for y in 0..m.value() {
                    img.insert([m.add(m.mul(d[0], x), m.mul(d[1], y)), m.add(m.mul(d[2], x), m.mul(d[3], y))]);
                }
            }
            img
        })
        .collect();
    let z1loc: HashSet<Point> = z1
        .iter()
        .filter(|v| (0..order).all(|k| images[k].contains(&[v[2 * k], v[2 * k + 1]])))
        .cloned()
        .collect();

    let trivial: HashSet<Point> = [vec![0u64; dim]].into_iter().collect();
    Ok(OracleReport {
        group_order: order,
        z1_structure: structure_by_counting(m, &z1, &trivial),
        b1_structure: structure_by_counting(m, &b1, &trivial),
        h1_structure: structure_by_counting(m, &z1, &b1),
        z1loc_structure: structure_by_counting(m, &z1loc, &trivial),
        h1loc_structure: structure_by_counting(m, &z1loc, &b1),
    })
}
