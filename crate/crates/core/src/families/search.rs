use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::{h1_loc, Cocycle};
use crate::matgroup::{close_group, GroupError, Mat2, MatrixGroup};
use crate::modring::Modulus;

use super::certificate::{verify_counterexample, CounterexampleCertificate};
use super::FamilyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Lower,
    Upper,
    Diagonal,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Lower => "lower",
            Shape::Upper => "upper",
            Shape::Diagonal => "diagonal",
        })
    }
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lower" => Ok(Shape::Lower),
            "upper" => Ok(Shape::Upper),
            "diagonal" => Ok(Shape::Diagonal),
            _ => Err(format!("unknown shape `{s}`")),
        }
    }
}

/// Pins the exponents of the generators; `None` ranges over everything.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConstraints {
    /// Upper unipotent generator `[[1, p^i], [0, 1]]`.
    pub i: Option<u32>,
    /// Lower unipotent generator `[[1, 0], [p^j, 1]]`.
    pub j: Option<u32>,
    /// `δ = diag(1 + p^m, ·)`.
    pub m: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct SearchHit {
    pub generators: Vec<Mat2>,
    pub group_order: usize,
    pub h1loc_structure: Vec<u64>,
    pub representative: Cocycle,
    pub certificate: CounterexampleCertificate,
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub p: u64,
    pub n: u32,
    pub shape: Shape,
    /// Generator sets tried.
    pub candidates: usize,
    /// Distinct groups after removing repeats.
    pub distinct_groups: usize,
    /// Nonzero `H^1_loc`, one per conjugacy class under `diag(1, u)`.
    pub hits: Vec<SearchHit>,
}

fn range(pinned: Option<u32>, lo: u32, hi: u32) -> Vec<u32> {
    match pinned {
        Some(v) if (lo..=hi).contains(&v) => vec![v],
        Some(_) => vec![],
        None => (lo..=hi).collect(),
    }
}

fn candidates(md: Modulus, shape: Shape, c: &SearchConstraints) -> Vec<Vec<Mat2>> {
    let (p, n) = (md.p(), md.n());
    let units = |k: u32| -> Vec<u64> {
        let q = p.pow(k);
        (1..q.max(2)).filter(|d| d % p != 0).collect()
    };
    let mut deltas = Vec::new();
    for m in range(c.m, 1, n) {
        for h in 1..=n {
            let ds = if h == n { vec![1] } else { units(n - h) };
            for d in ds {
                let a = md.add(1, md.p_power(m));
                let b = md.add(1, md.mul(md.p_power(h), d));
                deltas.push(Mat2::from_raw(md, [a, 0, 0, b]));
            }
        }
    }
    let m1 = Modulus::new(p, 1).expect("prime");
    let lambdas: Vec<u64> = (1..md.value()).filter(|&x| x % p != 0 && m1.order(x % p) >= 3).collect();
    let unipotents: Vec<Option<Mat2>> = match shape {
        Shape::Lower => range(c.j, 1, n - 1)
            .into_iter()
            .map(|j| Some(Mat2::from_raw(md, [1, 0, md.p_power(j), 1])))
            .collect(),
        Shape::Upper => range(c.i, 1, n - 1)
            .into_iter()
            .map(|i| Some(Mat2::from_raw(md, [1, md.p_power(i), 0, 1])))
            .collect(),
        Shape::Diagonal => vec![None],
    };
    let mut out = Vec::new();
    for u in &unipotents {
        for delta in &deltas {
            for &lambda in &lambdas {
                let mut gens: Vec<Mat2> = Vec::new();
                gens.extend(u.iter().copied());
                if !delta.is_identity() {
                    gens.push(*delta);
                }
                gens.push(Mat2::from_raw(md, [1, 0, 0, lambda]));
                out.push(gens);
            }
        }
    }
    out
}

fn element_key(g: &MatrixGroup) -> Vec<[u64; 4]> {
    let mut v: Vec<[u64; 4]> = g.elements().iter().map(|e| e.raw()).collect();
    v.sort_unstable();
    v
}

fn hash_key(key: &[[u64; 4]]) -> u64 {
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    h.finish()
}

// Smallest sorted element list over conjugation by diag(1, u).
fn canonical_key(g: &MatrixGroup) -> Vec<[u64; 4]> {
    let md = g.modulus();
    let mut best: Option<Vec<[u64; 4]>> = None;
    for u in (1..md.value()).filter(|x| x % md.p() != 0) {
        let ui = md.inv(u).expect("unit");
        let mut v: Vec<[u64; 4]> = g
            .elements()
            .iter()
            .map(|e| {
                let r = e.raw();
                [r[0], md.mul(r[1], u), md.mul(r[2], ui), r[3]]
            })
            .collect();
        v.sort_unstable();
        if best.as_ref().map_or(true, |b| v < *b) {
            best = Some(v);
        }
    }
    best.unwrap_or_default()
}

/// Enumerates groups `<u, δ, diag(1, λ)>` of the given shape over `Z/p^n`, where `u` is
/// a unipotent generator matching the shape, `δ = diag(1 + p^m, 1 + p^h d)` and `λ`
/// ranges over units whose reduction has order at least 3, and reports every group
/// with nonzero `H^1_loc`.
pub fn search_counterexamples(
    p: u64,
    n: u32,
    shape: Shape,
    constraints: &SearchConstraints,
    cap: usize,
) -> Result<SearchReport, FamilyError> {
    let md = Modulus::new(p, n)?;
    if n < 2 {
        return Err(FamilyError::SpecViolated(format!("search needs n >= 2, got n = {n}")));
    }
    // The candidate list is enumerated over all residues mod p^n.
    if md.value() as u128 * u128::from(n) > cap as u128 {
        return Err(GroupError::CapExceeded { cap }.into());
    }
    let cands = candidates(md, shape, constraints);
    if cands.len() > cap {
        return Err(GroupError::CapExceeded { cap }.into());
    }
    let groups: Vec<(Vec<Mat2>, MatrixGroup)> = cands
        .par_iter()
        .map(|gens| close_group(md, gens, cap).map(|g| (gens.clone(), g)))
        .collect::<Result<_, _>>()?;

    let mut seen = HashSet::new();
    let mut distinct = Vec::new();
    for (gens, g) in groups {
        if seen.insert(hash_key(&element_key(&g))) {
            distinct.push((gens, Arc::new(g)));
        }
    }
    let distinct_groups = distinct.len();

    let raw_hits: Vec<(Vec<u64>, SearchHit)> = distinct
        .into_par_iter()
        .filter_map(|(gens, g)| {
            let rep = h1_loc(&g);
            if rep.h1loc_trivial() {
                return None;
            }
            let z = rep.representatives[0].clone();
            let certificate = verify_counterexample(&z);
            let key = canonical_key(&g).iter().flatten().copied().collect();
            Some((
                key,
                SearchHit {
                    generators: gens,
                    group_order: g.order(),
                    h1loc_structure: rep.h1loc_structure,
                    representative: z,
                    certificate,
                },
            ))
        })
        .collect();

    let mut keys = HashSet::new();
    let hits = raw_hits.into_iter().filter(|(k, _)| keys.insert(k.clone())).map(|(_, h)| h).collect();
    Ok(SearchReport { p, n, shape, candidates: cands.len(), distinct_groups, hits })
}
