use std::sync::Arc;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::h1_loc;
use crate::matgroup::{close_group, GroupError, Mat2, MatrixGroup};
use crate::modring::Modulus;
use crate::structure::{extract_parameters, criterion_holds, vanishing_predicate, StructureError};

use super::{build_family_with_cap, FamilyCase, FamilySpec};

/// Nominal parameters of a synthesized group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridTuple {
    pub p: u64,
    pub n: u32,
    pub i: u32,
    pub j: u32,
    pub m: u32,
    pub h: u32,
    /// Residue mod `p` of the diagonal generator's `(2,2)` entry.
    pub lambda1: u64,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GridOutcome {
    Evaluated {
        order: usize,
        /// Parameters read back from the closed group.
        i: u32,
        j: u32,
        m: u32,
        h: u32,
        predicate: bool,
        h1loc: Vec<u64>,
    },
    /// `m = n`: every locally trivial class is expected to vanish.
    NoDiagonalDeviation { order: usize, h1loc: Vec<u64> },
    PreconditionFailed { reason: String },
    SkippedCap { cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEntry {
    /// `"synthesized"` or a family name.
    pub source: String,
    pub tuple: GridTuple,
    pub outcome: GridOutcome,
}

impl GridEntry {
    pub fn predicate_true(&self) -> bool {
        matches!(self.outcome, GridOutcome::Evaluated { predicate: true, .. })
    }

    /// The criterion predicts vanishing but `H^1_loc` is nonzero.
    pub fn is_violation(&self) -> bool {
        match &self.outcome {
            GridOutcome::Evaluated { predicate: true, h1loc, .. } => !h1loc.is_empty(),
            GridOutcome::NoDiagonalDeviation { h1loc, .. } => !h1loc.is_empty(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    pub primes: Vec<u64>,
    pub exponents: Vec<u32>,
    /// Largest group closed per tuple; bigger ones are recorded as skipped.
    pub group_cap: usize,
    /// Maximum number of synthesized tuples evaluated.
    pub budget: usize,
    /// Only affects which tuples are kept when the budget is smaller than the grid.
    pub seed: u64,
    pub include_families: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            primes: vec![5, 7],
            exponents: vec![2, 3],
            group_cap: 50_000,
            budget: 10_000,
            seed: 0,
            include_families: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridReport {
    pub entries: Vec<GridEntry>,
    pub predicate_true: usize,
    pub violations: Vec<usize>,
    pub budget_exhausted: bool,
    /// How the diagonal generator was lifted.
    pub lift_rule: String,
}

/// Generators `diag(1 + p^m, 1 + p^h d)`, lower `p^j`, upper `p^i`, `diag(1, ω(λ1))` with
/// `ω` the multiplicative lift `λ1^(p^(n-1))`; identity generators are dropped.
pub fn synthesize_group(t: &GridTuple, cap: usize) -> Result<MatrixGroup, GroupError> {
    let md = Modulus::new(t.p, t.n).expect("valid modulus");
    let lift = md.pow(t.lambda1, md.pow_p(t.n - 1));
    let gens: Vec<Mat2> = [
        Mat2::from_raw(md, [md.add(1, md.p_power(t.m)), 0, 0, md.add(1, md.mul(md.p_power(t.h), t.d))]),
        Mat2::from_raw(md, [1, 0, md.p_power(t.j), 1]),
        Mat2::from_raw(md, [1, md.p_power(t.i), 0, 1]),
        Mat2::from_raw(md, [1, 0, 0, lift]),
    ]
    .into_iter()
    .filter(|g| !g.is_identity())
    .collect();
    close_group(md, &gens, cap)
}

fn evaluate(g: Arc<MatrixGroup>) -> GridOutcome {
    match extract_parameters(&g) {
        Ok(prof) => {
            let rep = h1_loc(&g);
            GridOutcome::Evaluated {
                order: g.order(),
                i: prof.i,
                j: prof.j,
                m: prof.m,
                h: prof.h,
                predicate: criterion_holds(&prof),
                h1loc: rep.h1loc_structure,
            }
        }
        Err(StructureError::NoDiagonalDeviation { .. }) => {
            GridOutcome::NoDiagonalDeviation { order: g.order(), h1loc: h1_loc(&g).h1loc_structure }
        }
        Err(StructureError::PreconditionViolated(reason)) => GridOutcome::PreconditionFailed { reason },
    }
}

fn tuples_for(p: u64, n: u32) -> Vec<GridTuple> {
    let m1 = Modulus::new(p, 1).expect("prime");
    let lambdas: Vec<u64> = (2..p).filter(|&a| m1.order(a) >= 3).collect();
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for m in 1..=n {
                for h in 1..=n {
                    for &lambda1 in &lambdas {
                        let ds: &[u64] = if h == n { &[1] } else { &[1, 2] };
                        for &d in ds {
                            out.push(GridTuple { p, n, i, j, m, h, lambda1, d });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Evaluates synthesized groups across the parameter grid, plus the explicit families
/// that fit the same `(p, n)`, and flags any tuple where the criterion predicts
/// vanishing but `H^1_loc` is nonzero.
pub fn vanishing_grid(cfg: &GridConfig) -> GridReport {
    let mut tuples = Vec::new();
    for &p in &cfg.primes {
        for &n in &cfg.exponents {
            tuples.extend(tuples_for(p, n));
        }
    }
    let budget_exhausted = tuples.len() > cfg.budget;
    if budget_exhausted {
        let mut rng = StdRng::seed_from_u64(cfg.seed);
        tuples.shuffle(&mut rng);
        tuples.truncate(cfg.budget);
        tuples.sort_by_key(|t| (t.p, t.n, t.i, t.j, t.m, t.h, t.lambda1, t.d));
    }

    let mut entries: Vec<GridEntry> = tuples
        .par_iter()
        .map(|t| {
            let outcome = match synthesize_group(t, cfg.group_cap) {
                Ok(g) => evaluate(Arc::new(g)),
                Err(_) => GridOutcome::SkippedCap { cap: cfg.group_cap },
            };
            GridEntry { source: "synthesized".into(), tuple: *t, outcome }
        })
        .collect();

    if cfg.include_families {
        let mut specs = Vec::new();
        for &p in &cfg.primes {
            for &n in &cfg.exponents {
                for case in FamilyCase::ALL {
                    specs.push(FamilySpec::new(p, n, case));
                }
            }
        }
        let fam: Vec<GridEntry> = specs
            .par_iter()
            .filter_map(|spec| {
                let built = build_family_with_cap(spec, cfg.group_cap);
                let i = built.as_ref().map_or(spec.i.unwrap_or(0), |f| f.i);
                let lambda1 = built.as_ref().map_or(0, |f| f.lambda % spec.p);
                let outcome = match built {
                    Ok(f) => evaluate(f.group.clone()),
                    Err(super::FamilyError::Group(GroupError::CapExceeded { cap })) => GridOutcome::SkippedCap { cap },
                    Err(_) => return None,
                };
                let tuple = GridTuple {
                    p: spec.p,
                    n: spec.n,
                    i,
                    j: spec.j(),
                    m: spec.m(),
                    h: spec.h(),
                    lambda1,
                    d: 1,
                };
                Some(GridEntry { source: spec.case.name().into(), tuple, outcome })
            })
            .collect();
        entries.extend(fam);
    }

    let predicate_true = entries.iter().filter(|e| e.predicate_true()).count();
    let violations = (0..entries.len()).filter(|&k| entries[k].is_violation()).collect();
    GridReport {
        entries,
        predicate_true,
        violations,
        budget_exhausted,
        lift_rule: "d in {1, 2}; rho = diag(1, lambda1^(p^(n-1)))".into(),
    }
}

/// Whether the nominal tuple already satisfies the criterion (before closure).
pub fn nominal_predicate(t: &GridTuple) -> bool {
    vanishing_predicate(t.i, t.j, t.m, t.h)
}
