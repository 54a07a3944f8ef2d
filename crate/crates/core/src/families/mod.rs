//! Explicit groups with nonzero `H^1_loc`, their witness cocycles, and harnesses that
//! probe the vanishing criterion over parameter grids and small searches.

mod certificate;
mod grid;
mod search;

pub use certificate::{verify_counterexample, CounterexampleCertificate};
pub use grid::{nominal_predicate, synthesize_group, vanishing_grid, GridConfig, GridEntry, GridOutcome, GridReport, GridTuple};
pub use search::{search_counterexamples, SearchConstraints, SearchHit, SearchReport, Shape};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::Cocycle;
use crate::matgroup::{close_group, reduce_mod, triangularity, GroupError, Mat2, MatrixGroup, Triangularity, DEFAULT_CAP};
use crate::modring::{ModError, Modulus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("invalid family parameters: {0}")]
    SpecViolated(String),
    #[error("element {0} does not factor as delta^a tau_L^c tau_U^b rho^gamma")]
    DecompositionFailed(Mat2),
    #[error("witness map is not a cocycle")]
    WitnessNotCocycle,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Modulus(#[from] ModError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyCase {
    /// `j = n - 2 < m = n - 1`.
    #[serde(rename = "j-lt-m")]
    JLtM,
    /// `j = m = n - 1`.
    #[serde(rename = "j-ge-m-eq")]
    JGeMEq,
    /// `j = n - 1 > m = n - 2`.
    #[serde(rename = "j-ge-m-gt")]
    JGeMGt,
    /// `n = 3`, `j = m = 2`.
    #[serde(rename = "n3-j-eq-m")]
    N3JEqM,
    /// `n = 3`, `j = 2 > m = 1`, scalar `δ`.
    #[serde(rename = "n3-j-gt-m")]
    N3JGtM,
}

impl FamilyCase {
    pub const ALL: [FamilyCase; 5] =
        [FamilyCase::JLtM, FamilyCase::JGeMEq, FamilyCase::JGeMGt, FamilyCase::N3JEqM, FamilyCase::N3JGtM];

    pub fn name(self) -> &'static str {
        match self {
            FamilyCase::JLtM => "j-lt-m",
            FamilyCase::JGeMEq => "j-ge-m-eq",
            FamilyCase::JGeMGt => "j-ge-m-gt",
            FamilyCase::N3JEqM => "n3-j-eq-m",
            FamilyCase::N3JGtM => "n3-j-gt-m",
        }
    }

    /// Whether the construction has `j < m`.
    pub fn j_less_than_m(self) -> bool {
        self == FamilyCase::JLtM
    }
}

impl fmt::Display for FamilyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyCase {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        FamilyCase::ALL
            .into_iter()
            .find(|c| c.name() == norm)
            .ok_or_else(|| FamilyError::SpecViolated(format!("unknown family '{s}'")))
    }
}

/// Parameters of one family member. Unset options take documented defaults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub p: u64,
    pub n: u32,
    pub case: FamilyCase,
    /// Valuation of the upper unipotent generator; defaults to the smallest admissible value.
    pub i: Option<u32>,
    /// Residue mod `p` of `λ`; defaults to the smallest `α ≥ 2` with order at least 3.
    pub alpha: Option<u64>,
    #[serde(default)]
    pub theta: u64,
    /// Offset `s` in `λ = α + p^(h+s) θ`; defaults to 1 for `j < m` and 2 otherwise.
    pub s: Option<u32>,
    pub lambda_override: Option<u64>,
}

impl FamilySpec {
    pub fn new(p: u64, n: u32, case: FamilyCase) -> Self {
        FamilySpec { p, n, case, i: None, alpha: None, theta: 0, s: None, lambda_override: None }
    }

    pub fn with_i(mut self, i: u32) -> Self {
        self.i = Some(i);
        self
    }

    pub fn with_alpha(mut self, alpha: u64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_theta(mut self, theta: u64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_s(mut self, s: u32) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_lambda(mut self, lambda: u64) -> Self {
        self.lambda_override = Some(lambda);
        self
    }

    /// `h` as fixed by the case.
    pub fn h(&self) -> u32 {
        let n = self.n;
        match self.case {
            FamilyCase::JLtM => n / 2,
            FamilyCase::JGeMEq | FamilyCase::JGeMGt => n.div_ceil(2),
            FamilyCase::N3JEqM | FamilyCase::N3JGtM => 1,
        }
    }

    pub fn m(&self) -> u32 {
        match self.case {
            FamilyCase::JLtM | FamilyCase::JGeMEq => self.n - 1,
            FamilyCase::JGeMGt => self.n - 2,
            FamilyCase::N3JEqM => 2,
            FamilyCase::N3JGtM => 1,
        }
    }

    pub fn j(&self) -> u32 {
        match self.case {
            FamilyCase::JLtM => self.n - 2,
            FamilyCase::JGeMEq | FamilyCase::JGeMGt => self.n - 1,
            FamilyCase::N3JEqM | FamilyCase::N3JGtM => 2,
        }
    }

    // Admissible i range. The equal case only needs i > h + j - m = h.
    fn i_range(&self) -> (u32, u32) {
        let n = self.n;
        let h = self.h();
        match self.case {
            FamilyCase::JLtM | FamilyCase::JGeMGt => (h + 2, n),
            FamilyCase::JGeMEq => (h + 1, n),
            FamilyCase::N3JEqM | FamilyCase::N3JGtM => (n, n),
        }
    }
}

/// The smallest `α` in `[2, p-1]` whose multiplicative order mod `p` is at least 3.
pub fn default_alpha(p: u64) -> Option<u64> {
    let m = Modulus::new(p, 1).ok()?;
    (2..p).find(|&a| m.order(a) >= 3)
}

/// The unique root of unity in `(Z/p^n)^*` congruent to `a` mod `p`.
pub fn teichmuller(md: Modulus, a: u64) -> u64 {
    md.pow(md.reduce(a), md.pow_p(md.n() - 1))
}

fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            out.push(d);
            while x % d == 0 {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// Smallest generator of `(Z/p^n)^*` for odd `p`.
pub fn primitive_root(modulus: Modulus) -> u64 {
    let p = modulus.p();
    let m1 = modulus.with_exponent(1);
    let qs = prime_factors(p - 1);
    (2..p)
        .find(|&g| {
            qs.iter().all(|&q| m1.pow(g, (p - 1) / q) != 1)
                && (modulus.n() == 1 || modulus.with_exponent(2).pow(g, p - 1) != 1)
        })
        .expect("odd primes have primitive roots")
}

/// One resolved member of a family: its generators, closed group and witness cocycle.
#[derive(Debug, Clone)]
pub struct Family {
    pub spec: FamilySpec,
    pub i: u32,
    pub j: u32,
    pub m: u32,
    pub h: u32,
    pub lambda: u64,
    pub tau_l: Mat2,
    pub tau_u: Mat2,
    pub delta: Mat2,
    pub rho: Mat2,
    pub group: Arc<MatrixGroup>,
    pub witness: Cocycle,
}

/// Exponents `(a, c, b, γ)` with `σ = δ^a τ_L^c τ_U^b ρ^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decomposition {
    pub a: u64,
    pub c: u64,
    pub b: u64,
    pub gamma: u64,
}

struct Decomposer {
    modulus: Modulus,
    i: u32,
    j: u32,
    delta: Mat2,
    tau_l: Mat2,
    tau_u: Mat2,
    rho: Mat2,
    delta11_log: HashMap<u64, u64>,
    delta11_order: u64,
    delta_inv_powers: Vec<Mat2>,
    lambda_log: HashMap<u64, u64>,
    lambda_inv: u64,
}

impl Decomposer {
    fn new(f: &Family) -> Self {
        let m = f.group.modulus();
        let delta_order = f.group.element_order(f.group.index_of(&f.delta).unwrap());
        let d11 = f.delta.a11();
        let delta11_order = m.order(d11);
        let mut delta11_log = HashMap::new();
        let mut x = 1;
        for a in 0..delta11_order {
            delta11_log.insert(x, a);
            x = m.mul(x, d11);
        }
        let dinv = f.delta.inverse().unwrap();
        let mut delta_inv_powers = Vec::with_capacity(delta_order as usize);
        let mut cur = Mat2::identity(m);
        for _ in 0..delta_order {
            delta_inv_powers.push(cur);
            cur = cur.mul(&dinv);
        }
        let mut lambda_log = HashMap::new();
        let mut y = 1;
        for g in 0..m.order(f.lambda) {
            lambda_log.insert(y, g);
            y = m.mul(y, f.lambda);
        }
        Decomposer {
            modulus: m,
            i: f.i,
            j: f.j,
            delta: f.delta,
            tau_l: f.tau_l,
            tau_u: f.tau_u,
            rho: f.rho,
            delta11_log,
            delta11_order,
            delta_inv_powers,
            lambda_log,
            lambda_inv: m.inv(f.lambda).unwrap(),
        }
    }

    fn decompose(&self, s: &Mat2) -> Option<Decomposition> {
        let a0 = *self.delta11_log.get(&s.a11())?;
        let mut a = a0;
        while (a as usize) < self.delta_inv_powers.len() {
            let rest = self.delta_inv_powers[a as usize].mul(s);
            if let Some(d) = self.split_rest(s, &rest, a) {
                return Some(d);
            }
            a += self.delta11_order;
        }
        None
    }

    // rest = τ_L^c τ_U^b ρ^γ = [[1, b p^i λ^γ], [c p^j, λ^γ]] once p^(i+j) = 0.
    fn split_rest(&self, s: &Mat2, rest: &Mat2, a: u64) -> Option<Decomposition> {
        let m = self.modulus;
        if rest.a11() != 1 {
            return None;
        }
        let gamma = *self.lambda_log.get(&rest.a22())?;
        let c = if self.j < m.n() {
            if m.val(rest.a21()) < self.j {
                return None;
            }
            rest.a21() / m.pow_p(self.j)
        } else {
            0
        };
        let b12 = m.mul(rest.a12(), m.pow(self.lambda_inv, gamma));
        let b = if self.i < m.n() {
            if m.val(b12) < self.i {
                return None;
            }
            b12 / m.pow_p(self.i)
        } else {
            0
        };
        let d = Decomposition { a, c, b, gamma };
        (self.recompose(&d) == *s).then_some(d)
    }

    fn recompose(&self, d: &Decomposition) -> Mat2 {
        self.delta
            .pow(d.a)
            .mul(&self.tau_l.pow(d.c))
            .mul(&self.tau_u.pow(d.b))
            .mul(&self.rho.pow(d.gamma))
    }
}

impl Family {
    /// Decomposes every element; used to extend the witness and to cross-check it.
    pub fn decompose(&self, s: &Mat2) -> Result<Decomposition, FamilyError> {
        Decomposer::new(self).decompose(s).ok_or(FamilyError::DecompositionFailed(*s))
    }

    /// The isogeny table of this family's group.
    pub fn isogeny_report(&self) -> Vec<IsogenyLevel> {
        isogeny_report(&self.group)
    }
}

fn witness_value(spec: &FamilySpec, m: Modulus, d: &Decomposition) -> [u64; 2] {
    let p = spec.p;
    match spec.case {
        FamilyCase::JLtM => [m.mul(m.reduce(d.a), m.pow_p(spec.n - 1)), 0],
        FamilyCase::JGeMEq | FamilyCase::JGeMGt => [m.mul(m.reduce(d.a), m.pow_p(spec.m())), 0],
        FamilyCase::N3JEqM => [m.sub(m.pow(m.add(1, p * p), d.a), 1), 0],
        FamilyCase::N3JGtM => [0, m.mul(m.reduce(d.c), p * p)],
    }
}

/// Builds the group `<τ_L, τ_U, δ, ρ>` of the chosen case and its witness cocycle.
///
/// The generator list is `[τ_L, τ_U, δ, ρ]`, with `τ_U` left out when `i = n`.
pub fn build_family(spec: &FamilySpec) -> Result<Family, FamilyError> {
    build_family_with_cap(spec, DEFAULT_CAP)
}

pub fn build_family_with_cap(spec: &FamilySpec, cap: usize) -> Result<Family, FamilyError> {
    let bad = |s: String| Err(FamilyError::SpecViolated(s));
    let md = Modulus::new(spec.p, spec.n)?;
    let (p, n) = (spec.p, spec.n);
    if p < 5 {
        return bad(format!("p = {p}: the constructions need p >= 5"));
    }
    match spec.case {
        FamilyCase::JLtM if n < 3 => return bad(format!("{} needs n >= 3, got n = {n}", spec.case)),
        FamilyCase::JGeMEq | FamilyCase::JGeMGt if n < 4 => {
            return bad(format!("{} needs n >= 4, got n = {n}", spec.case))
        }
        FamilyCase::N3JEqM | FamilyCase::N3JGtM if n != 3 => {
            return bad(format!("{} needs n = 3, got n = {n}", spec.case))
        }
        _ => {}
    }
    let (h, m, j) = (spec.h(), spec.m(), spec.j());
    let (lo, hi) = spec.i_range();
    let i = spec.i.unwrap_or(lo);
    if i < lo || i > hi {
        return bad(format!("i = {i} outside the admissible range [{lo}, {hi}] (h = {h})"));
    }
    debug_assert!(i + j >= n);

    let m1 = md.with_exponent(1);
    let alpha = match spec.alpha {
        Some(a) => a,
        None => default_alpha(p).expect("p >= 5"),
    };
    if alpha % p == 0 || m1.order(alpha % p) < 3 {
        return bad(format!("alpha = {alpha} must be a unit of order at least 3 mod {p}"));
    }
    let lambda = match (spec.lambda_override, spec.case) {
        (Some(l), _) => {
            let l = md.reduce(l);
            if !md.is_unit(l) || m1.order(l % p) < 3 {
                return bad(format!("lambda = {l} must reduce to a unit of order at least 3 mod {p}"));
            }
            if spec.case == FamilyCase::N3JGtM && md.order(l) % p == 0 {
                return bad(format!("lambda = {l} must have order prime to p"));
            }
            l
        }
        (None, FamilyCase::N3JGtM) => md.pow(primitive_root(md), p * p),
        (None, case) => {
            let default_s = if case == FamilyCase::JLtM { 1 } else { 2 };
            let s = spec.s.unwrap_or(default_s);
            let min_s = match case {
                FamilyCase::JLtM => 1,
                FamilyCase::N3JEqM => 1,
                _ => 2,
            };
            if s < min_s {
                return bad(format!("s = {s} must be at least {min_s}"));
            }
            let offset = if case == FamilyCase::N3JEqM { 2 } else { h + s };
            md.add(teichmuller(md, alpha), md.mul(md.reduce(spec.theta), md.p_power(offset)))
        }
    };

    let tau_l = Mat2::from_raw(md, [1, 0, md.pow_p(j), 1]);
    let tau_u = Mat2::from_raw(md, [1, md.p_power(i), 0, 1]);
    let delta = Mat2::from_raw(md, [md.add(1, md.pow_p(m)), 0, 0, md.add(1, md.pow_p(h))]);
    let rho = Mat2::from_raw(md, [1, 0, 0, lambda]);
    let mut gens = vec![tau_l];
    if i < n {
        gens.push(tau_u);
    }
    gens.push(delta);
    gens.push(rho);
    let group = Arc::new(close_group(md, &gens, cap)?);

    let mut family = Family {
        spec: spec.clone(),
        i,
        j,
        m,
        h,
        lambda,
        tau_l,
        tau_u,
        delta,
        rho,
        witness: Cocycle::zero(group.clone()),
        group: group.clone(),
    };
    let dec = Decomposer::new(&family);
    let mut values = Vec::with_capacity(group.order());
    for s in group.elements() {
        let d = dec.decompose(s).ok_or(FamilyError::DecompositionFailed(*s))?;
        values.push(witness_value(spec, md, &d));
    }
    let witness = Cocycle::from_values(group, values).expect("one value per element");
    if !witness.is_cocycle() {
        return Err(FamilyError::WitnessNotCocycle);
    }
    family.witness = witness;
    Ok(family)
}

/// Triangularity of the reduction mod `p^l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsogenyLevel {
    pub level: u32,
    pub triangularity: Triangularity,
    /// Upper triangular mod `p^l`: the line through the first basis vector is stable,
    /// i.e. a rational cyclic isogeny of degree `p^l`.
    pub upper: bool,
    pub lower: bool,
}

pub fn isogeny_report(g: &MatrixGroup) -> Vec<IsogenyLevel> {
    (1..=g.modulus().n())
        .map(|l| {
            let t = triangularity(&reduce_mod(g, l));
            IsogenyLevel { level: l, triangularity: t, upper: t.is_upper(), lower: t.is_lower() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_names_roundtrip() {
        for c in FamilyCase::ALL {
            assert_eq!(c.name().parse::<FamilyCase>().unwrap(), c);
        }
        assert_eq!("n3_j_gt_m".parse::<FamilyCase>().unwrap(), FamilyCase::N3JGtM);
        assert!("nope".parse::<FamilyCase>().is_err());
    }

    #[test]
    fn derived_h() {
        assert_eq!(FamilySpec::new(5, 5, FamilyCase::JLtM).h(), 2);
        assert_eq!(FamilySpec::new(5, 4, FamilyCase::JLtM).h(), 2);
        assert_eq!(FamilySpec::new(5, 5, FamilyCase::JGeMEq).h(), 3);
        assert_eq!(FamilySpec::new(5, 6, FamilyCase::JGeMGt).h(), 3);
    }

    #[test]
    fn alpha_and_roots() {
        assert_eq!(default_alpha(5), Some(2));
        assert_eq!(default_alpha(7), Some(2));
        assert_eq!(default_alpha(3), None);
        let m = Modulus::new(7, 3).unwrap();
        let g = primitive_root(m);
        assert_eq!(m.order(g), 6 * 49);
        let lam = m.pow(g, 49);
        assert_eq!(m.order(lam), 6);
    }

    #[test]
    fn n2_is_rejected() {
        for c in FamilyCase::ALL {
            assert!(matches!(build_family(&FamilySpec::new(5, 2, c)), Err(FamilyError::SpecViolated(_))));
        }
    }

    #[test]
    fn bad_parameters() {
        let s = FamilySpec::new(5, 5, FamilyCase::JLtM).with_i(3);
        assert!(matches!(build_family(&s), Err(FamilyError::SpecViolated(_))));
        let s = FamilySpec::new(5, 3, FamilyCase::JLtM).with_alpha(4);
        assert!(matches!(build_family(&s), Err(FamilyError::SpecViolated(_))));
        let s = FamilySpec::new(3, 3, FamilyCase::JLtM);
        assert!(matches!(build_family(&s), Err(FamilyError::SpecViolated(_))));
    }

    #[test]
    fn small_family_witness_shapes() {
        let f = build_family(&FamilySpec::new(5, 3, FamilyCase::N3JEqM)).unwrap();
        let m = f.group.modulus();
        assert_eq!(f.witness.value_at(&f.delta).unwrap().coords(), [25, 0]);
        for (k, s) in f.group.elements().iter().enumerate() {
            assert_eq!(f.witness.raw(k), [m.sub(s.a11(), 1), 0]);
        }
        let g = build_family(&FamilySpec::new(5, 3, FamilyCase::N3JGtM)).unwrap();
        for (k, s) in g.group.elements().iter().enumerate() {
            assert_eq!(g.witness.raw(k), [0, s.a21()]);
        }
        assert_eq!(triangularity(&reduce_mod(&g.group, 2)), Triangularity::Diagonal);
    }

    #[test]
    fn decomposition_recomposes() {
        let f = build_family(&FamilySpec::new(5, 4, FamilyCase::JGeMEq).with_i(3)).unwrap();
        for s in f.group.elements().iter().step_by(7) {
            let d = f.decompose(s).unwrap();
            let r = f.delta.pow(d.a).mul(&f.tau_l.pow(d.c)).mul(&f.tau_u.pow(d.b)).mul(&f.rho.pow(d.gamma));
            assert_eq!(&r, s);
        }
    }
}
