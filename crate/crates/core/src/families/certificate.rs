use crate::cohomology::Cocycle;
use crate::matgroup::fixed_points;
use crate::modring::{solve_linear, ModMatrix};
use crate::structure::{extract_parameters, ParameterProfile};

/// Everything checked about a claimed nonzero class of `H^1_loc`.
#[derive(Debug, Clone)]
pub struct CounterexampleCertificate {
    pub group_order: usize,
    pub is_cocycle: bool,
    pub local_ok: bool,
    pub not_coboundary: bool,
    /// Order of `[Z]` in `H^1` (0 when the map is not a cocycle).
    pub class_order: u64,
    /// `p Z_σ = 0` for every element, literally.
    pub witness_p_torsion: bool,
    /// Some cocycle cohomologous to `Z` is killed by `p`.
    pub p_torsion_representative: bool,
    pub profile: Option<ParameterProfile>,
    pub fixed_point_max_order: u64,
}

impl CounterexampleCertificate {
    pub fn valid(&self) -> bool {
        self.is_cocycle && self.local_ok && self.not_coboundary
    }
}

// Solves p (g - 1) W = p Z_g over the generators.
fn has_p_torsion_representative(z: &Cocycle) -> bool {
    let g = z.group();
    let m = g.modulus();
    if g.generators().is_empty() {
        return true;
    }
    let p = m.p();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (gen, v) in g.generators().iter().zip(z.generator_values()) {
        let d = gen.minus_identity().map(|x| m.mul(x, p));
        rows.push(vec![d[0], d[1]]);
        rows.push(vec![d[2], d[3]]);
        rhs.push(m.mul(v[0], p));
        rhs.push(m.mul(v[1], p));
    }
    let a = ModMatrix::from_rows(m, &rows).unwrap();
    solve_linear(&a, &rhs).unwrap().is_some()
}

/// Runs every check on `witness` and packages the outcome; failures are recorded.
pub fn verify_counterexample(witness: &Cocycle) -> CounterexampleCertificate {
    let g = witness.group();
    let m = g.modulus();
    let is_cocycle = witness.is_cocycle();
    let (local_ok, not_coboundary, class_order, p_rep) = if is_cocycle {
        (
            witness.satisfies_local_conditions().unwrap_or(false),
            witness.is_coboundary().map(|w| w.is_none()).unwrap_or(false),
            witness.class_order().unwrap_or(0),
            has_p_torsion_representative(witness),
        )
    } else {
        (false, false, 0, false)
    };
    let witness_p_torsion = witness.values().iter().all(|v| m.mul(v[0], m.p()) == 0 && m.mul(v[1], m.p()) == 0);
    CounterexampleCertificate {
        group_order: g.order(),
        is_cocycle,
        local_ok,
        not_coboundary,
        class_order,
        witness_p_torsion,
        p_torsion_representative: p_rep,
        profile: extract_parameters(g).ok(),
        fixed_point_max_order: fixed_points(g).max_order,
    }
}
