use std::fmt;
use std::sync::Arc;

use crate::matgroup::{cyclic_subgroups, solve2, vec2, MatrixGroup, TorsionPoint};
use crate::modring::{solve_linear, ModMatrix};

use super::CohomologyError;

/// A map `G -> (Z/p^n)^2`, indexed by the element order of its group.
#[derive(Clone)]
pub struct Cocycle {
    group: Arc<MatrixGroup>,
    values: Vec<[u64; 2]>,
}

impl fmt::Debug for Cocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cocycle")
            .field("group_order", &self.group.order())
            .field("generator_values", &self.generator_values())
            .finish()
    }
}

impl PartialEq for Cocycle {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.group, &other.group) || self.group.elements() == other.group.elements())
            && self.values == other.values
    }
}

impl Eq for Cocycle {}

impl Cocycle {
    /// Wraps one value per element; values are reduced into the group's modulus.
    pub fn from_values(group: Arc<MatrixGroup>, values: Vec<[u64; 2]>) -> Result<Self, CohomologyError> {
        if values.len() != group.order() {
            return Err(CohomologyError::IncompleteCocycle { expected: group.order(), got: values.len() });
        }
        let m = group.modulus();
        let values = values.into_iter().map(|v| [m.reduce(v[0]), m.reduce(v[1])]).collect();
        Ok(Cocycle { group, values })
    }

    /// Builds a map from its values on the generators using `Z_{xg} = Z_x + x Z_g` along
    /// the fixed words. The result is a cocycle only if the generator values are compatible.
    pub fn from_generator_values(group: Arc<MatrixGroup>, gen_values: &[[u64; 2]]) -> Result<Self, CohomologyError> {
        let ng = group.generators().len();
        if gen_values.len() != ng {
            return Err(CohomologyError::IncompleteCocycle { expected: ng, got: gen_values.len() });
        }
        let m = group.modulus();
        let mut values = vec![[0u64; 2]; group.order()];
        for k in 1..group.order() {
            let (p, g) = group.parent(k).expect("non-identity has a parent");
            let gv = [m.reduce(gen_values[g][0]), m.reduce(gen_values[g][1])];
            values[k] = vec2::add(m, values[p], group.element(p).apply_raw(gv));
        }
        Ok(Cocycle { group, values })
    }

    pub fn zero(group: Arc<MatrixGroup>) -> Self {
        let values = vec![[0, 0]; group.order()];
        Cocycle { group, values }
    }

    pub fn group(&self) -> &Arc<MatrixGroup> {
        &self.group
    }

    pub fn values(&self) -> &[[u64; 2]] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> TorsionPoint {
        TorsionPoint::from_raw(self.group.modulus(), self.values[idx])
    }

    pub(crate) fn raw(&self, idx: usize) -> [u64; 2] {
        self.values[idx]
    }

    /// Value at a matrix of the group, `None` if the matrix is not an element.
    pub fn value_at(&self, m: &crate::matgroup::Mat2) -> Option<TorsionPoint> {
        self.group.index_of(m).map(|i| self.value(i))
    }

    pub fn generator_values(&self) -> Vec<[u64; 2]> {
        self.group
            .generators()
            .iter()
            .map(|g| self.values[self.group.index_of(g).expect("generator is an element")])
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == [0, 0])
    }

    pub fn add(&self, other: &Cocycle) -> Cocycle {
        let m = self.group.modulus();
        let values = self.values.iter().zip(&other.values).map(|(a, b)| vec2::add(m, *a, *b)).collect();
        Cocycle { group: self.group.clone(), values }
    }

    pub fn sub(&self, other: &Cocycle) -> Cocycle {
        let m = self.group.modulus();
        let values = self.values.iter().zip(&other.values).map(|(a, b)| vec2::sub(m, *a, *b)).collect();
        Cocycle { group: self.group.clone(), values }
    }

    pub fn scale(&self, f: u64) -> Cocycle {
        let m = self.group.modulus();
        let f = m.reduce(f);
        let values = self.values.iter().map(|a| vec2::scale(m, *a, f)).collect();
        Cocycle { group: self.group.clone(), values }
    }

    /// Checks the cocycle identity.
    ///
    /// Testing `Z_{x g} = Z_x + x Z_g` for every element `x` and generator `g`, plus
    /// `Z_1 = 0`, is equivalent to the identity for all pairs: induct on the word of the
    /// right factor.
    pub fn is_cocycle(&self) -> bool {
        let g = &*self.group;
        let m = g.modulus();
        if self.values[0] != [0, 0] {
            return false;
        }
        let gen_idx: Vec<usize> = g.generators().iter().map(|x| g.index_of(x).unwrap()).collect();
        (0..g.order()).all(|k| {
            let sk = g.element(k);
            gen_idx.iter().enumerate().all(|(i, &gi)| {
                let lhs = self.values[g.right_mul(k, i)];
                lhs == vec2::add(m, self.values[k], sk.apply_raw(self.values[gi]))
            })
        })
    }

    /// The cocycle identity over all `|G|^2` pairs.
    pub fn is_cocycle_exhaustive(&self) -> bool {
        let g = &*self.group;
        let m = g.modulus();
        g.elements().iter().enumerate().all(|(a, sa)| {
            g.elements().iter().enumerate().all(|(b, sb)| {
                let ab = g.index_of(&sa.mul(sb)).expect("closed group");
                self.values[ab] == vec2::add(m, self.values[a], sa.apply_raw(self.values[b]))
            })
        })
    }

    fn require_cocycle(&self) -> Result<(), CohomologyError> {
        if self.is_cocycle() {
            Ok(())
        } else {
            Err(CohomologyError::NotACocycle)
        }
    }

    /// Per-element local conditions: for each `σ`, some `W_σ` with `(σ - 1) W_σ = Z_σ`.
    pub fn local_conditions(&self) -> Result<LocalConditions, CohomologyError> {
        self.require_cocycle()?;
        let m = self.group.modulus();
        let witnesses = self
            .group
            .elements()
            .iter()
            .zip(&self.values)
            .map(|(s, z)| solve2(m, s.minus_identity(), *z).map(|w| TorsionPoint::from_raw(m, w)))
            .collect();
        Ok(LocalConditions { witnesses })
    }

    pub fn satisfies_local_conditions(&self) -> Result<bool, CohomologyError> {
        Ok(self.local_conditions()?.satisfied())
    }

    /// Second route to the local conditions: the restriction to every cyclic subgroup
    /// `<σ>` is a coboundary of `<σ>`, checked on every power.
    pub fn restrictions_are_coboundaries(&self) -> Result<bool, CohomologyError> {
        self.require_cocycle()?;
        let g = &*self.group;
        let m = g.modulus();
        for c in cyclic_subgroups(g) {
            let s = *g.element(c.element);
            let Some(w) = solve2(m, s.minus_identity(), self.values[c.element]) else {
                return Ok(false);
            };
            let mut cur = s;
            for _ in 1..c.order {
                cur = cur.mul(&s);
                let idx = g.index_of(&cur).expect("closed group");
                if vec2::sub(m, cur.apply_raw(w), w) != self.values[idx] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `Some(W)` with `Z = (σ - 1) W` for all `σ`, solved on the generators only.
    pub fn is_coboundary(&self) -> Result<Option<TorsionPoint>, CohomologyError> {
        self.require_cocycle()?;
        Ok(self.coboundary_witness())
    }

    // Valid for cocycles: they are determined by their generator values.
    pub(crate) fn coboundary_witness(&self) -> Option<TorsionPoint> {
        let g = &*self.group;
        let m = g.modulus();
        if g.generators().is_empty() {
            return Some(TorsionPoint::zero(m));
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (gen, z) in g.generators().iter().zip(self.generator_values()) {
            let d = gen.minus_identity();
            rows.push(vec![d[0], d[1]]);
            rows.push(vec![d[2], d[3]]);
            rhs.extend_from_slice(&z);
        }
        let a = ModMatrix::from_rows(m, &rows).unwrap();
        solve_linear(&a, &rhs)
            .unwrap()
            .map(|s| TorsionPoint::new(m, s.particular[0], s.particular[1]))
    }

    /// Order of the class `[Z]` in `H^1`: the least `p^t` with `p^t Z` a coboundary.
    pub fn class_order(&self) -> Result<u64, CohomologyError> {
        self.require_cocycle()?;
        let m = self.group.modulus();
        for t in 0..=m.n() {
            if self.scale(m.p_power(t)).coboundary_witness().is_some() {
                return Ok(m.pow_p(t));
            }
        }
        unreachable!("p^n Z = 0 is a coboundary")
    }
}

/// `σ ↦ (σ - 1) W`.
pub fn coboundary(group: &Arc<MatrixGroup>, w: &TorsionPoint) -> Cocycle {
    let m = group.modulus();
    let w = w.coords();
    let values = group.elements().iter().map(|s| vec2::sub(m, s.apply_raw(w), w)).collect();
    Cocycle { group: group.clone(), values }
}

/// Outcome of the per-element local check: one witness per element, `None` where
/// `Z_σ` is outside the image of `σ - 1`.
#[derive(Debug, Clone)]
pub struct LocalConditions {
    pub witnesses: Vec<Option<TorsionPoint>>,
}

impl LocalConditions {
    pub fn satisfied(&self) -> bool {
        self.witnesses.iter().all(Option::is_some)
    }

    /// Element indices where the condition fails.
    pub fn failures(&self) -> Vec<usize> {
        (0..self.witnesses.len()).filter(|&k| self.witnesses[k].is_none()).collect()
    }
}
