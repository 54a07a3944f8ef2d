use std::sync::Arc;

use crate::matgroup::{image_constraints, MatrixGroup};
use crate::modring::{
    abelian_structure, howell_form, in_row_space, quotient_decomposition, KernelBuilder, ModMatrix, Modulus,
};

use super::Cocycle;

/// Each element's value as a linear form in the generator values.
///
/// Row `r` of element `k` lives at `table[(2k + r) * dim ..][..dim]` where `dim = 2g`.
struct Expansion {
    dim: usize,
    table: Vec<u64>,
}

impl Expansion {
    fn new(g: &MatrixGroup) -> Self {
        let m = g.modulus();
        let dim = 2 * g.generators().len();
        let mut table = vec![0u64; 2 * dim * g.order()];
        for k in 1..g.order() {
            let (p, gi) = g.parent(k).expect("non-identity has a parent");
            let (head, tail) = table.split_at_mut(2 * dim * k);
            let src = &head[2 * dim * p..2 * dim * (p + 1)];
            let dst = &mut tail[..2 * dim];
            dst.copy_from_slice(src);
            let s = g.element(p).raw();
            for r in 0..2 {
                for c in 0..2 {
                    let slot = &mut dst[r * dim + 2 * gi + c];
                    *slot = m.add(*slot, s[2 * r + c]);
                }
            }
        }
        Expansion { dim, table }
    }

    #[inline]
    fn row(&self, k: usize, r: usize) -> &[u64] {
        let start = (2 * k + r) * self.dim;
        &self.table[start..start + self.dim]
    }

    fn evaluate(&self, m: Modulus, k: usize, params: &[u64]) -> [u64; 2] {
        [m.dot(self.row(k, 0), params), m.dot(self.row(k, 1), params)]
    }
}

/// A submodule of `Z^1` presented by generator-value coordinates.
///
/// A cocycle is determined by its values on the generators, so `Z^1` embeds in
/// `(Z/p^n)^(2g)`; all module computations happen in those coordinates.
#[derive(Clone)]
pub struct CocycleModule {
    group: Arc<MatrixGroup>,
    expansion: Arc<Expansion>,
    gens: Vec<Vec<u64>>,
}

impl CocycleModule {
    pub fn group(&self) -> &Arc<MatrixGroup> {
        &self.group
    }

    /// Generators in generator-value coordinates (length `2g` each).
    pub fn coordinates(&self) -> &[Vec<u64>] {
        &self.gens
    }

    pub fn basis(&self) -> Vec<Cocycle> {
        self.gens.iter().map(|v| self.cocycle(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Invariant factors of the module.
    pub fn structure(&self) -> Vec<u64> {
        abelian_structure(self.group.modulus(), self.expansion.dim, &self.gens, None).expect("consistent widths")
    }

    /// Expands generator-value coordinates to a full value map.
    pub fn cocycle(&self, params: &[u64]) -> Cocycle {
        let m = self.group.modulus();
        let values = (0..self.group.order()).map(|k| self.expansion.evaluate(m, k, params)).collect();
        Cocycle::from_values(self.group.clone(), values).expect("one value per element")
    }

    fn with_gens(&self, gens: Vec<Vec<u64>>) -> Self {
        CocycleModule { group: self.group.clone(), expansion: self.expansion.clone(), gens }
    }
}

/// Generator-value coordinates of a cocycle.
fn coordinates_of(z: &Cocycle) -> Vec<u64> {
    z.generator_values().into_iter().flatten().collect()
}

/// `Z^1(G, (Z/p^n)^2)`.
///
/// Unknowns are the `2g` coordinates of the generator values; every Cayley edge
/// `x -> x g_i` off the breadth-first tree contributes `L_{x g_i} = L_x + x E_i`.
pub fn cocycle_space(group: &Arc<MatrixGroup>) -> CocycleModule {
    let g = &**group;
    let m = g.modulus();
    let expansion = Expansion::new(g);
    let dim = expansion.dim;
    let mut kb = KernelBuilder::new(m, dim);
    let mut row = vec![0u64; dim];
    for k in 0..g.order() {
        let s = g.element(k).raw();
        for i in 0..g.generators().len() {
            let t = g.right_mul(k, i);
            if g.parent(t) == Some((k, i)) {
                continue;
            }
            for r in 0..2 {
                let (lt, lk) = (expansion.row(t, r), expansion.row(k, r));
                for c in 0..dim {
                    row[c] = m.sub(lt[c], lk[c]);
                }
                row[2 * i] = m.sub(row[2 * i], s[2 * r]);
                row[2 * i + 1] = m.sub(row[2 * i + 1], s[2 * r + 1]);
                kb.constrain(&row);
            }
        }
    }
    CocycleModule { group: group.clone(), expansion: Arc::new(expansion), gens: kb.into_generators() }
}

fn coboundary_coordinates(g: &MatrixGroup) -> Vec<Vec<u64>> {
    (0..2)
        .map(|s| {
            g.generators()
                .iter()
                .flat_map(|x| {
                    let d = x.minus_identity();
                    [d[s], d[2 + s]]
                })
                .collect()
        })
        .collect()
}

/// `B^1`, generated by the coboundaries of `e_1` and `e_2`.
pub fn coboundary_space(group: &Arc<MatrixGroup>) -> CocycleModule {
    let z1 = cocycle_space(group);
    let gens = coboundary_coordinates(group);
    z1.with_gens(gens)
}

/// Cocycles satisfying the local conditions at every element.
///
/// `Z_σ ∈ Im(σ - 1)` is the vanishing of finitely many linear forms on `Z_σ` (read off the
/// diagonalisation of `σ - 1`); composed with the expansion they become constraints on
/// the generator values.
pub fn local_cocycle_space(z1: &CocycleModule) -> CocycleModule {
    let g = &*z1.group;
    let m = g.modulus();
    let dim = z1.expansion.dim;
    let mut kb = KernelBuilder::from_generators(m, dim, z1.gens.clone());
    let mut row = vec![0u64; dim];
    for k in 1..g.order() {
        for f in image_constraints(m, g.element(k).minus_identity()) {
            let (l0, l1) = (z1.expansion.row(k, 0), z1.expansion.row(k, 1));
            for c in 0..dim {
                row[c] = m.add(m.mul(f[0], l0[c]), m.mul(f[1], l1[c]));
            }
            kb.constrain(&row);
        }
    }
    z1.with_gens(kb.into_generators())
}

/// Invariant factors of `H^1 = Z^1 / B^1`.
pub fn h1(group: &Arc<MatrixGroup>) -> Vec<u64> {
    let z1 = cocycle_space(group);
    let b1 = coboundary_coordinates(group);
    abelian_structure(group.modulus(), z1.expansion.dim, &z1.gens, Some(&b1)).expect("B^1 lies in Z^1")
}

/// Structures of `Z^1`, `B^1`, `H^1`, `Z^1_loc`, `H^1_loc` with class representatives.
#[derive(Debug, Clone)]
pub struct H1Report {
    pub group_order: usize,
    pub z1_structure: Vec<u64>,
    pub b1_structure: Vec<u64>,
    pub h1_structure: Vec<u64>,
    pub z1loc_structure: Vec<u64>,
    pub h1loc_structure: Vec<u64>,
    /// One cocycle per cyclic factor of `H^1`, in the order of `h1_structure`.
    pub h1_representatives: Vec<Cocycle>,
    /// One cocycle per cyclic factor of `H^1_loc`, in the order of `h1loc_structure`.
    pub representatives: Vec<Cocycle>,
}

impl H1Report {
    pub fn h1_order(&self) -> u64 {
        self.h1_structure.iter().product()
    }

    pub fn h1loc_order(&self) -> u64 {
        self.h1loc_structure.iter().product()
    }

    pub fn h1loc_trivial(&self) -> bool {
        self.h1loc_structure.is_empty()
    }
}

/// Full first-cohomology computation including the locally trivial part.
pub fn h1_loc(group: &Arc<MatrixGroup>) -> H1Report {
    let m = group.modulus();
    let z1 = cocycle_space(group);
    let dim = z1.expansion.dim;
    let b1 = coboundary_coordinates(group);
    let z1loc = local_cocycle_space(&z1);
    let h1 = quotient_decomposition(m, dim, &z1.gens, &b1).expect("B^1 lies in Z^1");
    let h1loc = quotient_decomposition(m, dim, &z1loc.gens, &b1).expect("B^1 lies in Z^1_loc");
    H1Report {
        group_order: group.order(),
        z1_structure: z1.structure(),
        b1_structure: abelian_structure(m, dim, &b1, None).unwrap(),
        h1_structure: h1.iter().map(|f| f.order).collect(),
        z1loc_structure: z1loc.structure(),
        h1loc_structure: h1loc.iter().map(|f| f.order).collect(),
        h1_representatives: h1.iter().map(|f| z1.cocycle(&f.lift)).collect(),
        representatives: h1loc.iter().map(|f| z1.cocycle(&f.lift)).collect(),
    }
}

/// Whether `z` lies in the module, by membership of its generator-value coordinates.
pub fn module_contains(module: &CocycleModule, z: &Cocycle) -> bool {
    let m = module.group.modulus();
    let a = ModMatrix::from_rows_with_width(m, &module.gens, module.expansion.dim).expect("consistent widths");
    in_row_space(&howell_form(&a).basis, &coordinates_of(z))
}
