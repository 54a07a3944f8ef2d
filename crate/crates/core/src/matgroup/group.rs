use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::modring::{solve_linear, ModMatrix, Modulus};

use super::{GroupError, Mat2, TorsionPoint};

/// Closure refuses to grow past this many elements unless told otherwise.
pub const DEFAULT_CAP: usize = 1_000_000;

const ROOT: u32 = u32::MAX;

/// A finite matrix group closed from an ordered generator list.
///
/// Elements are stored in breadth-first order starting from the identity; every
/// element records the edge `(parent, generator)` through which it was first reached,
/// which fixes one shortest word per element (lexicographically least among shortest).
#[derive(Clone)]
pub struct MatrixGroup {
    modulus: Modulus,
    generators: Vec<Mat2>,
    elements: Vec<Mat2>,
    index: HashMap<[u64; 4], u32>,
    parent: Vec<(u32, u32)>,
    // right Cayley table, row-major: cayley[k * g + i] = index of elements[k] * generators[i]
    cayley: Vec<u32>,
}

impl fmt::Debug for MatrixGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixGroup")
            .field("modulus", &self.modulus)
            .field("generators", &self.generators)
            .field("order", &self.order())
            .finish()
    }
}

/// Breadth-first closure of `generators` over the right Cayley graph.
pub fn close_group(modulus: Modulus, generators: &[Mat2], cap: usize) -> Result<MatrixGroup, GroupError> {
    assert!(cap > 0, "cap must be positive");
    for g in generators {
        if g.modulus() != modulus {
            return Err(GroupError::ModulusMismatch);
        }
        if !g.is_invertible() {
            return Err(GroupError::NonInvertibleGenerator(*g));
        }
    }
    let ng = generators.len();
    let id = Mat2::identity(modulus);
    let mut elements = vec![id];
    let mut index = HashMap::new();
    index.insert(id.raw(), 0u32);
    let mut parent = vec![(ROOT, ROOT)];
    let mut cayley = Vec::new();

    let mut k = 0;
    while k < elements.len() {
        let cur = elements[k];
        for (i, g) in generators.iter().enumerate() {
            let prod = cur.mul(g);
            let next = match index.get(&prod.raw()) {
                Some(&j) => j,
                None => {
                    if elements.len() >= cap {
                        return Err(GroupError::CapExceeded { cap });
                    }
                    let j = elements.len() as u32;
                    elements.push(prod);
                    index.insert(prod.raw(), j);
                    parent.push((k as u32, i as u32));
                    j
                }
            };
            cayley.push(next);
        }
        k += 1;
    }
    debug_assert_eq!(cayley.len(), elements.len() * ng);
    Ok(MatrixGroup { modulus, generators: generators.to_vec(), elements, index, parent, cayley })
}

impl MatrixGroup {
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements in breadth-first order; index 0 is the identity.
    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn element(&self, idx: usize) -> &Mat2 {
        &self.elements[idx]
    }

    pub fn index_of(&self, m: &Mat2) -> Option<usize> {
        if m.modulus() != self.modulus {
            return None;
        }
        self.index.get(&m.raw()).map(|&i| i as usize)
    }

    pub fn contains(&self, m: &Mat2) -> bool {
        self.index_of(m).is_some()
    }

    /// Index of `elements[idx] * generators[gen]`.
    #[inline]
    pub fn right_mul(&self, idx: usize, gen: usize) -> usize {
        self.cayley[idx * self.generators.len() + gen] as usize
    }

    /// The BFS edge `(parent, generator)` that reached `idx`, `None` for the identity.
    #[inline]
    pub fn parent(&self, idx: usize) -> Option<(usize, usize)> {
        let (p, g) = self.parent[idx];
        (p != ROOT).then_some((p as usize, g as usize))
    }

    /// The fixed word of an element: generator indices whose product is the element.
    pub fn word(&self, idx: usize) -> Vec<usize> {
        let mut w = Vec::new();
        let mut cur = idx;
        while let Some((p, g)) = self.parent(cur) {
            w.push(g);
            cur = p;
        }
        w.reverse();
        w
    }

    pub fn eval_word(&self, word: &[usize]) -> Mat2 {
        word.iter().fold(Mat2::identity(self.modulus), |acc, &g| acc.mul(&self.generators[g]))
    }

    pub fn element_order(&self, idx: usize) -> u64 {
        let g = self.elements[idx];
        let mut cur = g;
        let mut k = 1;
        while !cur.is_identity() {
            cur = cur.mul(&g);
            k += 1;
        }
        k
    }

    /// Closure of `M g M^-1` over the generators `g`.
    pub fn conjugate(&self, m: &Mat2) -> Result<MatrixGroup, GroupError> {
        if m.modulus() != self.modulus {
            return Err(GroupError::ModulusMismatch);
        }
        let mi = m.inverse()?;
        let gens: Vec<Mat2> = self.generators.iter().map(|g| m.mul(g).mul(&mi)).collect();
        close_group(self.modulus, &gens, self.order().max(1))
    }

    pub fn is_closed(&self) -> bool {
        self.elements.iter().all(|a| {
            self.elements.iter().all(|b| self.contains(&a.mul(b))) && a.inverse().map_or(false, |i| self.contains(&i))
        })
    }
}

/// The image of `G` in `GL_2(Z/p^l)`.
pub fn reduce_mod(g: &MatrixGroup, l: u32) -> MatrixGroup {
    let m = g.modulus();
    assert!(l >= 1 && l <= m.n(), "level {l} outside 1..={}", m.n());
    if l == m.n() {
        return g.clone();
    }
    let target = m.with_exponent(l);
    let gens: Vec<Mat2> = g.generators().iter().map(|x| x.reduce_to(target)).collect();
    close_group(target, &gens, g.order().max(1)).expect("image is no larger than the group")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Triangularity {
    Diagonal,
    Upper,
    Lower,
    None,
}

impl Triangularity {
    pub fn is_upper(self) -> bool {
        matches!(self, Triangularity::Diagonal | Triangularity::Upper)
    }

    pub fn is_lower(self) -> bool {
        matches!(self, Triangularity::Diagonal | Triangularity::Lower)
    }
}

impl fmt::Display for Triangularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Triangularity::Diagonal => "diagonal",
            Triangularity::Upper => "upper",
            Triangularity::Lower => "lower",
            Triangularity::None => "none",
        };
        f.write_str(s)
    }
}

/// Strongest triangular shape shared by every element, in the fixed basis.
pub fn triangularity(g: &MatrixGroup) -> Triangularity {
    let upper = g.elements().iter().all(Mat2::is_upper);
    let lower = g.elements().iter().all(Mat2::is_lower);
    match (upper, lower) {
        (true, true) => Triangularity::Diagonal,
        (true, false) => Triangularity::Upper,
        (false, true) => Triangularity::Lower,
        (false, false) => Triangularity::None,
    }
}

#[derive(Debug, Clone)]
pub struct FixedPoints {
    pub generators: Vec<TorsionPoint>,
    pub max_order: u64,
}

/// The submodule of points fixed by every element, from the stacked system `(g - 1) P = 0`.
pub fn fixed_points(g: &MatrixGroup) -> FixedPoints {
    let m = g.modulus();
    let mut rows = Vec::with_capacity(2 * g.generators().len());
    for gen in g.generators() {
        let d = gen.minus_identity();
        rows.push(vec![d[0], d[1]]);
        rows.push(vec![d[2], d[3]]);
    }
    let a = ModMatrix::from_rows_with_width(m, &rows, 2).unwrap();
    let sol = solve_linear(&a, &vec![0; rows.len()]).unwrap().expect("homogeneous system is solvable");
    let generators: Vec<TorsionPoint> = sol.kernel.iter().map(|v| TorsionPoint::new(m, v[0], v[1])).collect();
    let max_order = generators.iter().map(TorsionPoint::exact_order).max().unwrap_or(1);
    FixedPoints { generators, max_order }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicSubgroup {
    /// Index of the generating element (first in BFS order among its generators).
    pub element: usize,
    pub order: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// One generator per cyclic subgroup.
///
/// Two elements generate the same cyclic subgroup exactly when one is a power of the
/// other with exponent coprime to the order, so those are marked together.
pub fn cyclic_subgroups(g: &MatrixGroup) -> Vec<CyclicSubgroup> {
    let mut seen = vec![false; g.order()];
    let mut out = Vec::new();
    for idx in 0..g.order() {
        if seen[idx] {
            continue;
        }
        let x = *g.element(idx);
        let mut powers = vec![0usize];
        let mut cur = x;
        while !cur.is_identity() {
            powers.push(g.index_of(&cur).expect("closed group"));
            cur = cur.mul(&x);
        }
        let ord = powers.len() as u64;
        for (k, &p) in powers.iter().enumerate() {
            if gcd(k as u64, ord) == 1 || ord == 1 {
                seen[p] = true;
            }
        }
        out.push(CyclicSubgroup { element: idx, order: ord });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn md(p: u64, n: u32) -> Modulus {
        Modulus::new(p, n).unwrap()
    }

    #[test]
    fn trivial_and_cyclic() {
        let m = md(5, 2);
        let g = close_group(m, &[Mat2::identity(m)], 10).unwrap();
        assert_eq!(g.order(), 1);
        let t = close_group(m, &[Mat2::new(m, 1, 0, 5, 1)], 10).unwrap();
        assert_eq!(t.order(), 5);
        for (k, e) in t.elements().iter().enumerate() {
            assert_eq!(e.a21(), 5 * k as u64);
        }
        assert_eq!(close_group(m, &[], 10).unwrap().order(), 1);
    }

    #[test]
    fn closure_errors() {
        let m = md(5, 2);
        assert!(matches!(
            close_group(m, &[Mat2::new(m, 5, 0, 0, 1)], 10),
            Err(GroupError::NonInvertibleGenerator(_))
        ));
        assert_eq!(
            close_group(m, &[Mat2::diag(m, 1, 2)], 5).unwrap_err(),
            GroupError::CapExceeded { cap: 5 }
        );
        let other = md(7, 2);
        assert_eq!(close_group(m, &[Mat2::identity(other)], 5).unwrap_err(), GroupError::ModulusMismatch);
    }

    #[test]
    fn words_evaluate_to_elements() {
        let m = md(5, 2);
        let g = close_group(m, &[Mat2::diag(m, 1, 2), Mat2::new(m, 1, 0, 5, 1), Mat2::new(m, 1, 5, 0, 1)], DEFAULT_CAP).unwrap();
        for (k, e) in g.elements().iter().enumerate() {
            assert_eq!(&g.eval_word(&g.word(k)), e);
        }
        assert!(g.is_closed());
        // shortest words: BFS depth is non-decreasing along element order
        let lens: Vec<usize> = (0..g.order()).map(|k| g.word(k).len()).collect();
        assert!(lens.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn element_set_independent_of_generator_order() {
        let m = md(5, 2);
        let a = Mat2::diag(m, 1, 2);
        let b = Mat2::new(m, 1, 0, 5, 1);
        let c = Mat2::new(m, 6, 0, 0, 11);
        let g1 = close_group(m, &[a, b, c], DEFAULT_CAP).unwrap();
        let g2 = close_group(m, &[c, a, b], DEFAULT_CAP).unwrap();
        let s1: BTreeSet<[u64; 4]> = g1.elements().iter().map(Mat2::raw).collect();
        let s2: BTreeSet<[u64; 4]> = g2.elements().iter().map(Mat2::raw).collect();
        assert_eq!(s1, s2);
    }

    #[test]
    fn reduction_is_compatible() {
        let m = md(5, 3);
        let g = close_group(m, &[Mat2::new(m, 1, 0, 5, 1), Mat2::new(m, 26, 0, 0, 6), Mat2::diag(m, 1, 2)], DEFAULT_CAP).unwrap();
        assert_eq!(reduce_mod(&g, 3).order(), g.order());
        let g2 = reduce_mod(&g, 2);
        let twice = reduce_mod(&g2, 1);
        let once = reduce_mod(&g, 1);
        let s1: BTreeSet<[u64; 4]> = twice.elements().iter().map(Mat2::raw).collect();
        let s2: BTreeSet<[u64; 4]> = once.elements().iter().map(Mat2::raw).collect();
        assert_eq!(s1, s2);
        assert_eq!(triangularity(&once), Triangularity::Diagonal);
    }

    #[test]
    fn triangularity_examples() {
        let m = md(5, 2);
        assert_eq!(triangularity(&close_group(m, &[], 2).unwrap()), Triangularity::Diagonal);
        let low = close_group(m, &[Mat2::new(m, 1, 0, 5, 1)], 10).unwrap();
        assert_eq!(triangularity(&low), Triangularity::Lower);
        let up = close_group(m, &[Mat2::new(m, 1, 1, 0, 1)], 100).unwrap();
        assert_eq!(triangularity(&up), Triangularity::Upper);
        let swapped = up.conjugate(&Mat2::new(m, 0, 1, 1, 0)).unwrap();
        assert_eq!(triangularity(&swapped), Triangularity::Lower);
    }

    #[test]
    fn fixed_point_examples() {
        let m = md(5, 2);
        let trivial = close_group(m, &[], 2).unwrap();
        assert_eq!(fixed_points(&trivial).max_order, 25);
        let g = close_group(m, &[Mat2::new(m, 1, 0, 5, 1), Mat2::diag(m, 1, 2)], DEFAULT_CAP).unwrap();
        let fp = fixed_points(&g);
        for p in &fp.generators {
            for gen in g.generators() {
                assert_eq!(gen.apply(p), *p);
            }
        }
        // fixed: (x, 0) with 5x = 0, so order 5
        assert_eq!(fp.max_order, 5);
    }

    #[test]
    fn cyclic_subgroups_of_small_groups() {
        let m = md(5, 2);
        let trivial = close_group(m, &[], 2).unwrap();
        assert_eq!(cyclic_subgroups(&trivial), vec![CyclicSubgroup { element: 0, order: 1 }]);
        let c5 = close_group(m, &[Mat2::new(m, 1, 0, 5, 1)], 10).unwrap();
        assert_eq!(cyclic_subgroups(&c5).len(), 2);

        // oracle: dedup generated element sets directly
        let c20 = close_group(m, &[Mat2::diag(m, 1, 2)], 100).unwrap();
        assert_eq!(c20.order(), 20);
        let mut sets = BTreeSet::new();
        for e in c20.elements() {
            let mut set = BTreeSet::new();
            let mut cur = Mat2::identity(m);
            loop {
                set.insert(cur.raw());
                cur = cur.mul(e);
                if cur.is_identity() {
                    break;
                }
            }
            sets.insert(set.into_iter().collect::<Vec<_>>());
        }
        let subs = cyclic_subgroups(&c20);
        assert_eq!(subs.len(), sets.len());
        // cyclic of order 20: one subgroup per divisor
        assert_eq!(subs.len(), 6);
        let orders: BTreeSet<u64> = subs.iter().map(|s| s.order).collect();
        assert_eq!(orders, [1, 2, 4, 5, 10, 20].into_iter().collect());
    }
}
