use super::howell::howell_rows;
use super::Modulus;

/// Incrementally intersects a submodule of `(Z/p^n)^dim` with kernels of linear forms.
///
/// Starts from the whole module (or a given generating set) and keeps a Howell-reduced
/// generating set, so the number of generators never exceeds `dim * n`. Imposing a
/// constraint already satisfied by every generator costs one pass of dot products.
#[derive(Debug, Clone)]
pub struct KernelBuilder {
    modulus: Modulus,
    dim: usize,
    gens: Vec<Vec<u64>>,
}

impl KernelBuilder {
    pub fn new(modulus: Modulus, dim: usize) -> Self {
        let gens = (0..dim)
            .map(|i| {
                let mut r = vec![0; dim];
                r[i] = modulus.reduce(1);
                r
            })
            .collect();
        KernelBuilder { modulus, dim, gens }
    }

    pub fn from_generators(modulus: Modulus, dim: usize, gens: Vec<Vec<u64>>) -> Self {
        assert!(gens.iter().all(|g| g.len() == dim), "generator width must equal dim");
        let mut kb = KernelBuilder { modulus, dim, gens };
        howell_rows(&mut kb.gens, modulus);
        kb
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Restricts to `{x : row . x = 0}`. Returns whether the module shrank.
    pub fn constrain(&mut self, row: &[u64]) -> bool {
        debug_assert_eq!(row.len(), self.dim);
        let m = self.modulus;
        let values: Vec<u64> = self.gens.iter().map(|g| m.dot(row, g)).collect();
        let Some(t) = (0..values.len())
            .filter(|&k| values[k] != 0)
            .min_by_key(|&k| (m.val(values[k]), k))
        else {
            return false;
        };
        let v = m.val(values[t]);
        let pv = m.pow_p(v);
        let unit_inv = m.inv(values[t] / pv).expect("unit cofactor");
        let pivot = self.gens[t].clone();
        let mut next = Vec::with_capacity(self.gens.len());
        for (k, g) in self.gens.iter().enumerate() {
            if k == t {
                continue;
            }
            let mut g = g.clone();
            if values[k] != 0 {
                let f = m.mul(values[k] / pv, unit_inv);
                m.axpy_neg(&mut g, f, &pivot);
            }
            next.push(g);
        }
        let mut last = pivot;
        m.scale_in_place(&mut last, m.pow_p(m.n() - v));
        next.push(last);
        howell_rows(&mut next, m);
        self.gens = next;
        true
    }

    /// Howell-reduced generators of the current module.
    pub fn generators(&self) -> &[Vec<u64>] {
        &self.gens
    }

    pub fn into_generators(self) -> Vec<Vec<u64>> {
        self.gens
    }
}
