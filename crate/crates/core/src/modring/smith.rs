use super::{ModMatrix, Modulus};

/// Diagonalization `left * A * right = D` with `D[t][t] = p^valuations[t]`.
///
/// A valuation equal to `n` means the diagonal entry is zero. Because `Z/p^n` is a
/// local ring, picking the pivot of least valuation makes every other entry of its
/// row and column an exact multiple, so one elimination pass per pivot suffices.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub valuations: Vec<u32>,
    pub left: ModMatrix,
    pub right: ModMatrix,
    pub right_inv: ModMatrix,
}

struct Work {
    m: Modulus,
    a: Vec<Vec<u64>>,
    left: Vec<Vec<u64>>,
    // right is tracked column-wise via its transpose so column ops become row ops
    right_t: Vec<Vec<u64>>,
    right_inv: Vec<Vec<u64>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.left.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        self.right_t.swap(i, j);
        self.right_inv.swap(i, j);
    }

    fn scale_row(&mut self, i: usize, u: u64) {
        self.m.scale_in_place(&mut self.a[i], u);
        self.m.scale_in_place(&mut self.left[i], u);
    }

    /// row_j -= f * row_i
    fn row_op(&mut self, j: usize, i: usize, f: u64) {
        let (m, a, l) = (self.m, &mut self.a, &mut self.left);
        let src = a[i].clone();
        m.axpy_neg(&mut a[j], f, &src);
        let src = l[i].clone();
        m.axpy_neg(&mut l[j], f, &src);
    }

    /// col_j -= f * col_i
    fn col_op(&mut self, j: usize, i: usize, f: u64) {
        let m = self.m;
        for row in self.a.iter_mut() {
            row[j] = m.sub(row[j], m.mul(f, row[i]));
        }
        let src = self.right_t[i].clone();
        m.axpy_neg(&mut self.right_t[j], f, &src);
        // inverse of (col_j -= f col_i) on V^{-1} is row_i += f row_j
        let src = self.right_inv[j].clone();
        let neg = m.neg(f);
        m.axpy_neg(&mut self.right_inv[i], neg, &src);
    }
}

fn identity_rows(m: Modulus, k: usize) -> Vec<Vec<u64>> {
    (0..k)
        .map(|i| {
            let mut r = vec![0; k];
            r[i] = m.reduce(1);
            r
        })
        .collect()
}

pub fn smith_form(a: &ModMatrix) -> SmithForm {
    let m = a.modulus();
    let (r, c) = (a.rows(), a.cols());
    let mut w = Work {
        m,
        a: a.to_rows(),
        left: identity_rows(m, r),
        right_t: identity_rows(m, c),
        right_inv: identity_rows(m, c),
    };
    let steps = r.min(c);
    let mut valuations = vec![m.n(); steps];
    for t in 0..steps {
        // minimal valuation, leftmost column then topmost row on ties
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for j in t..c {
            for i in t..r {
                let e = w.a[i][j];
                if e == 0 {
                    continue;
                }
                let v = m.val(e);
                if best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                    if v == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((v, i, j)) = best else { break };
        if i != t {
            w.swap_rows(t, i);
        }
        if j != t {
            w.swap_cols(t, j);
        }
        let pv = m.pow_p(v);
        let unit = m.inv(w.a[t][t] / pv).expect("unit cofactor");
        w.scale_row(t, unit);
        for k in t + 1..r {
            let e = w.a[k][t];
            if e != 0 {
                w.row_op(k, t, e / pv);
            }
        }
        for k in t + 1..c {
            let e = w.a[t][k];
            if e != 0 {
                w.col_op(k, t, e / pv);
            }
        }
        valuations[t] = v;
    }
    let right_rows: Vec<Vec<u64>> = (0..c).map(|i| (0..c).map(|j| w.right_t[j][i]).collect()).collect();
    SmithForm {
        valuations,
        left: ModMatrix::from_rows_with_width(m, &w.left, r).unwrap(),
        right: ModMatrix::from_rows_with_width(m, &right_rows, c).unwrap(),
        right_inv: ModMatrix::from_rows_with_width(m, &w.right_inv, c).unwrap(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn diagonalizes(entries in proptest::collection::vec(0u64..125, 6)) {
            let m = Modulus::new(5, 3).unwrap();
            let a = ModMatrix::from_rows(m, &[entries[0..3].to_vec(), entries[3..6].to_vec()]).unwrap();
            let s = smith_form(&a);
            let d = s.left.mul(&a).unwrap().mul(&s.right).unwrap();
            for i in 0..2 {
                for j in 0..3 {
                    let expect = if i == j { m.p_power(s.valuations[i]) } else { 0 };
                    prop_assert_eq!(d.get_raw(i, j), expect);
                }
            }
            prop_assert_eq!(s.right.mul(&s.right_inv).unwrap(), ModMatrix::identity(m, 3));
            let mut sorted = s.valuations.clone();
            sorted.sort();
            prop_assert_eq!(sorted, s.valuations.clone());
        }
    }
}
