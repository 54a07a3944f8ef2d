use super::{ModMatrix, Modulus};

/// Howell normal form of a row space, with the transform that produced it.
///
/// `transform * original == basis`. The basis may have more rows than the original
/// matrix: the Howell property adds rows of the form `p^(n-v) * r` for pivots `p^v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HowellForm {
    pub basis: ModMatrix,
    pub transform: ModMatrix,
}

/// In-place Howell form on a list of rows of equal width.
///
/// Pivots are normalised to powers of `p`, entries above a pivot `p^v` lie in
/// `[0, p^v)`, and zero rows are removed. Pivot choice: minimal valuation in the
/// column, topmost on ties.
pub(crate) fn howell_rows(rows: &mut Vec<Vec<u64>>, m: Modulus) {
    let width = rows.first().map_or(0, Vec::len);
    let mut pr = 0;
    for col in 0..width {
        if pr >= rows.len() {
            break;
        }
        let mut best: Option<(u32, usize)> = None;
        for r in pr..rows.len() {
            let e = rows[r][col];
            if e == 0 {
                continue;
            }
            let v = m.val(e);
            if best.map_or(true, |(bv, _)| v < bv) {
                best = Some((v, r));
                if v == 0 {
                    break;
                }
            }
        }
        let Some((v, r)) = best else { continue };
        rows.swap(pr, r);

        let pv = m.pow_p(v);
        let unit = m.inv(rows[pr][col] / pv).expect("cofactor of minimal valuation is a unit");
        m.scale_in_place(&mut rows[pr], unit);
        debug_assert_eq!(rows[pr][col], pv);

        let pivot = std::mem::take(&mut rows[pr]);
        for (k, row) in rows.iter_mut().enumerate() {
            if k == pr {
                continue;
            }
            let e = row[col];
            if e == 0 {
                continue;
            }
            // below: exact quotient clears the entry; above: floor quotient leaves e mod p^v
            let f = e / pv;
            m.axpy_neg(row, f, &pivot);
        }
        if v > 0 {
            let mut extra = pivot.clone();
            m.scale_in_place(&mut extra, m.pow_p(m.n() - v));
            if extra.iter().any(|&x| x != 0) {
                rows.push(extra);
            }
        }
        rows[pr] = pivot;
        pr += 1;
    }
    rows.truncate(pr);
    rows.retain(|r| r.iter().any(|&x| x != 0));
}

/// Howell normal form of the row space of `a`.
pub fn howell_form(a: &ModMatrix) -> HowellForm {
    let m = a.modulus();
    let (r, c) = (a.rows(), a.cols());
    let mut rows: Vec<Vec<u64>> = (0..r)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.resize(c + r, 0);
            row[c + i] = m.reduce(1);
            row
        })
        .collect();
    howell_rows(&mut rows, m);
    // Rows whose left part vanished are relations among the inputs, not basis rows.
    let (basis, transform): (Vec<Vec<u64>>, Vec<Vec<u64>>) = rows
        .into_iter()
        .filter(|row| row[..c].iter().any(|&x| x != 0))
        .map(|row| (row[..c].to_vec(), row[c..].to_vec()))
        .unzip();
    HowellForm {
        basis: ModMatrix::from_rows_with_width(m, &basis, c).expect("uniform width"),
        transform: ModMatrix::from_rows_with_width(m, &transform, r).expect("uniform width"),
    }
}

/// Reduces `v` against a matrix in Howell form; returns the remainder.
pub(crate) fn reduce_against(h: &[Vec<u64>], v: &[u64], m: Modulus) -> Vec<u64> {
    let mut x = v.to_vec();
    for row in h {
        let Some(c) = row.iter().position(|&e| e != 0) else { continue };
        let e = x[c];
        if e == 0 {
            continue;
        }
        let vpiv = m.val(row[c]);
        if m.val(e) < vpiv {
            return x;
        }
        m.axpy_neg(&mut x, e / m.pow_p(vpiv), row);
    }
    x
}

/// Membership of `v` in the row space of a matrix in Howell form.
pub fn in_row_space(h: &ModMatrix, v: &[u64]) -> bool {
    reduce_against(&h.to_rows(), v, h.modulus()).iter().all(|&x| x == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn md() -> Modulus {
        Modulus::new(5, 2).unwrap()
    }

    fn brute_row_space(a: &ModMatrix) -> HashSet<Vec<u64>> {
        let m = a.modulus();
        let mut seen = HashSet::new();
        let zero = vec![0u64; a.cols()];
        seen.insert(zero.clone());
        let mut stack = vec![zero];
        while let Some(v) = stack.pop() {
            for i in 0..a.rows() {
                let w: Vec<u64> = v.iter().zip(a.row(i)).map(|(&x, &y)| m.add(x, y)).collect();
                if seen.insert(w.clone()) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    #[test]
    fn identity_is_fixed() {
        let id = ModMatrix::identity(md(), 3);
        assert_eq!(howell_form(&id).basis, id);
    }

    #[test]
    fn zero_matrix_has_empty_form() {
        let z = ModMatrix::zero(md(), 2, 3);
        let h = howell_form(&z);
        assert_eq!(h.basis.rows(), 0);
        assert_eq!(h.basis.cols(), 3);
    }

    #[test]
    fn scaled_identity_row_space_has_order_25() {
        let m = md();
        let a = ModMatrix::from_rows(m, &[vec![5, 0], vec![0, 5]]).unwrap();
        let h = howell_form(&a);
        // oracle: count all 625 vectors lying in the row space by brute force
        let space = brute_row_space(&a);
        let mut count = 0;
        for x in 0..25 {
            for y in 0..25 {
                if in_row_space(&h.basis, &[x, y]) {
                    count += 1;
                    assert!(space.contains(&vec![x, y]));
                }
            }
        }
        assert_eq!(count, 25);
        assert_eq!(space.len(), 25);
    }

    #[test]
    fn howell_property_row_is_added() {
        // row (5, 1): p^(n-1) * row = (0, 5) must be in the basis explicitly
        let m = md();
        let a = ModMatrix::from_rows(m, &[vec![5, 1]]).unwrap();
        let h = howell_form(&a);
        assert_eq!(h.basis.to_rows(), vec![vec![5, 1], vec![0, 5]]);
        assert!(in_row_space(&h.basis, &[0, 5]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_enumeration(entries in proptest::collection::vec(0u64..25, 6)) {
            let m = md();
            let a = ModMatrix::from_rows(m, &[entries[0..3].to_vec(), entries[3..6].to_vec()]).unwrap();
            let h = howell_form(&a);
            prop_assert_eq!(h.transform.mul(&a).unwrap(), h.basis.clone());
            let space = brute_row_space(&a);
            for v in &space {
                prop_assert!(in_row_space(&h.basis, v));
            }
            prop_assert_eq!(brute_row_space(&h.basis), space);
            // idempotent
            prop_assert_eq!(howell_form(&h.basis).basis, h.basis.clone());
        }

        #[test]
        fn canonical_under_row_operations(entries in proptest::collection::vec(0u64..125, 6), f in 1u64..125) {
            let m = Modulus::new(5, 3).unwrap();
            let r0 = entries[0..3].to_vec();
            let r1 = entries[3..6].to_vec();
            let mixed: Vec<u64> = r1.iter().zip(&r0).map(|(&b, &a)| m.add(b, m.mul(f, a))).collect();
            let a = ModMatrix::from_rows(m, &[r0.clone(), r1]).unwrap();
            let b = ModMatrix::from_rows(m, &[mixed, r0]).unwrap();
            prop_assert_eq!(howell_form(&a).basis, howell_form(&b).basis);
        }
    }
}
