use super::howell::howell_rows;
use super::{smith_form, ModError, ModMatrix, Modulus};

/// One cyclic summand `Z/order` of a quotient module, with a lift of its generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicFactor {
    pub order: u64,
    pub lift: Vec<u64>,
}

/// Decomposes `span(gens) / span(sub)` into cyclic factors, sorted by increasing order.
///
/// `gens` is presented as a quotient of `R^r` (one basis vector per generator) by the
/// syzygies of `gens` together with coordinates of the `sub` vectors; diagonalising
/// that relation module yields the invariant factors and, through the column
/// transform, generators for each factor.
pub fn quotient_decomposition(
    modulus: Modulus,
    dim: usize,
    gens: &[Vec<u64>],
    sub: &[Vec<u64>],
) -> Result<Vec<CyclicFactor>, ModError> {
    let m = modulus;
    if gens.iter().chain(sub).any(|v| v.len() != dim) {
        return Err(ModError::DimensionMismatch(format!("vectors must have length {dim}")));
    }
    let r = gens.len();
    if r == 0 {
        return if sub.iter().flatten().all(|&x| x == 0) {
            Ok(vec![])
        } else {
            Err(ModError::SubgroupNotContained)
        };
    }

    let mut rows: Vec<Vec<u64>> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut row: Vec<u64> = g.iter().map(|&x| m.reduce(x)).collect();
            row.resize(dim + r, 0);
            row[dim + i] = m.reduce(1);
            row
        })
        .collect();
    howell_rows(&mut rows, m);

    let mut relations: Vec<Vec<u64>> = rows
        .iter()
        .filter(|row| row[..dim].iter().all(|&x| x == 0))
        .map(|row| row[dim..].to_vec())
        .collect();

    for s in sub {
        let mut target = vec![0u64; dim + r];
        for (t, &x) in target.iter_mut().zip(s) {
            *t = m.reduce(x);
        }
        for row in rows.iter() {
            let Some(c) = row.iter().position(|&x| x != 0) else { continue };
            if c >= dim {
                break;
            }
            let e = target[c];
            if e == 0 {
                continue;
            }
            let v = m.val(row[c]);
            if m.val(e) < v {
                return Err(ModError::SubgroupNotContained);
            }
            m.axpy_neg(&mut target, e / m.pow_p(v), row);
        }
        if target[..dim].iter().any(|&x| x != 0) {
            return Err(ModError::SubgroupNotContained);
        }
        relations.push(target[dim..].iter().map(|&x| m.neg(x)).collect());
    }

    let rel = ModMatrix::from_rows_with_width(m, &relations, r)?;
    let snf = smith_form(&rel);
    let mut factors = Vec::new();
    for t in 0..r {
        let v = snf.valuations.get(t).copied().unwrap_or(m.n());
        if v == 0 {
            continue;
        }
        let coeffs = snf.right_inv.row(t);
        let mut lift = vec![0u64; dim];
        for (c, g) in coeffs.iter().zip(gens) {
            if *c != 0 {
                m.axpy_neg(&mut lift, m.neg(*c), g);
            }
        }
        factors.push(CyclicFactor { order: m.pow_p(v), lift });
    }
    factors.sort_by_key(|f| f.order);
    Ok(factors)
}

/// Invariant-factor orders of `span(gens) / span(modulo)`; empty for the trivial group.
pub fn abelian_structure(
    modulus: Modulus,
    dim: usize,
    gens: &[Vec<u64>],
    modulo: Option<&[Vec<u64>]>,
) -> Result<Vec<u64>, ModError> {
    Ok(quotient_decomposition(modulus, dim, gens, modulo.unwrap_or(&[]))?
        .into_iter()
        .map(|f| f.order)
        .collect())
}
