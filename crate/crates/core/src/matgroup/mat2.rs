use std::fmt;

use serde::{Deserialize, Serialize};

use crate::modring::{smith_form, ModMatrix, Modulus, ResidueInt};

use super::GroupError;

/// A 2x2 matrix over `Z/p^n`, entries row-major `[a11, a12, a21, a22]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    modulus: Modulus,
    e: [u64; 4],
}

/// A point of `(Z/p^n)^2` in the fixed basis `{Q1, Q2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorsionPoint {
    modulus: Modulus,
    coords: [u64; 2],
}

impl TorsionPoint {
    pub fn new(modulus: Modulus, x: u64, y: u64) -> Self {
        TorsionPoint { modulus, coords: [modulus.reduce(x), modulus.reduce(y)] }
    }

    pub fn from_raw(modulus: Modulus, coords: [u64; 2]) -> Self {
        Self::new(modulus, coords[0], coords[1])
    }

    pub fn zero(modulus: Modulus) -> Self {
        TorsionPoint { modulus, coords: [0, 0] }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn x(&self) -> ResidueInt {
        ResidueInt::new(self.coords[0], self.modulus)
    }

    pub fn y(&self) -> ResidueInt {
        ResidueInt::new(self.coords[1], self.modulus)
    }

    pub fn coords(&self) -> [u64; 2] {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords == [0, 0]
    }

    /// `p^(n - min(val x, val y))`.
    pub fn exact_order(&self) -> u64 {
        let m = self.modulus;
        let v = m.val(self.coords[0]).min(m.val(self.coords[1]));
        m.pow_p(m.n() - v)
    }
}

impl fmt::Display for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.coords[0], self.coords[1])
    }
}

/// Raw 2-vector arithmetic shared by the cohomology code.
pub(crate) mod vec2 {
    use crate::modring::Modulus;

    #[inline]
    pub fn add(m: Modulus, a: [u64; 2], b: [u64; 2]) -> [u64; 2] {
        [m.add(a[0], b[0]), m.add(a[1], b[1])]
    }

    #[inline]
    pub fn sub(m: Modulus, a: [u64; 2], b: [u64; 2]) -> [u64; 2] {
        [m.sub(a[0], b[0]), m.sub(a[1], b[1])]
    }

    #[inline]
    pub fn scale(m: Modulus, a: [u64; 2], f: u64) -> [u64; 2] {
        [m.mul(a[0], f), m.mul(a[1], f)]
    }
}

impl Mat2 {
    pub fn new(modulus: Modulus, a11: i64, a12: i64, a21: i64, a22: i64) -> Self {
        Mat2 {
            modulus,
            e: [
                modulus.reduce_i64(a11),
                modulus.reduce_i64(a12),
                modulus.reduce_i64(a21),
                modulus.reduce_i64(a22),
            ],
        }
    }

    pub fn from_raw(modulus: Modulus, e: [u64; 4]) -> Self {
        Mat2 { modulus, e: e.map(|x| modulus.reduce(x)) }
    }

    pub fn identity(modulus: Modulus) -> Self {
        Self::new(modulus, 1, 0, 0, 1)
    }

    pub fn diag(modulus: Modulus, a: i64, d: i64) -> Self {
        Self::new(modulus, a, 0, 0, d)
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn raw(&self) -> [u64; 4] {
        self.e
    }

    pub fn entry(&self, i: usize, j: usize) -> ResidueInt {
        ResidueInt::new(self.e[2 * i + j], self.modulus)
    }

    #[inline]
    pub fn a11(&self) -> u64 {
        self.e[0]
    }
    #[inline]
    pub fn a12(&self) -> u64 {
        self.e[1]
    }
    #[inline]
    pub fn a21(&self) -> u64 {
        self.e[2]
    }
    #[inline]
    pub fn a22(&self) -> u64 {
        self.e[3]
    }

    pub fn rows(&self) -> [[u64; 2]; 2] {
        [[self.e[0], self.e[1]], [self.e[2], self.e[3]]]
    }

    #[inline]
    pub fn mul(&self, o: &Mat2) -> Mat2 {
        debug_assert_eq!(self.modulus, o.modulus);
        let m = self.modulus;
        let [a, b, c, d] = self.e;
        let [e, f, g, h] = o.e;
        Mat2 {
            modulus: m,
            e: [
                m.add(m.mul(a, e), m.mul(b, g)),
                m.add(m.mul(a, f), m.mul(b, h)),
                m.add(m.mul(c, e), m.mul(d, g)),
                m.add(m.mul(c, f), m.mul(d, h)),
            ],
        }
    }

    pub fn pow(&self, mut k: u64) -> Mat2 {
        let mut acc = Mat2::identity(self.modulus);
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn det(&self) -> u64 {
        let m = self.modulus;
        m.sub(m.mul(self.e[0], self.e[3]), m.mul(self.e[1], self.e[2]))
    }

    pub fn is_invertible(&self) -> bool {
        self.modulus.is_unit(self.det())
    }

    /// Inverse via adjugate and determinant inverse.
    pub fn inverse(&self) -> Result<Mat2, GroupError> {
        let m = self.modulus;
        let di = m.inv(self.det()).ok_or(GroupError::NonInvertible(*self))?;
        let [a, b, c, d] = self.e;
        Ok(Mat2 { modulus: m, e: [m.mul(d, di), m.mul(m.neg(b), di), m.mul(m.neg(c), di), m.mul(a, di)] })
    }

    #[inline]
    pub(crate) fn apply_raw(&self, v: [u64; 2]) -> [u64; 2] {
        let m = self.modulus;
        [
            m.add(m.mul(self.e[0], v[0]), m.mul(self.e[1], v[1])),
            m.add(m.mul(self.e[2], v[0]), m.mul(self.e[3], v[1])),
        ]
    }

    pub fn apply(&self, p: &TorsionPoint) -> TorsionPoint {
        TorsionPoint::from_raw(self.modulus, self.apply_raw(p.coords()))
    }

    /// `self - 1`, not generally invertible.
    pub fn minus_identity(&self) -> [u64; 4] {
        let m = self.modulus;
        [m.sub(self.e[0], 1), self.e[1], self.e[2], m.sub(self.e[3], 1)]
    }

    pub fn is_identity(&self) -> bool {
        self.e == [1, 0, 0, 1]
    }

    pub fn is_diagonal(&self) -> bool {
        self.e[1] == 0 && self.e[2] == 0
    }

    pub fn is_upper(&self) -> bool {
        self.e[2] == 0
    }

    pub fn is_lower(&self) -> bool {
        self.e[1] == 0
    }

    /// Image under `Z/p^n -> Z/p^l`.
    pub fn reduce_to(&self, target: Modulus) -> Mat2 {
        assert_eq!(target.p(), self.modulus.p());
        assert!(target.n() <= self.modulus.n());
        Mat2::from_raw(target, self.e)
    }

    pub fn to_mod_matrix(&self) -> ModMatrix {
        ModMatrix::from_rows(self.modulus, &[vec![self.e[0], self.e[1]], vec![self.e[2], self.e[3]]]).unwrap()
    }

    pub fn conjugate_by(&self, m: &Mat2) -> Result<Mat2, GroupError> {
        Ok(m.mul(self).mul(&m.inverse()?))
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.e[0], self.e[1], self.e[2], self.e[3])
    }
}

/// Solves `A x = b` for a 2x2 matrix `A` given as raw entries, via its diagonalization.
pub(crate) fn solve2(m: Modulus, a: [u64; 4], b: [u64; 2]) -> Option<[u64; 2]> {
    let mat = ModMatrix::from_rows(m, &[vec![a[0], a[1]], vec![a[2], a[3]]]).unwrap();
    let s = smith_form(&mat);
    let ub = s.left.mul_vec(&b);
    let mut y = [0u64; 2];
    for k in 0..2 {
        let v = s.valuations[k];
        if v == m.n() {
            if ub[k] != 0 {
                return None;
            }
        } else {
            if m.val(ub[k]) < v {
                return None;
            }
            // any lift of ub/p^v works; take the integer quotient
            y[k] = ub[k] / m.pow_p(v);
        }
    }
    let x = s.right.mul_vec(&y);
    Some([x[0], x[1]])
}

/// Linear functionals `f` such that `v` lies in the column space of `a` iff `f(v) = 0` for all of them.
pub(crate) fn image_constraints(m: Modulus, a: [u64; 4]) -> Vec<[u64; 2]> {
    let mat = ModMatrix::from_rows(m, &[vec![a[0], a[1]], vec![a[2], a[3]]]).unwrap();
    let s = smith_form(&mat);
    let mut out = Vec::with_capacity(2);
    for k in 0..2 {
        let v = s.valuations[k];
        if v == 0 {
            continue;
        }
        let scale = m.pow_p(m.n() - v);
        let row = s.left.row(k);
        out.push([m.mul(row[0], scale), m.mul(row[1], scale)]);
    }
    out
}

/// JSON shape of a matrix: `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMat2(pub [[u64; 2]; 2]);

impl From<&Mat2> for RawMat2 {
    fn from(m: &Mat2) -> Self {
        RawMat2(m.rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_and_apply() {
        let m = Modulus::new(5, 2).unwrap();
        let a = Mat2::new(m, 2, 5, 3, 7);
        let ai = a.inverse().unwrap();
        assert!(a.mul(&ai).is_identity());
        assert!(Mat2::new(m, 5, 0, 0, 1).inverse().is_err());
        let p = TorsionPoint::new(m, 1, 2);
        assert_eq!(a.apply(&p).coords(), [12, 17]);
    }

    #[test]
    fn exact_order() {
        let m = Modulus::new(5, 3).unwrap();
        assert_eq!(TorsionPoint::new(m, 0, 0).exact_order(), 1);
        assert_eq!(TorsionPoint::new(m, 25, 50).exact_order(), 5);
        assert_eq!(TorsionPoint::new(m, 25, 3).exact_order(), 125);
    }

    proptest! {
        #[test]
        fn solve2_matches_enumeration(a in proptest::array::uniform4(0u64..25), b in proptest::array::uniform2(0u64..25)) {
            let m = Modulus::new(5, 2).unwrap();
            let mat = Mat2::from_raw(m, a);
            let mut exists = false;
            for x in 0..25 {
                for y in 0..25 {
                    if mat.apply_raw([x, y]) == b {
                        exists = true;
                    }
                }
            }
            let sol = solve2(m, a, b);
            prop_assert_eq!(sol.is_some(), exists);
            if let Some(x) = sol {
                prop_assert_eq!(mat.apply_raw(x), b);
            }
            let constraints = image_constraints(m, a);
            let in_image = constraints.iter().all(|f| m.add(m.mul(f[0], b[0]), m.mul(f[1], b[1])) == 0);
            prop_assert_eq!(in_image, exists);
        }
    }
}
