use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::ModError;

/// The modulus `p^n` with `p` prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawModulus", into = "RawModulus")]
pub struct Modulus {
    p: u64,
    n: u32,
    value: u64,
}

#[derive(Serialize, Deserialize)]
struct RawModulus {
    p: u64,
    n: u32,
}

impl TryFrom<RawModulus> for Modulus {
    type Error = ModError;
    fn try_from(raw: RawModulus) -> Result<Self, ModError> {
        Modulus::new(raw.p, raw.n)
    }
}

impl From<Modulus> for RawModulus {
    fn from(m: Modulus) -> Self {
        RawModulus { p: m.p, n: m.n }
    }
}

// Keeps every product of two residues well inside u128 and sums inside u64.
const MAX_MODULUS: u64 = 1 << 62;

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Modulus {
    pub fn new(p: u64, n: u32) -> Result<Self, ModError> {
        if !is_prime(p) {
            return Err(ModError::NotPrime(p));
        }
        if n == 0 {
            return Err(ModError::ZeroExponent);
        }
        let mut value = 1u64;
        for _ in 0..n {
            value = value
                .checked_mul(p)
                .filter(|&v| v < MAX_MODULUS)
                .ok_or(ModError::ModulusTooLarge { p, n })?;
        }
        Ok(Modulus { p, n, value })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `p^n`.
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    /// The modulus `p^l` for `1 <= l <= n`.
    pub fn with_exponent(&self, l: u32) -> Modulus {
        assert!(l >= 1 && l <= self.n, "exponent {l} outside 1..={}", self.n);
        Modulus { p: self.p, n: l, value: self.pow_p(l) }
    }

    /// `p^e` as an integer; `e` may equal `n` (then the result is the modulus itself).
    #[inline]
    pub fn pow_p(&self, e: u32) -> u64 {
        debug_assert!(e <= self.n);
        self.p.pow(e)
    }

    /// `p^e mod p^n`, zero once `e >= n`.
    #[inline]
    pub fn p_power(&self, e: u32) -> u64 {
        if e >= self.n {
            0
        } else {
            self.p.pow(e)
        }
    }

    pub fn residue(&self, x: i64) -> ResidueInt {
        ResidueInt { value: self.reduce_i64(x), modulus: *self }
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.value
    }

    #[inline]
    pub fn reduce_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.value as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.value {
            s - self.value
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.value - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.value - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.value as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.value;
        base %= self.value;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Largest `t <= n` with `p^t | x`; `n` for zero.
    #[inline]
    pub fn val(&self, x: u64) -> u32 {
        if x == 0 {
            return self.n;
        }
        let mut t = 0;
        let mut y = x;
        while y % self.p == 0 {
            y /= self.p;
            t += 1;
        }
        t.min(self.n)
    }

    #[inline]
    pub fn is_unit(&self, x: u64) -> bool {
        x % self.p != 0
    }

    pub fn inv(&self, x: u64) -> Option<u64> {
        if !self.is_unit(x) {
            return None;
        }
        let (mut r0, mut r1) = (self.value as i128, (x % self.value) as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Some(s0.rem_euclid(self.value as i128) as u64)
    }

    /// Multiplicative order of a unit.
    pub fn order(&self, x: u64) -> u64 {
        assert!(self.is_unit(x), "order of non-unit {x}");
        let one = 1 % self.value;
        let mut y = x % self.value;
        let mut k = 1;
        while y != one {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// `target -= f * row`, entrywise.
    #[inline]
    pub(crate) fn axpy_neg(&self, target: &mut [u64], f: u64, row: &[u64]) {
        if f == 0 {
            return;
        }
        for (t, &r) in target.iter_mut().zip(row) {
            if r != 0 {
                *t = self.sub(*t, self.mul(f, r));
            }
        }
    }

    #[inline]
    pub(crate) fn scale_in_place(&self, row: &mut [u64], f: u64) {
        for x in row.iter_mut() {
            *x = self.mul(*x, f);
        }
    }

    pub(crate) fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

/// A residue modulo `p^n`, always stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueInt {
    value: u64,
    modulus: Modulus,
}

impl ResidueInt {
    pub fn new(value: u64, modulus: Modulus) -> Self {
        ResidueInt { value: modulus.reduce(value), modulus }
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn val_p(&self) -> u32 {
        self.modulus.val(self.value)
    }

    pub fn is_unit(&self) -> bool {
        self.modulus.is_unit(self.value)
    }

    pub fn inv(&self) -> Result<ResidueInt, ModError> {
        self.modulus
            .inv(self.value)
            .map(|v| ResidueInt { value: v, modulus: self.modulus })
            .ok_or(ModError::NonUnit { value: self.value, modulus: self.modulus.value() })
    }

    pub fn pow(&self, e: u64) -> ResidueInt {
        ResidueInt { value: self.modulus.pow(self.value, e), modulus: self.modulus }
    }

    fn same_modulus(&self, other: &ResidueInt) -> Result<Modulus, ModError> {
        if self.modulus == other.modulus {
            Ok(self.modulus)
        } else {
            Err(ModError::ModulusMismatch(self.modulus.value(), other.modulus.value()))
        }
    }

    pub fn checked_add(&self, other: &ResidueInt) -> Result<ResidueInt, ModError> {
        let m = self.same_modulus(other)?;
        Ok(ResidueInt { value: m.add(self.value, other.value), modulus: m })
    }

    pub fn checked_sub(&self, other: &ResidueInt) -> Result<ResidueInt, ModError> {
        let m = self.same_modulus(other)?;
        Ok(ResidueInt { value: m.sub(self.value, other.value), modulus: m })
    }

    pub fn checked_mul(&self, other: &ResidueInt) -> Result<ResidueInt, ModError> {
        let m = self.same_modulus(other)?;
        Ok(ResidueInt { value: m.mul(self.value, other.value), modulus: m })
    }
}

impl fmt::Display for ResidueInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operator forms panic on mixed moduli; use the `checked_*` methods to get an error instead.
impl Add for ResidueInt {
    type Output = ResidueInt;
    fn add(self, rhs: ResidueInt) -> ResidueInt {
        self.checked_add(&rhs).unwrap()
    }
}

impl Sub for ResidueInt {
    type Output = ResidueInt;
    fn sub(self, rhs: ResidueInt) -> ResidueInt {
        self.checked_sub(&rhs).unwrap()
    }
}

impl Mul for ResidueInt {
    type Output = ResidueInt;
    fn mul(self, rhs: ResidueInt) -> ResidueInt {
        self.checked_mul(&rhs).unwrap()
    }
}

impl Neg for ResidueInt {
    type Output = ResidueInt;
    fn neg(self) -> ResidueInt {
        ResidueInt { value: self.modulus.neg(self.value), modulus: self.modulus }
    }
}
