//! Arithmetic in the prime field F_p.
//!
//! Residues are kept fully reduced in `0..p`. The prime is capped at 2^20 so a
//! product of two residues always fits in a `u64` without widening.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Largest supported characteristic.
pub const MAX_PRIME: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported bound 2^20")]
    PrimeTooLarge(u64),
    #[error("elements belong to different fields (p = {0} vs p = {1})")]
    ContextMismatch(u64, u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// Deterministic trial-division primality test (fine for `n <= 2^20`).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The prime field F_p. Cheap to copy; every polynomial carries one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldCtx {
    p: u64,
}

impl FieldCtx {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p > MAX_PRIME {
            return Err(FieldError::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Embeds an unsigned integer, reducing it mod p.
    #[inline]
    pub fn elem(&self, v: u64) -> FpElem {
        FpElem { value: v % self.p, p: self.p }
    }

    /// Embeds a signed integer, reducing it into `0..p`.
    #[inline]
    pub fn elem_i64(&self, v: i64) -> FpElem {
        FpElem { value: self.reduce_i64(v), p: self.p }
    }

    pub fn zero(&self) -> FpElem {
        FpElem { value: 0, p: self.p }
    }

    pub fn one(&self) -> FpElem {
        FpElem { value: 1 % self.p, p: self.p }
    }

    /// Iterates over all field elements in residue order.
    pub fn elements(&self) -> impl Iterator<Item = FpElem> + '_ {
        (0..self.p).map(move |v| FpElem { value: v, p: self.p })
    }

    // Raw residue kernels used by the polynomial code. Inputs must be reduced.

    #[inline]
    pub(crate) fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub(crate) fn pow_raw(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm.
    pub(crate) fn inv_raw(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.reduce_i64(t0))
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// An element of F_p, tagged with its characteristic.
///
/// The checked methods (`try_add`, ...) report a context mismatch; the
/// operator impls panic on one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpElem {
    value: u64,
    p: u64,
}

impl FpElem {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn ctx(&self) -> FieldCtx {
        FieldCtx { p: self.p }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    fn check(&self, other: &FpElem) -> Result<FieldCtx, FieldError> {
        if self.p != other.p {
            Err(FieldError::ContextMismatch(self.p, other.p))
        } else {
            Ok(self.ctx())
        }
    }

    pub fn try_add(self, other: FpElem) -> Result<FpElem, FieldError> {
        let ctx = self.check(&other)?;
        Ok(FpElem { value: ctx.add_raw(self.value, other.value), p: self.p })
    }

    pub fn try_sub(self, other: FpElem) -> Result<FpElem, FieldError> {
        let ctx = self.check(&other)?;
        Ok(FpElem { value: ctx.sub_raw(self.value, other.value), p: self.p })
    }

    pub fn try_mul(self, other: FpElem) -> Result<FpElem, FieldError> {
        let ctx = self.check(&other)?;
        Ok(FpElem { value: ctx.mul_raw(self.value, other.value), p: self.p })
    }

    pub fn inv(self) -> Result<FpElem, FieldError> {
        self.ctx()
            .inv_raw(self.value)
            .map(|value| FpElem { value, p: self.p })
            .ok_or(FieldError::ZeroInverse)
    }

    /// `self^e`, with `0^0 = 1`.
    pub fn pow(self, e: u64) -> FpElem {
        FpElem { value: self.ctx().pow_raw(self.value, e), p: self.p }
    }

    /// Representative in `(-p/2, p/2]`, handy for display of signs.
    pub fn signed(&self) -> i64 {
        if self.value > self.p / 2 {
            self.value as i64 - self.p as i64
        } else {
            self.value as i64
        }
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpElem {
    type Output = FpElem;
    fn add(self, rhs: FpElem) -> FpElem {
        self.try_add(rhs).expect("field context mismatch")
    }
}

impl Sub for FpElem {
    type Output = FpElem;
    fn sub(self, rhs: FpElem) -> FpElem {
        self.try_sub(rhs).expect("field context mismatch")
    }
}

impl Mul for FpElem {
    type Output = FpElem;
    fn mul(self, rhs: FpElem) -> FpElem {
        self.try_mul(rhs).expect("field context mismatch")
    }
}

impl Neg for FpElem {
    type Output = FpElem;
    fn neg(self) -> FpElem {
        FpElem { value: self.ctx().neg_raw(self.value), p: self.p }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldCtx {
        FieldCtx::new(p).unwrap()
    }

    #[test]
    fn construction_rejects_composites_and_large_primes() {
        assert_eq!(FieldCtx::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(FieldCtx::new(9), Err(FieldError::NotPrime(9)));
        assert!(FieldCtx::new(2).is_ok());
        assert!(FieldCtx::new(1_048_573).is_ok());
        assert_eq!(FieldCtx::new(1_048_583), Err(FieldError::PrimeTooLarge(1_048_583)));
    }

    #[test]
    fn add_examples() {
        assert_eq!(f(5).elem(4) + f(5).elem(3), f(5).elem(2));
        assert_eq!((f(2).elem(1) + f(2).elem(1)).value(), 0);
        assert_eq!((f(7).elem(0) + f(7).elem(6)).value(), 6);
    }

    #[test]
    fn mul_examples() {
        assert_eq!((f(5).elem(2) * f(5).elem(3)).value(), 1);
        assert_eq!((f(3).elem(2) * f(3).elem(2)).value(), 1);
        assert_eq!((f(7).elem(1) * f(7).elem(5)).value(), 5);
    }

    #[test]
    fn inv_examples() {
        assert_eq!(f(5).elem(2).inv().unwrap().value(), 3);
        assert_eq!(f(7).elem(1).inv().unwrap().value(), 1);
        assert_eq!(f(11).elem(3).inv().unwrap().value(), 4);
        assert_eq!(f(11).elem(0).inv(), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(f(5).elem(2).pow(4).value(), 1);
        assert_eq!(f(3).elem(0).pow(0).value(), 1);
        assert_eq!(f(7).elem(3).pow(2).value(), 2);
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = f(5).elem(1);
        let b = f(7).elem(1);
        assert_eq!(a.try_add(b), Err(FieldError::ContextMismatch(5, 7)));
        assert_eq!(a.try_mul(b), Err(FieldError::ContextMismatch(5, 7)));
    }

    #[test]
    fn inverse_and_frobenius_exhaustive_small_primes() {
        for p in (2..=101).filter(|&n| is_prime(n)) {
            let k = f(p);
            for a in k.elements() {
                assert_eq!(a.pow(p), a, "Frobenius at p={p}, a={a}");
                if !a.is_zero() {
                    assert!((a * a.inv().unwrap()).is_one(), "inverse at p={p}, a={a}");
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for p in [2, 3, 5] {
            let k = f(p);
            let els: Vec<_> = k.elements().collect();
            for &a in &els {
                assert_eq!(a + k.zero(), a);
                assert_eq!(a * k.one(), a);
                assert!((a + (-a)).is_zero());
                for &b in &els {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    for &c in &els {
                        assert_eq!((a + b) + c, a + (b + c));
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * (b + c), a * b + a * c);
                    }
                }
            }
        }
    }
}
