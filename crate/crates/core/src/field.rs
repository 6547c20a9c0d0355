//! Prime fields GF(p).

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported modulus; products of two elements must fit in a `u64`.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

/// A prime field GF(p). Elements are `u64` values kept in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p > MAX_MODULUS {
            return Err(Error::Unsupported(format!(
                "modulus {p} exceeds {MAX_MODULUS}"
            )));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    /// GF(2), the field of every worked example.
    pub fn binary() -> Self {
        Self { p: 2 }
    }

    /// The smallest prime field with at least `m` elements (and at least 2).
    pub fn smallest_at_least(m: usize) -> Result<Self> {
        let mut p = (m as u64).max(2);
        while !is_prime(p) {
            p += 1;
        }
        Self::new(p)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn is_binary(&self) -> bool {
        self.p == 2
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.p) {
            return Err(Error::DivideByZero(self.p));
        }
        Ok(self.pow(a, self.p - 2))
    }
}

/// Deterministic trial division; moduli are capped at 2^32.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}
