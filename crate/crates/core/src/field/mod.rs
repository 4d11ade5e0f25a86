//! Arithmetic in a prime field `F_q` and dense linear algebra over it.
//!
//! Elements are plain `u32` residues in `[0, q)`. A [`PrimeField`] is a small
//! `Copy` handle carrying the modulus; every operation takes it explicitly.

mod matrix;

pub use matrix::{Echelon, Matrix, Solution};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not an odd prime in [5, 2^31)")]
    BadModulus(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system is inconsistent")]
    Inconsistent,
}

/// The prime field `F_q` for an odd prime `5 <= q < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    q: u32,
}

impl TryFrom<u32> for PrimeField {
    type Error = FieldError;
    fn try_from(q: u32) -> Result<Self, FieldError> {
        PrimeField::new(q)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.q
    }
}

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

impl PrimeField {
    pub fn new(q: u32) -> Result<Self, FieldError> {
        if !(5..1 << 31).contains(&q) || !is_prime(q as u64) {
            return Err(FieldError::BadModulus(q as u64));
        }
        Ok(PrimeField { q })
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (if s >= self.q as u64 { s - self.q as u64 } else { s }) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + (self.q - b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    /// `a * b + c`, reduced.
    #[inline]
    pub fn mul_add(&self, a: u32, b: u32, c: u32) -> u32 {
        ((a as u64 * b as u64 + c as u64) % self.q as u64) as u32
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.q;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        if a.is_multiple_of(self.q) {
            return Err(FieldError::ZeroInverse);
        }
        // extended Euclid on i64
        let (mut r0, mut r1) = (self.q as i64, (a % self.q) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (t0, t1) = (t1, t0 - k * t1);
        }
        Ok(self.from_i64(t0))
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    #[inline]
    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    /// Symmetric representative in `(-q/2, q/2]`, handy for printing.
    pub fn to_signed(&self, a: u32) -> i64 {
        if a > self.q / 2 {
            a as i64 - self.q as i64
        } else {
            a as i64
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.q)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(1..self.q)
    }

    pub fn random_vector<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<u32> {
        (0..n).map(|_| self.random(rng)).collect()
    }

    pub fn dot(&self, a: &[u32], b: &[u32]) -> u32 {
        debug_assert_eq!(a.len(), b.len());
        let q = self.q as u64;
        let mut acc = 0u64;
        if self.q < 1 << 16 {
            // products are below 2^32, so 2^31 of them fit in a u64
            for (&x, &y) in a.iter().zip(b) {
                acc += x as u64 * y as u64;
            }
            return (acc % q) as u32;
        }
        for (&x, &y) in a.iter().zip(b) {
            acc = (acc + x as u64 * y as u64) % q;
        }
        acc as u32
    }

    pub fn scale(&self, c: u32, v: &[u32]) -> Vec<u32> {
        v.iter().map(|&x| self.mul(c, x)).collect()
    }

    pub fn axpy(&self, c: u32, x: &[u32], y: &mut [u32]) {
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = self.mul_add(c, xi, *yi);
        }
    }

    pub fn add_vec(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_vec(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    /// Scales `v` so that its first nonzero entry is 1. Returns `None` for the zero vector.
    pub fn normalize(&self, v: &[u32]) -> Option<Vec<u32>> {
        let lead = *v.iter().find(|&&x| x != 0)?;
        let s = self.inv(lead).ok()?;
        Some(self.scale(s, v))
    }

    /// True when `a` and `b` are nonzero and proportional.
    pub fn same_line(&self, a: &[u32], b: &[u32]) -> bool {
        match (self.normalize(a), self.normalize(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }
}
