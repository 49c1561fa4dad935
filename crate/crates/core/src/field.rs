//! Prime-field scalars and base-p digit combinatorics.
//!
//! Scalars are plain `u32` values kept in `[0, p)`; every operation goes
//! through a [`PrimeField`] handle so that the modulus travels with the data.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default upper bound on the characteristic accepted by [`PrimeField::new`].
pub const DEFAULT_MAX_PRIME: u32 = 97;

pub type Scalar = u32;

/// The prime field F_p, with factorial tables for digits `0..p`.
#[derive(Clone)]
pub struct PrimeField {
    p: u32,
    fact: Arc<[u32]>,
    inv_fact: Arc<[u32]>,
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for PrimeField {}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        Self::with_bound(p, DEFAULT_MAX_PRIME)
    }

    /// Like [`PrimeField::new`] with a caller-chosen bound on `p`.
    pub fn with_bound(p: u32, max_prime: u32) -> Result<Self> {
        if p > max_prime {
            return Err(Error::PrimeOutOfRange { p, max: max_prime });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut fact = vec![1u32; p as usize];
        for n in 1..p as usize {
            fact[n] = ((fact[n - 1] as u64 * n as u64) % p as u64) as u32;
        }
        let mut field = PrimeField {
            p,
            fact: fact.into(),
            inv_fact: Arc::from(Vec::new()),
        };
        let inv_fact: Vec<u32> = field
            .fact
            .iter()
            .map(|&f| field.inv(f).expect("n! is a unit for n < p"))
            .collect();
        field.inv_fact = inv_fact.into();
        Ok(field)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> Scalar {
        v.rem_euclid(self.p as i64) as Scalar
    }

    #[inline]
    pub fn reduce_u64(&self, v: u64) -> Scalar {
        (v % self.p as u64) as Scalar
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        ((a as u64 * b as u64) % self.p as u64) as Scalar
    }

    pub fn pow(&self, a: Scalar, mut e: u64) -> Scalar {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; inverting zero is an error.
    pub fn inv(&self, a: Scalar) -> Result<Scalar> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, (self.p - 2) as u64))
    }

    /// `n!` for `n < p`.
    pub fn factorial(&self, n: u32) -> Scalar {
        self.fact[n as usize]
    }

    /// `(n!)^{-1}` for `n < p`.
    pub fn inv_factorial(&self, n: u32) -> Scalar {
        self.inv_fact[n as usize]
    }

    /// `C(a, b)` for digits `a, b < p`.
    fn binom_digit(&self, a: u32, b: u32) -> Scalar {
        if b > a {
            return 0;
        }
        self.mul(
            self.fact[a as usize],
            self.mul(self.inv_fact[b as usize], self.inv_fact[(a - b) as usize]),
        )
    }

    pub fn digits(&self, n: u64) -> DigitVector {
        DigitVector::new(n, self.p)
    }
}

/// Base-p expansion of a nonnegative integer, least-significant digit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitVector {
    p: u32,
    digits: Vec<u32>,
}

impl DigitVector {
    pub fn new(mut n: u64, p: u32) -> Self {
        let mut digits = Vec::new();
        while n > 0 {
            digits.push((n % p as u64) as u32);
            n /= p as u64;
        }
        DigitVector { p, digits }
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Digit at position `i`, zero beyond the stored length.
    pub fn digit(&self, i: usize) -> u32 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    pub fn value(&self) -> u64 {
        self.digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.p as u64 + d as u64)
    }
}

/// `C(n, j) mod p`, digit by digit (Lucas). Zero when `j > n`.
pub fn binom_mod(n: u64, j: u64, field: &PrimeField) -> Scalar {
    if j > n {
        return 0;
    }
    let p = field.p as u64;
    let (mut n, mut j) = (n, j);
    let mut acc = 1 % field.p;
    while n > 0 || j > 0 {
        let c = field.binom_digit((n % p) as u32, (j % p) as u32);
        if c == 0 {
            return 0;
        }
        acc = field.mul(acc, c);
        n /= p;
        j /= p;
    }
    acc
}

/// Number of carries when adding `a` and `b` in base p.
pub fn carries_in_addition(a: u64, b: u64, field: &PrimeField) -> u32 {
    let p = field.p as u64;
    let (mut a, mut b) = (a, b);
    let mut carry = 0u64;
    let mut count = 0;
    while a > 0 || b > 0 || carry > 0 {
        let s = a % p + b % p + carry;
        carry = s / p;
        count += carry as u32;
        a /= p;
        b /= p;
    }
    count
}

/// True iff every base-p digit of `m` is at most the matching digit of `n`.
pub fn digit_dominates(m: u64, n: u64, field: &PrimeField) -> bool {
    let p = field.p as u64;
    let (mut m, mut n) = (m, n);
    while m > 0 {
        if m % p > n % p {
            return false;
        }
        m /= p;
        n /= p;
    }
    true
}
