//! Arithmetic in Z/p^M, with a word-sized fast path.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{big_pow, mul_mod};

/// The ring Z/p^M with valuation-aware helpers.
pub trait ResidueRing: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn prime(&self) -> u64;
    fn precision(&self) -> u32;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_bigint(&self, x: &BigInt) -> Self::Elem;
    fn to_biguint(&self, x: &Self::Elem) -> BigUint;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Valuation, `None` when the element is zero mod p^M.
    fn valuation(&self, a: &Self::Elem) -> Option<u32>;
    /// Exact division by p^k of an element divisible by p^k (result mod p^(M-k), lifted).
    fn div_p_pow(&self, a: &Self::Elem, k: u32) -> Self::Elem;
    /// Inverse of a unit.
    fn inv_unit(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn from_i64(&self, x: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(x))
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.zero(), a)
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn to_bigint(&self, a: &Self::Elem) -> BigInt {
        BigInt::from(self.to_biguint(a))
    }
}

/// Z/p^M with p^M below 2^63.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallResidues {
    p: u64,
    prec: u32,
    modulus: u64,
}

impl SmallResidues {
    pub fn new(p: u64, prec: u32) -> Option<Self> {
        let m = big_pow(p, prec);
        let modulus = m.to_u64()?;
        if modulus >= 1 << 63 {
            return None;
        }
        Some(SmallResidues { p, prec, modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl ResidueRing for SmallResidues {
    type Elem = u64;

    fn prime(&self) -> u64 {
        self.p
    }
    fn precision(&self) -> u32 {
        self.prec
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn from_bigint(&self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.modulus)).to_u64().unwrap()
    }
    fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }
    fn to_biguint(&self, x: &u64) -> BigUint {
        BigUint::from(*x)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.modulus)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn valuation(&self, a: &u64) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = *a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        Some(v)
    }
    fn div_p_pow(&self, a: &u64, k: u32) -> u64 {
        a / self.p.pow(k)
    }
    fn inv_unit(&self, a: &u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        let (g, x, _) = ext_gcd(*a as i128, self.modulus as i128);
        if g != 1 {
            return None;
        }
        Some(x.rem_euclid(self.modulus as i128) as u64)
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Z/p^M for arbitrary moduli.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigResidues {
    p: u64,
    prec: u32,
    modulus: BigUint,
}

impl BigResidues {
    pub fn new(p: u64, prec: u32) -> Self {
        BigResidues { p, prec, modulus: big_pow(p, prec) }
    }
}

impl ResidueRing for BigResidues {
    type Elem = BigUint;

    fn prime(&self) -> u64 {
        self.p
    }
    fn precision(&self) -> u32 {
        self.prec
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::from(1u32) % &self.modulus
    }
    fn from_bigint(&self, x: &BigInt) -> BigUint {
        x.mod_floor(&BigInt::from(self.modulus.clone())).to_biguint().unwrap()
    }
    fn to_biguint(&self, x: &BigUint) -> BigUint {
        x.clone()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.modulus
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + &self.modulus - b
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn valuation(&self, a: &BigUint) -> Option<u32> {
        if a.is_zero() {
            return None;
        }
        let pb = BigUint::from(self.p);
        let mut v = 0;
        let mut x = a.clone();
        loop {
            let (q, r) = x.div_rem(&pb);
            if !r.is_zero() {
                return Some(v);
            }
            x = q;
            v += 1;
        }
    }
    fn div_p_pow(&self, a: &BigUint, k: u32) -> BigUint {
        a / big_pow(self.p, k)
    }
    fn inv_unit(&self, a: &BigUint) -> Option<BigUint> {
        let m = BigInt::from(self.modulus.clone());
        let inv = crate::arith::inv_mod_big(&BigInt::from(a.clone()), &m)?;
        inv.to_biguint()
    }
}
