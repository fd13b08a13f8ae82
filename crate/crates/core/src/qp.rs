//! Elements of Q_p with relative precision: p^val · unit + O(p^(val + rel)).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{big_pow_i, inv_mod_big, vp_int};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qp {
    p: u64,
    val: i64,
    unit: BigInt,
    rel: u32,
}

impl Qp {
    /// O(p^abs).
    pub fn zero(p: u64, abs: i64) -> Self {
        Qp { p, val: abs, unit: BigInt::zero(), rel: 0 }
    }

    /// p^shift · n known modulo p^abs.
    pub fn from_scaled(p: u64, n: &BigInt, shift: i64, abs: i64) -> Self {
        let digits = abs - shift;
        if digits <= 0 {
            return Qp::zero(p, abs);
        }
        let m = big_pow_i(p, digits as u32);
        let r = n.mod_floor(&m);
        match vp_int(&r, p) {
            None => Qp::zero(p, abs),
            Some(v) => {
                let rel = (digits - v as i64) as u32;
                let unit = (r / big_pow_i(p, v)).mod_floor(&big_pow_i(p, rel));
                Qp { p, val: shift + v as i64, unit, rel }
            }
        }
    }

    pub fn from_integer(p: u64, n: &BigInt, abs: i64) -> Self {
        Qp::from_scaled(p, n, 0, abs)
    }

    pub fn from_i64(p: u64, n: i64, abs: i64) -> Self {
        Qp::from_integer(p, &BigInt::from(n), abs)
    }

    /// A rational with denominator possibly divisible by p, to the given absolute precision.
    pub fn from_rational(p: u64, x: &BigRational, abs: i64) -> Self {
        if x.is_zero() {
            return Qp::zero(p, abs);
        }
        let vd = vp_int(x.denom(), p).unwrap() as i64;
        let den = x.denom() / big_pow_i(p, vd as u32);
        let digits = (abs + vd).max(1) as u32;
        let m = big_pow_i(p, digits);
        let inv = inv_mod_big(&den, &m).expect("denominator coprime to p");
        Qp::from_scaled(p, &(x.numer() * inv), -vd, abs)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }

    /// Exact valuation when nonzero.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Valuation, or the absolute precision for an indistinguishable-from-zero value.
    pub fn val_lower_bound(&self) -> i64 {
        self.val
    }

    pub fn abs_precision(&self) -> i64 {
        self.val + self.rel as i64
    }

    pub fn rel_precision(&self) -> u32 {
        self.rel
    }

    /// Reduce absolute precision.
    pub fn truncate(&self, abs: i64) -> Self {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        Qp::from_scaled(self.p, &self.unit, self.val, abs)
    }

    pub fn add(&self, o: &Qp) -> Qp {
        let abs = self.abs_precision().min(o.abs_precision());
        let m = self.val.min(o.val);
        let x = &self.unit * big_pow_i(self.p, (self.val - m) as u32);
        let y = &o.unit * big_pow_i(self.p, (o.val - m) as u32);
        Qp::from_scaled(self.p, &(x + y), m, abs)
    }

    pub fn neg(&self) -> Qp {
        if self.is_zero() {
            return self.clone();
        }
        Qp { p: self.p, val: self.val, unit: (-&self.unit).mod_floor(&big_pow_i(self.p, self.rel)), rel: self.rel }
    }

    pub fn sub(&self, o: &Qp) -> Qp {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Qp) -> Qp {
        if self.is_zero() || o.is_zero() {
            return Qp::zero(self.p, self.val + o.val);
        }
        let rel = self.rel.min(o.rel);
        let m = big_pow_i(self.p, rel);
        Qp { p: self.p, val: self.val + o.val, unit: (&self.unit * &o.unit).mod_floor(&m), rel }
    }

    /// Division by an element known to be nonzero.
    pub fn div(&self, o: &Qp) -> Option<Qp> {
        if o.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Qp::zero(self.p, self.val - o.val));
        }
        let rel = self.rel.min(o.rel);
        let m = big_pow_i(self.p, rel);
        let inv = inv_mod_big(&o.unit, &m)?;
        Some(Qp { p: self.p, val: self.val - o.val, unit: (&self.unit * inv).mod_floor(&m), rel })
    }

    pub fn one(p: u64, abs: i64) -> Qp {
        Qp::from_integer(p, &BigInt::one(), abs)
    }

    /// Representative p^val · unit as a rational.
    pub fn lift(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let u = BigRational::from_integer(self.unit.clone());
        if self.val >= 0 {
            u * BigRational::from_integer(big_pow_i(self.p, self.val as u32))
        } else {
            u / BigRational::from_integer(big_pow_i(self.p, (-self.val) as u32))
        }
    }

    /// Whether two values agree to the smaller of their precisions.
    pub fn agrees(&self, o: &Qp) -> bool {
        self.sub(o).is_zero()
    }
}

impl fmt::Display for Qp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.val);
        }
        write!(f, "{}*{}^{} + O({}^{})", self.unit, self.p, self.val, self.p, self.abs_precision())
    }
}
