//! Exact arithmetic in quadratic fields Q(√d).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{big_pow_i, exact_sqrt, vp_int, vp_rational};
use crate::error::{Error, Result};
use crate::padic::{hensel_sqrt, sqrt_2adic, Rational};

/// x + y√d with d squarefree; rational numbers carry d = 1 and y = 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    d: BigInt,
    x: BigRational,
    y: BigRational,
}

impl QuadraticNumber {
    /// Build x + y√n for any nonzero integer n; square factors of n are absorbed into y.
    pub fn new(x: BigRational, y: BigRational, n: &BigInt) -> Self {
        assert!(!n.is_zero(), "radicand must be nonzero");
        let (d, f) = squarefree_decompose(n);
        let y = y * BigRational::from_integer(f);
        Self::normalize(d, x, y)
    }

    fn normalize(d: BigInt, x: BigRational, y: BigRational) -> Self {
        if d.is_one() {
            return QuadraticNumber { d, x: x + y, y: BigRational::zero() };
        }
        if y.is_zero() {
            return QuadraticNumber { d: BigInt::one(), x, y };
        }
        QuadraticNumber { d, x, y }
    }

    pub fn rational(x: BigRational) -> Self {
        QuadraticNumber { d: BigInt::one(), x, y: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// √n for an integer n.
    pub fn sqrt_of(n: &BigInt) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), n)
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.x
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.is_rational() {
            Some(&self.x)
        } else {
            None
        }
    }

    pub fn conj(&self) -> Self {
        QuadraticNumber { d: self.d.clone(), x: self.x.clone(), y: -self.y.clone() }
    }

    pub fn norm(&self) -> BigRational {
        &self.x * &self.x - BigRational::from_integer(self.d.clone()) * &self.y * &self.y
    }

    pub fn trace(&self) -> BigRational {
        &self.x + &self.x
    }

    fn common_radicand(&self, other: &Self) -> BigInt {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => other.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, other.d, "incompatible radicands");
                self.d.clone()
            }
        }
    }

    /// Whether both numbers live in a common quadratic field.
    pub fn compatible(&self, other: &Self) -> bool {
        self.is_rational() || other.is_rational() || self.d == other.d
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(QuadraticNumber::normalize(self.d.clone(), &self.x / &n, -(&self.y / &n)))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QuadraticNumber::normalize(self.d.clone(), &self.x * c, &self.y * c)
    }

    /// p-adic valuation under the fixed embedding sending √d to the canonical Hensel root.
    ///
    /// When p does not split in Q(√d) both conjugates share the valuation, which may be
    /// a half-integer in the ramified case.
    pub fn padic_valuation(&self, p: u64) -> Option<Rational> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return vp_rational(&self.x, p).map(Rational::from_integer);
        }
        let vn = vp_rational(&self.norm(), p).expect("nonzero norm");
        let tr = self.trace();
        let half = Rational::new(vn, 2);
        let vt = match vp_rational(&tr, p) {
            None => return Some(half),
            Some(v) => v,
        };
        if Rational::from_integer(vt) >= half {
            return Some(half);
        }
        // two distinct root valuations vt < vn - vt; p splits and the embedding decides
        let low = vt;
        let high = vn - vt;
        let den = self.x.denom().lcm(self.y.denom());
        let vden = vp_int(&den, p).unwrap_or(0) as i64;
        let xx = (&self.x * BigRational::from_integer(den.clone())).to_integer();
        let yy = (&self.y * BigRational::from_integer(den)).to_integer();
        let k = (high + vden + 2).max(1) as u32;
        let root = embedded_sqrt(&self.d, p, k)?;
        let m = big_pow_i(p, k);
        let val = (xx + yy * root).mod_floor(&m);
        let v_img = vp_int(&val, p).map(|v| v as i64).unwrap_or(k as i64) - vden;
        if v_img == low {
            Some(Rational::from_integer(low))
        } else {
            Some(Rational::from_integer(high))
        }
    }
}

/// Canonical square root of d in Z_p when p splits in Q(√d).
fn embedded_sqrt(d: &BigInt, p: u64, k: u32) -> Option<BigInt> {
    if p == 2 {
        return sqrt_2adic(d, k + 3).ok().map(|r| {
            let m = big_pow_i(2, k);
            let r = r.mod_floor(&m);
            // choose the root that is 1 mod 4
            if (&r % 4u32) == BigInt::one() {
                r
            } else {
                (-r).mod_floor(&m)
            }
        });
    }
    hensel_sqrt(d, p, k).ok().map(|r| r.to_bigint())
}

/// Write n = f² d with d squarefree (sign kept on d).
///
/// Trial division up to the cube root; the cofactor then has at most two prime
/// factors, so it is squarefree unless it is a perfect square.
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut m = n.abs();
    let mut d = BigInt::one();
    let mut f = BigInt::one();
    let mut q = BigInt::from(2u32);
    loop {
        if &q * &q * &q > m {
            break;
        }
        let mut e = 0u32;
        while (&m % &q).is_zero() {
            m /= &q;
            e += 1;
        }
        for _ in 0..e / 2 {
            f *= &q;
        }
        if e % 2 == 1 {
            d *= &q;
        }
        q += if q == BigInt::from(2) { 1u32 } else { 2u32 };
    }
    if m > BigInt::one() {
        if let Some(r) = exact_sqrt(&m) {
            f *= r;
        } else {
            d *= m;
        }
    }
    (sign * d, f)
}

impl Add for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn add(self, o: &QuadraticNumber) -> QuadraticNumber {
        let d = self.common_radicand(o);
        QuadraticNumber::normalize(d, &self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn sub(self, o: &QuadraticNumber) -> QuadraticNumber {
        let d = self.common_radicand(o);
        QuadraticNumber::normalize(d, &self.x - &o.x, &self.y - &o.y)
    }
}

impl Mul for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn mul(self, o: &QuadraticNumber) -> QuadraticNumber {
        let d = self.common_radicand(o);
        let dr = BigRational::from_integer(d.clone());
        let x = &self.x * &o.x + dr * &self.y * &o.y;
        let y = &self.x * &o.y + &self.y * &o.x;
        QuadraticNumber::normalize(d, x, y)
    }
}

impl Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber { d: self.d.clone(), x: -self.x.clone(), y: -self.y.clone() }
    }
}

impl Add for QuadraticNumber {
    type Output = QuadraticNumber;
    fn add(self, o: QuadraticNumber) -> QuadraticNumber {
        &self + &o
    }
}

impl Sub for QuadraticNumber {
    type Output = QuadraticNumber;
    fn sub(self, o: QuadraticNumber) -> QuadraticNumber {
        &self - &o
    }
}

impl Mul for QuadraticNumber {
    type Output = QuadraticNumber;
    fn mul(self, o: QuadraticNumber) -> QuadraticNumber {
        &self * &o
    }
}

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        -&self
    }
}

impl From<BigRational> for QuadraticNumber {
    fn from(x: BigRational) -> Self {
        QuadraticNumber::rational(x)
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        let root = format!("sqrt({})", self.d);
        let coeff = |y: &BigRational| {
            if y.is_one() {
                root.clone()
            } else {
                format!("{}*{}", y, root)
            }
        };
        if self.x.is_zero() {
            if self.y.is_negative() {
                return write!(f, "-{}", coeff(&-self.y.clone()));
            }
            return write!(f, "{}", coeff(&self.y));
        }
        if self.y.is_negative() {
            write!(f, "{} - {}", self.x, coeff(&-self.y.clone()))
        } else {
            write!(f, "{} + {}", self.x, coeff(&self.y))
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("bad rational literal '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
    }
}

impl FromStr for QuadraticNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("bad quadratic literal '{s}'"));
        let Some(start) = s.find("sqrt(") else {
            return Ok(QuadraticNumber::rational(parse_rational(s)?));
        };
        if !s.ends_with(')') {
            return Err(bad());
        }
        let d = BigInt::from_str(&s[start + 5..s.len() - 1]).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        let head = &s[..start];
        let head = head.strip_suffix('*').unwrap_or(head);
        let (x, y_str, neg) = if let Some(i) = head.rfind(" + ") {
            (parse_rational(&head[..i])?, &head[i + 3..], false)
        } else if let Some(i) = head.rfind(" - ") {
            (parse_rational(&head[..i])?, &head[i + 3..], true)
        } else {
            (BigRational::zero(), head, false)
        };
        let y = match y_str.trim() {
            "" => BigRational::one(),
            "-" => -BigRational::one(),
            t => parse_rational(t)?,
        };
        let y = if neg { -y } else { y };
        Ok(QuadraticNumber::new(x, y, &d))
    }
}

impl serde::Serialize for QuadraticNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for QuadraticNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde helpers for exact rationals written as "a/b".
pub mod rational_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Valuation of a rational number, in exact fractions.
pub fn rational_valuation(x: &BigRational, p: u64) -> Option<Rational> {
    vp_rational(x, p).map(Rational::from_integer)
}
