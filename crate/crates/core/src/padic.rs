//! Fixed-precision p-adic integers, Newton polygons and Hensel square roots.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{big_pow, big_pow_i, is_prime, legendre, mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Exact rational used for slopes and polygon heights.
pub type Rational = Ratio<i64>;

/// A p-adic valuation, with a sentinel for elements indistinguishable from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of Z_p known modulo p^M.
///
/// The representative is kept in `[0, p^M)`, so two approximations at the same
/// precision are equal exactly when their representatives agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicApprox {
    p: u64,
    prec: u32,
    value: BigUint,
    val: Valuation,
}

impl PadicApprox {
    pub fn new(p: u64, value: &BigInt, prec: u32) -> Self {
        let modulus = big_pow_i(p, prec);
        let v = value.mod_floor(&modulus);
        let value = v.to_biguint().expect("reduced value is non-negative");
        let val = valuation_of(&value, p, prec);
        PadicApprox { p, prec, value, val }
    }

    pub fn from_i64(p: u64, value: i64, prec: u32) -> Self {
        Self::new(p, &BigInt::from(value), prec)
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        PadicApprox { p, prec, value: BigUint::zero(), val: Valuation::Infinite }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::from_i64(p, 1, prec)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Canonical representative in `[0, p^M)`.
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.value.clone())
    }

    pub fn valuation(&self) -> Valuation {
        self.val
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_infinite()
    }

    /// Drop to a lower precision.
    pub fn reduce(&self, prec: u32) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::new(self.p, &self.to_bigint(), prec)
    }

    /// Valuation capped by precision, for precision propagation.
    fn val_or_prec(&self) -> u32 {
        match self.val {
            Valuation::Finite(v) => v as u32,
            Valuation::Infinite => self.prec,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mismatched primes");
        let prec = self.prec.min(other.prec);
        Self::new(self.p, &(self.to_bigint() + other.to_bigint()), prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mismatched primes");
        let prec = self.prec.min(other.prec);
        Self::new(self.p, &(self.to_bigint() - other.to_bigint()), prec)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.p, &(-self.to_bigint()), self.prec)
    }

    /// Product; the error term is `O(p^min(M1 + v2, M2 + v1))`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mismatched primes");
        let prec = (self.prec + other.val_or_prec()).min(other.prec + self.val_or_prec());
        Self::new(self.p, &(self.to_bigint() * other.to_bigint()), prec)
    }

    /// Inverse of a unit, at the same precision.
    pub fn inverse(&self) -> Option<Self> {
        if self.val != Valuation::Finite(0) {
            return None;
        }
        let m = big_pow_i(self.p, self.prec);
        let inv = crate::arith::inv_mod_big(&self.to_bigint(), &m)?;
        Some(Self::new(self.p, &inv, self.prec))
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.value, self.p, self.prec)
    }
}

fn valuation_of(value: &BigUint, p: u64, prec: u32) -> Valuation {
    if value.is_zero() {
        return Valuation::Infinite;
    }
    let pb = BigUint::from(p);
    let mut m = value.clone();
    let mut v = 0i64;
    while v < prec as i64 {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1;
    }
    Valuation::Finite(v)
}

/// Exact valuation at the given precision; the infinite sentinel when zero mod p^M.
pub fn valuation(x: &PadicApprox) -> Valuation {
    x.valuation()
}

/// Lower convex hull of a finite point set together with its slope multiset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(i64, Rational)>,
    pub slopes: Vec<(Rational, i64)>,
}

impl NewtonPolygon {
    /// Slopes repeated by multiplicity, in increasing order.
    pub fn slope_list(&self) -> Vec<Rational> {
        self.slopes
            .iter()
            .flat_map(|(s, m)| std::iter::repeat(*s).take(*m as usize))
            .collect()
    }

    /// Number of slopes (with multiplicity) strictly below `h`.
    pub fn count_below(&self, h: Rational) -> i64 {
        self.slopes.iter().filter(|(s, _)| *s < h).map(|(_, m)| m).sum()
    }

    /// Height of the polygon at integer abscissa `x` within its range.
    pub fn height_at(&self, x: i64) -> Option<Rational> {
        let first = self.vertices.first()?;
        let last = self.vertices.last()?;
        if x < first.0 || x > last.0 {
            return None;
        }
        for w in self.vertices.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if x >= x0 && x <= x1 {
                return Some(y0 + (y1 - y0) * Rational::new(x - x0, x1 - x0));
            }
        }
        Some(first.1)
    }
}

/// Lower convex hull of the points with finite valuation.
pub fn newton_polygon(points: &[(i64, Option<Rational>)]) -> Result<NewtonPolygon> {
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::IndicesNotIncreasing);
        }
    }
    let finite: Vec<(i64, Rational)> = points
        .iter()
        .filter_map(|(i, v)| v.map(|v| (*i, v)))
        .collect();
    if finite.is_empty() {
        return Err(Error::NoFinitePoints);
    }
    let mut hull: Vec<(i64, Rational)> = Vec::new();
    for &pt in &finite {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b when it is on or above segment a -> pt
            let lhs = (b.1 - a.1) * Rational::from_integer(pt.0 - a.0);
            let rhs = (pt.1 - a.1) * Rational::from_integer(b.0 - a.0);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let slopes = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            ((w[1].1 - w[0].1) / Rational::from_integer(len), len)
        })
        .collect();
    Ok(NewtonPolygon { vertices: hull, slopes })
}

/// Square root of a quadratic-residue unit modulo p^M for an odd prime p.
///
/// The returned root is the lift of the smaller of the two residues mod p.
pub fn hensel_sqrt(a: &BigInt, p: u64, prec: u32) -> Result<PadicApprox> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let pb = BigInt::from(p);
    let a_mod_p = a.mod_floor(&pb).to_u64().expect("residue fits");
    if a_mod_p == 0 || legendre(a_mod_p as i64, p) != 1 {
        return Err(Error::NoSquareRoot);
    }
    let r0 = sqrt_mod_prime(a_mod_p, p);
    let r0 = r0.min(p - r0);
    let mut x = BigInt::from(r0);
    let mut k = 1u32;
    while k < prec {
        k = (2 * k).min(prec);
        let m = big_pow_i(p, k);
        let fx = (&x * &x - a).mod_floor(&m);
        let inv = crate::arith::inv_mod_big(&(BigInt::from(2) * &x), &m).expect("2x is a unit");
        x = (&x - fx * inv).mod_floor(&m);
    }
    Ok(PadicApprox::new(p, &x, prec))
}

/// Tonelli-Shanks square root of a residue modulo an odd prime.
pub fn sqrt_mod_prime(a: u64, p: u64) -> u64 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z as i64, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Square root of a unit congruent to 1 mod 8 in Z_2, known mod 2^prec.
pub fn sqrt_2adic(a: &BigInt, prec: u32) -> Result<BigInt> {
    if a.mod_floor(&BigInt::from(8)) != BigInt::one() {
        return Err(Error::NoSquareRoot);
    }
    // lift bit by bit: x^2 = a mod 2^(k+1) with x odd
    let mut x = BigInt::one();
    for k in 3..prec + 1 {
        let m = big_pow_i(2, k + 1);
        if (&x * &x - a).mod_floor(&m) != BigInt::zero() {
            x += big_pow_i(2, k - 1);
        }
    }
    Ok(x.mod_floor(&big_pow_i(2, prec)))
}

/// Modulus p^M as a big integer.
pub fn modulus(p: u64, prec: u32) -> BigUint {
    big_pow(p, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Option<Rational> {
        Some(Rational::from_integer(n))
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(PadicApprox::from_i64(3, 18, 5).valuation(), Valuation::Finite(2));
        assert_eq!(PadicApprox::from_i64(3, 0, 5).valuation(), Valuation::Infinite);
        assert_eq!(PadicApprox::from_i64(5, 7, 4).valuation(), Valuation::Finite(0));
        assert_eq!(PadicApprox::from_i64(3, 243, 5).valuation(), Valuation::Infinite);
    }

    #[test]
    fn representative_is_canonical() {
        let a = PadicApprox::from_i64(3, -1, 3);
        assert_eq!(a.value(), &BigUint::from(26u32));
        assert_eq!(a, PadicApprox::from_i64(3, 53, 3));
    }

    #[test]
    fn product_precision_follows_interval_rule() {
        let a = PadicApprox::from_i64(3, 9, 5);
        let b = PadicApprox::from_i64(3, 3, 4);
        let c = a.mul(&b);
        assert_eq!(c.precision(), 6);
        assert_eq!(c.valuation(), Valuation::Finite(3));
        let s = a.add(&b);
        assert_eq!(s.precision(), 4);
    }

    #[test]
    fn polygon_examples() {
        let np = newton_polygon(&[(0, r(0)), (1, r(1)), (2, r(3))]).unwrap();
        assert_eq!(np.slopes, vec![(Rational::from_integer(1), 1), (Rational::from_integer(2), 1)]);
        let np = newton_polygon(&[(0, r(0)), (1, r(5)), (2, r(1))]).unwrap();
        assert_eq!(np.slopes, vec![(Rational::new(1, 2), 2)]);
        let np = newton_polygon(&[(0, r(0))]).unwrap();
        assert!(np.slopes.is_empty());
        assert_eq!(newton_polygon(&[(0, None)]), Err(Error::NoFinitePoints));
        assert_eq!(newton_polygon(&[]), Err(Error::NoFinitePoints));
        assert_eq!(newton_polygon(&[(1, r(0)), (0, r(0))]), Err(Error::IndicesNotIncreasing));
    }

    #[test]
    fn polygon_skips_infinite_points() {
        let np = newton_polygon(&[(0, r(0)), (1, None), (2, r(2))]).unwrap();
        assert_eq!(np.slopes, vec![(Rational::from_integer(1), 2)]);
    }

    #[test]
    fn hensel_examples() {
        let x = hensel_sqrt(&BigInt::from(2), 7, 3).unwrap();
        let v = x.to_bigint();
        assert_eq!((&v * &v - 2) % 343, BigInt::zero());
        let r = (&v % BigInt::from(7)).to_u64().unwrap();
        assert!(r == 3 || r == 4);
        assert_eq!(hensel_sqrt(&BigInt::from(1), 5, 4).unwrap().to_bigint(), BigInt::one());
        assert_eq!(hensel_sqrt(&BigInt::from(3), 5, 2), Err(Error::NoSquareRoot));
        assert_eq!(hensel_sqrt(&BigInt::from(0), 5, 2), Err(Error::NoSquareRoot));
    }

    #[test]
    fn hensel_exhaustive_small() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            for a in 1..=50i64 {
                if legendre(a, p) != 1 {
                    continue;
                }
                for m in [1u32, 2, 7, 20] {
                    let x = hensel_sqrt(&BigInt::from(a), p, m).unwrap().to_bigint();
                    let md = big_pow_i(p, m);
                    assert_eq!((&x * &x - a).mod_floor(&md), BigInt::zero(), "p={p} a={a} m={m}");
                }
            }
        }
    }

    #[test]
    fn two_adic_root() {
        for a in [1i64, 17, 33, 41, -7, -15] {
            let x = sqrt_2adic(&BigInt::from(a), 20).unwrap();
            assert_eq!((&x * &x - a).mod_floor(&big_pow_i(2, 20)), BigInt::zero());
        }
        assert!(sqrt_2adic(&BigInt::from(3), 10).is_err());
    }

    proptest! {
        #[test]
        fn valuation_is_additive(a in 1i64..100_000, b in 1i64..100_000) {
            let p = 3;
            let x = PadicApprox::from_i64(p, a, 30);
            let y = PadicApprox::from_i64(p, b, 30);
            let (vx, vy) = (x.valuation().finite().unwrap(), y.valuation().finite().unwrap());
            let z = x.mul(&y);
            if vx + vy < 30 {
                prop_assert_eq!(z.valuation(), Valuation::Finite(vx + vy));
            }
        }

        #[test]
        fn hull_points_lie_on_or_above(vals in proptest::collection::vec(proptest::option::of(0i64..20), 1..12)) {
            let pts: Vec<(i64, Option<Rational>)> = vals.iter().enumerate()
                .map(|(i, v)| (i as i64, v.map(Rational::from_integer))).collect();
            if let Ok(np) = newton_polygon(&pts) {
                for (i, v) in &pts {
                    if let Some(v) = v {
                        prop_assert!(np.height_at(*i).unwrap() <= *v);
                    }
                }
                let total: Rational = np.slopes.iter().map(|(s, m)| *s * Rational::from_integer(*m)).sum();
                let first = np.vertices.first().unwrap().1;
                let last = np.vertices.last().unwrap().1;
                prop_assert_eq!(total, last - first);
            }
        }
    }
}
