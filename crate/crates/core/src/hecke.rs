//! The Hecke-algebra morphism at the level of eigenvalues: unramified Satake data,
//! the image of the norm-one generator, and the Atkin-Lehner monoid at p.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::big_pow;
use crate::error::{Error, Result};
use crate::quadratic::{rational_str, QuadraticNumber};

/// Eigenvalues (t_l, s_l) of T_l and S_l at an unramified prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnramifiedEigenPair {
    pub l: u64,
    #[serde(with = "rational_str")]
    pub t: BigRational,
    #[serde(with = "rational_str")]
    pub s: BigRational,
}

impl UnramifiedEigenPair {
    pub fn new(l: u64, t: BigRational, s: BigRational) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::SNotInvertible);
        }
        Ok(UnramifiedEigenPair { l, t, s })
    }

    pub fn from_ints(l: u64, t: i64, s: i64) -> Result<Self> {
        Self::new(l, int(t), int(s))
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn lq(l: u64) -> QuadraticNumber {
    QuadraticNumber::rational(BigRational::from_integer(BigInt::from(l)))
}

/// A number of the form √l·c with c in a quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SatakeValue {
    pub l: u64,
    pub c: QuadraticNumber,
}

impl SatakeValue {
    /// (√l·a)(√l·b) = l·a·b.
    pub fn mul(&self, other: &SatakeValue) -> QuadraticNumber {
        assert_eq!(self.l, other.l);
        &lq(self.l) * &(&self.c * &other.c)
    }

    /// (√l·a)/(√l·b) = a/b.
    pub fn ratio(&self, other: &SatakeValue) -> Option<QuadraticNumber> {
        assert_eq!(self.l, other.l);
        self.c.div(&other.c)
    }

    pub fn neg(&self) -> SatakeValue {
        SatakeValue { l: self.l, c: -&self.c }
    }

    /// The value as an element of a single quadratic field, when it is one.
    pub fn to_quadratic(&self) -> Option<QuadraticNumber> {
        let root = QuadraticNumber::sqrt_of(&BigInt::from(self.l));
        if self.c.compatible(&root) {
            Some(&root * &self.c)
        } else {
            None
        }
    }
}

impl fmt::Display for SatakeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_quadratic() {
            Some(q) => write!(f, "{q}"),
            None => write!(f, "sqrt({})*({})", self.l, self.c),
        }
    }
}

/// The unordered Satake pair {α, β} with √l(α+β) = t_l and αβ = s_l.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatakeParams {
    pub l: u64,
    pub alpha: SatakeValue,
    pub beta: SatakeValue,
}

impl SatakeParams {
    /// Recover (t_l, s_l) from the pair.
    pub fn reconstruct(&self) -> Option<UnramifiedEigenPair> {
        let sum = &self.alpha.c + &self.beta.c;
        let t = (&lq(self.l) * &sum).as_rational()?.clone();
        let s = self.alpha.mul(&self.beta).as_rational()?.clone();
        UnramifiedEigenPair::new(self.l, t, s).ok()
    }

    /// The pair in the opposite order.
    pub fn swapped(&self) -> SatakeParams {
        SatakeParams { l: self.l, alpha: self.beta.clone(), beta: self.alpha.clone() }
    }
}

/// a_l = (t_l² − 2 l s_l) / s_l, the eigenvalue of the norm-one generator h_l.
pub fn lambda_unramified(pair: &UnramifiedEigenPair) -> Result<BigRational> {
    if pair.s.is_zero() {
        return Err(Error::SNotInvertible);
    }
    let l = int(pair.l as i64);
    Ok((&pair.t * &pair.t - int(2) * l * &pair.s) / &pair.s)
}

/// Roots of X² − (t/√l)X + s, written as √l·c with c = (t ± √Δ)/(2l), Δ = t² − 4ls.
pub fn satake_params(pair: &UnramifiedEigenPair) -> SatakeParams {
    let l = pair.l;
    let disc = &pair.t * &pair.t - int(4) * int(l as i64) * &pair.s;
    let root = sqrt_rational(&disc);
    let t = QuadraticNumber::rational(pair.t.clone());
    let two_l_inv = BigRational::new(BigInt::one(), BigInt::from(2 * l));
    let c1 = (&t + &root).scale(&two_l_inv);
    let c2 = (&t - &root).scale(&two_l_inv);
    SatakeParams {
        l,
        alpha: SatakeValue { l, c: c1 },
        beta: SatakeValue { l, c: c2 },
    }
}

/// √x for a rational x, as an element of Q(√x).
pub fn sqrt_rational(x: &BigRational) -> QuadraticNumber {
    if x.is_zero() {
        return QuadraticNumber::zero();
    }
    // √(n/d) = √(n·d)/d
    let nd = x.numer() * x.denom();
    QuadraticNumber::sqrt_of(&nd).scale(&BigRational::new(BigInt::one(), x.denom().clone()))
}

/// l(α/β + β/α) evaluated from Satake parameters.
pub fn lambda_from_satake(params: &SatakeParams) -> Option<QuadraticNumber> {
    let r1 = params.alpha.ratio(&params.beta)?;
    let r2 = params.beta.ratio(&params.alpha)?;
    Some(&lq(params.l) * &(&r1 + &r2))
}

/// A character of the Atkin-Lehner monoid algebra at p, given on U_p and S_p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtkinLehnerChar {
    pub p: u64,
    pub u_p: QuadraticNumber,
    pub s_p: QuadraticNumber,
}

impl AtkinLehnerChar {
    pub fn new(p: u64, u_p: QuadraticNumber, s_p: QuadraticNumber) -> Result<Self> {
        if u_p.is_zero() || s_p.is_zero() {
            return Err(Error::InvalidInput("Atkin-Lehner values must be nonzero".into()));
        }
        Ok(AtkinLehnerChar { p, u_p, s_p })
    }

    /// Value on U_{p²} = U_p².
    pub fn u_p2(&self) -> QuadraticNumber {
        &self.u_p * &self.u_p
    }
}

/// Value of the character on u₀ = S_p·U_{p²}.
pub fn lambda_atkin_lehner(chr: &AtkinLehnerChar) -> QuadraticNumber {
    &chr.s_p * &chr.u_p2()
}

/// γ(z) = |I / (I ∩ zIz⁻¹)| for z = diag(p^a1, p^a2) with a1 ≤ a2.
pub fn gamma_index(a1: i64, a2: i64, p: u64) -> Result<BigUint> {
    if a1 > a2 {
        return Err(Error::NotInMonoid);
    }
    Ok(big_pow(p, (a2 - a1) as u32))
}

/// Monomial exponents in the commuting variables (T, S, U).
pub type Exponents = (i32, i32, i32);

/// A Laurent polynomial in T, S, U with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HeckeSymbol {
    pub terms: BTreeMap<Exponents, BigRational>,
}

impl HeckeSymbol {
    pub fn monomial(e: Exponents, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        HeckeSymbol { terms }
    }

    pub fn add(&self, other: &HeckeSymbol) -> HeckeSymbol {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(*e).or_insert_with(BigRational::zero);
            *entry += c;
        }
        terms.retain(|_, c| !c.is_zero());
        HeckeSymbol { terms }
    }

    /// Evaluate at T = t, S = s, U = u.
    pub fn evaluate(&self, t: &QuadraticNumber, s: &QuadraticNumber, u: &QuadraticNumber) -> Option<QuadraticNumber> {
        let mut acc = QuadraticNumber::zero();
        for ((et, es, eu), c) in &self.terms {
            let term = &(&t.pow(*et as i64)? * &s.pow(*es as i64)?) * &u.pow(*eu as i64)?;
            acc = &acc + &term.scale(c);
        }
        Some(acc)
    }
}

impl fmt::Display for HeckeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((et, es, eu), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (name, e) in [("T", et), ("S", es), ("U", eu)] {
                if *e != 0 {
                    write!(f, "*{name}^{e}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Generators of the norm-one Hecke algebra that the transfer is tested on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlGenerator {
    /// h_l, preimage of l(Z + Z⁻¹).
    H(u64),
    /// u₀ at p.
    U0,
}

/// Image of a norm-one generator in the GL₂ Hecke algebra, as a symbol in (T_l, S_l) or (U_p, S_p).
pub fn lambda_symbol(gen: SlGenerator) -> HeckeSymbol {
    match gen {
        SlGenerator::H(l) => HeckeSymbol::monomial((2, -1, 0), BigRational::one())
            .add(&HeckeSymbol::monomial((0, 0, 0), int(-2 * l as i64))),
        SlGenerator::U0 => HeckeSymbol::monomial((0, 1, 2), BigRational::one()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> QuadraticNumber {
        s.parse().unwrap()
    }

    #[test]
    fn lambda_examples() {
        let a = lambda_unramified(&UnramifiedEigenPair::from_ints(3, 4, 1).unwrap()).unwrap();
        assert_eq!(a, int(10));
        let a = lambda_unramified(&UnramifiedEigenPair::from_ints(5, 0, 1).unwrap()).unwrap();
        assert_eq!(a, int(-10));
        let a = lambda_unramified(&UnramifiedEigenPair::from_ints(3, -4, 1).unwrap()).unwrap();
        assert_eq!(a, int(10));
        assert_eq!(UnramifiedEigenPair::from_ints(3, 4, 0), Err(Error::SNotInvertible));
    }

    #[test]
    fn satake_examples() {
        let sp = satake_params(&UnramifiedEigenPair::from_ints(3, 4, 1).unwrap());
        assert_eq!(sp.alpha.to_quadratic().unwrap(), q("sqrt(3)"));
        assert_eq!(sp.beta.to_quadratic().unwrap(), q("1/3*sqrt(3)"));
        let sp = satake_params(&UnramifiedEigenPair::from_ints(5, 0, -1).unwrap());
        let prod = sp.alpha.mul(&sp.beta);
        assert_eq!(prod, QuadraticNumber::from_int(-1));
        let vals = [sp.alpha.to_quadratic().unwrap(), sp.beta.to_quadratic().unwrap()];
        assert!(vals.contains(&QuadraticNumber::from_int(1)));
        assert!(vals.contains(&QuadraticNumber::from_int(-1)));
    }

    #[test]
    fn satake_lambda_matches_formula_for_eisenstein() {
        for l in [3u64, 5, 7, 11, 13] {
            let pair = UnramifiedEigenPair::from_ints(l, l as i64 + 1, 1).unwrap();
            let sp = satake_params(&pair);
            let viaformula = lambda_unramified(&pair).unwrap();
            assert_eq!(viaformula, int((l * l + 1) as i64));
            assert_eq!(lambda_from_satake(&sp).unwrap(), QuadraticNumber::rational(viaformula));
        }
    }

    #[test]
    fn atkin_lehner_values() {
        let chr = AtkinLehnerChar::new(3, QuadraticNumber::one(), QuadraticNumber::one()).unwrap();
        assert_eq!(lambda_atkin_lehner(&chr), QuadraticNumber::one());
        let chr = AtkinLehnerChar::new(3, QuadraticNumber::from_int(3), QuadraticNumber::one()).unwrap();
        assert_eq!(lambda_atkin_lehner(&chr), QuadraticNumber::from_int(9));
        let chr = AtkinLehnerChar::new(3, QuadraticNumber::from_int(2), QuadraticNumber::from_int(3)).unwrap();
        assert_eq!(lambda_atkin_lehner(&chr), QuadraticNumber::from_int(12));
        assert_eq!(chr.u_p2(), QuadraticNumber::from_int(4));
    }

    #[test]
    fn gamma_index_values() {
        assert_eq!(gamma_index(0, 1, 3).unwrap(), BigUint::from(3u32));
        assert_eq!(gamma_index(0, 0, 5).unwrap(), BigUint::from(1u32));
        assert_eq!(gamma_index(-1, 1, 3).unwrap(), BigUint::from(9u32));
        assert_eq!(gamma_index(1, 0, 3), Err(Error::NotInMonoid));
    }

    /// Count cosets of I ∩ zIz⁻¹ in the Iwahori subgroup of SL2(Z/p^n) by enumeration.
    fn gamma_by_enumeration(a1: i64, a2: i64, p: u64) -> u64 {
        let d = (a2 - a1) as u32;
        let n = d + 1;
        let m = p.pow(n);
        let mut iwahori = 0u64;
        let mut sub = 0u64;
        for a in 0..m {
            for b in 0..m {
                for c in (0..m).step_by(p as usize) {
                    for dd in 0..m {
                        if (a * dd + m * m - (b * c) % m) % m != 1 {
                            continue;
                        }
                        iwahori += 1;
                        // z⁻¹gz has lower-left p^(a1-a2)c, integral and ≡ 0 mod p iff p^(d+1) | c
                        if c % p.pow(d + 1) == 0 {
                            sub += 1;
                        }
                    }
                }
            }
        }
        iwahori / sub
    }

    #[test]
    fn gamma_index_matches_enumeration() {
        assert_eq!(gamma_by_enumeration(0, 1, 3), 3);
        assert_eq!(gamma_by_enumeration(0, 0, 5), 1);
        assert_eq!(gamma_by_enumeration(-1, 1, 3), 9);
        assert_eq!(gamma_by_enumeration(0, 1, 5), 5);
    }

    #[test]
    fn symbolic_image_of_h_l() {
        let sym = lambda_symbol(SlGenerator::H(3));
        let v = sym
            .evaluate(&QuadraticNumber::from_int(4), &QuadraticNumber::one(), &QuadraticNumber::one())
            .unwrap();
        assert_eq!(v, QuadraticNumber::from_int(10));
        let u0 = lambda_symbol(SlGenerator::U0);
        let v = u0
            .evaluate(&QuadraticNumber::one(), &QuadraticNumber::from_int(3), &QuadraticNumber::from_int(2))
            .unwrap();
        assert_eq!(v, QuadraticNumber::from_int(12));
    }

    proptest! {
        #[test]
        fn satake_round_trip_and_lambda(l in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]),
                                        tn in -60i64..60, td in 1i64..6, sn in 1i64..40, sd in 1i64..6, sneg in any::<bool>()) {
            let t = BigRational::new(BigInt::from(tn), BigInt::from(td));
            let s = BigRational::new(BigInt::from(if sneg { -sn } else { sn }), BigInt::from(sd));
            let pair = UnramifiedEigenPair::new(l, t.clone(), s.clone()).unwrap();
            let sp = satake_params(&pair);
            prop_assert_eq!(sp.reconstruct().unwrap(), pair.clone());
            let a = lambda_unramified(&pair).unwrap();
            prop_assert_eq!(lambda_from_satake(&sp).unwrap(), QuadraticNumber::rational(a.clone()));
            // twist invariance
            let tw = UnramifiedEigenPair::new(l, -t.clone(), s.clone()).unwrap();
            prop_assert_eq!(lambda_unramified(&tw).unwrap(), a.clone());
            // a_l + 2l = t²/s
            prop_assert_eq!(a + int(2 * l as i64), &t * &t / &s);
        }
    }
}
