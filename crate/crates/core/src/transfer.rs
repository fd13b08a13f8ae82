//! Classical points on the GL₂ side, their Atkin-Lehner characters at p, and the
//! pointwise transfer to eigensystems of the norm-one group.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hecke::{lambda_atkin_lehner, lambda_symbol, lambda_unramified, satake_params, AtkinLehnerChar, SatakeParams, SatakeValue, SlGenerator, UnramifiedEigenPair};
use crate::padic::Rational;
use crate::quadratic::QuadraticNumber;
use crate::weight::{mu, AlgebraicWeightGL2, AlgebraicWeightSL2};

/// Which Satake parameter at p plays χ₁(p); the other is χ₂(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Refinement {
    Alpha,
    Beta,
}

impl Refinement {
    pub fn other(self) -> Self {
        match self {
            Refinement::Alpha => Refinement::Beta,
            Refinement::Beta => Refinement::Alpha,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenSystemGL {
    pub weight: AlgebraicWeightGL2,
    pub p: u64,
    pub unramified: BTreeMap<u64, UnramifiedEigenPair>,
    /// Spherical pair (t_p, s_p).
    pub at_p: UnramifiedEigenPair,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<Refinement>,
}

impl EigenSystemGL {
    pub fn new(weight: AlgebraicWeightGL2, p: u64, pairs: Vec<UnramifiedEigenPair>, at_p: UnramifiedEigenPair, refinement: Option<Refinement>) -> Result<Self> {
        if at_p.l != p {
            return Err(Error::InvalidInput(format!("pair at p is labelled {}", at_p.l)));
        }
        let mut unramified = BTreeMap::new();
        for pair in pairs {
            if pair.l == p {
                return Err(Error::InvalidInput("p cannot be an unramified test prime".into()));
            }
            if unramified.insert(pair.l, pair).is_some() {
                return Err(Error::InvalidInput("duplicate prime".into()));
            }
        }
        Ok(EigenSystemGL { weight, p, unramified, at_p, refinement })
    }

    pub fn satake_at_p(&self) -> SatakeParams {
        satake_params(&self.at_p)
    }

    /// (χ₁(p), χ₂(p)) for the chosen refinement.
    pub fn refinement_pair(&self) -> Result<(SatakeValue, SatakeValue)> {
        let sp = self.satake_at_p();
        match self.refinement.ok_or(Error::RefinementAbsent)? {
            Refinement::Alpha => Ok((sp.alpha, sp.beta)),
            Refinement::Beta => Ok((sp.beta, sp.alpha)),
        }
    }

    pub fn with_refinement(&self, r: Refinement) -> Self {
        EigenSystemGL { refinement: Some(r), ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let x: EigenSystemGL = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        EigenSystemGL::new(x.weight, x.p, x.unramified.into_values().collect(), x.at_p, x.refinement)
    }
}

/// Orderings of the Satake parameters at p that occur on Iwahori-fixed vectors.
/// When α/β = p^(±1) the spherical representation is a character and only the
/// ordering with χ₂(p) = p·χ₁(p) survives; equal parameters give one ordering.
pub fn accessible_refinements(x: &EigenSystemGL) -> Vec<Refinement> {
    let sp = x.satake_at_p();
    if sp.alpha == sp.beta {
        return vec![Refinement::Alpha];
    }
    let pq = QuadraticNumber::from_int(x.p as i64);
    match sp.alpha.ratio(&sp.beta) {
        Some(r) if r == pq => vec![Refinement::Beta],
        Some(r) if r.inv().as_ref() == Some(&pq) => vec![Refinement::Alpha],
        _ => vec![Refinement::Alpha, Refinement::Beta],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenSystemSL {
    pub weight: AlgebraicWeightSL2,
    #[serde(with = "rational_map")]
    pub a: BTreeMap<u64, BigRational>,
    pub u0: QuadraticNumber,
}

mod rational_map {
    use std::collections::BTreeMap;

    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<u64, BigRational>, s: S) -> Result<S::Ok, S::Error> {
        let out: BTreeMap<u64, String> = m.iter().map(|(k, v)| (*k, v.to_string())).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, BigRational>, D::Error> {
        let raw = BTreeMap::<u64, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| crate::quadratic::parse_rational(&v).map(|r| (k, r)).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Values of ψ on U_p, S_p and u₀ = S_p·U_p².
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementValues {
    pub u_p: QuadraticNumber,
    pub s_p: QuadraticNumber,
    pub u0: QuadraticNumber,
}

impl RefinementValues {
    /// v_p(ψ(u₀)).
    pub fn slope(&self, p: u64) -> Option<Rational> {
        self.u0.padic_valuation(p)
    }

    pub fn atkin_lehner(&self, p: u64) -> Result<AtkinLehnerChar> {
        AtkinLehnerChar::new(p, self.u_p.clone(), self.s_p.clone())
    }
}

fn pow_q(p: u64, e: i64) -> QuadraticNumber {
    let base = BigRational::from_integer(BigInt::from(p));
    let v = if e >= 0 { num_traits::pow(base, e as usize) } else { num_traits::pow(base.recip(), (-e) as usize) };
    QuadraticNumber::rational(v)
}

/// ψ(U_p) = √p·χ₂(p)·p^(−k₂), ψ(S_p) = (χ₁χ₂)(p)⁻¹·p^(k₁+k₂), so that
/// ψ(u₀) = χ₂(p)χ₁(p)⁻¹·p^(k₁−k₂+1).
pub fn refinement_values(x: &EigenSystemGL) -> Result<RefinementValues> {
    let (chi1, chi2) = x.refinement_pair()?;
    let p = x.p;
    let (k1, k2) = (x.weight.k1, x.weight.k2);
    // √p·χ₂(p) = p·c₂
    let u_p = &pow_q(p, 1 - k2) * &chi2.c;
    let prod = chi1.mul(&chi2);
    let s_p = &prod.inv().ok_or(Error::SNotInvertible)? * &pow_q(p, k1 + k2);
    let u0 = &s_p * &(&u_p * &u_p);
    Ok(RefinementValues { u_p, s_p, u0 })
}

/// The transferred eigensystem: a_l on the h_l, and the value on u₀.
pub fn zeta_transfer(x: &EigenSystemGL) -> Result<EigenSystemSL> {
    let mut a = BTreeMap::new();
    for (l, pair) in &x.unramified {
        a.insert(*l, lambda_unramified(pair)?);
    }
    let rv = refinement_values(x)?;
    let u0 = lambda_atkin_lehner(&rv.atkin_lehner(x.p)?);
    if u0.is_zero() {
        return Err(Error::InvalidInput("u0 value vanishes".into()));
    }
    Ok(EigenSystemSL { weight: mu(x.weight), a, u0 })
}

/// Checks the transfer against the Hecke-algebra map evaluated on each generator.
pub fn diagram_commutes(x: &EigenSystemGL) -> Result<bool> {
    let z = zeta_transfer(x)?;
    let one = QuadraticNumber::one();
    for (l, pair) in &x.unramified {
        let t = QuadraticNumber::rational(pair.t.clone());
        let s = QuadraticNumber::rational(pair.s.clone());
        let v = lambda_symbol(SlGenerator::H(*l)).evaluate(&t, &s, &one).ok_or(Error::SNotInvertible)?;
        if v != QuadraticNumber::rational(z.a[l].clone()) {
            return Ok(false);
        }
    }
    let rv = refinement_values(x)?;
    let v = lambda_symbol(SlGenerator::U0).evaluate(&one, &rv.s_p, &rv.u_p).ok_or(Error::SNotInvertible)?;
    Ok(v == z.u0 && z.weight == mu(x.weight))
}

/// Twist by a character η given on the test primes and on p: t ↦ η t, s ↦ η² s,
/// with the refinement following χᵢ ↦ η(p) χᵢ.
pub fn twist(x: &EigenSystemGL, eta: &BTreeMap<u64, BigRational>) -> Result<EigenSystemGL> {
    let value = |l: u64| -> Result<BigRational> {
        let e = eta.get(&l).ok_or_else(|| Error::InvalidInput(format!("twist character missing at {l}")))?;
        if e.is_zero() {
            return Err(Error::InvalidInput("twist character vanishes".into()));
        }
        Ok(e.clone())
    };
    let tw = |pair: &UnramifiedEigenPair| -> Result<UnramifiedEigenPair> {
        let e = value(pair.l)?;
        UnramifiedEigenPair::new(pair.l, &pair.t * &e, &pair.s * &e * &e)
    };
    let pairs = x.unramified.values().map(tw).collect::<Result<Vec<_>>>()?;
    let at_p = tw(&x.at_p)?;
    let mut y = EigenSystemGL::new(x.weight, x.p, pairs, at_p, None)?;
    if x.refinement.is_some() {
        let (chi1, _) = x.refinement_pair()?;
        let target = chi1.c.scale(&value(x.p)?);
        let sp = y.satake_at_p();
        y.refinement = Some(if sp.alpha.c == target { Refinement::Alpha } else { Refinement::Beta });
    }
    Ok(y)
}

/// Per-prime (trace, determinant) = (t_l, l·s_l).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisCoeffs {
    pub at: BTreeMap<u64, (BigRational, BigRational)>,
}

pub fn galois_coeffs(x: &EigenSystemGL) -> GaloisCoeffs {
    let at = x
        .unramified
        .iter()
        .map(|(l, pair)| (*l, (pair.t.clone(), &pair.s * BigRational::from_integer(BigInt::from(*l)))))
        .collect();
    GaloisCoeffs { at }
}

fn projective_invariant(pair: &UnramifiedEigenPair) -> BigRational {
    &pair.t * &pair.t / (&pair.s * BigRational::from_integer(BigInt::from(pair.l)))
}

/// First prime of `primes` where t²/(l·s) differs, if any.
pub fn projective_equiv(x: &EigenSystemGL, y: &EigenSystemGL, primes: &[u64]) -> Result<Option<u64>> {
    for l in primes {
        let (a, b) = match (x.unramified.get(l), y.unramified.get(l)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::InvalidInput(format!("prime {l} missing from an eigensystem"))),
        };
        if projective_invariant(a) != projective_invariant(b) {
            return Ok(Some(*l));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberClass {
    pub members: Vec<usize>,
    pub transfer: EigenSystemSL,
    /// Every pair of members passes the projective test.
    pub consistent: bool,
}

/// Partition of the points by their transferred eigensystem.
pub fn fiber_report(points: &[EigenSystemGL]) -> Result<Vec<FiberClass>> {
    if let Some(first) = points.first() {
        let support: Vec<u64> = first.unramified.keys().copied().collect();
        if points.iter().any(|x| x.unramified.keys().copied().collect::<Vec<_>>() != support) {
            return Err(Error::InvalidInput("points must share their test primes".into()));
        }
    }
    let mut classes: Vec<FiberClass> = vec![];
    for (i, x) in points.iter().enumerate() {
        let z = zeta_transfer(x)?;
        match classes.iter_mut().find(|c| c.transfer == z) {
            Some(c) => c.members.push(i),
            None => classes.push(FiberClass { members: vec![i], transfer: z, consistent: true }),
        }
    }
    for c in &mut classes {
        let first = &points[c.members[0]];
        let primes: Vec<u64> = first.unramified.keys().copied().collect();
        for &j in &c.members[1..] {
            if projective_equiv(first, &points[j], &primes)?.is_some() {
                c.consistent = false;
            }
        }
    }
    Ok(classes)
}

/// The quadratic character of discriminant d on the given primes (Kronecker symbol at odd primes).
pub fn quadratic_character(d: i64, primes: &[u64]) -> Result<BTreeMap<u64, BigRational>> {
    primes
        .iter()
        .map(|&l| {
            if l == 2 || d.rem_euclid(l as i64) == 0 {
                return Err(Error::InvalidInput(format!("character of discriminant {d} is ramified or undefined at {l}")));
            }
            let v = crate::arith::legendre(d, l);
            Ok((l, BigRational::from_integer(BigInt::from(v))))
        })
        .collect()
}
