//! Algebraic weights, their torsion components, the restriction map to the
//! norm-one torus, and the analyticity radius of a character.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, vp_u64};
use crate::error::{Error, Result};
use crate::padic::{Rational, Valuation};

/// (k₁, k₂) with k₁ ≥ k₂, the character (z₁, z₂) ↦ z₁^k₁ z₂^k₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlgebraicWeightGL2 {
    pub k1: i64,
    pub k2: i64,
}

impl AlgebraicWeightGL2 {
    pub fn new(k1: i64, k2: i64) -> Result<Self> {
        if k1 < k2 {
            return Err(Error::InvalidWeight(format!("need k1 >= k2, got ({k1},{k2})")));
        }
        Ok(AlgebraicWeightGL2 { k1, k2 })
    }

    /// k₁ − k₂, the degree of the symmetric power.
    pub fn diff(&self) -> u32 {
        (self.k1 - self.k2) as u32
    }
}

impl fmt::Display for AlgebraicWeightGL2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k1, self.k2)
    }
}

/// Weight k ≥ 0 of the norm-one group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlgebraicWeightSL2 {
    pub k: u32,
}

/// Restriction along x ↦ (x, x⁻¹).
pub fn mu(w: AlgebraicWeightGL2) -> AlgebraicWeightSL2 {
    AlgebraicWeightSL2 { k: w.diff() }
}

/// Number of torsion characters of Z_p^*.
pub fn torsion_order(p: u64) -> u64 {
    if p == 2 {
        2
    } else {
        p - 1
    }
}

/// A component of weight space: exponents of the Teichmüller character, one per torus factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightComponent {
    pub p: u64,
    pub labels: Vec<u64>,
}

impl WeightComponent {
    /// Contract a pair (ω^a, ω^b) to ω^(a−b).
    pub fn contract(&self) -> WeightComponent {
        assert_eq!(self.labels.len(), 2);
        let n = torsion_order(self.p);
        WeightComponent { p: self.p, labels: vec![(self.labels[0] + n - self.labels[1]) % n] }
    }

    pub fn is_trivial(&self) -> bool {
        self.labels.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for WeightComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .labels
            .iter()
            .map(|&a| match a {
                0 => "1".to_string(),
                1 => "w".to_string(),
                _ => format!("w^{a}"),
            })
            .collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(","))
        }
    }
}

fn label(p: u64, k: i64) -> u64 {
    k.mod_floor(&(torsion_order(p) as i64)) as u64
}

/// A character z ↦ z^k · ω(z)^twist of Z_p^*.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightCharacter {
    pub p: u64,
    pub k: i64,
    pub twist: u64,
}

impl WeightCharacter {
    pub fn algebraic(p: u64, k: i64) -> Result<Self> {
        Self::twisted(p, k, 0)
    }

    pub fn twisted(p: u64, k: i64, twist: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(WeightCharacter { p, k, twist: twist % torsion_order(p) })
    }

    pub fn is_trivial(&self) -> bool {
        self.k == 0 && self.twist == 0
    }

    /// v_p(κ(1 + p^j) − 1) for j ≥ 1.
    pub fn unit_valuation(&self, j: u32) -> Valuation {
        let p = self.p;
        let k = self.k.unsigned_abs();
        // the torsion twist only sees 1 + p^j when p = 2 and j = 1, where 3 = −1·(−3)
        let flipped = p == 2 && j == 1 && self.twist % 2 == 1;
        if k == 0 {
            return if flipped { Valuation::Finite(1) } else { Valuation::Infinite };
        }
        let vk = vp_u64(k, p).unwrap() as i64;
        if p == 2 && j == 1 {
            // 3^k − 1 and 3^k + 1
            return if flipped {
                Valuation::Finite(if k % 2 == 1 { 2 } else { 1 })
            } else if k % 2 == 1 {
                Valuation::Finite(1)
            } else {
                Valuation::Finite(2 + vk)
            };
        }
        Valuation::Finite(j as i64 + vk)
    }
}

/// Torsion label of a character of Z_p^*.
pub fn component_of_character(chr: &WeightCharacter) -> WeightComponent {
    WeightComponent { p: chr.p, labels: vec![label(chr.p, chr.k + chr.twist as i64)] }
}

pub fn component_of_sl2(p: u64, w: AlgebraicWeightSL2) -> WeightComponent {
    WeightComponent { p, labels: vec![label(p, w.k as i64)] }
}

pub fn component_of_gl2(p: u64, w: AlgebraicWeightGL2) -> WeightComponent {
    WeightComponent { p, labels: vec![label(p, w.k1), label(p, w.k2)] }
}

fn exceeds_threshold(v: Valuation, p: u64) -> bool {
    match v {
        Valuation::Infinite => true,
        Valuation::Finite(v) => Rational::from_integer(v) > Rational::new(1, p as i64 - 1),
    }
}

/// Minimal k' ≥ 0 such that the character is analytic on 1 + p^k'Z_p.
pub fn k_of_character(chr: &WeightCharacter) -> u32 {
    if chr.is_trivial() {
        return 0;
    }
    let mut j = 1;
    while !exceeds_threshold(chr.unit_valuation(j), chr.p) {
        j += 1;
    }
    j
}

/// A disc of characters: all κ with v(κ(γ) − 1) ≥ min(v_center, r), γ the
/// topological generator 1 + p (or 5 when p = 2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterDisc {
    pub p: u64,
    pub center_valuation: Valuation,
    pub radius: Rational,
}

impl CharacterDisc {
    pub fn around(chr: &WeightCharacter, radius: Rational) -> Self {
        let j = if chr.p == 2 { 2 } else { 1 };
        CharacterDisc { p: chr.p, center_valuation: chr.unit_valuation(j), radius }
    }
}

/// Minimal k' that works for every character in the disc.
pub fn k_of_disc(disc: &CharacterDisc) -> u32 {
    let p = disc.p as i64;
    let threshold = Rational::new(1, p - 1);
    let mut v = match disc.center_valuation {
        Valuation::Infinite => disc.radius,
        Valuation::Finite(c) => Rational::from_integer(c).min(disc.radius),
    };
    let mut k = if p == 2 { 2 } else { 1 };
    while v <= threshold {
        v = (v * Rational::from_integer(p)).min(v + Rational::from_integer(1));
        k += 1;
    }
    k
}

/// Minimal i with r ≥ 1/i: the index of the closed disc of radius p^(−1/i) containing a disc of radius p^(−r).
pub fn cover_index(r: Rational) -> Result<u64> {
    if r <= Rational::from_integer(0) {
        return Err(Error::InvalidInput("radius exponent must be positive".into()));
    }
    let inv = r.recip();
    Ok(inv.ceil().to_integer() as u64)
}
