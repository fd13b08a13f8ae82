//! L-packets of the norm-one group: local pairing data, θ-types, the
//! multiplicity formula and the member switch at a ramified place.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::quadratic::squarefree_decompose;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Infinite,
    Finite(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(l) => write!(f, "{l}"),
        }
    }
}

/// ⟨1, π_v⟩ ∈ {1, 2} and ⟨ε, π_v⟩ ∈ {−1, 0, 1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    pub one: u8,
    pub eps: i8,
}

impl Pairing {
    pub fn new(one: u8, eps: i8) -> Result<Self> {
        if !(1..=2).contains(&one) {
            return Err(Error::InvalidPacket(format!("<1,pi> = {one} outside {{1,2}}")));
        }
        if !(-1..=1).contains(&eps) {
            return Err(Error::InvalidPacket(format!("<eps,pi> = {eps} outside {{-1,0,1}}")));
        }
        Ok(Pairing { one, eps })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPacket {
    pub place: Place,
    pub ramified: bool,
    pub pairings: Vec<Pairing>,
    /// Label of the member with a nonzero SL₂(O_v)-fixed vector.
    pub base_member: Option<usize>,
    /// Whether the packet is declared unramified (requires a base member off S_B).
    pub unramified: bool,
    /// The constant c ∈ {1, 2} at ramified places; stored, not used.
    pub c: Option<u8>,
}

impl LocalPacket {
    pub fn new(place: Place, ramified: bool, pairings: Vec<Pairing>, base_member: Option<usize>, unramified: bool, c: Option<u8>) -> Result<Self> {
        let size = pairings.len();
        let allowed: &[usize] = match (place, ramified) {
            (Place::Infinite, _) => &[1],
            (_, true) => &[1, 2],
            (_, false) => &[1, 2, 4],
        };
        if !allowed.contains(&size) {
            return Err(Error::InvalidPacket(format!("size {size} not allowed at place {place}")));
        }
        if ramified && size == 2 {
            let (a, b) = (pairings[0].eps, pairings[1].eps);
            if a != 0 && b != 0 && a == b {
                return Err(Error::InvalidPacket("ramified size-2 packet needs distinct <eps,.>".into()));
            }
        }
        if let Some(b) = base_member {
            if b >= size {
                return Err(Error::InvalidPacket(format!("base member {b} out of range")));
            }
        }
        if !ramified && unramified && base_member.is_none() {
            return Err(Error::InvalidPacket("unramified packet needs a base member".into()));
        }
        if ramified && unramified {
            return Err(Error::InvalidPacket("a place in S_B cannot carry an unramified packet".into()));
        }
        if let Some(c) = c {
            if !(1..=2).contains(&c) {
                return Err(Error::InvalidPacket(format!("c = {c} outside {{1,2}}")));
            }
        }
        Ok(LocalPacket { place, ramified, pairings, base_member, unramified, c })
    }

    pub fn size(&self) -> usize {
        self.pairings.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaExtension {
    /// An extension θ̃ with θ̃(γ) = θ̃(γ̄) was supplied.
    Symmetric,
    /// Evidence that no such extension exists.
    Obstructed,
}

/// A character θ of order n on the norm-one elements of Q(√d), θ = χ for a generator χ of the dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaCharacter {
    pub d: i64,
    pub order: u32,
    pub extension: Option<ThetaExtension>,
}

impl ThetaCharacter {
    pub fn new(d: i64, order: u32, extension: Option<ThetaExtension>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("character order must be positive".into()));
        }
        if d == 0 || d == 1 || squarefree_decompose(&BigInt::from(d)).1 != BigInt::from(1) {
            return Err(Error::InvalidInput(format!("{d} is not a squarefree non-square")));
        }
        Ok(ThetaCharacter { d, order, extension })
    }

    /// Exponent of θ̄ against the generator: γ̄ = γ⁻¹ on norm-one elements, so θ̄ = θ⁻¹.
    pub fn conjugate_exponent(&self) -> u32 {
        (self.order - 1) % self.order
    }

    pub fn is_self_conjugate(&self) -> bool {
        self.conjugate_exponent() == 1 % self.order
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaType {
    A,
    B,
    C,
}

impl fmt::Display for ThetaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ThetaType::A => "a",
            ThetaType::B => "b",
            ThetaType::C => "c",
        };
        write!(f, "{s}")
    }
}

pub fn theta_type(theta: &ThetaCharacter) -> Result<ThetaType> {
    if !theta.is_self_conjugate() {
        return Ok(ThetaType::A);
    }
    match theta.extension {
        Some(ThetaExtension::Symmetric) => Ok(ThetaType::C),
        Some(ThetaExtension::Obstructed) => Ok(ThetaType::B),
        None => Err(Error::UndecidableTheta),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChosenMember {
    pub packet: LocalPacket,
    pub member: usize,
}

impl ChosenMember {
    pub fn pairing(&self) -> Pairing {
        self.packet.pairings[self.member]
    }
}

/// Explicit places with chosen members; every other place uses its base member, with pairings 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalPacketAssignment {
    pub places: Vec<ChosenMember>,
    pub endoscopic: bool,
    pub theta: Option<ThetaCharacter>,
    /// Whether the packet is attached to automorphic forms of a definite algebra.
    pub definite: bool,
}

impl GlobalPacketAssignment {
    pub fn new(places: Vec<ChosenMember>, endoscopic: bool, theta: Option<ThetaCharacter>, definite: bool) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for c in &places {
            if !seen.insert(c.packet.place) {
                return Err(Error::InvalidPacket(format!("place {} listed twice", c.packet.place)));
            }
            if c.member >= c.packet.size() {
                return Err(Error::InvalidPacket(format!("member {} out of range at {}", c.member, c.packet.place)));
            }
        }
        if endoscopic {
            let th = theta.as_ref().ok_or_else(|| Error::InvalidPacket("endoscopic packet needs θ".into()))?;
            if definite {
                match theta_type(th) {
                    Ok(ThetaType::A) => {}
                    Ok(t) => return Err(Error::InvalidPacket(format!("θ of type ({t}) cannot come from a definite algebra"))),
                    Err(e) => return Err(e),
                }
            }
        } else if theta.is_some() {
            return Err(Error::InvalidPacket("θ given for a non-endoscopic packet".into()));
        }
        Ok(GlobalPacketAssignment { places, endoscopic, theta, definite })
    }

    pub fn place_index(&self, w: Place) -> Option<usize> {
        self.places.iter().position(|c| c.packet.place == w)
    }
}

/// m(π) = ½(∏⟨1,π_v⟩ + ∏⟨ε,π_v⟩) for endoscopic packets, 1 otherwise.
pub fn multiplicity(a: &GlobalPacketAssignment) -> Result<u32> {
    if !a.endoscopic {
        return Ok(1);
    }
    let mut one: i64 = 1;
    let mut eps: i64 = 1;
    for c in &a.places {
        let pr = c.pairing();
        one *= pr.one as i64;
        eps *= pr.eps as i64;
    }
    let total = one + eps;
    if total % 2 != 0 || total < 0 {
        return Err(Error::InconsistentPairing);
    }
    Ok((total / 2) as u32)
}

/// Change the member at a ramified place w to reach positive multiplicity.
pub fn switch_member(a: &GlobalPacketAssignment, w: Place) -> Result<GlobalPacketAssignment> {
    if multiplicity(a)? > 0 {
        return Ok(a.clone());
    }
    let idx = a.place_index(w).ok_or(Error::SwitchImpossible)?;
    let chosen = &a.places[idx];
    let pk = &chosen.packet;
    if !pk.ramified || pk.size() != 2 || pk.pairings.iter().any(|p| p.eps == 0) {
        return Err(Error::SwitchImpossible);
    }
    let mut b = a.clone();
    b.places[idx].member = 1 - chosen.member;
    match multiplicity(&b) {
        Ok(m) if m > 0 => Ok(b),
        _ => Err(Error::SwitchImpossible),
    }
}

fn pairing_text(p: &Pairing) -> String {
    format!("{}:{}", p.one, p.eps)
}

/// Structured text form, one line per item.
pub fn assignment_to_text(a: &GlobalPacketAssignment) -> String {
    let mut out = format!("assignment endoscopic={} definite={}\n", a.endoscopic, a.definite);
    if let Some(t) = &a.theta {
        out.push_str(&format!("theta d={} order={}", t.d, t.order));
        match t.extension {
            Some(ThetaExtension::Symmetric) => out.push_str(" extension=symmetric"),
            Some(ThetaExtension::Obstructed) => out.push_str(" extension=obstructed"),
            None => {}
        }
        out.push('\n');
    }
    for c in &a.places {
        let pk = &c.packet;
        let pairs: Vec<String> = pk.pairings.iter().map(pairing_text).collect();
        out.push_str(&format!("place {} ramified={} member={} pairings={}", pk.place, pk.ramified, c.member, pairs.join(",")));
        if let Some(b) = pk.base_member {
            out.push_str(&format!(" base={b}"));
        }
        if pk.unramified {
            out.push_str(" unramified=true");
        }
        if let Some(cc) = pk.c {
            out.push_str(&format!(" c={cc}"));
        }
        out.push('\n');
    }
    out
}

fn parse_bool(v: &str, line: usize) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Parse { line, message: format!("expected true/false, got {v}") }),
    }
}

fn key_values(words: &[&str], line: usize, allowed: &[&str]) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = vec![];
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| Error::Parse { line, message: format!("expected key=value, got {w}") })?;
        if !allowed.contains(&k) {
            return Err(Error::Parse { line, message: format!("unknown key {k}") });
        }
        if out.iter().any(|(kk, _)| kk == k) {
            return Err(Error::Parse { line, message: format!("duplicate key {k}") });
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn get<'a>(kv: &'a [(String, String)], key: &str) -> Option<&'a str> {
    kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn num<T: std::str::FromStr>(v: &str, line: usize) -> Result<T> {
    v.parse().map_err(|_| Error::Parse { line, message: format!("bad number {v}") })
}

pub fn parse_assignment(text: &str) -> Result<GlobalPacketAssignment> {
    let mut header: Option<(bool, bool)> = None;
    let mut theta = None;
    let mut places = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap().trim();
        if l.is_empty() {
            continue;
        }
        let words: Vec<&str> = l.split_whitespace().collect();
        let perr = |m: &str| Error::Parse { line, message: m.to_string() };
        match words[0] {
            "assignment" => {
                if header.is_some() {
                    return Err(perr("duplicate header"));
                }
                let kv = key_values(&words[1..], line, &["endoscopic", "definite"])?;
                let e = parse_bool(get(&kv, "endoscopic").ok_or_else(|| perr("missing endoscopic"))?, line)?;
                let d = parse_bool(get(&kv, "definite").ok_or_else(|| perr("missing definite"))?, line)?;
                header = Some((e, d));
            }
            "theta" => {
                if header.is_none() || theta.is_some() {
                    return Err(perr("theta line out of place"));
                }
                let kv = key_values(&words[1..], line, &["d", "order", "extension"])?;
                let d = num(get(&kv, "d").ok_or_else(|| perr("missing d"))?, line)?;
                let order = num(get(&kv, "order").ok_or_else(|| perr("missing order"))?, line)?;
                let ext = match get(&kv, "extension") {
                    None => None,
                    Some("symmetric") => Some(ThetaExtension::Symmetric),
                    Some("obstructed") => Some(ThetaExtension::Obstructed),
                    Some(_) => return Err(perr("extension must be symmetric or obstructed")),
                };
                theta = Some(ThetaCharacter::new(d, order, ext)?);
            }
            "place" => {
                if header.is_none() || words.len() < 2 {
                    return Err(perr("place line out of place"));
                }
                let place = if words[1] == "inf" { Place::Infinite } else { Place::Finite(num(words[1], line)?) };
                let kv = key_values(&words[2..], line, &["ramified", "member", "pairings", "base", "unramified", "c"])?;
                let ramified = parse_bool(get(&kv, "ramified").ok_or_else(|| perr("missing ramified"))?, line)?;
                let member = num(get(&kv, "member").ok_or_else(|| perr("missing member"))?, line)?;
                let pairings = get(&kv, "pairings")
                    .ok_or_else(|| perr("missing pairings"))?
                    .split(',')
                    .map(|s| {
                        let (a, b) = s.split_once(':').ok_or_else(|| perr("pairing must be one:eps"))?;
                        Pairing::new(num(a, line)?, num(b, line)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let base = get(&kv, "base").map(|v| num(v, line)).transpose()?;
                let unram = get(&kv, "unramified").map(|v| parse_bool(v, line)).transpose()?.unwrap_or(false);
                let c = get(&kv, "c").map(|v| num(v, line)).transpose()?;
                places.push(ChosenMember { packet: LocalPacket::new(place, ramified, pairings, base, unram, c)?, member });
            }
            other => return Err(perr(&format!("unknown line kind {other}"))),
        }
    }
    let (endo, definite) = header.ok_or(Error::Parse { line: 1, message: "missing assignment header".into() })?;
    GlobalPacketAssignment::new(places, endo, theta, definite)
}
