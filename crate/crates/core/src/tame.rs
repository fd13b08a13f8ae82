//! Congruence levels at a prime l and the Langlands-compatible SL₂ level attached
//! to a GL₂ level: the intersection of the conjugates by diag(1, t) over the
//! square classes t of Q_l^×.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::arith::{is_prime, legendre};
use crate::error::{Error, Result};

/// Deepest supported congruence depth.
pub const MAX_DEPTH: u32 = 4;
/// Largest l^n for which explicit subgroups are enumerated.
const MAX_EXPLICIT_MODULUS: i64 = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Gl2,
    Sl2,
}

/// (a, b, c, d) reduced mod l^n.
pub type Mat = [i64; 4];

/// {M : b ∈ l^β, c ∈ l^γ, a ≡ d ≡ 1 mod l^δ}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxLevel {
    pub b: u32,
    pub c: u32,
    pub diag: u32,
}

impl BoxLevel {
    pub fn depth(&self) -> u32 {
        self.b.max(self.c).max(self.diag)
    }

    fn contains(&self, l: i64, m: &Mat, modulus: i64) -> bool {
        let div = |x: i64, e: u32| x.rem_euclid(l.pow(e).min(modulus)) == 0;
        div(m[1], self.b) && div(m[2], self.c) && div(m[0] - 1, self.diag) && div(m[3] - 1, self.diag)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Box(BoxLevel),
    /// The full preimage of a subgroup of the matrix group mod l^depth.
    Explicit { depth: u32, elements: BTreeSet<Mat> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CatalogTag {
    FullGl2,
    FullSl2,
    Iwahori,
    OppositeIwahori(u32),
    Principal(u32),
    Congruence,
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceLevel {
    pub l: u64,
    pub side: Side,
    pub tag: CatalogTag,
    pub shape: Shape,
}

fn check_prime(l: u64) -> Result<()> {
    if !is_prime(l) {
        return Err(Error::InvalidLevel(format!("{l} is not prime")));
    }
    Ok(())
}

impl CongruenceLevel {
    pub fn boxed(l: u64, side: Side, b: u32, c: u32, diag: u32) -> Result<Self> {
        check_prime(l)?;
        if diag > 0 && b + c < diag {
            return Err(Error::InvalidLevel(format!("congruence data ({b},{c},{diag}) is not closed under products")));
        }
        let bx = BoxLevel { b, c, diag };
        if bx.depth() > MAX_DEPTH {
            return Err(Error::DepthOverflow);
        }
        Ok(CongruenceLevel { l, side, tag: tag_of(side, bx), shape: Shape::Box(bx) })
    }

    pub fn full_gl2(l: u64) -> Result<Self> {
        Self::boxed(l, Side::Gl2, 0, 0, 0)
    }

    pub fn full_sl2(l: u64) -> Result<Self> {
        Self::boxed(l, Side::Sl2, 0, 0, 0)
    }

    pub fn iwahori(l: u64, side: Side) -> Result<Self> {
        Self::boxed(l, side, 0, 1, 0)
    }

    pub fn opposite_iwahori(l: u64, side: Side, m: u32) -> Result<Self> {
        Self::boxed(l, side, m, 0, 0)
    }

    pub fn principal(l: u64, side: Side, m: u32) -> Result<Self> {
        Self::boxed(l, side, m, m, m)
    }

    /// The subgroup generated by matrices mod l^depth, on the given side.
    pub fn explicit(l: u64, side: Side, depth: u32, generators: &[Mat]) -> Result<Self> {
        check_prime(l)?;
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::DepthOverflow);
        }
        let modulus = (l as i64).pow(depth);
        if modulus > MAX_EXPLICIT_MODULUS {
            return Err(Error::DepthOverflow);
        }
        let mut gens = vec![];
        for g in generators {
            let g = reduce(g, modulus);
            let det = (g[0] * g[3] - g[1] * g[2]).rem_euclid(modulus);
            let ok = match side {
                Side::Sl2 => det == 1,
                Side::Gl2 => det % l as i64 != 0,
            };
            if !ok {
                return Err(Error::InvalidLevel(format!("generator {g:?} is not in the {side} group mod {modulus}")));
            }
            gens.push(g);
        }
        let elements = closure(&gens, modulus);
        Ok(CongruenceLevel { l, side, tag: CatalogTag::Explicit, shape: Shape::Explicit { depth, elements } })
    }

    pub fn depth(&self) -> u32 {
        match &self.shape {
            Shape::Box(b) => b.depth(),
            Shape::Explicit { depth, .. } => *depth,
        }
    }

    /// Membership of an integral matrix known modulo l^n with n ≥ depth.
    pub fn contains(&self, m: &Mat, n: u32) -> bool {
        let l = self.l as i64;
        let modulus = l.pow(n);
        let det = (m[0] * m[3] - m[1] * m[2]).rem_euclid(modulus);
        let side_ok = match self.side {
            Side::Sl2 => det == 1 % modulus,
            Side::Gl2 => det % l != 0,
        };
        if !side_ok {
            return false;
        }
        match &self.shape {
            Shape::Box(b) => b.contains(l, m, modulus),
            Shape::Explicit { depth, elements } => {
                let md = l.pow(*depth);
                elements.contains(&reduce(m, md))
            }
        }
    }

    /// All members mod l^n on this level's side.
    pub fn elements_mod(&self, n: u32) -> Vec<Mat> {
        let group = match self.side {
            Side::Sl2 => sl2_elements(self.l, n),
            Side::Gl2 => gl2_elements(self.l, n),
        };
        group.into_iter().filter(|m| self.contains(m, n)).collect()
    }
}

fn tag_of(side: Side, b: BoxLevel) -> CatalogTag {
    match (b.b, b.c, b.diag) {
        (0, 0, 0) => match side {
            Side::Gl2 => CatalogTag::FullGl2,
            Side::Sl2 => CatalogTag::FullSl2,
        },
        (0, 1, 0) => CatalogTag::Iwahori,
        (m, 0, 0) => CatalogTag::OppositeIwahori(m),
        (m, n, k) if m == n && n == k => CatalogTag::Principal(m),
        _ => CatalogTag::Congruence,
    }
}

fn reduce(m: &Mat, modulus: i64) -> Mat {
    [m[0].rem_euclid(modulus), m[1].rem_euclid(modulus), m[2].rem_euclid(modulus), m[3].rem_euclid(modulus)]
}

fn mat_mul(x: &Mat, y: &Mat, modulus: i64) -> Mat {
    reduce(&[x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]], modulus)
}

fn closure(gens: &[Mat], modulus: i64) -> BTreeSet<Mat> {
    let id = [1 % modulus, 0, 0, 1 % modulus];
    let mut seen = BTreeSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = mat_mul(&x, g, modulus);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Whether a set of matrices mod l^n is closed under products (finite sets: a subgroup).
pub fn is_closed(elements: &BTreeSet<Mat>, modulus: i64) -> bool {
    elements.iter().all(|x| elements.iter().all(|y| elements.contains(&mat_mul(x, y, modulus))))
}

fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1, mut s0, mut s1) = (a.rem_euclid(m), m, 1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

/// SL₂(Z/l^n), listed by solving for the last free entry.
pub fn sl2_elements(l: u64, n: u32) -> Vec<Mat> {
    let l = l as i64;
    let m = l.pow(n);
    let mut out = vec![];
    for a in 0..m {
        if a % l != 0 {
            let ai = inv_mod(a, m).unwrap();
            for b in 0..m {
                for c in 0..m {
                    out.push([a, b, c, (ai * (1 + b * c)).rem_euclid(m)]);
                }
            }
        } else {
            for b in (0..m).filter(|b| b % l != 0) {
                let bi = inv_mod(b, m).unwrap();
                for d in 0..m {
                    out.push([a, b, (bi * (a * d - 1)).rem_euclid(m), d]);
                }
            }
        }
    }
    out
}

/// GL₂(Z/l^n).
pub fn gl2_elements(l: u64, n: u32) -> Vec<Mat> {
    let li = l as i64;
    let m = li.pow(n);
    let units: Vec<i64> = (0..m).filter(|u| u % li != 0).collect();
    let mut out = vec![];
    for s in sl2_elements(l, n) {
        for &u in &units {
            // multiply the second column by u
            out.push([s[0], (s[1] * u) % m, s[2], (s[3] * u) % m]);
        }
    }
    out
}

/// Representatives t of Q_l^×/(Q_l^×)²; the coset representatives are diag(1, t).
pub fn coset_reps(l: u64) -> Result<Vec<i64>> {
    check_prime(l)?;
    if l == 2 {
        return Ok(vec![1, -1, 5, -5, 2, -2, 10, -10]);
    }
    let u = (2..l as i64).find(|&u| legendre(u, l) == -1).expect("odd primes have non-residues");
    let li = l as i64;
    Ok(vec![1, u, li, u * li])
}

fn vl(t: i64, l: u64) -> u32 {
    crate::arith::vp_u64(t.unsigned_abs(), l).unwrap_or(0)
}

/// Integral part of diag(1,t)⁻¹·K·diag(1,t) for a box: b gains v(t), c loses it.
fn conjugate_box(b: BoxLevel, v: u32) -> BoxLevel {
    BoxLevel { b: b.b + v, c: b.c.saturating_sub(v), diag: b.diag }
}

fn meet(x: BoxLevel, y: BoxLevel) -> BoxLevel {
    BoxLevel { b: x.b.max(y.b), c: x.c.max(y.c), diag: x.diag.max(y.diag) }
}

/// Whether M lies in diag(1,t)⁻¹·K·diag(1,t): the matrix (a, b/t; tc, d) must be integral and in K.
fn in_conjugate(k: &CongruenceLevel, t: i64, m: &Mat, n: u32) -> bool {
    let l = k.l as i64;
    let v = vl(t, k.l);
    let unit = t / l.pow(v);
    let modulus = l.pow(n);
    if m[1].rem_euclid(l.pow(v).min(modulus)) != 0 && v > 0 {
        return false;
    }
    if n < v || n - v < k.depth() {
        return false;
    }
    let md = l.pow(n - v);
    let ui = inv_mod(unit, md).expect("unit part");
    let b = (m[1] / l.pow(v)) * ui;
    let c = m[2] * t;
    k.contains(&reduce(&[m[0], b, c, m[3]], md), n - v)
}

/// K = ⋂_t diag(1,t)⁻¹ (K̃ ∩ SL₂) diag(1,t), over the square-class representatives t.
pub fn compatible_local_level(kt: &CongruenceLevel) -> Result<CongruenceLevel> {
    let reps = coset_reps(kt.l)?;
    match &kt.shape {
        Shape::Box(b) => {
            let mut out = *b;
            for t in &reps {
                out = meet(out, conjugate_box(*b, vl(*t, kt.l)));
            }
            if out.depth() > MAX_DEPTH {
                return Err(Error::DepthOverflow);
            }
            CongruenceLevel::boxed(kt.l, Side::Sl2, out.b, out.c, out.diag)
        }
        Shape::Explicit { depth, .. } => {
            let n = depth + 1;
            let l = kt.l as i64;
            if n > MAX_DEPTH || l.pow(n) > MAX_EXPLICIT_MODULUS {
                return Err(Error::DepthOverflow);
            }
            let mut sl_side = kt.clone();
            sl_side.side = Side::Sl2;
            let members: BTreeSet<Mat> = sl2_elements(kt.l, n).into_iter().filter(|m| reps.iter().all(|t| in_conjugate(&sl_side, *t, m, n))).collect();
            Ok(minimize_depth(kt.l, n, members))
        }
    }
}

/// SL₂(Z/l^n) ∩ ⋂_t diag(1,t)⁻¹ K̃ diag(1,t), element by element; needs n > depth(K̃).
pub fn brute_force_intersection(kt: &CongruenceLevel, n: u32) -> Result<BTreeSet<Mat>> {
    if n <= kt.depth() {
        return Err(Error::InvalidLevel(format!("brute force needs depth above {}", kt.depth())));
    }
    let reps = coset_reps(kt.l)?;
    let mut sl_side = kt.clone();
    sl_side.side = Side::Sl2;
    Ok(sl2_elements(kt.l, n).into_iter().filter(|m| reps.iter().all(|t| in_conjugate(&sl_side, *t, m, n))).collect())
}

/// Compares K with the brute-force intersection mod l^n.
pub fn verify_against_brute_force(kt: &CongruenceLevel, k: &CongruenceLevel, n: u32) -> Result<bool> {
    let expected = brute_force_intersection(kt, n)?;
    let ours: BTreeSet<Mat> = k.elements_mod(n).into_iter().collect();
    Ok(ours == expected)
}

/// Re-express an explicit SL₂ subgroup mod l^n at the smallest depth whose preimage it is.
fn minimize_depth(l: u64, n: u32, members: BTreeSet<Mat>) -> CongruenceLevel {
    let li = l as i64;
    let full = sl2_elements(l, n).len();
    let mut depth = n;
    let mut elements = members.clone();
    for d in (1..n).rev() {
        let md = li.pow(d);
        let reduced: BTreeSet<Mat> = members.iter().map(|m| reduce(m, md)).collect();
        // full preimage iff the fibres are complete
        let fibre = full / sl2_elements(l, d).len();
        if reduced.len() * fibre == members.len() {
            depth = d;
            elements = reduced;
        } else {
            break;
        }
    }
    CongruenceLevel { l, side: Side::Sl2, tag: CatalogTag::Explicit, shape: Shape::Explicit { depth, elements } }
}

/// Whether each conjugate diag(1,t)⁻¹·K·diag(1,t) meets SL₂(Z_l) inside K.
pub fn verify_conjugation_invariance(k: &CongruenceLevel) -> Result<bool> {
    let reps = coset_reps(k.l)?;
    match &k.shape {
        Shape::Box(b) => Ok(reps.iter().all(|t| {
            let c = conjugate_box(*b, vl(*t, k.l));
            c.b >= b.b && c.c >= b.c && c.diag >= b.diag
        })),
        Shape::Explicit { depth, .. } => {
            let n = depth + 1;
            let candidates = sl2_elements(k.l, n);
            Ok(reps.iter().all(|t| candidates.iter().filter(|m| in_conjugate(k, *t, m, n)).all(|m| k.contains(m, n))))
        }
    }
}

/// Levels at finitely many primes away from p; maximal compact elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TameLevel {
    pub p: u64,
    pub side: Side,
    pub levels: BTreeMap<u64, CongruenceLevel>,
}

impl TameLevel {
    pub fn new(p: u64, side: Side, levels: BTreeMap<u64, CongruenceLevel>) -> Result<Self> {
        if levels.contains_key(&p) {
            return Err(Error::InvalidLevel(format!("tame level cannot involve p = {p}")));
        }
        for (l, k) in &levels {
            if k.l != *l || k.side != side {
                return Err(Error::InvalidLevel(format!("level at {l} does not match its key or side")));
            }
        }
        Ok(TameLevel { p, side, levels })
    }

    pub fn level_at(&self, l: u64) -> Result<CongruenceLevel> {
        match self.levels.get(&l) {
            Some(k) => Ok(k.clone()),
            None => match self.side {
                Side::Gl2 => CongruenceLevel::full_gl2(l),
                Side::Sl2 => CongruenceLevel::full_sl2(l),
            },
        }
    }
}

/// SL₂(Z_l) off the explicit set, the compatible local level on it.
pub fn global_compatible_level(kt: &TameLevel, ramified_finite: &[u64]) -> Result<TameLevel> {
    if ramified_finite.is_empty() {
        return Err(Error::NoFiniteRamification);
    }
    let mut out = BTreeMap::new();
    for (l, k) in &kt.levels {
        out.insert(*l, compatible_local_level(k)?);
    }
    TameLevel::new(kt.p, Side::Sl2, out)
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Gl2 => write!(f, "gl2"),
            Side::Sl2 => write!(f, "sl2"),
        }
    }
}

impl fmt::Display for CongruenceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level l={} side={}", self.l, self.side)?;
        match &self.shape {
            Shape::Box(b) => {
                let tag = match self.tag {
                    CatalogTag::FullGl2 | CatalogTag::FullSl2 => "full".to_string(),
                    CatalogTag::Iwahori => "iwahori".to_string(),
                    CatalogTag::OppositeIwahori(m) => format!("opposite-iwahori:{m}"),
                    CatalogTag::Principal(m) => format!("principal:{m}"),
                    _ => format!("box:{},{},{}", b.b, b.c, b.diag),
                };
                write!(f, " {tag}")
            }
            Shape::Explicit { depth, elements } => {
                let es: Vec<String> = elements.iter().map(|m| format!("{},{},{},{}", m[0], m[1], m[2], m[3])).collect();
                write!(f, " depth={depth} elements={}", es.join(";"))
            }
        }
    }
}

/// `level l=<prime> side=<gl2|sl2> <full|iwahori|opposite-iwahori:m|principal:m|box:b,c,δ>`
/// or `level l=.. side=.. depth=n gens=a,b,c,d;...` (also `elements=` for a full list).
pub fn parse_level(line: &str) -> Result<CongruenceLevel> {
    let perr = |m: String| Error::Parse { line: 1, message: m };
    let words: Vec<&str> = line.split_whitespace().collect();
    if words.first() != Some(&"level") {
        return Err(perr("expected 'level'".into()));
    }
    let mut l = None;
    let mut side = None;
    let mut depth = None;
    let mut gens: Option<Vec<Mat>> = None;
    let mut elems: Option<Vec<Mat>> = None;
    let mut shape: Option<&str> = None;
    let parse_mats = |v: &str| -> Result<Vec<Mat>> {
        v.split(';')
            .map(|m| {
                let xs: Vec<i64> = m.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| perr(format!("bad entry {x}")))).collect::<Result<_>>()?;
                if xs.len() != 4 {
                    return Err(perr("matrices have four entries".into()));
                }
                Ok([xs[0], xs[1], xs[2], xs[3]])
            })
            .collect()
    };
    for w in &words[1..] {
        match w.split_once('=') {
            Some(("l", v)) => l = Some(v.parse::<u64>().map_err(|_| perr(format!("bad prime {v}")))?),
            Some(("side", "gl2")) => side = Some(Side::Gl2),
            Some(("side", "sl2")) => side = Some(Side::Sl2),
            Some(("depth", v)) => depth = Some(v.parse::<u32>().map_err(|_| perr(format!("bad depth {v}")))?),
            Some(("gens", v)) => gens = Some(parse_mats(v)?),
            Some(("elements", v)) => elems = Some(parse_mats(v)?),
            Some((k, _)) => return Err(perr(format!("unknown key {k}"))),
            None if shape.is_none() => shape = Some(w),
            None => return Err(perr(format!("unexpected word {w}"))),
        }
    }
    let l = l.ok_or_else(|| perr("missing l".into()))?;
    let side = side.ok_or_else(|| perr("missing or bad side".into()))?;
    if let Some(d) = depth {
        let list = gens.or(elems).ok_or_else(|| perr("explicit level needs gens".into()))?;
        return CongruenceLevel::explicit(l, side, d, &list);
    }
    let shape = shape.ok_or_else(|| perr("missing level shape".into()))?;
    let num = |s: &str| s.parse::<u32>().map_err(|_| perr(format!("bad exponent {s}")));
    match shape.split_once(':') {
        None if shape == "full" => CongruenceLevel::boxed(l, side, 0, 0, 0),
        None if shape == "iwahori" => CongruenceLevel::iwahori(l, side),
        Some(("opposite-iwahori", m)) => CongruenceLevel::opposite_iwahori(l, side, num(m)?),
        Some(("principal", m)) => CongruenceLevel::principal(l, side, num(m)?),
        Some(("box", v)) => {
            let xs: Vec<u32> = v.split(',').map(num).collect::<Result<_>>()?;
            if xs.len() != 3 {
                return Err(perr("box needs three exponents".into()));
            }
            CongruenceLevel::boxed(l, side, xs[0], xs[1], xs[2])
        }
        _ => Err(perr(format!("unknown level shape {shape}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Literal intersection: M ∈ SL₂(Z/l^n) lies in every conjugate when each t·(conjugated matrix)
    /// lifts to an integral matrix satisfying the defining congruences of K̃.
    fn oracle(l: u64, n: u32, pred: impl Fn(&[i64; 4], i64) -> bool) -> BTreeSet<Mat> {
        let li = l as i64;
        let reps = coset_reps(l).unwrap();
        sl2_elements(l, n)
            .into_iter()
            .filter(|m| {
                reps.iter().all(|&t| {
                    let v = vl(t, l);
                    let pv = li.pow(v);
                    if m[1] % pv != 0 {
                        return false;
                    }
                    // g M g⁻¹ = (a, b/t; tc, d), known modulo l^(n-v)
                    let md = li.pow(n - v);
                    let u = t / pv;
                    let ui = inv_mod(u, md).unwrap();
                    pred(&[m[0], (m[1] / pv * ui).rem_euclid(md), (m[2] * t).rem_euclid(md), m[3]], md)
                })
            })
            .collect()
    }

    #[test]
    fn reps() {
        assert_eq!(coset_reps(3).unwrap(), vec![1, 2, 3, 6]);
        assert_eq!(coset_reps(5).unwrap(), vec![1, 2, 5, 10]);
        let r2 = coset_reps(2).unwrap();
        assert_eq!(r2.len(), 8);
        // pairwise distinct square classes: odd unit squares are ≡ 1 mod 8
        let squares: BTreeSet<i64> = (1..16).step_by(2).map(|x| x * x % 16).collect();
        assert_eq!(squares, BTreeSet::from([1, 9]));
        for (i, &x) in r2.iter().enumerate() {
            for &y in &r2[i + 1..] {
                let same_parity = vl(x, 2) % 2 == vl(y, 2) % 2;
                let ux = x / 2i64.pow(vl(x, 2));
                let uy = y / 2i64.pow(vl(y, 2));
                assert!(!(same_parity && (ux * uy).rem_euclid(8) == 1));
            }
        }
    }

    #[test]
    fn gl2_gives_opposite_iwahori() {
        for l in [3u64, 5, 7] {
            let k = compatible_local_level(&CongruenceLevel::full_gl2(l).unwrap()).unwrap();
            assert_eq!(k.tag, CatalogTag::OppositeIwahori(1));
            let li = l as i64;
            let o = oracle(l, 2, |_, _| true);
            let ours: BTreeSet<Mat> = k.elements_mod(2).into_iter().collect();
            assert_eq!(ours, o);
            assert!(o.iter().all(|m| m[1] % li == 0));
            assert!(verify_conjugation_invariance(&k).unwrap());
        }
    }

    #[test]
    fn iwahori_intersection() {
        let l = 3u64;
        let k = compatible_local_level(&CongruenceLevel::iwahori(l, Side::Gl2).unwrap()).unwrap();
        assert_eq!(k.shape, Shape::Box(BoxLevel { b: 1, c: 1, diag: 0 }));
        let o = oracle(l, 3, |m, _| m[2] % 3 == 0);
        let ours: BTreeSet<Mat> = k.elements_mod(3).into_iter().collect();
        assert_eq!(ours, o);
        assert!(verify_against_brute_force(&CongruenceLevel::iwahori(7, Side::Gl2).unwrap(), &compatible_local_level(&CongruenceLevel::iwahori(7, Side::Gl2).unwrap()).unwrap(), 2).unwrap());
        assert!(!verify_conjugation_invariance(&CongruenceLevel::iwahori(l, Side::Sl2).unwrap()).unwrap());
        assert!(verify_conjugation_invariance(&CongruenceLevel::full_sl2(l).unwrap()).unwrap());
    }

    #[test]
    fn principal_level_moves_under_conjugation() {
        let k = compatible_local_level(&CongruenceLevel::principal(3, Side::Gl2, 2).unwrap()).unwrap();
        assert_eq!(k.shape, Shape::Box(BoxLevel { b: 3, c: 2, diag: 2 }));
        let o = oracle(3, 4, |m, md| m[1] % 9 == 0 && m[2] % 9 == 0 && (m[0] - 1).rem_euclid(md) % 9 == 0 && (m[3] - 1).rem_euclid(md) % 9 == 0);
        let ours: BTreeSet<Mat> = k.elements_mod(4).into_iter().collect();
        assert_eq!(ours, o);
    }

    #[test]
    fn explicit_levels_agree_with_boxes() {
        // the Iwahori subgroup mod 3 given by generators
        let iw = CongruenceLevel::explicit(3, Side::Gl2, 1, &[[1, 1, 0, 1], [2, 0, 0, 1], [1, 0, 0, 2]]).unwrap();
        assert!(is_closed(match &iw.shape {
            Shape::Explicit { elements, .. } => elements,
            _ => unreachable!(),
        }, 3));
        let k = compatible_local_level(&iw).unwrap();
        let boxed = compatible_local_level(&CongruenceLevel::iwahori(3, Side::Gl2).unwrap()).unwrap();
        let a: BTreeSet<Mat> = k.elements_mod(2).into_iter().collect();
        let b: BTreeSet<Mat> = boxed.elements_mod(2).into_iter().collect();
        assert_eq!(a, b);
        assert_eq!(k.depth(), 1);
        assert!(verify_conjugation_invariance(&k).unwrap() == verify_conjugation_invariance(&boxed).unwrap());
        assert_eq!(CongruenceLevel::explicit(7, Side::Gl2, 4, &[]), Err(Error::DepthOverflow));
    }

    #[test]
    fn catalog_levels_are_subgroups() {
        for l in [2u64, 3] {
            for lvl in [
                CongruenceLevel::full_gl2(l).unwrap(),
                CongruenceLevel::iwahori(l, Side::Sl2).unwrap(),
                CongruenceLevel::principal(l, Side::Gl2, 1).unwrap(),
                CongruenceLevel::boxed(l, Side::Sl2, 1, 1, 2).unwrap(),
            ] {
                let n = 2;
                let s: BTreeSet<Mat> = lvl.elements_mod(n).into_iter().collect();
                assert!(is_closed(&s, (l as i64).pow(n)), "{lvl}");
            }
        }
        assert!(CongruenceLevel::boxed(3, Side::Sl2, 0, 1, 2).is_err());
    }

    #[test]
    fn global_levels() {
        let empty = TameLevel::new(3, Side::Gl2, BTreeMap::new()).unwrap();
        let g = global_compatible_level(&empty, &[2]).unwrap();
        assert!(g.levels.is_empty());
        assert_eq!(g.level_at(5).unwrap(), CongruenceLevel::full_sl2(5).unwrap());
        assert_eq!(global_compatible_level(&empty, &[]), Err(Error::NoFiniteRamification));
        let kt = TameLevel::new(5, Side::Gl2, BTreeMap::from([(3, CongruenceLevel::full_gl2(3).unwrap()), (7, CongruenceLevel::iwahori(7, Side::Gl2).unwrap())])).unwrap();
        let g = global_compatible_level(&kt, &[2]).unwrap();
        assert_eq!(g.levels[&3].tag, CatalogTag::OppositeIwahori(1));
        assert_eq!(g.levels[&7].shape, Shape::Box(BoxLevel { b: 1, c: 1, diag: 0 }));
        assert!(TameLevel::new(3, Side::Gl2, BTreeMap::from([(3, CongruenceLevel::full_gl2(3).unwrap())])).is_err());
    }

    #[test]
    fn text_round_trip() {
        for lvl in [
            CongruenceLevel::iwahori(7, Side::Gl2).unwrap(),
            CongruenceLevel::principal(3, Side::Sl2, 2).unwrap(),
            CongruenceLevel::boxed(5, Side::Sl2, 2, 1, 1).unwrap(),
            CongruenceLevel::explicit(3, Side::Sl2, 1, &[[1, 1, 0, 1]]).unwrap(),
        ] {
            let text = lvl.to_string();
            assert_eq!(parse_level(&text).unwrap(), lvl, "{text}");
        }
        assert!(parse_level("level l=4 side=gl2 full").is_err());
        assert!(parse_level("level l=3 side=gl2 colour=red").is_err());
    }
}
