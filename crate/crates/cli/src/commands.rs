use std::collections::BTreeMap;

use eigentransfer::overconvergent::{overconvergent_operator, OperatorKind};
use eigentransfer::packets::{multiplicity, parse_assignment, switch_member, theta_type, Place, ThetaCharacter, ThetaExtension};
use eigentransfer::quaternion::{catalog_order, eigensystems};
use eigentransfer::spectral::classicality;
use eigentransfer::tame::{compatible_local_level, parse_level, sl2_elements, verify_against_brute_force, verify_conjugation_invariance, CongruenceLevel};
use eigentransfer::transfer::{accessible_refinements, diagram_commutes, fiber_report, refinement_values, zeta_transfer, EigenSystemGL, Refinement};
use eigentransfer::weight::AlgebraicWeightGL2;
use eigentransfer::{Error, Rational};

use crate::config::FileConfig;
use crate::table::{Row, Table};

/// Failure classes, mapped to exit statuses 2 and 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Compute(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::OutsideCatalog(_) | Error::InvalidWeight(_) | Error::InvalidLevel(_) | Error::InvalidPacket(_) | Error::InvalidInput(_) | Error::PRamified => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

/// A finished table and whether any row reports a failed check.
pub struct Outcome {
    pub table: Table,
    pub failed: bool,
}

fn need<T>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing required setting '{name}'")))
}

fn weight_of(cfg: &FileConfig) -> Result<AlgebraicWeightGL2, Failure> {
    let [k1, k2] = need(cfg.weight, "weight")?;
    Ok(AlgebraicWeightGL2::new(k1, k2)?)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn read_input(cfg: &FileConfig) -> Result<String, Failure> {
    let path = need(cfg.input.clone(), "input")?;
    std::fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn eigensystems_cmd(cfg: &FileConfig) -> Result<Outcome, Failure> {
    let disc = need(cfg.disc, "disc")?;
    let weight = weight_of(cfg)?;
    let mut primes = need(cfg.primes.clone(), "primes")?;
    primes.sort_unstable();
    primes.dedup();
    let order = catalog_order(disc)?;
    let mut config = vec![("disc".into(), disc.to_string()), ("weight".into(), weight.to_string()), ("primes".into(), join(&primes))];
    let mut all = primes.clone();
    if let Some(p) = cfg.p {
        if primes.contains(&p) {
            return Err(Failure::Usage(format!("p = {p} is also listed among the primes")));
        }
        if order.algebra.is_ramified(p) {
            return Err(Failure::Usage(format!("p = {p} ramifies in the algebra of discriminant {disc}")));
        }
        config.push(("p".into(), p.to_string()));
        all.push(p);
    }
    for &l in &primes {
        if order.algebra.is_ramified(l) {
            return Err(Failure::Usage(format!("{l} ramifies in the algebra of discriminant {disc}")));
        }
    }
    let report = eigensystems(&order, weight, &all)?;
    let mut table = Table::new("eigensystems", config);
    for sys in &report.systems {
        let mut row = Row::new("system").field("weight", weight).field("mult", sys.multiplicity);
        for &l in &primes {
            let pair = sys.pair(l).expect("computed for every prime");
            row = row.field(&format!("t{l}"), &pair.t).field(&format!("s{l}"), &pair.s);
        }
        if let Some(p) = cfg.p {
            let at_p = sys.pair(p).expect("computed at p").clone();
            row = row.field("tp", &at_p.t).field("sp", &at_p.s);
            let pairs = primes.iter().map(|l| sys.pair(*l).unwrap().clone()).collect();
            let x = EigenSystemGL::new(weight, p, pairs, at_p, None)?;
            let access = accessible_refinements(&x);
            for r in [Refinement::Alpha, Refinement::Beta] {
                let name = match r {
                    Refinement::Alpha => "alpha",
                    Refinement::Beta => "beta",
                };
                let rv = refinement_values(&x.with_refinement(r))?;
                let slope = rv.slope(p).map(|s| s.to_string()).unwrap_or_else(|| "inf".into());
                row = row
                    .field(&format!("u0.{name}"), &rv.u0)
                    .field(&format!("slope.{name}"), slope)
                    .field(&format!("accessible.{name}"), if access.contains(&r) { "yes" } else { "no" });
            }
        }
        table.push(row);
    }
    for orbit in &report.irrational {
        table.push(Row::new("irrational").field("l", orbit.l).field("factor", orbit.factor.join(",")));
    }
    Ok(Outcome { table, failed: false })
}

fn parse_systems(text: &str) -> Result<Vec<(usize, EigenSystemGL)>, Failure> {
    let mut out = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let x = EigenSystemGL::from_json(line).map_err(|e| Failure::Usage(format!("line {}: {e}", i + 1)))?;
        if x.refinement.is_none() {
            return Err(Failure::Usage(format!("line {}: refinement absent", i + 1)));
        }
        out.push((i + 1, x));
    }
    Ok(out)
}

pub fn transfer_cmd(cfg: &FileConfig) -> Result<Outcome, Failure> {
    let text = read_input(cfg)?;
    let systems = parse_systems(&text)?;
    let config = vec![("input".into(), cfg.input.as_ref().unwrap().display().to_string())];
    let mut table = Table::new("transfer", config);
    let mut failed = false;
    for (line, x) in &systems {
        let z = zeta_transfer(x).map_err(|e| Failure::Compute(format!("line {line}: {e}")))?;
        let ok = diagram_commutes(x)?;
        failed |= !ok;
        let mut row = Row::new("transfer").field("line", line).field("weight", z.weight.k);
        for (l, a) in &z.a {
            row = row.field(&format!("a{l}"), a);
        }
        table.push(row.field("u0", &z.u0).field("check", if ok { "PASS" } else { "FAIL" }));
    }
    let points: Vec<EigenSystemGL> = systems.iter().map(|(_, x)| x.clone()).collect();
    if !points.is_empty() {
        for class in fiber_report(&points)? {
            let lines: Vec<usize> = class.members.iter().map(|&i| systems[i].0).collect();
            failed |= !class.consistent;
            table.push(Row::new("fiber").field("lines", join(&lines)).field("projective", if class.consistent { "consistent" } else { "inconsistent" }));
        }
    }
    Ok(Outcome { table, failed })
}

pub fn slopes_cmd(cfg: &FileConfig) -> Result<Outcome, Failure> {
    let disc = need(cfg.disc, "disc")?;
    let p = need(cfg.p, "p")?;
    let weight = weight_of(cfg)?;
    let n = need(cfg.n, "n")?;
    let m = need(cfg.m, "m")?;
    let kind = match cfg.kind.as_deref().unwrap_or("u0") {
        "u0" => OperatorKind::U0,
        "up" => OperatorKind::Up,
        k => return Err(Failure::Usage(format!("unknown operator kind '{k}' (expected u0 or up)"))),
    };
    let order = catalog_order(disc)?;
    if order.algebra.is_ramified(p) {
        return Err(Failure::Usage(format!("p = {p} ramifies in the algebra of discriminant {disc}")));
    }
    let op = overconvergent_operator(&order, weight, p, n, m, kind)?;
    let slopes = op.slopes(op.operator.size)?;
    let classical = op.classical_slopes()?;
    let config = vec![
        ("disc".into(), disc.to_string()),
        ("p".into(), p.to_string()),
        ("weight".into(), weight.to_string()),
        ("n".into(), n.to_string()),
        ("m".into(), m.to_string()),
        ("kind".into(), cfg.kind.clone().unwrap_or_else(|| "u0".into())),
    ];
    let mut table = Table::new("slopes", config);
    table.push(Row::new("bound").field("value", 2 * (weight.k1 - weight.k2 + 1)));
    let mut counts: BTreeMap<Rational, usize> = BTreeMap::new();
    for s in slopes.slopes() {
        *counts.entry(s).or_default() += 1;
    }
    for (s, mult) in &counts {
        // the small-slope criterion is stated for u₀
        let classical = match kind {
            OperatorKind::U0 => if classicality(*s, weight) { "yes" } else { "no" },
            OperatorKind::Up => "n/a",
        };
        table.push(Row::new("slope").field("value", s).field("multiplicity", mult).field("classical", classical));
    }
    table.push(Row::new("cutoff").field("index", slopes.raw.cutoff).field("size", op.operator.size));
    for s in classical.slopes() {
        table.push(Row::new("classical-slope").field("value", s));
    }
    Ok(Outcome { table, failed: false })
}

fn level_row(kind: &str, k: &CongruenceLevel) -> Row {
    let mut row = Row::new(kind);
    for w in k.to_string().split_whitespace().skip(1) {
        row = match w.split_once('=') {
            Some((a, b)) => row.field(a, b),
            None => row.field("shape", w),
        };
    }
    row
}

/// Largest feasible enumeration modulus for the brute-force check.
const BRUTE_FORCE_LIMIT: u64 = 20_000_000;

pub fn level_compat_cmd(cfg: &FileConfig) -> Result<Outcome, Failure> {
    let text = need(cfg.level.clone(), "level")?;
    let kt = parse_level(&text)?;
    let k = compatible_local_level(&kt).map_err(|e| Failure::Compute(e.to_string()))?;
    let mut table = Table::new("level-compat", vec![("level".into(), text.clone())]);
    table.push(level_row("input", &kt));
    table.push(level_row("compatible", &k));
    let size = |n: u32| kt.l.checked_pow(3 * n).unwrap_or(u64::MAX);
    let n = kt.depth().max(k.depth()) + 1;
    let n = if size(n) <= BRUTE_FORCE_LIMIT { Some(n) } else { None };
    let mut failed = false;
    match n {
        Some(n) => {
            let ok = verify_against_brute_force(&kt, &k, n)?;
            failed = !ok;
            let group = sl2_elements(kt.l, n).len();
            table.push(Row::new("verify").field("modulus", format!("{}^{n}", kt.l)).field("group", group).field("result", if ok { "VERIFIED" } else { "FAILED" }));
        }
        None => table.push(Row::new("verify").field("result", "SKIPPED")),
    }
    let inv = verify_conjugation_invariance(&k)?;
    table.push(Row::new("invariance").field("result", if inv { "yes" } else { "no" }));
    Ok(Outcome { table, failed })
}

fn parse_place(s: &str) -> Result<Place, Failure> {
    if s == "inf" {
        return Ok(Place::Infinite);
    }
    s.parse().map(Place::Finite).map_err(|_| Failure::Usage(format!("bad place '{s}'")))
}

pub fn packet_mult_cmd(cfg: &FileConfig) -> Result<Outcome, Failure> {
    let text = read_input(cfg)?;
    let a = parse_assignment(&text)?;
    let mut config = vec![("input".into(), cfg.input.as_ref().unwrap().display().to_string())];
    if let Some(s) = &cfg.switch {
        config.push(("switch".into(), s.clone()));
    }
    let mut table = Table::new("packet-mult", config);
    let m = multiplicity(&a)?;
    table.push(Row::new("multiplicity").field("m", m));
    if let Some(s) = &cfg.switch {
        let w = parse_place(s)?;
        let b = switch_member(&a, w)?;
        let idx = b.place_index(w).expect("switched place exists");
        table.push(Row::new("switched").field("place", w).field("member", b.places[idx].member).field("m", multiplicity(&b)?));
    }
    Ok(Outcome { table, failed: false })
}

pub fn theta_type_cmd(cfg: &FileConfig) -> Result<Outcome, Failure> {
    let d = need(cfg.d, "d")?;
    let order = need(cfg.order, "order")?;
    let ext = match cfg.extension.as_deref() {
        None => None,
        Some("symmetric") => Some(ThetaExtension::Symmetric),
        Some("obstructed") => Some(ThetaExtension::Obstructed),
        Some(x) => return Err(Failure::Usage(format!("unknown extension '{x}'"))),
    };
    let theta = ThetaCharacter::new(d, order, ext)?;
    let mut config = vec![("d".into(), d.to_string()), ("order".into(), order.to_string())];
    if let Some(e) = &cfg.extension {
        config.push(("extension".into(), e.clone()));
    }
    let mut table = Table::new("theta-type", config);
    let t = theta_type(&theta)?;
    table.push(Row::new("theta").field("type", t));
    Ok(Outcome { table, failed: false })
}
