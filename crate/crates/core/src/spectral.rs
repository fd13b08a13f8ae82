//! Truncated compact operators over Z_p, certified Fredholm series, slopes,
//! slope factorization and the small-slope classicality bound.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};

use crate::arith::big_pow_i;
use crate::error::{Error, Result};
use crate::padic::{newton_polygon, NewtonPolygon, PadicApprox, Rational, Valuation};
use crate::qp::Qp;
use crate::residue::{BigResidues, ResidueRing, SmallResidues};
use crate::weight::AlgebraicWeightGL2;

/// An N×N matrix over Z/p^M with a row-valuation certificate for the operator it truncates.
///
/// `row_bounds[i]` bounds the valuation of every entry in row i, including the
/// truncated columns; `tail` bounds every row with index ≥ N, and is `None` when
/// the operator is exactly this finite matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedCompactOperator {
    pub p: u64,
    pub prec: u32,
    pub size: usize,
    entries: Vec<BigUint>,
    pub row_bounds: Vec<i64>,
    pub tail: Option<i64>,
}

impl TruncatedCompactOperator {
    pub fn new(p: u64, prec: u32, rows: Vec<Vec<BigInt>>, row_bounds: Vec<i64>, tail: Option<i64>) -> Result<Self> {
        let n = rows.len();
        if row_bounds.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("operator must be square with one row bound per row".into()));
        }
        if row_bounds.windows(2).any(|w| w[1] < w[0]) || row_bounds.first().is_some_and(|&b| b < 0) {
            return Err(Error::InvalidInput("row bounds must be non-negative and non-decreasing".into()));
        }
        if let (Some(t), Some(&last)) = (tail, row_bounds.last()) {
            if t < last {
                return Err(Error::InvalidInput("tail bound below the last row bound".into()));
            }
        }
        let m = big_pow_i(p, prec);
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let need = row_bounds[i].min(prec as i64);
            for x in row {
                let r = x.mod_floor_big(&m);
                if let Some(v) = crate::arith::vp_int(&BigInt::from(r.clone()), p) {
                    if (v as i64) < need {
                        return Err(Error::InvalidInput(format!("entry in row {i} has valuation {v} below its bound {need}")));
                    }
                }
                entries.push(r);
            }
        }
        Ok(TruncatedCompactOperator { p, prec, size: n, entries, row_bounds, tail })
    }

    pub fn entry(&self, i: usize, j: usize) -> PadicApprox {
        PadicApprox::new(self.p, &BigInt::from(self.entries[i * self.size + j].clone()), self.prec)
    }

    pub fn raw(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.size + j]
    }

    /// Leading principal block on the first n indices, as an exact finite operator.
    pub fn leading_block(&self, n: usize) -> TruncatedCompactOperator {
        let rows = (0..n).map(|i| (0..n).map(|j| BigInt::from(self.raw(i, j).clone())).collect()).collect();
        TruncatedCompactOperator::new(self.p, self.prec, rows, self.row_bounds[..n].to_vec(), None).expect("sub-block of a valid operator")
    }

    /// Sum of the j smallest row bounds, with the tail filling in beyond N.
    pub fn bound_sum(&self, j: usize) -> Option<i64> {
        let known: i64 = self.row_bounds.iter().take(j).sum();
        if j <= self.size {
            Some(known)
        } else {
            self.tail.map(|t| known + t * (j - self.size) as i64)
        }
    }

    /// Structured text: header, row-bound table, tail, then row-major residues.
    pub fn save(&self) -> String {
        let mut s = String::new();
        writeln!(s, "operator p={} M={} N={}", self.p, self.prec, self.size).unwrap();
        let rb: Vec<String> = self.row_bounds.iter().map(|b| b.to_string()).collect();
        writeln!(s, "rowbounds {}", rb.join(" ")).unwrap();
        match self.tail {
            Some(t) => writeln!(s, "tail {t}").unwrap(),
            None => writeln!(s, "tail none").unwrap(),
        }
        for i in 0..self.size {
            let row: Vec<String> = (0..self.size).map(|j| self.raw(i, j).to_string()).collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
        s
    }

    pub fn load(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, m: &str| Error::Parse { line: line + 1, message: m.to_string() };
        let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
        let mut p = None;
        let mut prec = None;
        let mut n = None;
        let mut words = header.split_whitespace();
        if words.next() != Some("operator") {
            return Err(perr(ln, "expected 'operator' header"));
        }
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| perr(ln, "expected key=value"))?;
            match k {
                "p" => p = v.parse::<u64>().ok(),
                "M" => prec = v.parse::<u32>().ok(),
                "N" => n = v.parse::<usize>().ok(),
                _ => return Err(perr(ln, "unknown header key")),
            }
        }
        let (p, prec, n) = match (p, prec, n) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(perr(ln, "header needs p, M and N")),
        };
        let (ln, rb_line) = lines.next().ok_or_else(|| perr(ln + 1, "missing rowbounds"))?;
        let rb: Vec<i64> = rb_line
            .strip_prefix("rowbounds")
            .ok_or_else(|| perr(ln, "expected rowbounds"))?
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| perr(ln, "bad row bound")))
            .collect::<Result<_>>()?;
        let (ln, tail_line) = lines.next().ok_or_else(|| perr(ln + 1, "missing tail"))?;
        let tail = match tail_line.strip_prefix("tail").map(str::trim) {
            Some("none") => None,
            Some(t) => Some(t.parse().map_err(|_| perr(ln, "bad tail"))?),
            None => return Err(perr(ln, "expected tail")),
        };
        let mut rows = vec![];
        for (ln, line) in lines {
            let row: Vec<BigInt> = line
                .split_whitespace()
                .map(|x| x.parse::<BigInt>().map_err(|_| perr(ln, "bad entry")))
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(perr(ln, "row has wrong length"));
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(perr(0, "wrong number of rows"));
        }
        TruncatedCompactOperator::new(p, prec, rows, rb, tail)
    }
}

trait ModFloorBig {
    fn mod_floor_big(&self, m: &BigInt) -> BigUint;
}

impl ModFloorBig for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigUint {
        num_integer::Integer::mod_floor(self, m).to_biguint().unwrap()
    }
}

/// c₀ = 1, c₁, …, c_K of det(1 − T·u) with per-coefficient certified precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FredholmSeries {
    pub p: u64,
    pub coeffs: Vec<PadicApprox>,
    /// Proven lower bounds v(c_j) ≥ lower[j] for the untruncated operator.
    pub lower: Vec<i64>,
    /// Lower bound for the coefficient of T^(K+1+i) beyond the computed range, as a ray; `None` if they vanish.
    pub beyond: Option<(i64, i64)>,
}

impl FredholmSeries {
    /// A series given by exact integer coefficients at precision M (c₀ must be 1).
    pub fn from_integers(p: u64, coeffs: &[BigInt], prec: u32) -> Self {
        let c: Vec<PadicApprox> = coeffs.iter().map(|x| PadicApprox::new(p, x, prec)).collect();
        let lower = vec![0; c.len()];
        FredholmSeries { p, coeffs: c, lower, beyond: None }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Characteristic polynomial mod p^M of a square matrix, via Hessenberg reduction.
fn charpoly_mod<R: ResidueRing>(r: &R, mut h: Vec<Vec<R::Elem>>) -> Vec<R::Elem> {
    let n = h.len();
    for c in 0..n.saturating_sub(2) {
        // pivot of least valuation in column c below the diagonal
        let mut best: Option<(usize, u32)> = None;
        for i in c + 1..n {
            if let Some(v) = r.valuation(&h[i][c]) {
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
        }
        let Some((piv, v)) = best else { continue };
        if piv != c + 1 {
            h.swap(piv, c + 1);
            for row in h.iter_mut() {
                row.swap(piv, c + 1);
            }
        }
        let unit = r.div_p_pow(&h[c + 1][c], v);
        let uinv = r.inv_unit(&unit).expect("unit part is invertible");
        for i in c + 2..n {
            if r.is_zero(&h[i][c]) {
                continue;
            }
            let f = r.mul(&r.div_p_pow(&h[i][c], v), &uinv);
            for j in 0..n {
                let d = r.mul(&f, &h[c + 1][j]);
                h[i][j] = r.sub(&h[i][j], &d);
            }
            h[i][c] = r.zero();
            for row in h.iter_mut() {
                let d = r.mul(&f, &row[i]);
                row[c + 1] = r.add(&row[c + 1], &d);
            }
        }
    }
    let mut polys: Vec<Vec<R::Elem>> = vec![vec![r.one()]];
    for m in 1..=n {
        let i = m - 1;
        let mut next = vec![r.zero(); m + 1];
        for (d, c) in polys[m - 1].iter().enumerate() {
            next[d + 1] = r.add(&next[d + 1], c);
            next[d] = r.sub(&next[d], &r.mul(&h[i][i], c));
        }
        let mut prod = r.one();
        for k in (0..i).rev() {
            prod = r.mul(&prod, &h[k + 1][k]);
            if r.is_zero(&prod) {
                break;
            }
            let coef = r.mul(&prod, &h[k][i]);
            for (d, c) in polys[k].iter().enumerate() {
                next[d] = r.sub(&next[d], &r.mul(&coef, c));
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn charpoly_of<R: ResidueRing>(r: &R, op: &TruncatedCompactOperator) -> Vec<BigInt> {
    let h: Vec<Vec<R::Elem>> = (0..op.size)
        .map(|i| (0..op.size).map(|j| r.from_bigint(&BigInt::from(op.raw(i, j).clone()))).collect())
        .collect();
    charpoly_mod(r, h).iter().map(|x| r.to_bigint(x)).collect()
}

/// Characteristic polynomial det(X − A) mod p^M, constant term first.
pub fn charpoly_residues(op: &TruncatedCompactOperator) -> Vec<BigInt> {
    match SmallResidues::new(op.p, op.prec) {
        Some(r) => charpoly_of(&r, op),
        None => charpoly_of(&BigResidues::new(op.p, op.prec), op),
    }
}

/// det(1 − T·u) to degree K with certified precisions.
pub fn fredholm_series(op: &TruncatedCompactOperator, k: usize) -> Result<FredholmSeries> {
    let n = op.size;
    if k > n {
        return Err(Error::InvalidInput(format!("degree {k} exceeds operator size {n}")));
    }
    let cp = charpoly_residues(op);
    let m = op.prec as i64;
    let mut coeffs = vec![];
    let mut lower = vec![];
    for j in 0..=k {
        let prec = match op.tail {
            None => m,
            Some(t) if j == 0 => m.min(t.max(m)),
            Some(t) => m.min(op.bound_sum(j - 1).unwrap() + t),
        };
        if prec <= 0 {
            let need = op.bound_sum(j).unwrap_or(0) + 1;
            return Err(Error::InsufficientPrecision { index: j, suggested_n: 2 * n.max(1), suggested_m: (m.max(need)) as u32 });
        }
        // c_j = (−1)^j e_j = coefficient of X^(n−j) in det(X − A)
        let c = cp[n - j].clone();
        coeffs.push(PadicApprox::new(op.p, &c, prec as u32));
        lower.push(op.bound_sum(j).unwrap());
    }
    let beyond = match op.tail {
        None if k == n => None,
        None => Some((op.bound_sum(k + 1).unwrap(), op.row_bounds.get(k + 1).copied().unwrap_or(0))),
        Some(t) => Some((op.bound_sum(k + 1).unwrap(), op.row_bounds.get(k + 1).copied().unwrap_or(t))),
    };
    Ok(FredholmSeries { p: op.p, coeffs, lower, beyond })
}

/// The certified part of the Newton polygon of a Fredholm series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeData {
    /// Segments fully determined by the certified coefficients.
    pub determined: NewtonPolygon,
    /// Abscissa up to which the polygon is certified.
    pub cutoff: i64,
    /// Lower envelope combining certified points and precision bounds.
    pub envelope: NewtonPolygon,
}

impl SlopeData {
    pub fn slopes(&self) -> Vec<Rational> {
        self.determined.slope_list()
    }
}

const FAR: i64 = 1_000_000;

/// Newton polygon of the certified coefficients and its determinacy cutoff.
pub fn slopes_of(series: &FredholmSeries) -> SlopeData {
    let mut pts: Vec<(i64, Rational, bool)> = vec![];
    for (j, c) in series.coeffs.iter().enumerate() {
        match c.valuation() {
            Valuation::Finite(v) => pts.push((j as i64, Rational::from_integer(v), true)),
            Valuation::Infinite => {
                let lb = (c.precision() as i64).max(series.lower[j]);
                pts.push((j as i64, Rational::from_integer(lb), false));
            }
        }
    }
    let k = series.degree() as i64;
    if let Some((start, slope)) = series.beyond {
        let slope = slope.max(0);
        pts.push((k + 1, Rational::from_integer(start), false));
        pts.push((k + 1 + FAR, Rational::from_integer(start + slope * FAR), false));
    }
    let with_v: Vec<(i64, Option<Rational>)> = pts.iter().map(|(x, y, _)| (*x, Some(*y))).collect();
    let envelope = newton_polygon(&with_v).expect("c_0 is present");
    let is_determined = |x: i64| pts.iter().any(|(px, _, d)| *px == x && *d);
    let mut cutoff_idx = 0;
    for (i, (x, _)) in envelope.vertices.iter().enumerate() {
        if is_determined(*x) {
            cutoff_idx = i;
        } else {
            break;
        }
    }
    let verts = envelope.vertices[..=cutoff_idx].to_vec();
    let slopes = verts
        .windows(2)
        .map(|w| ((w[1].1 - w[0].1) / Rational::from_integer(w[1].0 - w[0].0), w[1].0 - w[0].0))
        .collect();
    SlopeData { cutoff: verts.last().unwrap().0, determined: NewtonPolygon { vertices: verts, slopes }, envelope }
}

/// F and C with F·C = P, F collecting the slopes below h.
#[derive(Clone, Debug)]
pub struct SlopeFactorization {
    pub factor: Vec<Qp>,
    pub cofactor: Vec<Qp>,
    pub iterations: usize,
}

/// Degree-d factor of the series holding every slope < h, by the linear division iteration.
pub fn slope_factor(series: &FredholmSeries, h: Rational) -> Result<SlopeFactorization> {
    let p = series.p;
    let sd = slopes_of(series);
    if sd.envelope.slopes.iter().any(|(s, _)| *s == h) {
        return Err(Error::SlopeBoundary);
    }
    let d = sd.envelope.count_below(h);
    let k = series.degree() as i64;
    let whole = series.beyond.is_none() && sd.cutoff == k;
    if d > sd.cutoff && !whole {
        return Err(Error::InsufficientPrecision { index: d as usize, suggested_n: 2 * (k as usize + 1), suggested_m: 2 * series.coeffs[0].precision() });
    }
    let d = d.min(k) as usize;
    let min_prec = series.coeffs.iter().map(|c| c.precision() as i64).min().unwrap();
    let loss = (h * Rational::from_integer(d as i64)).ceil().to_integer().max(0);
    let certified = min_prec - loss;
    if d == 0 {
        return Ok(SlopeFactorization {
            factor: vec![Qp::one(p, min_prec)],
            cofactor: series.coeffs.iter().map(|c| Qp::from_integer(p, &c.to_bigint(), c.precision() as i64)).collect(),
            iterations: 0,
        });
    }
    let work = min_prec + 2 * (h * Rational::from_integer(k)).ceil().to_integer().max(0) + 20;
    let pp: Vec<Qp> = series.coeffs.iter().map(|c| Qp::from_integer(p, &c.to_bigint(), work)).collect();
    let mut g: Vec<Qp> = pp[..=d].to_vec();
    let mut iterations = 0;
    let target = certified + 4;
    loop {
        iterations += 1;
        if iterations > 400 {
            return Err(Error::FactorNotConverging);
        }
        // P = Q·G + R with deg R < d, dividing from the top
        let mut rem = pp.clone();
        let lead = g[d].clone();
        let mut q0 = None;
        for deg in (d..pp.len()).rev() {
            let q = rem[deg].div(&lead).ok_or(Error::FactorNotConverging)?;
            for i in 0..=d {
                let t = q.mul(&g[i]);
                rem[deg - d + i] = rem[deg - d + i].sub(&t);
            }
            if deg == d {
                q0 = Some(q);
            }
        }
        let q0 = q0.unwrap();
        let mut done = true;
        let g0 = g[0].clone();
        for i in 0..d {
            let delta = rem[i].div(&q0).ok_or(Error::FactorNotConverging)?;
            // compare against the normalized scale of G
            let rel = delta.div(&g0).ok_or(Error::FactorNotConverging)?;
            if !rel.is_zero() && rel.val_lower_bound() < target {
                done = false;
            }
            g[i] = g[i].add(&delta);
        }
        if done {
            break;
        }
    }
    let g0 = g[0].clone();
    let factor: Vec<Qp> = g.iter().map(|x| x.div(&g0).unwrap().truncate(certified)).collect();
    // cofactor as a power series P/F
    let mut cof: Vec<Qp> = vec![];
    for n in 0..=(k as usize - d) {
        let mut acc = Qp::from_integer(p, &series.coeffs[n].to_bigint(), series.coeffs[n].precision() as i64);
        for i in 1..=d.min(n) {
            acc = acc.sub(&factor[i].mul(&cof[n - i]));
        }
        cof.push(acc);
    }
    Ok(SlopeFactorization { factor, cofactor: cof, iterations })
}

/// Small-slope classicality: σ < 2(k₁ − k₂ + 1).
pub fn classicality(sigma: Rational, w: AlgebraicWeightGL2) -> bool {
    sigma < Rational::from_integer(2 * (w.k1 - w.k2 + 1))
}

/// Multiply two Qp polynomials, truncating to `len` terms.
pub fn qp_poly_mul(a: &[Qp], b: &[Qp], len: usize) -> Vec<Qp> {
    let p = a[0].prime();
    let mut out: Vec<Option<Qp>> = vec![None; len];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j >= len {
                continue;
            }
            let t = x.mul(y);
            out[i + j] = Some(match out[i + j].take() {
                None => t,
                Some(s) => s.add(&t),
            });
        }
    }
    out.into_iter().map(|x| x.unwrap_or_else(|| Qp::zero(p, i64::MAX / 4))).collect()
}

/// Integer lift of a precision-tracked coefficient, for display.
pub fn coefficient_string(c: &PadicApprox) -> String {
    match c.valuation() {
        Valuation::Infinite => format!("O({}^{})", c.prime(), c.precision()),
        Valuation::Finite(_) => format!("{} + O({}^{})", c.to_bigint(), c.prime(), c.precision()),
    }
}
