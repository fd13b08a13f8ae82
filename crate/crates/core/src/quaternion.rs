//! Definite quaternion algebras over Q, their maximal orders, norm-form
//! enumeration, splittings at p and Hecke operators on algebraic weights.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{big_pow_i, is_prime, legendre, rational_mod, vp_int};
use crate::error::{Error, Result};
use crate::hecke::UnramifiedEigenPair;
use crate::linalg::{self, Field, Matrix};
use crate::padic::hensel_sqrt;
use crate::quadratic::{parse_rational, QuadraticNumber};
use crate::weight::AlgebraicWeightGL2;

const BUILTIN_CATALOG: &str = include_str!("catalog.txt");

/// Coordinates on 1, i, j, k.
pub type Quaternion = [BigRational; 4];

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The algebra (a, b) over Q: i² = a, j² = b, ij = −ji = k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    pub a: i64,
    pub b: i64,
    pub disc: u64,
}

impl QuaternionAlgebra {
    /// Checks definiteness and that the declared discriminant matches the Hilbert symbols.
    pub fn new(a: i64, b: i64, disc: u64) -> Result<Self> {
        if a >= 0 || b >= 0 {
            return Err(Error::OutsideCatalog(format!("({a},{b}) is not definite")));
        }
        let alg = QuaternionAlgebra { a, b, disc };
        let computed: u64 = alg.ramified_primes().iter().product();
        if computed != disc {
            return Err(Error::OutsideCatalog(format!(
                "declared discriminant {disc} but Hilbert symbols give {computed}"
            )));
        }
        Ok(alg)
    }

    /// Finite primes where the algebra ramifies.
    pub fn ramified_primes(&self) -> Vec<u64> {
        let bound = (2 * self.a.unsigned_abs() * self.b.unsigned_abs()).max(2);
        (2..=bound)
            .filter(|&q| is_prime(q) && (2 * self.a * self.b) % q as i64 == 0)
            .filter(|&q| hilbert_symbol(self.a, self.b, q) == -1)
            .collect()
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.disc % p == 0
    }

    pub fn mul(&self, x: &Quaternion, y: &Quaternion) -> Quaternion {
        let a = rat(self.a);
        let b = rat(self.b);
        let ab = &a * &b;
        [
            &x[0] * &y[0] + &a * &x[1] * &y[1] + &b * &x[2] * &y[2] - &ab * &x[3] * &y[3],
            &x[0] * &y[1] + &x[1] * &y[0] - &b * &x[2] * &y[3] + &b * &x[3] * &y[2],
            &x[0] * &y[2] + &x[2] * &y[0] + &a * &x[1] * &y[3] - &a * &x[3] * &y[1],
            &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
        ]
    }

    pub fn conj(&self, x: &Quaternion) -> Quaternion {
        [x[0].clone(), -&x[1], -&x[2], -&x[3]]
    }

    pub fn nrd(&self, x: &Quaternion) -> BigRational {
        let a = rat(self.a);
        let b = rat(self.b);
        &x[0] * &x[0] - &a * &x[1] * &x[1] - &b * &x[2] * &x[2] + &a * &b * &x[3] * &x[3]
    }

    pub fn trd(&self, x: &Quaternion) -> BigRational {
        &x[0] * rat(2)
    }
}

/// Hilbert symbol (a, b)_p for a prime p.
pub fn hilbert_symbol(a: i64, b: i64, p: u64) -> i32 {
    let split = |n: i64| -> (u32, i64) {
        let v = vp_int(&BigInt::from(n), p).unwrap();
        (v, n / (p as i64).pow(v))
    };
    let (al, u) = split(a);
    let (be, v) = split(b);
    if p == 2 {
        let eps = |x: i64| ((x - 1) / 2).rem_euclid(2);
        let omega = |x: i64| ((x * x - 1) / 8).rem_euclid(2);
        let e = eps(u) * eps(v) + al as i64 * omega(v) + be as i64 * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut s = if (al as u64 * be as u64 * ((p - 1) / 2)) % 2 == 0 { 1 } else { -1 };
        if be % 2 == 1 {
            s *= legendre(u, p);
        }
        if al % 2 == 1 {
            s *= legendre(v, p);
        }
        s
    }
}

/// An element of the order in basis coordinates.
pub type OrderElement = [i64; 4];

/// A maximal order with its norm form and multiplication table in basis coordinates.
#[derive(Clone, Debug)]
pub struct MaximalOrder {
    pub algebra: QuaternionAlgebra,
    pub basis: [Quaternion; 4],
    /// trd(e_i · conj(e_j)), twice the Gram matrix of the norm form.
    pub trace_form: [[i64; 4]; 4],
    table: [[[i64; 4]; 4]; 4],
    units: Vec<OrderElement>,
}

impl MaximalOrder {
    /// Build and check an order: closed under products, contains 1, discriminant D², class number one by mass.
    pub fn new(algebra: QuaternionAlgebra, basis: [Quaternion; 4]) -> Result<Self> {
        let bm: Matrix<BigRational> = (0..4).map(|r| (0..4).map(|c| basis[c][r].clone()).collect()).collect();
        let mut aug: Matrix<BigRational> = bm
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..4).map(|j| if i == j { rat(1) } else { rat(0) }));
                r
            })
            .collect();
        if linalg::rref(&mut aug).len() < 4 || (0..4).any(|i| aug[i][i].is_zero()) {
            return Err(Error::OutsideCatalog("order basis is degenerate".into()));
        }
        let inv: Matrix<BigRational> = aug.iter().map(|r| r[4..].to_vec()).collect();
        let coords = |q: &Quaternion| -> Option<OrderElement> {
            let v = linalg::mat_vec(&inv, q);
            let mut out = [0i64; 4];
            for (o, x) in out.iter_mut().zip(v) {
                if !x.is_integer() {
                    return None;
                }
                *o = x.to_integer().to_i64()?;
            }
            Some(out)
        };
        let one = [rat(1), rat(0), rat(0), rat(0)];
        if coords(&one).is_none() {
            return Err(Error::OutsideCatalog("order does not contain 1".into()));
        }
        let mut table = [[[0i64; 4]; 4]; 4];
        let mut trace_form = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let prod = algebra.mul(&basis[i], &basis[j]);
                table[i][j] = coords(&prod).ok_or_else(|| Error::OutsideCatalog("order not closed under multiplication".into()))?;
                let t = algebra.trd(&algebra.mul(&basis[i], &algebra.conj(&basis[j])));
                if !t.is_integer() {
                    return Err(Error::OutsideCatalog("trace form is not integral".into()));
                }
                trace_form[i][j] = t.to_integer().to_i64().unwrap();
            }
        }
        let tf: Matrix<BigRational> = trace_form.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        let det = determinant(&tf);
        let d = algebra.disc as i64;
        if det != rat(d * d) {
            return Err(Error::OutsideCatalog(format!("order discriminant {det} is not {d}^2: not maximal")));
        }
        let mut order = MaximalOrder { algebra, basis, trace_form, table, units: vec![] };
        order.units = order.enumerate_norm(1);
        // mass formula: class number one iff |O^×| = 24/(D−1)
        if order.units.len() as u64 * (order.algebra.disc - 1) != 24 {
            return Err(Error::OutsideCatalog(format!(
                "class number is not one: {} units for discriminant {}",
                order.units.len(),
                order.algebra.disc
            )));
        }
        Ok(order)
    }

    pub fn disc(&self) -> u64 {
        self.algebra.disc
    }

    pub fn units(&self) -> &[OrderElement] {
        &self.units
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn one(&self) -> OrderElement {
        // the catalog lists 1 first; recomputed for arbitrary bases
        let mut best = [0; 4];
        for (i, e) in self.basis.iter().enumerate() {
            if e == &[rat(1), rat(0), rat(0), rat(0)] {
                best[i] = 1;
                return best;
            }
        }
        self.units.iter().copied().find(|u| self.to_quaternion(u) == [rat(1), rat(0), rat(0), rat(0)]).unwrap()
    }

    pub fn mul(&self, x: &OrderElement, y: &OrderElement) -> OrderElement {
        let mut out = [0i64; 4];
        for i in 0..4 {
            if x[i] == 0 {
                continue;
            }
            for j in 0..4 {
                if y[j] == 0 {
                    continue;
                }
                let c = x[i] * y[j];
                for (o, t) in out.iter_mut().zip(self.table[i][j]) {
                    *o += c * t;
                }
            }
        }
        out
    }

    /// Reduced norm, exactly.
    pub fn nrd(&self, x: &OrderElement) -> i64 {
        let mut s = 0i64;
        for i in 0..4 {
            for j in 0..4 {
                s += x[i] * self.trace_form[i][j] * x[j];
            }
        }
        s / 2
    }

    pub fn to_quaternion(&self, x: &OrderElement) -> Quaternion {
        let mut q: Quaternion = [rat(0), rat(0), rat(0), rat(0)];
        for (c, e) in x.iter().zip(&self.basis) {
            for t in 0..4 {
                q[t] += rat(*c) * &e[t];
            }
        }
        q
    }

    /// All elements of reduced norm n, by Fincke-Pohst enumeration of the norm form.
    pub fn enumerate_norm(&self, n: u64) -> Vec<OrderElement> {
        let g: Vec<Vec<f64>> = self
            .trace_form
            .iter()
            .map(|r| r.iter().map(|&x| x as f64 / 2.0).collect())
            .collect();
        // Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)²
        let mut q = g.clone();
        for i in 0..4 {
            for j in i + 1..4 {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for k in i + 1..4 {
                for l in k..4 {
                    q[k][l] -= q[k][i] * q[i][l];
                }
            }
        }
        let bound = n as f64;
        let mut out = vec![];
        let mut x = [0i64; 4];
        self.fp_recurse(3, bound, &q, &mut x, n as i64, &mut out);
        out.sort();
        out
    }

    fn fp_recurse(&self, i: usize, rem: f64, q: &[Vec<f64>], x: &mut [i64; 4], n: i64, out: &mut Vec<OrderElement>) {
        let center: f64 = -(i + 1..4).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
        let r = (rem.max(0.0) / q[i][i]).sqrt() + 1e-7;
        let lo = (center - r).ceil() as i64;
        let hi = (center + r).floor() as i64;
        for v in lo..=hi {
            x[i] = v;
            let t = v as f64 - center;
            let used = q[i][i] * t * t;
            if i == 0 {
                if self.nrd(x) == n {
                    out.push(*x);
                }
            } else {
                self.fp_recurse(i - 1, rem - used + 1e-9, q, x, n, out);
            }
        }
        x[i] = 0;
    }
}

fn determinant(m: &Matrix<BigRational>) -> BigRational {
    let mut a = m.clone();
    let n = a.len();
    let mut det = rat(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return rat(0);
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let d = &f * &a[c][k];
                a[r][k] -= d;
            }
        }
    }
    det
}

/// One catalog entry.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub disc: u64,
    pub a: i64,
    pub b: i64,
    pub basis: [Quaternion; 4],
}

impl CatalogEntry {
    pub fn build(&self) -> Result<MaximalOrder> {
        MaximalOrder::new(QuaternionAlgebra::new(self.a, self.b, self.disc)?, self.basis.clone())
    }
}

/// Parse the structured catalog text.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>> {
    let mut out = vec![];
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: &str| Error::Parse { line: ln + 1, message: m.to_string() };
        let parts: Vec<&str> = line.split('|').collect();
        if parts.len() != 5 {
            return Err(err("expected a header and four basis elements"));
        }
        let head: Vec<&str> = parts[0].split_whitespace().collect();
        if head.len() != 3 {
            return Err(err("header must be: disc a b"));
        }
        let disc = head[0].parse().map_err(|_| err("bad discriminant"))?;
        let a = head[1].parse().map_err(|_| err("bad a"))?;
        let b = head[2].parse().map_err(|_| err("bad b"))?;
        let mut basis: Vec<Quaternion> = vec![];
        for p in &parts[1..] {
            let cs: Vec<BigRational> = p
                .split_whitespace()
                .map(|s| parse_rational(s).map_err(|_| err("bad rational")))
                .collect::<Result<_>>()?;
            if cs.len() != 4 {
                return Err(err("basis element needs four coordinates"));
            }
            basis.push([cs[0].clone(), cs[1].clone(), cs[2].clone(), cs[3].clone()]);
        }
        out.push(CatalogEntry { disc, a, b, basis: [basis[0].clone(), basis[1].clone(), basis[2].clone(), basis[3].clone()] });
    }
    Ok(out)
}

pub fn builtin_catalog() -> Vec<CatalogEntry> {
    parse_catalog(BUILTIN_CATALOG).expect("builtin catalog parses")
}

/// The catalog order of discriminant D.
pub fn catalog_order(disc: u64) -> Result<MaximalOrder> {
    builtin_catalog()
        .into_iter()
        .find(|e| e.disc == disc)
        .ok_or_else(|| Error::OutsideCatalog(format!("no catalog algebra of discriminant {disc}")))?
        .build()
}

/// 2×2 matrix over Z/p^M, entries reduced to [0, p^M).
pub type Mat2 = [[BigInt; 2]; 2];

pub fn mat2_mul(x: &Mat2, y: &Mat2, m: &BigInt) -> Mat2 {
    let e = |i: usize, j: usize| (&x[i][0] * &y[0][j] + &x[i][1] * &y[1][j]).mod_floor(m);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn mat2_det(x: &Mat2, m: &BigInt) -> BigInt {
    (&x[0][0] * &x[1][1] - &x[0][1] * &x[1][0]).mod_floor(m)
}

/// adj(x), so that x·adj(x) = det(x).
pub fn mat2_adj(x: &Mat2, m: &BigInt) -> Mat2 {
    [
        [x[1][1].clone(), (-&x[0][1]).mod_floor(m)],
        [(-&x[1][0]).mod_floor(m), x[0][0].clone()],
    ]
}

/// A ring embedding O → M₂(Z/p^M).
#[derive(Clone, Debug)]
pub struct Splitting {
    pub p: u64,
    pub prec: u32,
    pub modulus: BigInt,
    /// Images of the order basis.
    pub images: [Mat2; 4],
    /// Images of 1, i, j, k.
    pub standard: [Mat2; 4],
}

impl Splitting {
    pub fn apply(&self, x: &OrderElement) -> Mat2 {
        let m = &self.modulus;
        let mut out: Mat2 = Default::default();
        for (c, img) in x.iter().zip(&self.images) {
            for r in 0..2 {
                for s in 0..2 {
                    out[r][s] = (&out[r][s] + BigInt::from(*c) * &img[r][s]).mod_floor(m);
                }
            }
        }
        out
    }
}

/// Explicit embedding of the order into M₂(Z/p^M) for an odd prime p not dividing D.
pub fn split_at_p(order: &MaximalOrder, p: u64, prec: u32) -> Result<Splitting> {
    let alg = &order.algebra;
    if alg.is_ramified(p) {
        return Err(Error::PRamified);
    }
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let m = big_pow_i(p, prec);
    let (a, b) = (alg.a, alg.b);
    // find x, y with v = ax² + by² a nonzero square mod p
    let mut found = None;
    'search: for x in 0..p as i64 {
        for y in 0..p as i64 {
            let v = a * x * x + b * y * y;
            if legendre(v, p) == 1 {
                found = Some((x, y, v));
                break 'search;
            }
        }
    }
    let (x, y, v) = found.ok_or(Error::NoSquareRoot)?;
    let s = hensel_sqrt(&BigInt::from(v), p, prec)?.to_bigint();
    let md = |n: BigInt| n.mod_floor(&m);
    let e: Mat2 = [[s.clone(), BigInt::zero()], [BigInt::zero(), md(-&s)]];
    let k: Mat2 = [[BigInt::zero(), md(BigInt::from(-a * b))], [BigInt::one(), BigInt::zero()]];
    let ek = mat2_mul(&e, &k, &m);
    let vinv = crate::arith::inv_mod_big(&BigInt::from(v), &m).ok_or(Error::NoSquareRoot)?;
    let comb = |c1: i64, c2: i64| -> Mat2 {
        let f = |r: usize, c: usize| md((BigInt::from(c1) * &e[r][c] + BigInt::from(c2) * &ek[r][c]) * &vinv);
        [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]]
    };
    let i_img = comb(a * x, -y);
    let j_img = comb(b * y, x);
    let k_img = mat2_mul(&i_img, &j_img, &m);
    let one: Mat2 = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    let standard = [one, i_img, j_img, k_img];
    let mut images: Vec<Mat2> = vec![];
    for e in &order.basis {
        let mut out: Mat2 = Default::default();
        for (c, img) in e.iter().zip(&standard) {
            let cm = rational_mod(c, &m).ok_or(Error::PRamified)?;
            for r in 0..2 {
                for s in 0..2 {
                    out[r][s] = md(&out[r][s] + &cm * &img[r][s]);
                }
            }
        }
        images.push(out);
    }
    Ok(Splitting {
        p,
        prec,
        modulus: m,
        images: [images[0].clone(), images[1].clone(), images[2].clone(), images[3].clone()],
        standard,
    })
}

/// Row Hermite normal form of a matrix with det of valuation e: (p^a, 0; c, p^b), a + b = e, 0 ≤ c < p^a.
/// Two matrices share the form iff they differ by a left factor in GL₂(Z_p).
pub fn row_hnf(x: &Mat2, p: u64, m: &BigInt) -> Option<Mat2> {
    let val = |n: &BigInt| -> Option<u32> { vp_int(&n.mod_floor(m), p) };
    let v0 = val(&x[0][1]);
    let v1 = val(&x[1][1]);
    // pick the row whose second entry has least valuation
    let (top, bot) = match (v0, v1) {
        (None, None) => return None,
        (Some(_), None) => (1, 0),
        (None, Some(_)) => (0, 1),
        (Some(a), Some(b)) => {
            if b <= a {
                (0, 1)
            } else {
                (1, 0)
            }
        }
    };
    // clear the other row's second entry using row `bot`, which holds the minimum
    let pb = val(&x[bot][1])?;
    let pbp = big_pow_i(p, pb);
    let unit = (&x[bot][1] / &pbp).mod_floor(m);
    let uinv = crate::arith::inv_mod_big(&unit, m)?;
    let f = ((&x[top][1] / &pbp) * &uinv).mod_floor(m);
    let r_top0 = (&x[top][0] - &f * &x[bot][0]).mod_floor(m);
    // row bot scaled by unit⁻¹: (c', p^b)
    let c_prime = (&x[bot][0] * &uinv).mod_floor(m);
    let va = val(&r_top0)?;
    let pa = big_pow_i(p, va);
    Some([[pa.clone(), BigInt::zero()], [c_prime.mod_floor(&pa), pbp]])
}

/// Representatives of O^× \ {x ∈ O : nrd(x) = p^e}, keyed by the row normal form of their image.
#[derive(Clone, Debug)]
pub struct NormCosets {
    pub p: u64,
    pub exponent: u32,
    pub reps: Vec<(Mat2, OrderElement)>,
}

/// Group norm-p^e elements into left unit classes via the row normal form of their images.
pub fn norm_coset_data(order: &MaximalOrder, split: &Splitting, e: u32) -> Result<NormCosets> {
    let p = split.p;
    let n = p.pow(e);
    let elems = order.enumerate_norm(n);
    let mut classes: BTreeMap<Mat2, (OrderElement, usize)> = BTreeMap::new();
    for x in &elems {
        let img = split.apply(x);
        let nf = row_hnf(&img, p, &split.modulus).ok_or(Error::CosetReductionFailed { expected: 0, found: 0 })?;
        let entry = classes.entry(nf).or_insert((*x, 0));
        entry.1 += 1;
    }
    let expected: usize = (0..=e).map(|a| p.pow(a) as usize).sum();
    let units = order.unit_count();
    if classes.len() != expected || classes.values().any(|(_, c)| *c != units) {
        return Err(Error::CosetReductionFailed { expected, found: classes.len() });
    }
    Ok(NormCosets { p, exponent: e, reps: classes.into_iter().map(|(k, (x, _))| (k, x)).collect() })
}

/// The p + 1 classes of norm-p elements, in normal form (p,0;c,1) or (1,0;0,p).
pub fn up_coset_data(order: &MaximalOrder, split: &Splitting) -> Result<NormCosets> {
    norm_coset_data(order, split, 1)
}

/// Action of a 2×2 matrix on Sym^k ⊗ det^k2: z^j ↦ det^k2 (a + cz)^(k−j) (b + dz)^j.
pub fn sym_rep<F: Field>(g: &[[F; 2]; 2], k: u32, k2: i64) -> Matrix<F> {
    let k = k as usize;
    let (a, b, c, d) = (&g[0][0], &g[0][1], &g[1][0], &g[1][1]);
    let poly_mul = |x: &[F], y: &[F]| -> Vec<F> {
        let mut out = vec![F::zero_elem(); x.len() + y.len() - 1];
        for (i, u) in x.iter().enumerate() {
            for (j, w) in y.iter().enumerate() {
                out[i + j] = out[i + j].add(&u.mul(w));
            }
        }
        out
    };
    let powers = |base: &[F]| -> Vec<Vec<F>> {
        let mut out = vec![vec![F::one_elem()]];
        for e in 0..k {
            let next = poly_mul(&out[e], base);
            out.push(next);
        }
        out
    };
    let det = a.mul(d).sub(&b.mul(c));
    let scale = if k2 >= 0 {
        (0..k2).fold(F::one_elem(), |s, _| s.mul(&det))
    } else {
        F::one_elem().div(&(0..-k2).fold(F::one_elem(), |s, _| s.mul(&det)))
    };
    let lin1 = [a.clone(), c.clone()];
    let lin2 = [b.clone(), d.clone()];
    let (p1, p2) = (powers(&lin1), powers(&lin2));
    let mut m = linalg::zeros(k + 1, k + 1);
    for j in 0..=k {
        let col = poly_mul(&p1[k - j], &p2[j]);
        for (i, v) in col.into_iter().enumerate() {
            m[i][j] = v.mul(&scale);
        }
    }
    m
}

/// Exact splitting over Q(√a): i ↦ diag(√a, −√a), j ↦ (0 b; 1 0).
pub fn exact_image(alg: &QuaternionAlgebra, q: &Quaternion) -> [[QuadraticNumber; 2]; 2] {
    let r = QuadraticNumber::sqrt_of(&BigInt::from(alg.a));
    let qn = |x: &BigRational| QuadraticNumber::rational(x.clone());
    let ri = r.scale(&q[1]);
    let rk = r.scale(&q[3]);
    let b = rat(alg.b);
    // k = ij ↦ (0, b√a; −√a, 0)
    [
        [&qn(&q[0]) + &ri, &qn(&(&q[2] * &b)) + &rk.scale(&b)],
        [&qn(&q[2]) - &rk, &qn(&q[0]) - &ri],
    ]
}

/// Automorphic forms of weight (k₁, k₂) and maximal level: the Γ-invariants W^Γ.
#[derive(Clone, Debug)]
pub struct FormSpace {
    pub weight: AlgebraicWeightGL2,
    pub basis: Vec<Vec<QuadraticNumber>>,
}

impl FormSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

fn averaged_action(order: &MaximalOrder, weight: AlgebraicWeightGL2, elems: &[OrderElement]) -> Matrix<QuadraticNumber> {
    let k = weight.diff();
    let mut acc: Matrix<QuadraticNumber> = linalg::zeros(k as usize + 1, k as usize + 1);
    for x in elems {
        let g = exact_image(&order.algebra, &order.to_quaternion(x));
        acc = linalg::mat_add(&acc, &sym_rep(&g, k, weight.k2));
    }
    let inv = BigRational::new(BigInt::one(), BigInt::from(order.unit_count()));
    acc.iter().map(|r| r.iter().map(|x| x.scale(&inv)).collect()).collect()
}

pub fn form_space(order: &MaximalOrder, weight: AlgebraicWeightGL2) -> FormSpace {
    let proj = averaged_action(order, weight, order.units());
    FormSpace { weight, basis: linalg::column_space(&proj) }
}

/// Matrix of T_l on W^Γ, and the central value s_l = l^(k₁+k₂).
#[derive(Clone, Debug)]
pub struct HeckeMatrix {
    pub l: u64,
    pub matrix: Matrix<QuadraticNumber>,
    pub s_l: BigRational,
}

pub fn hecke_matrix_on(order: &MaximalOrder, space: &FormSpace, l: u64) -> Result<HeckeMatrix> {
    if !is_prime(l) {
        return Err(Error::InvalidInput(format!("{l} is not prime")));
    }
    if order.algebra.is_ramified(l) {
        return Err(Error::InvalidInput(format!("{l} ramifies in the algebra")));
    }
    let w = space.weight;
    let (num, den) = big_pow_signed(l, w.k1 + w.k2);
    let s_l = BigRational::new(num, den);
    if space.dimension() == 0 {
        return Ok(HeckeMatrix { l, matrix: vec![], s_l });
    }
    // ρ(xu)v = ρ(x)v on W^Γ, so one element per class x·O^× suffices
    let reps = right_unit_classes(order, order.enumerate_norm(l));
    let k = w.diff() as usize;
    let mut t: Matrix<QuadraticNumber> = linalg::zeros(k + 1, k + 1);
    for x in &reps {
        let g = exact_image(&order.algebra, &order.to_quaternion(x));
        t = linalg::mat_add(&t, &sym_rep(&g, k as u32, w.k2));
    }
    let matrix = linalg::restrict(&t, &space.basis).ok_or(Error::OutsideCatalog("Hecke operator does not preserve W^Γ".into()))?;
    Ok(HeckeMatrix { l, matrix, s_l })
}

/// One representative of each orbit of right multiplication by the unit group.
fn right_unit_classes(order: &MaximalOrder, elems: Vec<OrderElement>) -> Vec<OrderElement> {
    let mut seen = std::collections::HashSet::new();
    let mut reps = vec![];
    for x in elems {
        if seen.contains(&x) {
            continue;
        }
        for u in order.units() {
            seen.insert(order.mul(&x, u));
        }
        reps.push(x);
    }
    reps
}

/// l^e as (numerator, denominator).
fn big_pow_signed(l: u64, e: i64) -> (BigInt, BigInt) {
    if e >= 0 {
        (big_pow_i(l, e as u32), BigInt::one())
    } else {
        (BigInt::one(), big_pow_i(l, (-e) as u32))
    }
}

pub fn hecke_matrix(order: &MaximalOrder, weight: AlgebraicWeightGL2, l: u64) -> Result<HeckeMatrix> {
    hecke_matrix_on(order, &form_space(order, weight), l)
}

/// Characteristic polynomial of T_l with rational coefficients.
pub fn rational_charpoly(m: &Matrix<QuadraticNumber>) -> Result<Vec<BigRational>> {
    linalg::charpoly(m)
        .into_iter()
        .map(|c| c.as_rational().cloned().ok_or(Error::InvalidInput("characteristic polynomial is not rational".into())))
        .collect()
}

/// A joint eigenspace of the unramified Hecke operators with rational eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalEigensystem {
    pub disc: u64,
    pub weight: AlgebraicWeightGL2,
    pub multiplicity: usize,
    pub pairs: Vec<UnramifiedEigenPair>,
}

impl ClassicalEigensystem {
    pub fn pair(&self, l: u64) -> Option<&UnramifiedEigenPair> {
        self.pairs.iter().find(|x| x.l == l)
    }
}

/// Part of the spectrum of T_l whose eigenvalues are not rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrationalOrbit {
    pub l: u64,
    pub factor: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigensystemReport {
    pub systems: Vec<ClassicalEigensystem>,
    pub irrational: Vec<IrrationalOrbit>,
}

/// Joint eigenspaces of T_l for the given primes, splitting only along rational eigenvalues.
pub fn eigensystems(order: &MaximalOrder, weight: AlgebraicWeightGL2, primes: &[u64]) -> Result<EigensystemReport> {
    let space = form_space(order, weight);
    let dim = space.dimension();
    let mut report = EigensystemReport::default();
    if dim == 0 {
        return Ok(report);
    }
    let ops: Vec<HeckeMatrix> = primes.iter().map(|&l| hecke_matrix_on(order, &space, l)).collect::<Result<_>>()?;
    // each piece: basis in W^Γ coordinates and the eigenvalues found so far
    let ident: Vec<Vec<QuadraticNumber>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { QuadraticNumber::one() } else { QuadraticNumber::zero() }).collect())
        .collect();
    let mut pieces: Vec<(Vec<Vec<QuadraticNumber>>, Vec<BigRational>)> = vec![(ident, vec![])];
    for op in &ops {
        let mut next = vec![];
        for (basis, eigs) in pieces {
            let restricted = linalg::restrict(&op.matrix, &basis).ok_or(Error::InvalidInput("Hecke operators do not commute".into()))?;
            let cp = rational_charpoly(&restricted)?;
            let (roots, rest) = linalg::rational_roots(&cp);
            if rest.len() > 1 {
                report.irrational.push(IrrationalOrbit { l: op.l, factor: rest.iter().map(|c| c.to_string()).collect() });
            }
            let mut distinct = roots.clone();
            distinct.dedup();
            for lam in distinct {
                let n = restricted.len();
                let shifted: Matrix<QuadraticNumber> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                if i == j {
                                    &restricted[i][j] - &QuadraticNumber::rational(lam.clone())
                                } else {
                                    restricted[i][j].clone()
                                }
                            })
                            .collect()
                    })
                    .collect();
                let ker = linalg::kernel(&shifted);
                let sub: Vec<Vec<QuadraticNumber>> = ker
                    .iter()
                    .map(|c| {
                        (0..dim)
                            .map(|t| c.iter().zip(&basis).fold(QuadraticNumber::zero(), |acc, (x, b)| &acc + &(x * &b[t])))
                            .collect()
                    })
                    .collect();
                let mut e = eigs.clone();
                e.push(lam);
                next.push((sub, e));
            }
        }
        pieces = next;
    }
    for (basis, eigs) in pieces {
        let pairs = ops
            .iter()
            .zip(eigs)
            .map(|(op, t)| UnramifiedEigenPair::new(op.l, t, op.s_l.clone()))
            .collect::<Result<Vec<_>>>()?;
        report.systems.push(ClassicalEigensystem { disc: order.disc(), weight, multiplicity: basis.len(), pairs });
    }
    report.systems.sort_by(|a, b| {
        let ka: Vec<&BigRational> = a.pairs.iter().map(|x| &x.t).collect();
        let kb: Vec<&BigRational> = b.pairs.iter().map(|x| &x.t).collect();
        ka.cmp(&kb)
    });
    Ok(report)
}

impl fmt::Display for ClassicalEigensystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D={} weight={} mult={}", self.disc, self.weight, self.multiplicity)?;
        for p in &self.pairs {
            write!(f, " t{}={} s{}={}", p.l, p.t, p.l, p.s)?;
        }
        Ok(())
    }
}

/// Smallest positive integer N with N·x integral for every entry.
pub fn common_denominator(m: &Matrix<QuadraticNumber>) -> BigInt {
    let mut d = BigInt::one();
    for row in m {
        for x in row {
            d = d.lcm(x.rational_part().denom());
            d = d.lcm(x.irrational_part().denom());
        }
    }
    d
}

/// Whether a rational polynomial has integer coefficients.
pub fn is_integral(poly: &[BigRational]) -> bool {
    poly.iter().all(|c| c.is_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sigma;

    fn hurwitz() -> MaximalOrder {
        catalog_order(2).unwrap()
    }

    #[test]
    fn unit_classes_of_norm_l() {
        let o = hurwitz();
        for l in [3u64, 5, 7, 11] {
            assert_eq!(right_unit_classes(&o, o.enumerate_norm(l)).len() as u64, l + 1);
        }
    }

    #[test]
    fn catalog_builds() {
        for e in builtin_catalog() {
            let o = e.build().unwrap();
            assert_eq!(o.unit_count() as u64 * (e.disc - 1), 24);
            assert_eq!(o.algebra.ramified_primes(), vec![e.disc]);
        }
    }

    #[test]
    fn hilbert_symbols() {
        assert_eq!(hilbert_symbol(-1, -1, 2), -1);
        assert_eq!(hilbert_symbol(-1, -1, 3), 1);
        assert_eq!(hilbert_symbol(-1, -3, 3), -1);
        assert_eq!(hilbert_symbol(-2, -5, 5), -1);
        assert_eq!(hilbert_symbol(-2, -5, 2), 1);
    }

    #[test]
    fn bad_orders_rejected() {
        let alg = QuaternionAlgebra::new(-1, -1, 2).unwrap();
        let lipschitz = [
            [rat(1), rat(0), rat(0), rat(0)],
            [rat(0), rat(1), rat(0), rat(0)],
            [rat(0), rat(0), rat(1), rat(0)],
            [rat(0), rat(0), rat(0), rat(1)],
        ];
        assert!(matches!(MaximalOrder::new(alg, lipschitz), Err(Error::OutsideCatalog(_))));
        assert!(QuaternionAlgebra::new(-1, -1, 3).is_err());
        assert!(QuaternionAlgebra::new(1, -1, 1).is_err());
    }

    #[test]
    fn hurwitz_counts() {
        let o = hurwitz();
        assert_eq!(o.enumerate_norm(1).len(), 24);
        assert_eq!(o.enumerate_norm(2).len(), 24);
        assert_eq!(o.enumerate_norm(3).len(), 96);
        for n in (1..=50u64).step_by(2) {
            assert_eq!(o.enumerate_norm(n).len() as u64, 24 * sigma(n), "n = {n}");
        }
    }

    /// Exhaustive box search in {1,i,j,k} half-integer coordinates.
    #[test]
    fn hurwitz_enumeration_matches_box_search() {
        let o = hurwitz();
        for n in [1u64, 2, 3, 5, 6, 7] {
            let bound = (2.0 * (n as f64).sqrt()).ceil() as i64;
            let mut count = 0;
            for a in -bound..=bound {
                for b in -bound..=bound {
                    for c in -bound..=bound {
                        for d in -bound..=bound {
                            let all_even = [a, b, c, d].iter().all(|x| x % 2 == 0);
                            let all_odd = [a, b, c, d].iter().all(|x| x.rem_euclid(2) == 1);
                            if (all_even || all_odd) && (a * a + b * b + c * c + d * d) as u64 == 4 * n {
                                count += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(o.enumerate_norm(n).len(), count, "n = {n}");
        }
    }

    #[test]
    fn unit_group_closed() {
        for e in builtin_catalog() {
            let o = e.build().unwrap();
            let units = o.units().to_vec();
            for x in &units {
                for y in &units {
                    assert!(units.contains(&o.mul(x, y)));
                }
                let inv = units.iter().find(|y| o.mul(x, y) == o.one());
                assert!(inv.is_some());
            }
        }
    }

    #[test]
    fn norm_is_multiplicative() {
        let o = catalog_order(5).unwrap();
        let xs = o.enumerate_norm(3);
        let ys = o.enumerate_norm(7);
        for x in xs.iter().take(5) {
            for y in ys.iter().take(5) {
                assert_eq!(o.nrd(&o.mul(x, y)), 21);
            }
        }
    }

    #[test]
    fn splitting_relations() {
        let o = hurwitz();
        let s = split_at_p(&o, 3, 6).unwrap();
        let m = &s.modulus;
        let minus_one: Mat2 = [[m - 1, BigInt::zero()], [BigInt::zero(), m - 1]];
        assert_eq!(mat2_mul(&s.standard[1], &s.standard[1], m), minus_one);
        assert_eq!(mat2_mul(&s.standard[2], &s.standard[2], m), minus_one);
        let ij = mat2_mul(&s.standard[1], &s.standard[2], m);
        let ji = mat2_mul(&s.standard[2], &s.standard[1], m);
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!((&ij[r][c] + &ji[r][c]).mod_floor(m), BigInt::zero());
            }
        }
        assert_eq!(s.apply(&o.one()), [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]]);
        // 1 + i + j + k = 2·(basis element 3)
        let x = [0, 0, 0, 2];
        assert_eq!(mat2_det(&s.apply(&x), m), BigInt::from(4));
        assert_eq!(split_at_p(&o, 2, 6).unwrap_err(), Error::PRamified);
    }

    #[test]
    fn splitting_is_ring_map_everywhere() {
        for e in builtin_catalog() {
            let o = e.build().unwrap();
            for p in [3u64, 5, 7, 11] {
                if o.algebra.is_ramified(p) {
                    continue;
                }
                let s = split_at_p(&o, p, 8).unwrap();
                let els: Vec<OrderElement> = o.enumerate_norm(6).into_iter().take(12).collect();
                for x in &els {
                    assert_eq!(mat2_det(&s.apply(x), &s.modulus), BigInt::from(o.nrd(x)).mod_floor(&s.modulus));
                    for y in &els {
                        assert_eq!(s.apply(&o.mul(x, y)), mat2_mul(&s.apply(x), &s.apply(y), &s.modulus));
                    }
                }
            }
        }
    }

    #[test]
    fn coset_data() {
        let o = hurwitz();
        for (p, n) in [(3u64, 4usize), (5, 6), (7, 8)] {
            let s = split_at_p(&o, p, 10).unwrap();
            let c = up_coset_data(&o, &s).unwrap();
            assert_eq!(c.reps.len(), n);
            let mut reductions: Vec<Vec<u64>> = c
                .reps
                .iter()
                .map(|(nf, _)| nf.iter().flatten().map(|x| (x % BigInt::from(p)).to_u64().unwrap()).collect())
                .collect();
            reductions.sort();
            reductions.dedup();
            assert_eq!(reductions.len(), n);
        }
        let s = split_at_p(&o, 3, 10).unwrap();
        assert_eq!(norm_coset_data(&o, &s, 2).unwrap().reps.len(), 13);
    }

    #[test]
    fn sym_rep_is_multiplicative() {
        let g = [[rat(2), rat(3)], [rat(-1), rat(5)]];
        let h = [[rat(1), rat(-4)], [rat(7), rat(2)]];
        let gh = [
            [&g[0][0] * &h[0][0] + &g[0][1] * &h[1][0], &g[0][0] * &h[0][1] + &g[0][1] * &h[1][1]],
            [&g[1][0] * &h[0][0] + &g[1][1] * &h[1][0], &g[1][0] * &h[0][1] + &g[1][1] * &h[1][1]],
        ];
        for (k, k2) in [(0u32, 0i64), (1, 0), (3, 2), (4, -1)] {
            let lhs = linalg::mat_mul(&sym_rep(&g, k, k2), &sym_rep(&h, k, k2));
            assert_eq!(lhs, sym_rep(&gh, k, k2));
        }
    }

    #[test]
    fn hecke_examples() {
        let o = hurwitz();
        let w0 = AlgebraicWeightGL2::new(0, 0).unwrap();
        let t3 = hecke_matrix(&o, w0, 3).unwrap();
        assert_eq!(t3.matrix, vec![vec![QuadraticNumber::from_int(4)]]);
        assert_eq!(t3.s_l, rat(1));
        let t5 = hecke_matrix(&o, w0, 5).unwrap();
        assert_eq!(t5.matrix, vec![vec![QuadraticNumber::from_int(6)]]);
        let w1 = AlgebraicWeightGL2::new(1, 0).unwrap();
        assert!(hecke_matrix(&o, w1, 3).unwrap().matrix.is_empty());
        assert_eq!(form_space(&o, w1).dimension(), 0);
    }

    #[test]
    fn hecke_operators_commute_and_are_integral() {
        for e in builtin_catalog() {
            let o = e.build().unwrap();
            for (k1, k2) in [(0i64, 0i64), (2, 0), (4, 0), (6, 0), (8, 0), (10, 2)] {
                let w = AlgebraicWeightGL2::new(k1, k2).unwrap();
                let space = form_space(&o, w);
                if space.dimension() == 0 {
                    continue;
                }
                let ls: Vec<u64> = [3u64, 5, 7, 11].into_iter().filter(|&l| !o.algebra.is_ramified(l)).take(2).collect();
                let a = hecke_matrix_on(&o, &space, ls[0]).unwrap().matrix;
                let b = hecke_matrix_on(&o, &space, ls[1]).unwrap().matrix;
                assert_eq!(linalg::mat_mul(&a, &b), linalg::mat_mul(&b, &a), "D={} w={w}", e.disc);
                let cp = rational_charpoly(&a).unwrap();
                assert!(is_integral(&cp), "D={} w={w}: {cp:?}", e.disc);
            }
        }
    }

    #[test]
    fn eisenstein_system() {
        let o = hurwitz();
        let r = eigensystems(&o, AlgebraicWeightGL2::new(0, 0).unwrap(), &[3, 5, 7]).unwrap();
        assert_eq!(r.systems.len(), 1);
        let sys = &r.systems[0];
        for l in [3u64, 5, 7] {
            assert_eq!(sys.pair(l).unwrap().t, rat(l as i64 + 1));
            assert_eq!(sys.pair(l).unwrap().s, rat(1));
        }
    }
}
