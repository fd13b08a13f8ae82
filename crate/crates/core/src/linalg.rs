//! Dense linear algebra over exact fields.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::quadratic::QuadraticNumber;

pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Division by a nonzero element.
    fn div(&self, o: &Self) -> Self;
    fn from_rational(r: &BigRational) -> Self;

    fn neg(&self) -> Self {
        Self::zero_elem().sub(self)
    }
}

impl Field for BigRational {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

impl Field for QuadraticNumber {
    fn zero_elem() -> Self {
        QuadraticNumber::zero()
    }
    fn one_elem() -> Self {
        QuadraticNumber::one()
    }
    fn is_zero_elem(&self) -> bool {
        QuadraticNumber::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        QuadraticNumber::div(self, o).expect("division by zero")
    }
    fn from_rational(r: &BigRational) -> Self {
        QuadraticNumber::rational(r.clone())
    }
}

pub type Matrix<F> = Vec<Vec<F>>;

pub fn zeros<F: Field>(rows: usize, cols: usize) -> Matrix<F> {
    vec![vec![F::zero_elem(); cols]; rows]
}

pub fn identity<F: Field>(n: usize) -> Matrix<F> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = F::one_elem();
    }
    m
}

pub fn mat_mul<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out: Matrix<F> = zeros(n, m);
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero_elem() {
                continue;
            }
            for j in 0..m {
                out[i][j] = out[i][j].add(&a[i][t].mul(&b[t][j]));
            }
        }
    }
    out
}

pub fn mat_add<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.add(y)).collect())
        .collect()
}

pub fn mat_vec<F: Field>(a: &Matrix<F>, v: &[F]) -> Vec<F> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(F::zero_elem(), |acc, (x, y)| acc.add(&x.mul(y))))
        .collect()
}

pub fn transpose<F: Field>(a: &Matrix<F>) -> Matrix<F> {
    if a.is_empty() {
        return vec![];
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<F: Field>(m: &mut Matrix<F>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero_elem()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = F::one_elem().div(&m[r][c]);
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero_elem() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = f.mul(&m[r][j]);
                    m[i][j] = m[i][j].sub(&d);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the null space (as vectors).
pub fn kernel<F: Field>(a: &Matrix<F>) -> Vec<Vec<F>> {
    let mut m = a.clone();
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero_elem(); cols];
            v[f] = F::one_elem();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = m[r][f].neg();
            }
            v
        })
        .collect()
}

/// Basis of the column space, as a list of column vectors.
pub fn column_space<F: Field>(a: &Matrix<F>) -> Vec<Vec<F>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    pivots.iter().map(|&c| a.iter().map(|r| r[c].clone()).collect()).collect()
}

/// Coordinates of v in the basis (given as vectors), if v lies in their span.
pub fn coordinates<F: Field>(basis: &[Vec<F>], v: &[F]) -> Option<Vec<F>> {
    let n = v.len();
    let r = basis.len();
    let mut aug: Matrix<F> = (0..n)
        .map(|i| {
            let mut row: Vec<F> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&r) {
        return None;
    }
    let mut x = vec![F::zero_elem(); r];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][r].clone();
    }
    Some(x)
}

/// Matrix of the restriction of `a` to the invariant subspace spanned by `basis`.
pub fn restrict<F: Field>(a: &Matrix<F>, basis: &[Vec<F>]) -> Option<Matrix<F>> {
    let cols: Option<Vec<Vec<F>>> = basis.iter().map(|b| coordinates(basis, &mat_vec(a, b))).collect();
    Some(transpose(&cols?))
}

/// Characteristic polynomial det(X − A), coefficients from constant term up.
pub fn charpoly<F: Field>(a: &Matrix<F>) -> Vec<F> {
    let n = a.len();
    let mut h = a.clone();
    // reduce to upper Hessenberg form by similarity
    for c in 0..n.saturating_sub(2) {
        let Some(p) = (c + 1..n).find(|&i| !h[i][c].is_zero_elem()) else {
            continue;
        };
        if p != c + 1 {
            h.swap(p, c + 1);
            for row in h.iter_mut() {
                row.swap(p, c + 1);
            }
        }
        let inv = F::one_elem().div(&h[c + 1][c]);
        for i in c + 2..n {
            if h[i][c].is_zero_elem() {
                continue;
            }
            let f = h[i][c].mul(&inv);
            for j in 0..n {
                let d = f.mul(&h[c + 1][j]);
                h[i][j] = h[i][j].sub(&d);
            }
            for row in h.iter_mut() {
                let d = f.mul(&row[i]);
                row[c + 1] = row[c + 1].add(&d);
            }
        }
    }
    hessenberg_charpoly(&h)
}

/// Characteristic polynomial of an upper Hessenberg matrix without divisions.
pub fn hessenberg_charpoly<F: Field>(h: &Matrix<F>) -> Vec<F> {
    let n = h.len();
    // p[m] = charpoly of leading m×m block
    let mut polys: Vec<Vec<F>> = vec![vec![F::one_elem()]];
    for m in 1..=n {
        let i = m - 1;
        // X·p[m−1] − h[i][i]·p[m−1]
        let prev = &polys[m - 1];
        let mut next = vec![F::zero_elem(); m + 1];
        for (d, c) in prev.iter().enumerate() {
            next[d + 1] = next[d + 1].add(c);
            next[d] = next[d].sub(&h[i][i].mul(c));
        }
        let mut prod = F::one_elem();
        for r in (0..i).rev() {
            prod = prod.mul(&h[r + 1][r]);
            if prod.is_zero_elem() {
                break;
            }
            let coef = prod.mul(&h[r][i]);
            for (d, c) in polys[r].iter().enumerate() {
                next[d] = next[d].sub(&coef.mul(c));
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// Polynomial quotient by a monic linear factor (X − r); returns (quotient, remainder).
pub fn deflate<F: Field>(poly: &[F], r: &F) -> (Vec<F>, F) {
    let n = poly.len();
    if n == 0 {
        return (vec![], F::zero_elem());
    }
    let mut q = vec![F::zero_elem(); n - 1];
    let mut acc = poly[n - 1].clone();
    for d in (0..n - 1).rev() {
        q[d] = acc.clone();
        acc = poly[d].add(&acc.mul(r));
    }
    (q, acc)
}

/// Rational roots of a rational polynomial (constant term first), with multiplicity,
/// plus the leftover factor with no rational roots.
pub fn rational_roots(poly: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut p: Vec<BigRational> = poly.to_vec();
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    let mut roots = vec![];
    // zero roots first
    while p.len() > 1 && p[0].is_zero() {
        roots.push(BigRational::zero());
        p.remove(0);
    }
    loop {
        if p.len() <= 1 {
            break;
        }
        let approx = complex_roots(&p);
        let mut found = None;
        for (re, im) in approx {
            if im.abs() > 1e-6 * (1.0 + re.abs()) {
                continue;
            }
            for cand in candidate_rationals(re, &p) {
                let (q, rem) = deflate(&p, &cand);
                if rem.is_zero() {
                    found = Some((cand, q));
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
        match found {
            Some((r, q)) => {
                roots.push(r);
                p = q;
            }
            None => break,
        }
    }
    roots.sort();
    (roots, p)
}

fn candidate_rationals(re: f64, p: &[BigRational]) -> Vec<BigRational> {
    // denominators of rational roots divide the leading coefficient's numerator after clearing denominators
    let lcm = p.iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
    let lead = (p.last().unwrap() * BigRational::from_integer(lcm)).to_integer().abs();
    let mut dens = vec![BigInt::one()];
    if let Some(l) = lead.to_u64() {
        if l <= 10_000 {
            dens = (1..=l).filter(|d| l % d == 0).map(BigInt::from).collect();
        }
    }
    let mut out = vec![];
    for d in dens {
        let df = d.to_f64().unwrap();
        let n = (re * df).round();
        if !n.is_finite() {
            continue;
        }
        let nb = BigInt::from(n as i64);
        for delta in [-1i64, 0, 1] {
            out.push(BigRational::new(&nb + delta, d.clone()));
        }
    }
    out
}

/// Approximate complex roots by Aberth iteration in f64.
pub fn complex_roots(poly: &[BigRational]) -> Vec<(f64, f64)> {
    let n = poly.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = poly[n].to_f64().unwrap_or(1.0);
    let c: Vec<f64> = poly.iter().map(|x| x.to_f64().unwrap_or(0.0) / lead).collect();
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64;
            (0.5 * bound * th.cos(), 0.5 * bound * th.sin())
        })
        .collect();
    let eval = |x: (f64, f64)| -> ((f64, f64), (f64, f64)) {
        let mut v = (0.0, 0.0);
        let mut d = (0.0, 0.0);
        for k in (0..=n).rev() {
            d = cadd(cmul(d, x), v);
            v = cadd(cmul(v, x), (c[k], 0.0));
        }
        (v, d)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v == (0.0, 0.0) {
                continue;
            }
            let ratio = cdiv(v, d);
            let mut s = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s = cadd(s, cdiv((1.0, 0.0), csub(z[i], z[j])));
                }
            }
            let w = cdiv(ratio, csub((1.0, 0.0), cmul(ratio, s)));
            if !w.0.is_finite() || !w.1.is_finite() {
                continue;
            }
            z[i] = csub(z[i], w);
            moved = moved.max(w.0.hypot(w.1));
        }
        if moved < 1e-14 * bound {
            break;
        }
    }
    z
}

fn cadd(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}
fn csub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}
fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}
fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let n = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / n, (a.1 * b.0 - a.0 * b.1) / n)
}
