//! Matrices of U_p and u₀ on overconvergent forms, truncated in degree.
//!
//! A form is a Γ-invariant function on P¹(F_p) with values in Z_p⟨z⟩, the point p
//! standing for ∞. It is recorded by its values at orbit representatives; basis
//! vector z^n at the i-th representative has index n·r + i.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::padic::Rational;
use crate::quaternion::{mat2_adj, mat2_mul, norm_coset_data, row_hnf, split_at_p, Mat2, MaximalOrder, OrderElement};
use crate::residue::{BigResidues, ResidueRing, SmallResidues};
use crate::spectral::{fredholm_series, slopes_of, FredholmSeries, SlopeData, TruncatedCompactOperator};
use crate::weight::AlgebraicWeightGL2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// Norm p² double coset, the operator u₀.
    U0,
    /// Norm p double coset, the operator U_p.
    Up,
}

impl OperatorKind {
    pub fn exponent(self) -> u32 {
        match self {
            OperatorKind::U0 => 2,
            OperatorKind::Up => 1,
        }
    }
}

/// A truncated operator on Γ-invariant functions, through their values at orbit representatives.
/// Its eigenvalues are `scale` (the lcm of the stabilizer orders) times the Hecke eigenvalues.
#[derive(Clone, Debug)]
pub struct OverconvergentOperator {
    pub kind: OperatorKind,
    pub weight: AlgebraicWeightGL2,
    pub p: u64,
    pub degrees: usize,
    pub scale: i64,
    /// Representatives of the unit-group orbits on P¹(F_p).
    pub orbits: Vec<usize>,
    /// v_p(scale), subtracted from every slope.
    pub slope_shift: i64,
    pub operator: TruncatedCompactOperator,
}

impl OverconvergentOperator {
    /// Restriction to polynomials of degree ≤ k₁ − k₂, an invariant subspace.
    pub fn classical_block(&self) -> TruncatedCompactOperator {
        let k = self.weight.diff() as usize;
        self.operator.leading_block((k + 1) * self.orbits.len())
    }

    pub fn fredholm(&self, terms: usize) -> Result<FredholmSeries> {
        fredholm_series(&self.operator, terms)
    }

    /// Certified slopes of the operator itself, after removing the unit-group scaling.
    pub fn slopes(&self, terms: usize) -> Result<ShiftedSlopes> {
        let s = self.fredholm(terms)?;
        Ok(ShiftedSlopes::new(slopes_of(&s), self.slope_shift))
    }

    pub fn classical_slopes(&self) -> Result<ShiftedSlopes> {
        let b = self.classical_block();
        let s = fredholm_series(&b, b.size)?;
        Ok(ShiftedSlopes::new(slopes_of(&s), self.slope_shift))
    }
}

#[derive(Clone, Debug)]
pub struct ShiftedSlopes {
    pub raw: SlopeData,
    pub shift: i64,
}

impl ShiftedSlopes {
    fn new(raw: SlopeData, shift: i64) -> Self {
        ShiftedSlopes { raw, shift }
    }

    /// Determined slopes with multiplicity, ascending.
    pub fn slopes(&self) -> Vec<Rational> {
        let s = Rational::from_integer(self.shift);
        self.raw.slopes().into_iter().map(|x| x - s).collect()
    }
}

type RMat<E> = Vec<Vec<E>>;

fn point_of<R: ResidueRing>(r: &R, m: &[[R::Elem; 2]; 2]) -> usize {
    let p = r.prime();
    let pr = |e: &R::Elem| (r.to_bigint(e) % BigInt::from(p)).try_into().unwrap_or(0u64);
    let a = pr(&m[0][0]);
    if a == 0 {
        return p as usize;
    }
    let c = pr(&m[1][0]);
    let inv = crate::arith::pow_mod(a, p - 2, p);
    (crate::arith::mul_mod(c, inv, p)) as usize
}

fn rep<R: ResidueRing>(r: &R, x: usize, inverse: bool) -> [[R::Elem; 2]; 2] {
    let p = r.prime() as usize;
    if x < p {
        let c = if inverse { r.neg(&r.from_i64(x as i64)) } else { r.from_i64(x as i64) };
        [[r.one(), r.zero()], [c, r.one()]]
    } else if inverse {
        [[r.zero(), r.one()], [r.neg(&r.one()), r.zero()]]
    } else {
        [[r.zero(), r.neg(&r.one())], [r.one(), r.zero()]]
    }
}

fn mul2<R: ResidueRing>(r: &R, x: &[[R::Elem; 2]; 2], y: &[[R::Elem; 2]; 2]) -> [[R::Elem; 2]; 2] {
    let e = |i: usize, j: usize| r.add(&r.mul(&x[i][0], &y[0][j]), &r.mul(&x[i][1], &y[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn det2<R: ResidueRing>(r: &R, x: &[[R::Elem; 2]; 2]) -> R::Elem {
    r.sub(&r.mul(&x[0][0], &x[1][1]), &r.mul(&x[0][1], &x[1][0]))
}

fn inv2<R: ResidueRing>(r: &R, x: &[[R::Elem; 2]; 2]) -> [[R::Elem; 2]; 2] {
    let d = r.inv_unit(&det2(r, x)).expect("Iwahori element has unit determinant");
    [
        [r.mul(&x[1][1], &d), r.neg(&r.mul(&x[0][1], &d))],
        [r.neg(&r.mul(&x[1][0], &d)), r.mul(&x[0][0], &d)],
    ]
}

fn from_mat2<R: ResidueRing>(r: &R, m: &Mat2) -> [[R::Elem; 2]; 2] {
    [[r.from_bigint(&m[0][0]), r.from_bigint(&m[0][1])], [r.from_bigint(&m[1][0]), r.from_bigint(&m[1][1])]]
}

/// Matrix (out × inp) of z^n ↦ (a + cz)^(k−n) (b + dz)^n, with a a unit.
/// Columns follow the recurrence col_(n+1) = col_n · (b + dz)/(a + cz).
fn action<R: ResidueRing>(r: &R, g: &[[R::Elem; 2]; 2], k: i64, scale: &R::Elem, inp: usize, out: usize) -> RMat<R::Elem> {
    let (a, b, c, d) = (&g[0][0], &g[0][1], &g[1][0], &g[1][1]);
    let ainv = r.inv_unit(a).expect("upper-left entry is a unit");
    let mut col = vec![r.zero(); out];
    if out > 0 {
        col[0] = scale.clone();
    }
    for _ in 0..k {
        for i in (1..out).rev() {
            col[i] = r.add(&r.mul(a, &col[i]), &r.mul(c, &col[i - 1]));
        }
        col[0] = r.mul(a, &col[0]);
    }
    let mut m = vec![vec![r.zero(); inp]; out];
    for n in 0..inp {
        for (s, v) in col.iter().enumerate() {
            m[s][n] = v.clone();
        }
        for i in (1..out).rev() {
            col[i] = r.add(&r.mul(b, &col[i]), &r.mul(d, &col[i - 1]));
        }
        col[0] = r.mul(b, &col[0]);
        for i in 0..out {
            let prev = if i == 0 { r.zero() } else { r.mul(c, &col[i - 1]) };
            col[i] = r.mul(&r.sub(&col[i], &prev), &ainv);
        }
    }
    m
}

fn add_block<R: ResidueRing>(r: &R, target: &mut RMat<R::Elem>, block: &RMat<R::Elem>) {
    for (trow, brow) in target.iter_mut().zip(block) {
        for (t, b) in trow.iter_mut().zip(brow) {
            *t = r.add(t, b);
        }
    }
}

struct Setup {
    p: u64,
    k: i64,
    k2: i64,
    e: u32,
    n: usize,
    units: Vec<Mat2>,
    /// Orbit representatives in P¹(F_p) with their integer weights L/|Stab|.
    reps: Vec<(usize, i64)>,
    /// (x, t) ↦ the matrix ι(σ)·g_x ξ_t / p^e reduced mod p^M.
    hecke_cosets: Vec<Vec<Mat2>>,
}

fn power_signed<R: ResidueRing>(r: &R, x: &R::Elem, e: i64) -> R::Elem {
    if e >= 0 {
        r.pow(x, e as u64)
    } else {
        r.pow(&r.inv_unit(x).expect("unit"), (-e) as u64)
    }
}

/// (Av)_x = Σ_t ξ_t·u_t⁻¹·(e′v)_y, (e′v)_y = Σ_γ u_γ⁻¹·v_w, applied as one monoid element per (t, γ).
fn assemble<R: ResidueRing>(r: &R, s: &Setup) -> Vec<Vec<BigInt>> {
    let n = s.n;
    let pe = s.p.pow(s.e) as usize;
    let pe_r = r.from_i64(pe as i64);
    let units: Vec<_> = s.units.iter().map(|g| from_mat2(r, g)).collect();
    let r_count = s.reps.len();
    let index_of = |w: usize| s.reps.iter().position(|&(x, _)| x == w);
    let size = r_count * n;
    let mut a = vec![vec![BigInt::from(0); size]; size];
    for (xi, &(x, _)) in s.reps.iter().enumerate() {
        let mut blocks: Vec<RMat<R::Elem>> = vec![vec![vec![r.zero(); n]; n]; r_count];
        for tt in 0..pe {
            let xi_t = [[r.one(), r.zero()], [r.from_i64((s.p as usize * tt) as i64), pe_r.clone()]];
            let kk = from_mat2(r, &s.hecke_cosets[x][tt]);
            let y = point_of(r, &kk);
            let ut_inv = inv2(r, &mul2(r, &rep(r, y, true), &kk));
            let gy = rep(r, y, false);
            for g in &units {
                let gam = mul2(r, g, &gy);
                let w = point_of(r, &gam);
                let Some(zi) = index_of(w) else { continue };
                let ug_inv = inv2(r, &mul2(r, &rep(r, w, true), &gam));
                let iw = mul2(r, &ut_inv, &ug_inv);
                let scale = r.mul(&power_signed(r, &det2(r, &iw), s.k2), &r.from_i64(s.reps[zi].1));
                let blk = action(r, &mul2(r, &xi_t, &iw), s.k, &scale, n, n);
                add_block(r, &mut blocks[zi], &blk);
            }
        }
        for (zi, blk) in blocks.iter().enumerate() {
            for (i, row) in blk.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    a[i * r_count + xi][j * r_count + zi] = r.to_bigint(v);
                }
            }
        }
    }
    a
}

fn point_big(m: &Mat2, p: u64) -> usize {
    let pb = BigInt::from(p);
    let red = |x: &BigInt| -> u64 { x.mod_floor(&pb).try_into().unwrap() };
    let a = red(&m[0][0]);
    if a == 0 {
        return p as usize;
    }
    crate::arith::mul_mod(red(&m[1][0]), crate::arith::pow_mod(a, p - 2, p), p) as usize
}

/// Orbits of the unit group on P¹(F_p): (representative, orbit size), ordered by representative.
fn orbits(units: &[Mat2], p: u64, m: &BigInt) -> Vec<(usize, usize)> {
    let pts = p as usize + 1;
    let mut seen = vec![false; pts];
    let mut out = vec![];
    for x in 0..pts {
        if seen[x] {
            continue;
        }
        let gx = rep_big(x, p, m);
        let mut size = 0;
        for g in units {
            let y = point_big(&mat2_mul(g, &gx, m), p);
            if !seen[y] {
                seen[y] = true;
                size += 1;
            }
        }
        out.push((x, size));
    }
    out
}

fn rep_big(x: usize, p: u64, m: &BigInt) -> Mat2 {
    let one = BigInt::from(1);
    let zero = BigInt::from(0);
    if (x as u64) < p {
        [[one.clone(), zero.clone()], [BigInt::from(x), one]]
    } else {
        [[zero.clone(), m - &one], [one, zero]]
    }
}

/// The truncated operator for `kind` on degree < `degrees` overconvergent forms, mod p^`prec`.
pub fn overconvergent_operator(
    order: &MaximalOrder,
    weight: AlgebraicWeightGL2,
    p: u64,
    degrees: usize,
    prec: u32,
    kind: OperatorKind,
) -> Result<OverconvergentOperator> {
    let k = weight.diff();
    if degrees <= k as usize {
        return Err(Error::InvalidInput(format!("need more than {k} degrees to contain the classical forms")));
    }
    let e = kind.exponent();
    let work = prec + e;
    let split = split_at_p(order, p, work)?;
    let cosets = norm_coset_data(order, &split, e)?;
    let table: BTreeMap<Mat2, OrderElement> = cosets.reps.into_iter().collect();
    let big_m = &split.modulus;
    let m = crate::arith::big_pow_i(p, prec);
    let pe = BigInt::from(p.pow(e));
    let one = BigInt::from(1);
    let zero = BigInt::from(0);
    let units: Vec<Mat2> = order
        .units()
        .iter()
        .map(|g| {
            let img = split.apply(g);
            [[img[0][0].mod_floor(&m), img[0][1].mod_floor(&m)], [img[1][0].mod_floor(&m), img[1][1].mod_floor(&m)]]
        })
        .collect();
    let orbit_data = orbits(&units, p, &m);
    let unit_order = order.unit_count();
    let stabs: Vec<i64> = orbit_data.iter().map(|(_, size)| (unit_order / size) as i64).collect();
    let scale = stabs.iter().fold(1i64, |l, s| num_integer::lcm(l, *s));
    let reps: Vec<(usize, i64)> = orbit_data.iter().zip(&stabs).map(|((x, _), s)| (*x, scale / s)).collect();
    let slope_shift = crate::arith::vp_u64(scale as u64, p).unwrap_or(0) as i64;
    if (prec as i64) <= slope_shift + 1 {
        return Err(Error::PrecisionUnderflow { suggested_n: degrees, suggested_m: slope_shift as u32 + 10 });
    }
    let mut hecke_cosets = vec![];
    for x in 0..=p {
        let gx = rep_big(x as usize, p, big_m);
        let mut row = vec![];
        for t in 0..p.pow(e) {
            let xi: Mat2 = [[one.clone(), zero.clone()], [BigInt::from(p * t), pe.clone()]];
            let h = mat2_mul(&gx, &xi, big_m);
            let key = row_hnf(&mat2_adj(&h, big_m), p, big_m).ok_or(Error::CosetReductionFailed { expected: 0, found: 0 })?;
            let sigma = table.get(&key).ok_or(Error::CosetReductionFailed { expected: table.len(), found: 0 })?;
            let prod = mat2_mul(&split.apply(sigma), &h, big_m);
            let mut kk: Mat2 = Default::default();
            for i in 0..2 {
                for j in 0..2 {
                    let (q, rem) = prod[i][j].div_rem(&pe);
                    if !rem.is_zero_big() {
                        return Err(Error::CosetReductionFailed { expected: 0, found: 0 });
                    }
                    kk[i][j] = q.mod_floor(&m);
                }
            }
            row.push(kk);
        }
        hecke_cosets.push(row);
    }
    let setup = Setup { p, k: k as i64, k2: weight.k2, e, n: degrees, units, reps: reps.clone(), hecke_cosets };
    let rows = match SmallResidues::new(p, prec) {
        Some(r) => assemble(&r, &setup),
        None => assemble(&BigResidues::new(p, prec), &setup),
    };
    let bounds = (0..rows.len()).map(|i| (i / reps.len()) as i64).collect();
    let operator = TruncatedCompactOperator::new(p, prec, rows, bounds, Some(degrees as i64))?;
    Ok(OverconvergentOperator { kind, weight, p, degrees, scale, orbits: reps.iter().map(|r| r.0).collect(), slope_shift, operator })
}

trait IsZeroBig {
    fn is_zero_big(&self) -> bool;
}

impl IsZeroBig for BigInt {
    fn is_zero_big(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}
