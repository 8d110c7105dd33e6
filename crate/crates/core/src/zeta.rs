//! Zeta numerator from the Frobenius matrix.
//!
//! The q-power Frobenius is the semilinear norm `M sigma(M) .. sigma^(n-1)(M)`
//! of the p-power one. Its reverse characteristic polynomial
//! `det(1 - T M_q) = sum a_i T^i` is the numerator of the zeta function; the
//! coefficients are integers recovered from residues using the Weil bounds.

use std::sync::Arc;

use crate::basis::{build_integral_basis, transform_frobenius, BasisChange};
use crate::curve::HyperellipticCurve;
use crate::error::{Error, Result};
use crate::frobenius::{frobenius_matrix, FrobMatrix};
use crate::padic::{RingContext, ZqElem};

/// Dense square matrix over `W/p^N`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    pub dim: usize,
    pub entries: Vec<ZqElem>,
}

impl SquareMatrix {
    pub fn new(dim: usize, entries: Vec<ZqElem>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        SquareMatrix { dim, entries }
    }
    pub fn at(&self, r: usize, c: usize) -> &ZqElem {
        &self.entries[r * self.dim + c]
    }
    pub fn context(&self) -> &Arc<RingContext> {
        self.entries[0].context()
    }
    pub fn mul(&self, o: &Self) -> Self {
        let d = self.dim;
        let ctx = self.context();
        let entries = (0..d * d)
            .map(|k| {
                let (r, c) = (k / d, k % d);
                (0..d).fold(ZqElem::zero(ctx), |acc, j| &acc + &(self.at(r, j) * o.at(j, c)))
            })
            .collect();
        SquareMatrix::new(d, entries)
    }
    pub fn sigma(&self) -> Self {
        SquareMatrix::new(self.dim, self.entries.iter().map(|x| x.apply_sigma()).collect())
    }
}

/// `M sigma(M) sigma^2(M) .. sigma^(n-1)(M)`.
pub fn semilinear_norm(m: &SquareMatrix, n: usize) -> SquareMatrix {
    let mut acc = m.clone();
    let mut twisted = m.clone();
    for _ in 1..n {
        twisted = twisted.sigma();
        acc = acc.mul(&twisted);
    }
    acc
}

/// Coefficients `[1, c_1, .., c_d]` of `det(x - A) = x^d + c_1 x^(d-1) + ..`,
/// by Berkowitz's division-free algorithm.
pub fn char_poly(a: &SquareMatrix) -> Vec<ZqElem> {
    let ctx = a.context();
    let one = ZqElem::one(ctx);
    let mut c = vec![one.clone(), -a.at(0, 0)];
    for r in 1..a.dim {
        // A_r = [[A_{r-1}, S], [R, a_rr]]
        let s: Vec<ZqElem> = (0..r).map(|i| a.at(i, r).clone()).collect();
        let row: Vec<ZqElem> = (0..r).map(|j| a.at(r, j).clone()).collect();
        // first column of the Toeplitz factor: 1, -a_rr, -R S, -R A S, ..
        let mut col = vec![one.clone(), -a.at(r, r)];
        let mut v = s;
        for _ in 0..r {
            let dot = row.iter().zip(&v).fold(ZqElem::zero(ctx), |acc, (x, y)| &acc + &(x * y));
            col.push(-&dot);
            v = (0..r)
                .map(|i| (0..r).fold(ZqElem::zero(ctx), |acc, j| &acc + &(a.at(i, j) * &v[j])))
                .collect();
        }
        let next = (0..r + 2)
            .map(|i| (0..=i.min(r)).fold(ZqElem::zero(ctx), |acc, j| &acc + &(&col[i - j] * &c[j])))
            .collect();
        c = next;
    }
    c
}

/// `det(1 - T M_q) = sum_i a[i] T^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaNumerator {
    pub a: Vec<i128>,
    pub q: u128,
}

impl ZetaNumerator {
    pub fn genus(&self) -> usize {
        (self.a.len() - 1) / 2
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Smallest `e` with `p^e > 2 binom(2g, g) q^(g/2)`.
pub fn rounding_precision(p: u64, q: u128, g: usize) -> u32 {
    let b = binomial(2 * g as u64, g as u64);
    // compare squares: p^(2e) > 4 b^2 q^g
    let rhs = 4 * b * b * q.pow(g as u32);
    let mut e = 0;
    let mut pe: u128 = 1;
    while pe.saturating_mul(pe) <= rhs {
        e += 1;
        pe *= p as u128;
    }
    e
}

fn symmetric(x: &ZqElem) -> Result<i128> {
    x.to_symmetric_int().ok_or(Error::NonRationalCoefficient)
}

/// Integer zeta numerator from `M_q` known modulo `p^prec`.
pub fn char_poly_rounded(mq: &SquareMatrix, prec: u32) -> Result<ZetaNumerator> {
    let ctx = mq.context().with_precision(prec)?;
    let mq = SquareMatrix::new(mq.dim, mq.entries.iter().map(|x| x.reduce_to(&ctx)).collect::<Result<_>>()?);
    let d = mq.dim;
    let g = d / 2;
    let p = ctx.p();
    let q = ctx.q();
    let need = rounding_precision(p, q, g);
    if prec < need {
        return Err(Error::InsufficientPrecision { have: prec, need });
    }
    let c = char_poly(&mq);
    let mut a = vec![0i128; d + 1];
    for i in 0..=g {
        a[i] = symmetric(&c[i])?;
        let bound = binomial(d as u64, i as u64);
        let sq = (a[i].unsigned_abs()).checked_mul(a[i].unsigned_abs()).ok_or(Error::TooLarge(q))?;
        if sq > bound * bound * q.pow(i as u32) {
            return Err(Error::WeilBoundViolation { index: i, value: a[i] });
        }
    }
    if a[0] != 1 {
        return Err(Error::FunctionalEquationViolation(0));
    }
    for i in 0..g {
        let scale = i128::try_from(q.pow((g - i) as u32)).map_err(|_| Error::TooLarge(q))?;
        let v = a[i].checked_mul(scale).ok_or(Error::TooLarge(q))?;
        let residue = ZqElem::from_int(&ctx, (v % ctx.modulus() as i128) as i64);
        if residue != c[d - i] {
            return Err(Error::FunctionalEquationViolation(d - i));
        }
        a[d - i] = v;
    }
    Ok(ZetaNumerator { a, q })
}

/// Point counts over `F_(q^m)` for `m = 1..=m_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub q: u128,
    pub counts: Vec<i128>,
}

impl CountTable {
    pub fn count(&self, m: usize) -> i128 {
        self.counts[m - 1]
    }
}

/// Newton's identities on `sum a_i T^i = prod (1 - alpha_j T)`.
pub fn counts_from_zeta(z: &ZetaNumerator, m_max: usize) -> Result<CountTable> {
    let overflow = || Error::TooLarge(z.q);
    let a = |i: usize| z.a.get(i).copied().unwrap_or(0);
    let mut s = vec![0i128; m_max + 1];
    let mut counts = Vec::with_capacity(m_max);
    let q = i128::try_from(z.q).map_err(|_| overflow())?;
    for m in 1..=m_max {
        let mut acc = -(m as i128).checked_mul(a(m)).ok_or_else(overflow)?;
        for i in 1..m {
            acc = acc.checked_sub(a(i).checked_mul(s[m - i]).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
        s[m] = acc;
        let qm = q.checked_pow(m as u32).ok_or_else(overflow)?;
        counts.push(qm + 1 - acc);
    }
    Ok(CountTable { q: z.q, counts })
}

/// Everything computed on the way from a curve to its zeta numerator.
#[derive(Clone, Debug)]
pub struct ZetaComputation {
    pub frobenius: FrobMatrix,
    pub basis: BasisChange,
    pub integral: FrobMatrix,
    pub norm: SquareMatrix,
    pub numerator: ZetaNumerator,
}

pub fn compute_zeta(curve: &HyperellipticCurve) -> Result<ZetaComputation> {
    let frobenius = frobenius_matrix(curve)?;
    let basis = build_integral_basis(curve)?;
    let integral = transform_frobenius(&frobenius, &basis)?;
    let ctx = curve.context();
    let need = rounding_precision(ctx.p(), ctx.q(), curve.genus());
    if integral.precision() < need {
        let loss = frobenius.precision() - integral.precision();
        return Err(Error::InsufficientPrecision { have: ctx.precision(), need: need + loss });
    }
    let m = SquareMatrix::new(integral.dim(), integral.integral_entries()?);
    let norm = semilinear_norm(&m, ctx.degree());
    let numerator = char_poly_rounded(&norm, integral.precision())?;
    Ok(ZetaComputation { frobenius, basis, integral, norm, numerator })
}
