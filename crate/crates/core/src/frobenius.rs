//! Matrix of the p-power Frobenius on the anti-invariant part of de Rham
//! cohomology, in the basis `x^i dx/y`, `0 <= i < 2g`.
//!
//! The Frobenius lift `x -> x^p`, `y -> y^sigma` is expanded as a series in
//! `D(x) = Q^sigma(x^p) - Q(x)^p`, then reduced back to the basis: first the
//! poles in `y` (vertical), then the degree in `x` (horizontal).
//!
//! Arithmetic is fixed-point: every form is stored as `p^shift * form` modulo
//! `p^W`, with `shift` large enough that all exact intermediates are
//! integral. Divisions by `p` are then exact divisions of representatives.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::curve::HyperellipticCurve;
use crate::error::{Error, Result};
use crate::padic::{RingContext, ZqElem};
use crate::series::{poly_divmod, BezoutSplitter, Poly};

/// `floor(log_p(x))` for `x >= 1`.
pub(crate) fn floor_log(p: u64, x: u64) -> u32 {
    let mut r = 0;
    let mut pw = p;
    while pw <= x {
        r += 1;
        pw = match pw.checked_mul(p) {
            Some(v) => v,
            None => break,
        };
    }
    r
}

/// `ceil(log_p(x))` for `x >= 1`.
pub(crate) fn ceil_log(p: u64, x: u64) -> u32 {
    let mut r = 0;
    let mut pw = 1u64;
    while pw < x {
        r += 1;
        pw = pw.saturating_mul(p);
    }
    r
}

/// `sum_s A_s(x) dx / y^(2s+1)`, stored scaled: the represented form is
/// `p^(-shift)` times the stored one.
#[derive(Clone, Debug)]
pub struct OddDifferential {
    terms: BTreeMap<usize, Poly<ZqElem>>,
    shift: u32,
    ctx: Arc<RingContext>,
}

impl OddDifferential {
    pub fn zero(ctx: &Arc<RingContext>) -> Self {
        OddDifferential { terms: BTreeMap::new(), shift: 0, ctx: Arc::clone(ctx) }
    }

    /// `A dx / y^(2s+1)`
    pub fn single(s: usize, a: Poly<ZqElem>) -> Self {
        let ctx = Arc::clone(a.zero_elem().context());
        let mut d = Self::zero(&ctx);
        d.add_term(s, &a);
        d
    }

    pub fn add_term(&mut self, s: usize, a: &Poly<ZqElem>) {
        let entry = self
            .terms
            .entry(s)
            .or_insert_with(|| Poly::zero(ZqElem::zero(&self.ctx)));
        *entry = entry.add(a);
    }

    pub fn term(&self, s: usize) -> Poly<ZqElem> {
        self.terms
            .get(&s)
            .cloned()
            .unwrap_or_else(|| Poly::zero(ZqElem::zero(&self.ctx)))
    }

    /// Pole indices with a nonzero numerator, ascending.
    pub fn pole_indices(&self) -> Vec<usize> {
        self.terms.iter().filter(|(_, a)| !a.is_zero()).map(|(&s, _)| s).collect()
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    /// Multiplies the stored data by `p^extra`, leaving the form unchanged.
    pub fn rescaled(&self, extra: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&s, a)| (s, a.map(|c| c.mul_p_pow(extra))))
            .collect();
        OddDifferential { terms, shift: self.shift + extra, ctx: Arc::clone(&self.ctx) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|a| a.is_zero())
    }
}

/// Coordinates in the basis `x^i dx/y`; the class is `p^(-shift) * scaled`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedClass {
    pub scaled: Vec<ZqElem>,
    pub shift: u32,
}

/// A p-adic number written as `p^valuation * unit`; a `None` valuation means
/// the value is zero at the available precision.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicEntry {
    pub valuation: Option<i64>,
    pub unit: ZqElem,
}

impl ReducedClass {
    pub fn is_zero(&self) -> bool {
        self.scaled.iter().all(|c| c.is_zero())
    }

    pub fn coordinate(&self, i: usize) -> PadicEntry {
        scaled_entry(&self.scaled[i], self.shift, None)
    }
}

fn scaled_entry(x: &ZqElem, shift: u32, prec: Option<u32>) -> PadicEntry {
    let cap = prec.map_or(x.context().precision(), |p| p + shift);
    match x.valuation().filter(|&v| v < cap) {
        None => PadicEntry { valuation: None, unit: ZqElem::zero(x.context()) },
        Some(v) => PadicEntry {
            valuation: Some(v as i64 - shift as i64),
            unit: x.div_p_pow(v).expect("valuation divides").truncate_mod_p_pow(cap - v),
        },
    }
}

/// Square matrix over the fraction field at fixed absolute precision:
/// the true matrix is `p^(-shift) * scaled`, known modulo `p^prec`.
#[derive(Clone, Debug)]
pub struct FrobMatrix {
    dim: usize,
    scaled: Vec<ZqElem>,
    shift: u32,
    prec: u32,
}

impl FrobMatrix {
    pub fn new(dim: usize, scaled: Vec<ZqElem>, shift: u32, prec: u32) -> Self {
        assert_eq!(scaled.len(), dim * dim);
        FrobMatrix { dim, scaled, shift, prec }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn shift(&self) -> u32 {
        self.shift
    }
    /// Guaranteed absolute precision of the entries.
    pub fn precision(&self) -> u32 {
        self.prec
    }
    pub fn context(&self) -> &Arc<RingContext> {
        self.scaled[0].context()
    }
    pub fn scaled(&self, r: usize, c: usize) -> &ZqElem {
        &self.scaled[r * self.dim + c]
    }
    pub fn scaled_entries(&self) -> &[ZqElem] {
        &self.scaled
    }

    pub fn entry(&self, r: usize, c: usize) -> PadicEntry {
        scaled_entry(self.scaled(r, c), self.shift, Some(self.prec))
    }

    /// Smallest entry valuation, ignoring entries that vanish at precision.
    pub fn min_valuation(&self) -> Option<i64> {
        (0..self.dim)
            .flat_map(|r| (0..self.dim).map(move |c| (r, c)))
            .filter_map(|(r, c)| self.entry(r, c).valuation)
            .min()
    }

    pub fn is_integral(&self) -> bool {
        self.min_valuation().map_or(true, |v| v >= 0)
    }

    /// Entries as integral elements of `W/p^prec`, if the matrix is integral.
    pub fn integral_entries(&self) -> Result<Vec<ZqElem>> {
        let ctx = self.context().with_precision(self.prec)?;
        self.scaled
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let x = x.truncate_mod_p_pow(self.prec + self.shift);
                x.div_p_pow(self.shift)
                    .map_err(|_| Error::IntegralityViolation { row: k / self.dim, col: k % self.dim })?
                    .reduce_to(&ctx)
            })
            .collect()
    }
}

/// Working-precision choices for one Frobenius computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPlan {
    /// Requested absolute precision of the matrix.
    pub target: u32,
    /// Number of series terms kept in the Frobenius lift.
    pub series_terms: usize,
    /// Bound on p-adic digits lost in the vertical phase.
    pub vertical_loss: u32,
    /// Bound on p-adic digits lost in the horizontal phase.
    pub horizontal_loss: u32,
    /// Scaling exponent that makes every exact intermediate integral.
    pub shift: u32,
    /// Flat precision of the working ring.
    pub working: u32,
}

impl PrecisionPlan {
    pub fn new(p: u64, g: usize, target: u32) -> Self {
        let g64 = g as u64;
        let horizontal_loss = floor_log(p, (2 * g64 + 1) * p);
        let pole = |k: u64| p * k + (p - 1) / 2;
        let loss_at = |k: u64| floor_log(p, (2 * pole(k)).saturating_sub(1).max(1));
        // term k has valuation >= k+1 and loses at most loss_at(k) + horizontal
        let mut k = 1u64;
        while ((k + 1) as i64 - (loss_at(k) + horizontal_loss) as i64) < target as i64 {
            k += 1;
        }
        let vertical_loss = loss_at(k - 1);
        let shift = vertical_loss + horizontal_loss;
        let rounding = (2 * vertical_loss + horizontal_loss).max(2 * horizontal_loss);
        PrecisionPlan {
            target,
            series_terms: k as usize,
            vertical_loss,
            horizontal_loss,
            shift,
            working: target + shift + rounding,
        }
    }

    /// Precision the computed matrix is guaranteed to.
    pub fn effective(&self) -> u32 {
        let rounding = (2 * self.vertical_loss + self.horizontal_loss).max(2 * self.horizontal_loss);
        self.working - self.shift - rounding
    }
}

/// `binom(-1/2, k) = (-1)^k * C(2k, k) / 4^k`, a p-adic unit for odd p.
fn binom_minus_half(ctx: &Arc<RingContext>, k: usize) -> ZqElem {
    let mut central: u128 = 1;
    for j in 1..=k as u128 {
        central = central * (2 * j) * (2 * j - 1) / (j * j);
    }
    let m = ctx.modulus() as u128;
    let c = ZqElem::from_coords(ctx, &{
        let mut v = vec![0u64; ctx.degree()];
        v[0] = (central % m) as u64;
        v
    });
    let inv4 = ZqElem::from_int(ctx, 4).inv().expect("p is odd");
    let val = &c * &inv4.pow(k as u128);
    if k % 2 == 1 {
        -&val
    } else {
        val
    }
}

/// Cohomological reductions for one curve at one working precision.
#[derive(Clone, Debug)]
pub struct Reducer {
    g: usize,
    q: Poly<ZqElem>,
    qp: Poly<ZqElem>,
    splitter: BezoutSplitter<ZqElem>,
}

impl Reducer {
    pub fn new(curve: &HyperellipticCurve) -> Result<Self> {
        let q = curve.q_poly().clone();
        let qp = q.derivative();
        let splitter = BezoutSplitter::new(&q, &qp)?;
        Ok(Reducer { g: curve.genus(), q, qp, splitter })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    /// Removes all poles of index `s >= 1` using
    /// `d(V / y^(2s-1)) = (V' Q - (2s-1)/2 V Q') dx / y^(2s+1)`.
    pub fn reduce_vertical(&self, omega: &OddDifferential) -> Result<OddDifferential> {
        let mut terms = omega.terms.clone();
        let top = terms.keys().next_back().copied().unwrap_or(0);
        let zero = ZqElem::zero(&omega.ctx);
        let two = ZqElem::from_int(&omega.ctx, 2);
        for s in (1..=top).rev() {
            let Some(a) = terms.remove(&s) else { continue };
            if a.is_zero() {
                continue;
            }
            // A = A' + Q*B with deg A' <= 2g; Q*B/y^(2s+1) = B/y^(2s-1)
            let (b, a_red) = poly_divmod(&a, &self.q)?;
            let (u, v) = self.splitter.split(&a_red)?;
            let dv = v.derivative().scale(&two);
            let dv = Poly::new(
                dv.coeffs()
                    .iter()
                    .map(|c| c.div_int(2 * s as i64 - 1))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|_| self.exhausted(omega))?,
                zero.clone(),
            );
            let lower = terms.entry(s - 1).or_insert_with(|| Poly::zero(zero.clone()));
            *lower = lower.add(&b).add(&u).add(&dv);
        }
        Ok(OddDifferential { terms, shift: omega.shift, ctx: Arc::clone(&omega.ctx) })
    }

    /// Reduces `A dx/y` to degree `< 2g` using
    /// `d(x^m y) = (m x^(m-1) Q + x^m Q'/2) dx/y`.
    pub fn reduce_horizontal(&self, a: &Poly<ZqElem>, shift: u32) -> Result<ReducedClass> {
        let g2 = 2 * self.g;
        let mut coeffs: Vec<ZqElem> = a.coeffs().to_vec();
        let ctx = Arc::clone(a.zero_elem().context());
        let zero = ZqElem::zero(&ctx);
        while coeffs.len() > g2 {
            let deg = coeffs.len() - 1;
            let c = coeffs.pop().unwrap();
            if c.is_zero() {
                continue;
            }
            let m = deg - g2;
            // 2 d(x^m y) has leading coefficient 2m + 2g + 1
            let f = c
                .div_int((2 * m + g2 + 1) as i64)
                .map_err(|_| Error::InsufficientPrecision { have: ctx.precision(), need: ctx.precision() + 1 })?;
            let mut exact = self.qp.shift(m);
            if m > 0 {
                exact = exact.add(&self.q.shift(m - 1).scale(&ZqElem::from_int(&ctx, 2 * m as i64)));
            }
            for (j, e) in exact.coeffs().iter().enumerate().take(deg) {
                coeffs[j] = &coeffs[j] - &(&f * e);
            }
        }
        coeffs.resize(g2, zero);
        Ok(ReducedClass { scaled: coeffs, shift })
    }

    /// Full reduction of an odd differential to basis coordinates.
    pub fn reduce(&self, omega: &OddDifferential) -> Result<ReducedClass> {
        let v = self.reduce_vertical(omega)?;
        self.reduce_horizontal(&v.term(0), v.shift)
    }

    fn exhausted(&self, omega: &OddDifferential) -> Error {
        let prec = omega.ctx.precision();
        Error::InsufficientPrecision { have: prec, need: prec + 1 }
    }
}

/// Frobenius image of `x^i dx/y`:
/// `p x^(pi+p-1) sum_{k<K} binom(-1/2,k) D^k dx / y^(2pk+p)`.
/// Terms `k >= K` have valuation at least `K+1` since `p | D`.
pub fn frobenius_pullback(curve: &HyperellipticCurve, i: usize, k_trunc: usize) -> Result<OddDifferential> {
    let lift = FrobeniusLift::new(curve);
    lift.pullback(i, k_trunc, 0)
}

/// Data shared by all columns: `Q`, `D` and its powers.
struct FrobeniusLift {
    ctx: Arc<RingContext>,
    g: usize,
    p: usize,
    q: Poly<ZqElem>,
    d: Poly<ZqElem>,
}

impl FrobeniusLift {
    fn new(curve: &HyperellipticCurve) -> Self {
        let ctx = Arc::clone(curve.context());
        let p = ctx.p() as usize;
        let q = curve.q_poly().clone();
        let q_sigma = q.map(|c| c.apply_sigma());
        let d = q_sigma.inflate(p).sub(&q.pow(p));
        debug_assert!(d.coeffs().iter().all(|c| c.valuation().map_or(true, |v| v >= 1)));
        FrobeniusLift { ctx, g: curve.genus(), p, q, d }
    }

    fn d_powers(&self, k_trunc: usize) -> Vec<Poly<ZqElem>> {
        let mut out = Vec::with_capacity(k_trunc);
        let mut acc = Poly::constant(ZqElem::one(&self.ctx));
        for _ in 0..k_trunc {
            out.push(acc.clone());
            acc = acc.mul(&self.d);
        }
        out
    }

    fn pullback(&self, i: usize, k_trunc: usize, shift: u32) -> Result<OddDifferential> {
        self.pullback_with(i, &self.d_powers(k_trunc), shift)
    }

    fn pullback_with(&self, i: usize, d_pow: &[Poly<ZqElem>], shift: u32) -> Result<OddDifferential> {
        if i >= 2 * self.g {
            return Err(Error::IndexOutOfRange { index: i, bound: 2 * self.g });
        }
        let p = self.p;
        let prec = self.ctx.precision();
        let mut omega = OddDifferential::zero(&self.ctx);
        omega.shift = shift;
        for (k, dk) in d_pow.iter().enumerate() {
            if k as u32 + 1 + shift >= prec {
                break;
            }
            let factor = binom_minus_half(&self.ctx, k).mul_p_pow(1 + shift);
            let num = dk.scale(&factor).shift(p * i + p - 1);
            debug_assert!(num
                .coeffs()
                .iter()
                .all(|c| c.valuation().map_or(true, |v| v as usize >= k + 1 + shift as usize)));
            let s = p * k + (p - 1) / 2;
            // Q-adic digits: digit_j Q^j / y^(2s+1)
            let mut rest = num;
            let mut j = 0usize;
            let mut q_pow = Poly::constant(ZqElem::one(&self.ctx));
            while !rest.is_zero() {
                let (quot, digit) = poly_divmod(&rest, &self.q)?;
                if j <= s {
                    omega.add_term(s - j, &digit);
                } else {
                    q_pow = q_pow.mul(&self.q);
                    omega.add_term(0, &digit.mul(&q_pow));
                }
                rest = quot;
                j += 1;
            }
        }
        Ok(omega)
    }
}

/// Computes the Frobenius matrix of `curve` to the absolute precision
/// recorded in its context, and checks that `p^r M` is integral with
/// `r = floor(log_p(2g-1))`.
pub fn frobenius_matrix(curve: &HyperellipticCurve) -> Result<FrobMatrix> {
    let g = curve.genus();
    let p = curve.p();
    let plan = PrecisionPlan::new(p, g, curve.context().precision());
    let work = curve.with_precision(plan.working)?;
    let reducer = Reducer::new(&work)?;
    let lift = FrobeniusLift::new(&work);
    let d_pow = lift.d_powers(plan.series_terms);
    let columns: Vec<ReducedClass> = (0..2 * g)
        .into_par_iter()
        .map(|i| reducer.reduce(&lift.pullback_with(i, &d_pow, plan.shift)?))
        .collect::<Result<_>>()?;
    let dim = 2 * g;
    let mut scaled = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for col in &columns {
            scaled.push(col.scaled[r].clone());
        }
    }
    let m = FrobMatrix::new(dim, scaled, plan.shift, plan.effective());
    check_denominator_bound(&m, p, g)?;
    Ok(m)
}

/// Default precision for a curve over `F_(p^n)` of genus `g`: enough for the
/// zeta rounding after the basis change, plus two guard digits.
pub fn precision_policy(p: u64, n: usize, g: usize) -> u32 {
    let central = (1..=g as u128).fold(1u128, |acc, i| acc * (g as u128 + i) / i);
    let rounding = (n * g).div_ceil(2) as u32 + ceil_log(p, (2 * central) as u64);
    let basis_loss: u32 = (1..=g as u64).map(|l| crate::basis::vp(p, 2 * l - 1)).sum();
    rounding + denominator_exponent(p, g).max(basis_loss) + 2
}

/// `floor(log_p(2g-1))`, the exponent in the denominator bound.
pub fn denominator_exponent(p: u64, g: usize) -> u32 {
    floor_log(p, 2 * g as u64 - 1)
}

pub fn check_denominator_bound(m: &FrobMatrix, p: u64, g: usize) -> Result<()> {
    let bound = denominator_exponent(p, g);
    for r in 0..m.dim() {
        for c in 0..m.dim() {
            if let Some(v) = m.entry(r, c).valuation {
                if v < -(bound as i64) {
                    return Err(Error::DenominatorBoundViolation { row: r, col: c, valuation: v, bound });
                }
            }
        }
    }
    Ok(())
}
