//! Truncated unramified p-adic rings.
//!
//! `W(F_q) / p^N` is realised as `(Z/p^N)[a] / (m(a))` where `m` is a monic
//! lift of an irreducible polynomial over `F_p`. The Frobenius lift `sigma`
//! sends `a` to the root of `m` congruent to `a^p`, found by Newton lifting;
//! that root is the Teichmuller representative of the image of `a`.
//!
//! All elements are stored at flat absolute precision `p^N`. The zero element
//! therefore has "valuation >= N" rather than an exact valuation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fp;

/// Parameters of `W(F_q)/p^N`. Immutable once built.
#[derive(Debug)]
pub struct RingContext {
    p: u64,
    n: usize,
    prec: u32,
    modulus: u64,
    seed: u64,
    /// Monic, constant term first, coefficients in `[0, p)`.
    min_poly: Vec<u64>,
    /// Coordinates of `sigma(a)^j` for `0 <= j < n`.
    sigma_powers: Vec<Vec<u64>>,
}

impl PartialEq for RingContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.n == other.n
            && self.prec == other.prec
            && self.min_poly == other.min_poly
    }
}
impl Eq for RingContext {}

/// Builds the context for `W(F_{p^n}) / p^N`; `seed` selects the defining
/// polynomial deterministically.
pub fn make_context(p: u64, n: usize, prec: u32, seed: u64) -> Result<Arc<RingContext>> {
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if !fp::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 || prec == 0 {
        return Err(Error::Parse("extension degree and precision must be at least 1".into()));
    }
    let modulus = checked_power(p, prec).ok_or(Error::PrecisionTooLarge { p, precision: prec })?;
    let min_poly = fp::find_irreducible(p, n, seed).ok_or(Error::NoIrreducibleFound { p, degree: n })?;

    let bare = Arc::new(RingContext {
        p,
        n,
        prec,
        modulus,
        seed,
        min_poly: min_poly.clone(),
        sigma_powers: Vec::new(),
    });
    let root = teichmuller_root_of_generator(&bare)?;
    let mut sigma_powers = Vec::with_capacity(n);
    let mut acc = ZqElem::one(&bare);
    for _ in 0..n {
        sigma_powers.push(acc.coeffs.clone());
        acc = &acc * &root;
    }
    Ok(Arc::new(RingContext {
        p,
        n,
        prec,
        modulus,
        seed,
        min_poly,
        sigma_powers,
    }))
}

fn checked_power(p: u64, e: u32) -> Option<u64> {
    let v = p.checked_pow(e)?;
    (v < (1u64 << 63)).then_some(v)
}

/// Newton-lifts `a^p mod (p, m)` to a root of `m` modulo `p^N`.
fn teichmuller_root_of_generator(ctx: &Arc<RingContext>) -> Result<ZqElem> {
    let gen = ZqElem::generator(ctx);
    let mut root = gen.pow(ctx.p as u128);
    let m: Vec<ZqElem> = ctx.min_poly.iter().map(|&c| ZqElem::from_int(ctx, c as i64)).collect();
    let dm: Vec<ZqElem> = m
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| c * &ZqElem::from_int(ctx, j as i64))
        .collect();
    let eval = |coeffs: &[ZqElem], x: &ZqElem| {
        coeffs
            .iter()
            .rev()
            .fold(ZqElem::zero(ctx), |acc, c| &(&acc * x) + c)
    };
    // each round doubles the number of correct digits
    let mut rounds = 1;
    while (1u32 << (rounds - 1)) < ctx.prec {
        rounds += 1;
    }
    for _ in 0..rounds {
        let f = eval(&m, &root);
        if f.is_zero() {
            break;
        }
        let df = eval(&dm, &root).inv()?;
        root = &root - &(&f * &df);
    }
    debug_assert!(eval(&m, &root).is_zero());
    Ok(root)
}

impl RingContext {
    pub fn p(&self) -> u64 {
        self.p
    }
    /// Degree of the residue field over `F_p`.
    pub fn degree(&self) -> usize {
        self.n
    }
    /// Absolute precision `N`.
    pub fn precision(&self) -> u32 {
        self.prec
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn min_poly(&self) -> &[u64] {
        &self.min_poly
    }
    pub fn q(&self) -> u128 {
        (self.p as u128).pow(self.n as u32)
    }

    /// The same ring at another precision.
    pub fn with_precision(&self, prec: u32) -> Result<Arc<RingContext>> {
        make_context(self.p, self.n, prec, self.seed)
    }

    /// Image of `a` under the Frobenius lift.
    pub fn sigma_image(self: &Arc<Self>) -> ZqElem {
        if self.n == 1 {
            return ZqElem::generator(self);
        }
        ZqElem { ctx: Arc::clone(self), coeffs: self.sigma_powers[1].clone() }
    }

    fn reduce_signed(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }
}

fn same_ring(a: &Arc<RingContext>, b: &Arc<RingContext>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Element of `W(F_q)/p^N` in the power basis `1, a, ..., a^{n-1}`.
#[derive(Clone)]
pub struct ZqElem {
    ctx: Arc<RingContext>,
    coeffs: Vec<u64>,
}

impl PartialEq for ZqElem {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ctx, &other.ctx) && self.coeffs == other.coeffs
    }
}
impl Eq for ZqElem {}

impl fmt::Debug for ZqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ZqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.n == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| match j {
                0 => c.to_string(),
                1 => format!("{c}*a"),
                _ => format!("{c}*a^{j}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

/// Checked ring operation; `Neg` ignores `y` apart from the context check.
pub fn zq_arith(op: ArithOp, x: &ZqElem, y: &ZqElem) -> Result<ZqElem> {
    if !same_ring(&x.ctx, &y.ctx) {
        return Err(Error::ContextMismatch);
    }
    Ok(match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Neg => -x,
    })
}

impl ZqElem {
    pub fn zero(ctx: &Arc<RingContext>) -> Self {
        ZqElem { ctx: Arc::clone(ctx), coeffs: vec![0; ctx.n] }
    }

    pub fn one(ctx: &Arc<RingContext>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Arc<RingContext>, v: i64) -> Self {
        let mut coeffs = vec![0; ctx.n];
        coeffs[0] = ctx.reduce_signed(v as i128);
        ZqElem { ctx: Arc::clone(ctx), coeffs }
    }

    /// Element `sum_j c_j a^j`; powers `a^j` with `j >= n` are reduced by `m`.
    pub fn from_poly_in_a(ctx: &Arc<RingContext>, c: &[i64]) -> Self {
        let gen = Self::generator(ctx);
        let mut acc = Self::zero(ctx);
        for &cj in c.iter().rev() {
            acc = &(&acc * &gen) + &Self::from_int(ctx, cj);
        }
        acc
    }

    /// Element with the given power-basis coordinates, reduced mod `p^N`.
    pub fn from_coords(ctx: &Arc<RingContext>, coords: &[u64]) -> Self {
        assert_eq!(coords.len(), ctx.n, "coordinate count must equal n");
        let coeffs = coords.iter().map(|&c| c % ctx.modulus).collect();
        ZqElem { ctx: Arc::clone(ctx), coeffs }
    }

    pub fn generator(ctx: &Arc<RingContext>) -> Self {
        if ctx.n == 1 {
            // m(a) = a + c, so the generator is the integer -c
            return Self::from_int(ctx, -(ctx.min_poly[0] as i64));
        }
        let mut coeffs = vec![0; ctx.n];
        coeffs[1] = 1;
        ZqElem { ctx: Arc::clone(ctx), coeffs }
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn coords(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 % self.ctx.modulus && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Largest `v <= N` with `p^v` dividing every coordinate; `None` for zero,
    /// meaning "at least N".
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| {
                let mut v = 0;
                let mut c = c;
                while c % self.ctx.p == 0 {
                    c /= self.ctx.p;
                    v += 1;
                }
                v
            })
            .min()
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn pow(&self, mut e: u128) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let ctx = &self.ctx;
        // x^(q-2) inverts modulo p; Newton y <- y(2 - xy) lifts to p^N
        let mut y = self.pow(ctx.q() - 2);
        let two = Self::from_int(ctx, 2);
        let mut correct = 1u32;
        while correct < ctx.prec {
            y = &y * &(&two - &(self * &y));
            correct *= 2;
        }
        debug_assert!((self * &y).is_one());
        Ok(y)
    }

    pub fn apply_sigma(&self) -> Self {
        let ctx = &self.ctx;
        if ctx.n == 1 {
            return self.clone();
        }
        let mut coeffs = vec![0u64; ctx.n];
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (k, &s) in ctx.sigma_powers[j].iter().enumerate() {
                coeffs[k] = (coeffs[k] + fp::mul_mod(c, s, ctx.modulus)) % ctx.modulus;
            }
        }
        ZqElem { ctx: Arc::clone(ctx), coeffs }
    }

    pub fn apply_sigma_n(&self, times: usize) -> Self {
        (0..times).fold(self.clone(), |x, _| x.apply_sigma())
    }

    /// Multiplies by `p^v` (exact, digits above `N` are lost).
    pub fn mul_p_pow(&self, v: u32) -> Self {
        if v >= self.ctx.prec {
            return Self::zero(&self.ctx);
        }
        let f = self.ctx.p.pow(v);
        let coeffs = self.coeffs.iter().map(|&c| fp::mul_mod(c, f, self.ctx.modulus)).collect();
        ZqElem { ctx: Arc::clone(&self.ctx), coeffs }
    }

    /// Divides the stored representative by `p^v`. The top `v` digits of the
    /// result are zero, so the absolute precision of the quotient drops by `v`.
    pub fn div_p_pow(&self, v: u32) -> Result<Self> {
        if v == 0 {
            return Ok(self.clone());
        }
        if v > self.ctx.prec {
            return Err(Error::NotDivisible(v));
        }
        let f = self.ctx.p.pow(v);
        if self.coeffs.iter().any(|&c| c % f != 0) {
            return Err(Error::NotDivisible(v));
        }
        let coeffs = self.coeffs.iter().map(|&c| c / f).collect();
        Ok(ZqElem { ctx: Arc::clone(&self.ctx), coeffs })
    }

    /// Divides by a nonzero integer, splitting it as `unit * p^v`.
    pub fn div_int(&self, d: i64) -> Result<Self> {
        assert!(d != 0, "division by zero");
        let p = self.ctx.p as i64;
        let (mut unit, mut v) = (d, 0u32);
        while unit % p == 0 {
            unit /= p;
            v += 1;
        }
        let u = Self::from_int(&self.ctx, unit).inv()?;
        (self * &u).div_p_pow(v)
    }

    /// Re-reads the canonical coordinates in another ring with the same
    /// residue field. Going up in precision picks the canonical lift.
    pub fn reduce_to(&self, ctx: &Arc<RingContext>) -> Result<Self> {
        if ctx.p != self.ctx.p || ctx.n != self.ctx.n || ctx.min_poly != self.ctx.min_poly {
            return Err(Error::ContextMismatch);
        }
        Ok(Self::from_coords(ctx, &self.coeffs))
    }

    /// Coordinates reduced modulo `p^v` (canonical representatives).
    pub fn truncate_mod_p_pow(&self, v: u32) -> Self {
        if v >= self.ctx.prec {
            return self.clone();
        }
        let f = self.ctx.p.pow(v);
        let coeffs = self.coeffs.iter().map(|&c| c % f).collect();
        ZqElem { ctx: Arc::clone(&self.ctx), coeffs }
    }

    /// Symmetric integer representative, when the element lies in `Z/p^N`.
    pub fn to_symmetric_int(&self) -> Option<i128> {
        if self.coeffs[1..].iter().any(|&c| c != 0) {
            return None;
        }
        let m = self.ctx.modulus as i128;
        let c = self.coeffs[0] as i128;
        Some(if 2 * c > m { c - m } else { c })
    }
}

impl<'a> Add<&'a ZqElem> for &'a ZqElem {
    type Output = ZqElem;
    fn add(self, rhs: &ZqElem) -> ZqElem {
        debug_assert!(same_ring(&self.ctx, &rhs.ctx));
        let m = self.ctx.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(&a, &b)| {
                let s = a + b;
                if s >= m { s - m } else { s }
            })
            .collect();
        ZqElem { ctx: Arc::clone(&self.ctx), coeffs }
    }
}

impl<'a> Sub<&'a ZqElem> for &'a ZqElem {
    type Output = ZqElem;
    fn sub(self, rhs: &ZqElem) -> ZqElem {
        debug_assert!(same_ring(&self.ctx, &rhs.ctx));
        let m = self.ctx.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(&a, &b)| if a >= b { a - b } else { a + m - b })
            .collect();
        ZqElem { ctx: Arc::clone(&self.ctx), coeffs }
    }
}

impl<'a> Neg for &'a ZqElem {
    type Output = ZqElem;
    fn neg(self) -> ZqElem {
        let m = self.ctx.modulus;
        let coeffs = self.coeffs.iter().map(|&a| if a == 0 { 0 } else { m - a }).collect();
        ZqElem { ctx: Arc::clone(&self.ctx), coeffs }
    }
}

impl<'a> Mul<&'a ZqElem> for &'a ZqElem {
    type Output = ZqElem;
    fn mul(self, rhs: &ZqElem) -> ZqElem {
        debug_assert!(same_ring(&self.ctx, &rhs.ctx));
        let ctx = &self.ctx;
        let m = ctx.modulus as u128;
        let n = ctx.n;
        if n == 1 {
            let c = (self.coeffs[0] as u128 * rhs.coeffs[0] as u128 % m) as u64;
            return ZqElem { ctx: Arc::clone(ctx), coeffs: vec![c] };
        }
        let mut prod = vec![0u128; 2 * n - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u128 * b as u128) % m;
            }
        }
        // a^n = -sum_{j<n} m_j a^j
        for k in (n..2 * n - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for j in 0..n {
                let t = c * ctx.min_poly[j] as u128 % m;
                prod[k - n + j] = (prod[k - n + j] + m - t) % m;
            }
        }
        let coeffs = prod[..n].iter().map(|&c| c as u64).collect();
        ZqElem { ctx: Arc::clone(ctx), coeffs }
    }
}
