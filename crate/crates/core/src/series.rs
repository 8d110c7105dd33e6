//! Dense polynomials, truncated power series and Laurent tails over a
//! coefficient ring, plus the Bezout splitting used by cohomological
//! reduction.
//!
//! Every series carries its own truncation window; operations return the
//! tightest window that is still sound.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::padic::ZqElem;

/// Ring operations needed by the generic containers. Elements know their
/// ring, so constants are built "like" an existing element.
pub trait Coeff: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn int_like(&self, v: i64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    /// Inverse when the element is a unit.
    fn try_inv(&self) -> Option<Self>;

    fn one_like(&self) -> Self {
        self.int_like(1)
    }
}

impl Coeff for ZqElem {
    fn zero_like(&self) -> Self {
        ZqElem::zero(self.context())
    }
    fn int_like(&self, v: i64) -> Self {
        ZqElem::from_int(self.context(), v)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

/// Polynomial with the constant term first and no stored trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Coeff> {
    coeffs: Vec<T>,
    zero: T,
}

impl<T: Coeff> Poly<T> {
    pub fn new(mut coeffs: Vec<T>, zero: T) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero_elem()) {
            coeffs.pop();
        }
        Poly { coeffs, zero }
    }

    pub fn zero(zero: T) -> Self {
        Poly { coeffs: Vec::new(), zero }
    }

    pub fn constant(c: T) -> Self {
        let zero = c.zero_like();
        Self::new(vec![c], zero)
    }

    /// `c * x^k`
    pub fn monomial(c: T, k: usize) -> Self {
        let zero = c.zero_like();
        let mut coeffs = vec![zero.clone(); k];
        coeffs.push(c);
        Self::new(coeffs, zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn zero_elem(&self) -> &T {
        &self.zero
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let len = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..len).map(|i| self.coeff(i).plus(&o.coeff(i))).collect(), self.zero.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let len = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..len).map(|i| self.coeff(i).minus(&o.coeff(i))).collect(), self.zero.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.zero.clone());
        }
        let mut out = vec![self.zero.clone(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_elem() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Self::new(out, self.zero.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.times(c)).collect(), self.zero.clone())
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.zero.clone(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs, zero: self.zero.clone() }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.times(&c.int_like(i as i64)))
                .collect(),
            self.zero.clone(),
        )
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(self.zero.clone(), |acc, c| acc.times(x).plus(c))
    }

    pub fn map<F: Fn(&T) -> T>(&self, f: F) -> Self {
        Self::new(self.coeffs.iter().map(f).collect(), self.zero.clone())
    }

    /// Power-of-`x` substitution `A(x) -> A(x^k)`.
    pub fn inflate(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.zero.clone(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Self::new(coeffs, self.zero.clone())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::constant(self.zero.one_like());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Division with remainder by a polynomial with unit leading coefficient.
pub fn poly_divmod<T: Coeff>(a: &Poly<T>, b: &Poly<T>) -> Result<(Poly<T>, Poly<T>)> {
    let db = b.degree().ok_or(Error::NonUnitLeadingCoeff)?;
    let lead_inv = b.leading().and_then(|c| c.try_inv()).ok_or(Error::NonUnitLeadingCoeff)?;
    let zero = a.zero.clone();
    let mut rem: Vec<T> = a.coeffs.clone();
    let qlen = rem.len().saturating_sub(db);
    let mut quot = vec![zero.clone(); qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + db].times(&lead_inv);
        if c.is_zero_elem() {
            continue;
        }
        for (j, bj) in b.coeffs.iter().enumerate() {
            rem[k + j] = rem[k + j].minus(&c.times(bj));
        }
        quot[k] = c;
    }
    rem.truncate(db.min(rem.len()));
    Ok((Poly::new(quot, zero.clone()), Poly::new(rem, zero)))
}

/// Solves `A = U*Q + V*Q'` (with `deg U < deg Q'` and `deg V < deg Q`) by a
/// precomputed inverse of the Sylvester matrix of `(Q, Q')`.
#[derive(Clone, Debug)]
pub struct BezoutSplitter<T: Coeff> {
    dq: usize,
    dqp: usize,
    /// Row-major inverse, size (dq + dqp)^2; unknowns ordered U then V.
    inverse: Vec<T>,
}

impl<T: Coeff> BezoutSplitter<T> {
    pub fn new(q: &Poly<T>, qp: &Poly<T>) -> Result<Self> {
        let dq = q.degree().ok_or(Error::NotCoprime)?;
        let dqp = qp.degree().ok_or(Error::NotCoprime)?;
        let size = dq + dqp;
        let zero = q.zero.clone();
        let one = zero.one_like();
        // augmented [S | I]
        let width = 2 * size;
        let mut m = vec![zero.clone(); size * width];
        for k in 0..dqp {
            for (j, c) in q.coeffs.iter().enumerate() {
                m[(k + j) * width + k] = c.clone();
            }
        }
        for k in 0..dq {
            for (j, c) in qp.coeffs.iter().enumerate() {
                m[(k + j) * width + dqp + k] = c.clone();
            }
        }
        for i in 0..size {
            m[i * width + size + i] = one.clone();
        }
        for col in 0..size {
            let (pivot_row, pivot_inv) = (col..size)
                .find_map(|r| m[r * width + col].try_inv().map(|inv| (r, inv)))
                .ok_or(Error::NotCoprime)?;
            if pivot_row != col {
                for j in 0..width {
                    m.swap(pivot_row * width + j, col * width + j);
                }
            }
            for j in 0..width {
                m[col * width + j] = m[col * width + j].times(&pivot_inv);
            }
            for r in 0..size {
                if r == col {
                    continue;
                }
                let f = m[r * width + col].clone();
                if f.is_zero_elem() {
                    continue;
                }
                for j in 0..width {
                    let t = f.times(&m[col * width + j]);
                    m[r * width + j] = m[r * width + j].minus(&t);
                }
            }
        }
        let inverse = (0..size)
            .flat_map(|r| m[r * width + size..(r + 1) * width].to_vec())
            .collect();
        Ok(BezoutSplitter { dq, dqp, inverse })
    }

    pub fn split(&self, a: &Poly<T>) -> Result<(Poly<T>, Poly<T>)> {
        let size = self.dq + self.dqp;
        if a.degree().is_some_and(|d| d >= size) {
            return Err(Error::WrongDegree { expected: size - 1, found: a.degree().unwrap_or(0) });
        }
        let zero = a.zero.clone();
        let sol: Vec<T> = (0..size)
            .map(|r| {
                a.coeffs
                    .iter()
                    .enumerate()
                    .fold(zero.clone(), |acc, (j, c)| acc.plus(&self.inverse[r * size + j].times(c)))
            })
            .collect();
        let u = Poly::new(sol[..self.dqp].to_vec(), zero.clone());
        let v = Poly::new(sol[self.dqp..].to_vec(), zero);
        Ok((u, v))
    }
}

/// One-shot `A = U*Q + V*Qp`.
pub fn bezout_split<T: Coeff>(a: &Poly<T>, q: &Poly<T>, qp: &Poly<T>) -> Result<(Poly<T>, Poly<T>)> {
    BezoutSplitter::new(q, qp)?.split(a)
}

/// Power series known modulo `x^order`, `order = coeffs.len() >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<T: Coeff> {
    coeffs: Vec<T>,
}

impl<T: Coeff> TruncSeries<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "series needs a nonzero truncation order");
        TruncSeries { coeffs }
    }

    /// Truncates (or zero-pads) a polynomial to the given order.
    pub fn from_poly(p: &Poly<T>, order: usize) -> Self {
        Self::new((0..order).map(|i| p.coeff(i)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &T {
        &self.coeffs[i]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..order.min(self.order())].to_vec())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.plus(b)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.minus(b)).collect())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let order = self.order().min(o.order());
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; order];
        for (i, a) in self.coeffs.iter().enumerate().take(order) {
            if a.is_zero_elem() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(order - i) {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.order() == 1 {
            return Self::new(vec![self.coeffs[0].zero_like()]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.times(&c.int_like(i as i64)))
                .collect(),
        )
    }

    /// Evaluates this series at `s`, which must have zero constant term.
    /// The result is valid modulo `t^min(order(s), k0 * order(self))` where
    /// `k0 >= 1` is the order of vanishing of `s`.
    pub fn compose(&self, s: &TruncSeries<T>) -> Self {
        debug_assert!(s.coeffs[0].is_zero_elem());
        let vanish = s.coeffs.iter().position(|c| !c.is_zero_elem()).unwrap_or(s.order());
        let order = s.order().min(vanish.max(1).saturating_mul(self.order()));
        let s = s.truncate(order);
        let mut acc = Self::new(vec![self.coeffs[0].zero_like(); order]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&s);
            acc.coeffs[0] = acc.coeffs[0].plus(c);
        }
        acc
    }
}

/// Inverse of a series with unit constant term, by Newton doubling.
pub fn series_invert<T: Coeff>(s: &TruncSeries<T>) -> Result<TruncSeries<T>> {
    let c0_inv = s.coeffs[0].try_inv().ok_or(Error::NonUnitConstantTerm)?;
    let target = s.order();
    let two = c0_inv.int_like(2);
    let mut y = TruncSeries::new(vec![c0_inv]);
    let mut prec = 1;
    while prec < target {
        prec = (2 * prec).min(target);
        let y_ext = TruncSeries::from_poly(&Poly::new(y.coeffs.clone(), two.zero_like()), prec);
        let sy = s.truncate(prec).mul(&y_ext);
        let correction = TruncSeries::new(
            (0..prec)
                .map(|i| if i == 0 { two.minus(&sy.coeffs[0]) } else { sy.coeffs[i].negated() })
                .collect(),
        );
        y = y_ext.mul(&correction);
    }
    Ok(y)
}

/// Solves `u = t^2 * rinv(u)` for `u(t)` modulo `t^order` by fixed-point
/// iteration from `u = t^2`. The returned order is capped by how much of
/// `rinv` is known: an error `O(u^k)` in `rinv` shows up at `t^(2k+2)`.
pub fn solve_u_of_t<T: Coeff>(rinv: &TruncSeries<T>, order: usize) -> TruncSeries<T> {
    let order = order.min(2 * rinv.order() + 2).max(1);
    let zero = rinv.coeffs[0].zero_like();
    let t2 = |inner: &TruncSeries<T>| {
        let mut c = vec![zero.clone(); order];
        for i in 2..order {
            c[i] = inner.coeffs[i - 2].clone();
        }
        TruncSeries::new(c)
    };
    let mut u = t2(&TruncSeries::new(
        (0..order).map(|i| if i == 0 { zero.one_like() } else { zero.clone() }).collect(),
    ));
    // each round fixes at least two more coefficients
    for _ in 0..=order.div_ceil(2) {
        let next = t2(&rinv.compose(&u).padded(order));
        if next == u {
            break;
        }
        u = next;
    }
    u
}

impl<T: Coeff> TruncSeries<T> {
    fn padded(&self, order: usize) -> Self {
        let zero = self.coeffs[0].zero_like();
        Self::new((0..order).map(|i| self.coeffs.get(i).cloned().unwrap_or_else(|| zero.clone())).collect())
    }
}

/// Element of `t^e0 * R[[t]]` known modulo `t^top`, coefficients for
/// exponents `e0 .. top`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentTail<T: Coeff> {
    e0: i64,
    coeffs: Vec<T>,
}

impl<T: Coeff> LaurentTail<T> {
    pub fn new(e0: i64, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(LaurentTail { e0, coeffs })
    }

    pub fn from_series(s: &TruncSeries<T>, e0: i64) -> Self {
        LaurentTail { e0, coeffs: s.coeffs.clone() }
    }

    pub fn lowest(&self) -> i64 {
        self.e0
    }

    /// First exponent that is no longer known.
    pub fn top(&self) -> i64 {
        self.e0 + self.coeffs.len() as i64
    }

    /// Coefficient of `t^e`; `None` outside the known window, zero below it.
    pub fn coeff(&self, e: i64) -> Option<T> {
        if e < self.e0 {
            return Some(self.coeffs[0].zero_like());
        }
        self.coeffs.get((e - self.e0) as usize).cloned()
    }

    pub fn scale(&self, c: &T) -> Self {
        LaurentTail { e0: self.e0, coeffs: self.coeffs.iter().map(|a| a.times(c)).collect() }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let e0 = self.e0.min(o.e0);
        let top = self.top().min(o.top());
        if top <= e0 {
            return Err(Error::EmptyWindow);
        }
        let coeffs = (e0..top)
            .map(|e| self.coeff(e).unwrap().plus(&o.coeff(e).unwrap()))
            .collect();
        LaurentTail::new(e0, coeffs)
    }
}

/// Product of two Laurent tails; the window is limited by the less precise
/// factor relative to its own leading exponent.
pub fn laurent_mul<T: Coeff>(x: &LaurentTail<T>, y: &LaurentTail<T>) -> Result<LaurentTail<T>> {
    let len = x.coeffs.len().min(y.coeffs.len());
    let a = TruncSeries::new(x.coeffs[..len].to_vec());
    let b = TruncSeries::new(y.coeffs[..len].to_vec());
    LaurentTail::new(x.e0 + y.e0, a.mul(&b).coeffs)
}
