//! Exact rational reference implementation for curves over F_p (n = 1).
//!
//! Shares no arithmetic with the library: polynomials over Q, reductions
//! through an extended-Euclid Bezout identity, no fixed-point scaling, and
//! the local expansion at infinity solved by undetermined coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Dense polynomial over Q, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct RPoly(pub Vec<Q>);

impl RPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        RPoly(c)
    }
    pub fn from_ints(c: &[i64]) -> Self {
        RPoly::new(c.iter().map(|&v| q(v)).collect())
    }
    pub fn zero() -> Self {
        RPoly(Vec::new())
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn deg(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }
    pub fn coeff(&self, i: usize) -> Q {
        self.0.get(i).cloned().unwrap_or_else(Q::zero)
    }
    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        RPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        RPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
    pub fn scale(&self, c: &Q) -> Self {
        RPoly::new(self.0.iter().map(|x| x * c).collect())
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return RPoly::zero();
        }
        let mut out = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RPoly::new(out)
    }
    pub fn x_pow(k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = Q::one();
        RPoly(c)
    }
    pub fn derivative(&self) -> Self {
        RPoly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
    }
    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(RPoly::from_ints(&[1]), |acc, _| acc.mul(self))
    }
    /// `f(x^k)`
    pub fn compose_x_pow(&self, k: usize) -> Self {
        let mut out = vec![Q::zero(); (self.0.len().max(1) - 1) * k + 1];
        for (i, c) in self.0.iter().enumerate() {
            out[i * k] = c.clone();
        }
        RPoly::new(out)
    }
    pub fn divmod(&self, b: &Self) -> (Self, Self) {
        let db = b.deg().expect("nonzero divisor");
        let lead = b.0[db].clone();
        let mut r = self.0.clone();
        let mut quo = vec![Q::zero(); self.0.len().saturating_sub(db).max(1)];
        while r.len() > db {
            let top = r.len() - 1;
            let c = &r[top] / &lead;
            for j in 0..=db {
                let t = &c * &b.0[j];
                r[top - db + j] -= t;
            }
            quo[top - db] = c;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (RPoly::new(quo), RPoly::new(r))
    }
}

/// `(alpha, beta)` with `alpha a + beta b = 1`, for coprime `a`, `b`.
pub fn bezout(a: &RPoly, b: &RPoly) -> (RPoly, RPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (RPoly::from_ints(&[1]), RPoly::zero());
    let (mut t0, mut t1) = (RPoly::zero(), RPoly::from_ints(&[1]));
    while !r1.is_zero() {
        let (qt, r) = r0.divmod(&r1);
        let s = s0.sub(&qt.mul(&s1));
        let t = t0.sub(&qt.mul(&t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    assert_eq!(r0.deg(), Some(0), "not coprime");
    let inv = r0.0[0].recip();
    (s0.scale(&inv), t0.scale(&inv))
}

/// `binom(-1/2, k)` from its defining product.
pub fn binom_minus_half(k: usize) -> Q {
    (0..k).fold(Q::one(), |acc, j| acc * (q(-1) / q(2) - q(j as i64)) / q(j as i64 + 1))
}

fn floor_log(p: u64, x: u64) -> u32 {
    let mut r = 0;
    let mut v = x;
    while v >= p {
        v /= p;
        r += 1;
    }
    r
}

/// Series length making the omitted tail vanish modulo `p^digits`.
pub fn truncation(p: u64, g: usize, digits: i64) -> usize {
    let h = floor_log(p, (2 * g as u64 + 1) * p) as i64;
    let mut k = 1usize;
    while (k as i64 + 1) - floor_log(p, 2 * p * k as u64 + p - 2) as i64 - h < digits {
        k += 1;
    }
    k
}

/// Coordinates of `sum_s A_s dx/y^(2s+1)` in the basis `x^i dx/y`.
pub fn reduce(mut terms: BTreeMap<usize, RPoly>, qpoly: &RPoly, g: usize) -> Vec<Q> {
    let qp = qpoly.derivative();
    let (_, beta) = bezout(qpoly, &qp);
    let top = terms.keys().next_back().copied().unwrap_or(0);
    for s in (1..=top).rev() {
        let Some(a) = terms.remove(&s) else { continue };
        // A = U Q + V Q'
        let (_, v) = a.mul(&beta).divmod(qpoly);
        let (u, rem) = a.sub(&v.mul(&qp)).divmod(qpoly);
        assert!(rem.is_zero());
        let lower = u.add(&v.derivative().scale(&(q(2) / q(2 * s as i64 - 1))));
        let e = terms.entry(s - 1).or_insert_with(RPoly::zero);
        *e = e.add(&lower);
    }
    let mut a = terms.remove(&0).unwrap_or_else(RPoly::zero);
    while let Some(d) = a.deg() {
        if d < 2 * g {
            break;
        }
        let m = d - 2 * g;
        // d(x^m y) = (m x^(m-1) Q + x^m Q' / 2) dx/y
        let mut b = RPoly::x_pow(m).mul(&qp).scale(&(q(1) / q(2)));
        if m > 0 {
            b = b.add(&RPoly::x_pow(m - 1).mul(qpoly).scale(&q(m as i64)));
        }
        let c = &a.0[d] / &b.0[d];
        a = a.sub(&b.scale(&c));
    }
    (0..2 * g).map(|i| a.coeff(i)).collect()
}

/// Frobenius matrix `m[row][col]` of `y^2 = Q` over F_p, exact up to the
/// series truncation, which is invisible modulo `p^digits`.
pub fn frobenius_matrix(p: u64, g: usize, qcoeffs: &[i64], digits: i64) -> Vec<Vec<Q>> {
    let qpoly = RPoly::from_ints(qcoeffs);
    let pu = p as usize;
    let dpoly = qpoly.compose_x_pow(pu).sub(&qpoly.pow(pu));
    let k_trunc = truncation(p, g, digits);
    let mut cols = Vec::new();
    for i in 0..2 * g {
        let mut terms = BTreeMap::new();
        let mut dk = RPoly::from_ints(&[1]);
        for k in 0..k_trunc {
            let c = binom_minus_half(k) * q(p as i64);
            terms.insert(pu * k + (pu - 1) / 2, RPoly::x_pow(pu * i + pu - 1).mul(&dk).scale(&c));
            dk = dk.mul(&dpoly);
        }
        cols.push(reduce(terms, &qpoly, g));
    }
    (0..2 * g).map(|r| (0..2 * g).map(|c| cols[c][r].clone()).collect()).collect()
}

/// `table[j][l-1]`: coefficient of `t^(-2l) dt` in `x^j dx/y`, exactly.
///
/// With `u = 1/x`, `t = y u^(g+1)` and `s = t^2`: `s = P(u)`, and
/// `x^j dx/y = -2 u^(g-1-j) (du/ds) dt`.
pub fn phi_minus_table(g: usize, qcoeffs: &[i64]) -> Vec<Vec<Q>> {
    let deg = 2 * g + 1;
    // P_k = Q_(2g+2-k)
    let pcoef: Vec<Q> = (0..=deg + 1).map(|k| if k == 0 { q(0) } else { q(qcoeffs[deg + 1 - k]) }).collect();
    // w = u/s as a power series in s, to order `len`
    let len = g + 1;
    let mut u = vec![Q::zero(); len + 1];
    for m in 1..=len {
        // coefficient of s^m in P(u) with u_m unknown: u_m * P_1 + known = [m == 1]
        u[m] = Q::zero();
        let mut known = Q::zero();
        let mut upow = vec![Q::zero(); len + 1];
        upow[0] = Q::one();
        for pk in pcoef.iter().skip(1) {
            // upow <- upow * u, truncated
            let mut next = vec![Q::zero(); len + 1];
            for (a, x) in upow.iter().enumerate() {
                for (b, y) in u.iter().enumerate() {
                    if a + b <= len {
                        next[a + b] += x * y;
                    }
                }
            }
            upow = next;
            known += pk * &upow[m];
        }
        let target = if m == 1 { Q::one() } else { Q::zero() };
        u[m] = (target - known) / &pcoef[1];
    }
    let w: Vec<Q> = (0..len).map(|k| u[k + 1].clone()).collect();
    let mul = |a: &[Q], b: &[Q]| -> Vec<Q> {
        let mut out = vec![Q::zero(); len];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j < len {
                    out[i + j] += x * y;
                }
            }
        }
        out
    };
    // 1/w by long division
    let mut winv = vec![Q::zero(); len];
    winv[0] = w[0].recip();
    for k in 1..len {
        let acc = (1..=k).fold(Q::zero(), |acc, j| acc + &w[j] * &winv[k - j]);
        winv[k] = -acc / &w[0];
    }
    // du/ds
    let duds: Vec<Q> = (0..len).map(|k| &u[k + 1] * q(k as i64 + 1)).collect();
    let mut table = vec![vec![Q::zero(); g]; 2 * g];
    for j in g..2 * g {
        let kappa = j + 1 - g;
        // -2 u^(-kappa) du/ds = -2 s^(-kappa) winv^kappa du/ds
        let mut f = duds.clone();
        for _ in 0..kappa {
            f = mul(&f, &winv);
        }
        for lambda in 1..=g {
            if lambda <= kappa {
                table[j][lambda - 1] = -q(2) * &f[kappa - lambda];
            }
        }
    }
    table
}

/// `v_p(r)`, or `None` for zero.
pub fn valuation(r: &Q, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |mut n: BigInt| {
        let mut v = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            v += 1;
        }
        v
    };
    Some(count(r.numer().abs()) - count(r.denom().abs()))
}

/// Residue of `p^shift * r` modulo `p^digits`; `r p^shift` must be p-integral.
pub fn residue(r: &Q, p: u64, shift: u32, digits: u32) -> u64 {
    let pb = BigInt::from(p);
    let m = pb.pow(digits);
    let scaled = r * Q::from_integer(pb.pow(shift));
    assert!(!(scaled.denom() % &pb).is_zero(), "not p-integral");
    // Euler: den^(totient - 1) is the inverse modulo p^digits
    let totient = &m - pb.pow(digits - 1);
    let inv = scaled.denom().mod_floor(&m).modpow(&(totient - BigInt::one()), &m);
    u64::try_from((scaled.numer().mod_floor(&m) * inv).mod_floor(&m)).unwrap()
}
