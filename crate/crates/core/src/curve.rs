//! Odd-degree hyperelliptic curves `y^2 = Q(x)`: the text format, validation,
//! the chart at the point at infinity, and exhaustive point counting.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fp;
use crate::padic::{make_context, RingContext, ZqElem};
use crate::series::{BezoutSplitter, Poly, TruncSeries};

/// A coefficient of `Q` as written in the input: an integer, or a polynomial
/// in the generator `a` of the residue field (constant term first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffSpec {
    Int(i64),
    APoly(Vec<i64>),
}

impl CoeffSpec {
    /// Normalises so that an `APoly` always has a nonzero term in `a`.
    pub fn from_apoly(mut c: Vec<i64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        if c.len() <= 1 {
            CoeffSpec::Int(c.first().copied().unwrap_or(0))
        } else {
            CoeffSpec::APoly(c)
        }
    }

    pub fn lift(&self, ctx: &Arc<RingContext>) -> ZqElem {
        match self {
            CoeffSpec::Int(v) => ZqElem::from_int(ctx, *v),
            CoeffSpec::APoly(c) => ZqElem::from_poly_in_a(ctx, c),
        }
    }

    fn as_apoly(&self) -> Vec<i64> {
        match self {
            CoeffSpec::Int(v) => vec![*v],
            CoeffSpec::APoly(c) => c.clone(),
        }
    }
}

impl fmt::Display for CoeffSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffSpec::Int(v) => write!(f, "{v}"),
            CoeffSpec::APoly(c) => {
                let mut first = true;
                for (k, &ck) in c.iter().enumerate() {
                    if ck == 0 {
                        continue;
                    }
                    let sign = if ck < 0 { "-" } else if first { "" } else { "+" };
                    let mag = ck.unsigned_abs();
                    let body = match (k, mag) {
                        (0, m) => m.to_string(),
                        (1, 1) => "a".to_string(),
                        (1, m) => format!("{m}*a"),
                        (k, 1) => format!("a^{k}"),
                        (k, m) => format!("{m}*a^{k}"),
                    };
                    write!(f, "{sign}{body}")?;
                    first = false;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for CoeffSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad coefficient `{s}`"));
        let s = s.trim();
        if s.is_empty() {
            return Err(bad());
        }
        if !s.contains('a') {
            return s.parse::<i64>().map(CoeffSpec::Int).map_err(|_| bad());
        }
        // split into signed terms
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut c: Vec<i64> = Vec::new();
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, t.strip_prefix('+').unwrap_or(&t)),
            };
            let (coef, power) = if let Some(idx) = body.find('a') {
                let head = body[..idx].trim_end_matches('*');
                let coef = if head.is_empty() { 1 } else { head.parse::<i64>().map_err(|_| bad())? };
                let tail = &body[idx + 1..];
                let power = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                };
                if head.is_empty() && body[..idx].ends_with('*') {
                    return Err(bad());
                }
                (coef, power)
            } else {
                (body.parse::<i64>().map_err(|_| bad())?, 0)
            };
            if c.len() <= power {
                c.resize(power + 1, 0);
            }
            c[power] += if neg { -coef } else { coef };
        }
        Ok(CoeffSpec::from_apoly(c))
    }
}

/// One line of the curve text format,
/// `p=<int> n=<int> g=<int> N=<int> Q=[c0,c1,...,c_{2g+1}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub p: u64,
    pub n: usize,
    pub g: usize,
    pub precision: u32,
    pub coeffs: Vec<CoeffSpec>,
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "p={} n={} g={} N={} Q=[{}]",
            self.p,
            self.n,
            self.g,
            self.precision,
            q.join(",")
        )
    }
}

impl FromStr for CurveSpec {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let line = line.trim();
        let qpos = line
            .find("Q=[")
            .ok_or_else(|| Error::Parse("missing Q=[...]".into()))?;
        let close = line[qpos..]
            .find(']')
            .map(|i| qpos + i)
            .ok_or_else(|| Error::Parse("unterminated Q list".into()))?;
        let list = &line[qpos + 3..close];
        let coeffs = if list.trim().is_empty() {
            Vec::new()
        } else {
            list.split(',').map(str::parse).collect::<Result<Vec<CoeffSpec>>>()?
        };
        let rest = format!("{} {}", &line[..qpos], &line[close + 1..]);
        let (mut p, mut n, mut g, mut prec) = (None, None, None, None);
        for tok in rest.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{tok}`")))?;
            let num = || v.parse::<u64>().map_err(|_| Error::Parse(format!("bad value for {k}: `{v}`")));
            let slot = match k {
                "p" => &mut p,
                "n" => &mut n,
                "g" => &mut g,
                "N" => &mut prec,
                _ => return Err(Error::Parse(format!("unknown key `{k}`"))),
            };
            if slot.replace(num()?).is_some() {
                return Err(Error::Parse(format!("duplicate key `{k}`")));
            }
        }
        let need = |v: Option<u64>, k: &str| v.ok_or_else(|| Error::Parse(format!("missing {k}=")));
        Ok(CurveSpec {
            p: need(p, "p")?,
            n: need(n, "n")? as usize,
            g: need(g, "g")? as usize,
            precision: need(prec, "N")? as u32,
            coeffs,
        })
    }
}

impl CurveSpec {
    pub fn validate(&self) -> Result<HyperellipticCurve> {
        let ctx = make_context(self.p, self.n, self.precision, 0)?;
        validate_curve(&ctx, self.g, &self.coeffs)
    }
}

/// Validated curve `y^2 = Q(x)` with `Q` monic of degree `2g+1` and
/// squarefree modulo `p`.
#[derive(Clone, Debug)]
pub struct HyperellipticCurve {
    ctx: Arc<RingContext>,
    g: usize,
    coeffs: Vec<CoeffSpec>,
    q: Poly<ZqElem>,
}

pub fn validate_curve(ctx: &Arc<RingContext>, g: usize, coeffs: &[CoeffSpec]) -> Result<HyperellipticCurve> {
    if g == 0 {
        return Err(Error::Parse("genus must be at least 1".into()));
    }
    let q = lift_poly(coeffs, ctx);
    let expected = 2 * g + 1;
    if coeffs.len() != expected + 1 {
        return Err(Error::WrongDegree { expected, found: coeffs.len().saturating_sub(1) });
    }
    match q.degree() {
        Some(d) if d == expected => {}
        d => return Err(Error::WrongDegree { expected, found: d.unwrap_or(0) }),
    }
    if !q.coeff(expected).is_one() {
        return Err(Error::NotMonic);
    }
    let residue = ctx.with_precision(1)?;
    let qbar = lift_poly(coeffs, &residue);
    if BezoutSplitter::new(&qbar, &qbar.derivative()).is_err() {
        return Err(Error::SingularReduction);
    }
    Ok(HyperellipticCurve { ctx: Arc::clone(ctx), g, coeffs: coeffs.to_vec(), q })
}

fn lift_poly(coeffs: &[CoeffSpec], ctx: &Arc<RingContext>) -> Poly<ZqElem> {
    Poly::new(coeffs.iter().map(|c| c.lift(ctx)).collect(), ZqElem::zero(ctx))
}

impl HyperellipticCurve {
    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }
    pub fn genus(&self) -> usize {
        self.g
    }
    pub fn p(&self) -> u64 {
        self.ctx.p()
    }
    pub fn q_poly(&self) -> &Poly<ZqElem> {
        &self.q
    }
    pub fn coeff_specs(&self) -> &[CoeffSpec] {
        &self.coeffs
    }

    /// `Q` lifted into another ring with the same residue field.
    pub fn q_in(&self, ctx: &Arc<RingContext>) -> Poly<ZqElem> {
        lift_poly(&self.coeffs, ctx)
    }

    /// The same curve data read at a different precision.
    pub fn with_precision(&self, prec: u32) -> Result<HyperellipticCurve> {
        let ctx = self.ctx.with_precision(prec)?;
        Ok(HyperellipticCurve { q: lift_poly(&self.coeffs, &ctx), ctx, g: self.g, coeffs: self.coeffs.clone() })
    }

    pub fn spec(&self) -> CurveSpec {
        CurveSpec {
            p: self.ctx.p(),
            n: self.ctx.degree(),
            g: self.g,
            precision: self.ctx.precision(),
            coeffs: self.coeffs.clone(),
        }
    }
}

/// Local data at infinity: `u = 1/x`, `t = y u^(g+1)`, `t^2 = P(u) = u R(u)`.
#[derive(Clone, Debug)]
pub struct InfinityChart {
    pub p_series: TruncSeries<ZqElem>,
    pub r_series: TruncSeries<ZqElem>,
    pub p_prime: TruncSeries<ZqElem>,
}

/// Builds the chart for `Q` (degree `2g+1`) over the ring of its coefficients.
/// All three series are exact polynomials stored to order `2g+3`.
pub fn infinity_chart_of(q: &Poly<ZqElem>, g: usize) -> InfinityChart {
    let order = 2 * g + 3;
    let zero = q.zero_elem().clone();
    // P_{2g+2-j} = Q_j
    let p: Vec<ZqElem> = (0..order)
        .map(|k| if k <= 2 * g + 2 && k >= 1 { q.coeff(2 * g + 2 - k) } else { zero.clone() })
        .collect();
    let r: Vec<ZqElem> = (0..order).map(|k| p.get(k + 1).cloned().unwrap_or_else(|| zero.clone())).collect();
    let p_poly = Poly::new(p.clone(), zero);
    InfinityChart {
        p_series: TruncSeries::new(p),
        r_series: TruncSeries::new(r),
        p_prime: TruncSeries::from_poly(&p_poly.derivative(), order),
    }
}

pub fn infinity_chart(curve: &HyperellipticCurve) -> InfinityChart {
    infinity_chart_of(&curve.q, curve.g)
}

/// Order along the divisor at infinity of `x^i dx/y`.
pub fn ord_at_infinity(g: usize, i: usize) -> Result<i64> {
    if i >= 2 * g {
        return Err(Error::IndexOutOfRange { index: i, bound: 2 * g });
    }
    Ok(2 * g as i64 - 2 - 2 * i as i64)
}

const ENUMERATION_LIMIT: u128 = 10_000_000;

/// `#C(F_{q^m})` by brute force: affine solutions of `y^2 = Q(x)` plus the
/// single point at infinity of the odd-degree model.
pub fn count_points_naive(curve: &HyperellipticCurve, m: usize) -> Result<u128> {
    let ctx = curve.context();
    let p = ctx.p();
    let d = ctx.degree() * m;
    let size = (p as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if m == 0 || size > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(size));
    }
    let field = SmallField::new(p, d);
    // image of the residue-field generator: a root of m(a) mod p
    let mbar: Vec<u64> = ctx.min_poly().to_vec();
    let alpha = (0..field.size)
        .find(|&z| field.eval_fp_poly(&mbar, z) == 0)
        .expect("irreducible of degree n has a root in an extension of degree n*m");
    let qbar: Vec<u64> = curve
        .coeffs
        .iter()
        .map(|c| {
            let a: Vec<u64> = c.as_apoly().iter().map(|&v| v.rem_euclid(p as i64) as u64).collect();
            field.eval_fp_poly(&a, alpha)
        })
        .collect();
    let mut is_square = vec![false; field.size as usize];
    for z in 0..field.size {
        is_square[field.mul(z, z) as usize] = true;
    }
    let affine: u128 = (0..field.size)
        .into_par_iter()
        .map(|x| {
            let v = qbar.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, x), c));
            if v == 0 {
                1
            } else if is_square[v as usize] {
                2
            } else {
                0
            }
        })
        .sum();
    Ok(affine + 1)
}

/// `F_{p^d}` with elements encoded as integers whose base-p digits are the
/// coordinates in a polynomial basis.
struct SmallField {
    p: u64,
    d: usize,
    size: u64,
    modulus: Vec<u64>,
}

impl SmallField {
    fn new(p: u64, d: usize) -> Self {
        let modulus = fp::find_irreducible(p, d, 0).expect("irreducible polynomials exist in every degree");
        SmallField { p, d, size: p.pow(d as u32), modulus }
    }

    fn decode(&self, mut z: u64) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.d);
        for _ in 0..self.d {
            v.push(z % self.p);
            z /= self.p;
        }
        v
    }

    fn encode(&self, v: &[u64]) -> u64 {
        v.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        if self.d == 1 {
            return (a + b) % self.p;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.d == 1 {
            return a * b % self.p;
        }
        let r = fp::mul_rem(&self.decode(a), &self.decode(b), &self.modulus, self.p);
        let mut r = r;
        r.resize(self.d, 0);
        self.encode(&r)
    }

    fn from_fp(&self, c: u64) -> u64 {
        c % self.p
    }

    fn eval_fp_poly(&self, poly: &[u64], z: u64) -> u64 {
        poly.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, z), self.from_fp(c)))
    }
}
