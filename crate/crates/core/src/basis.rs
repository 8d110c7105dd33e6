//! The truncation map at infinity and the integral basis it cuts out.
//!
//! With `t` the local parameter at the point at infinity, an anti-invariant
//! form `omega` expands as `f(t^2) dt` with poles of even order. Since
//! `d(t^(1-2l)) = (1-2l) t^(-2l) dt`, the coefficient of `t^(-2l) dt` is
//! well defined modulo `2l-1`; collecting these residues for `l = 1..g`
//! gives `phi_minus(omega)`. Its kernel is the integral lattice, on which the
//! Frobenius matrix has integral entries.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::curve::HyperellipticCurve;
use crate::error::{Error, Result};
use crate::frobenius::{ceil_log, floor_log, FrobMatrix};
use crate::padic::{RingContext, ZqElem};
use crate::series::{series_invert, solve_u_of_t, Poly, TruncSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RExponents {
    /// `floor(log_p(2g-1))`: bound on the denominators of the matrix.
    pub r_bound: u32,
    /// `ceil(log_p(2g-1))`: precision of the residue ring.
    pub r_mod: u32,
}

pub fn compute_r(g: usize, p: u64) -> RExponents {
    let m = 2 * g as u64 - 1;
    RExponents { r_bound: floor_log(p, m), r_mod: ceil_log(p, m) }
}

/// `v_p(m)` for `m >= 1`.
pub fn vp(p: u64, mut m: u64) -> u32 {
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

/// Value of the truncation map: residues modulo `p^(v_p(2l-1))`, kept only
/// for the `l` where that modulus is nontrivial.
#[derive(Clone, Debug, PartialEq)]
pub struct UpsilonMinus {
    components: BTreeMap<usize, ZqElem>,
}

impl UpsilonMinus {
    pub fn component(&self, lambda: usize) -> Option<&ZqElem> {
        self.components.get(&lambda)
    }
    pub fn lambdas(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.keys().copied()
    }
    pub fn is_zero(&self) -> bool {
        self.components.values().all(|c| c.is_zero())
    }
}

/// Coefficients of `t^(-2l) dt` in the expansions of `x^j dx/y`, over
/// `V/p^r_mod`.
#[derive(Clone, Debug)]
pub struct PhiMinusTable {
    g: usize,
    /// `rows[j][l-1]` for `j <= max_index`.
    rows: Vec<Vec<ZqElem>>,
    /// Residue rings `V/p^(v_l)` for the nontrivial `l`.
    moduli: BTreeMap<usize, Arc<RingContext>>,
}

impl PhiMinusTable {
    pub fn new(curve: &HyperellipticCurve) -> Result<Self> {
        Self::with_max_index(curve, 2 * curve.genus() - 1)
    }

    /// Table covering `x^j dx/y` for all `j <= max_index`.
    pub fn with_max_index(curve: &HyperellipticCurve, max_index: usize) -> Result<Self> {
        let g = curve.genus();
        let p = curve.p();
        let ctx = curve.context();
        let mut moduli = BTreeMap::new();
        for lambda in 1..=g {
            let v = vp(p, 2 * lambda as u64 - 1);
            if v > 0 {
                moduli.insert(lambda, ctx.with_precision(v)?);
            }
        }
        let r = compute_r(g, p);
        if moduli.is_empty() || max_index < g {
            return Ok(PhiMinusTable { g, rows: Vec::new(), moduli });
        }
        let field = ctx.with_precision(r.r_mod)?;
        let zero = ZqElem::zero(&field);
        let q = curve.q_poly().map(|c| c.reduce_to(&field).expect("same ring"));
        let kappa_max = max_index + 1 - g;
        let order = 2 * kappa_max - 1;

        // P(u) = u^(2g+2) Q(1/u) = u R(u)
        let deg_q = 2 * g + 1;
        let p_poly = Poly::new((0..=deg_q + 1).map(|k| if k == 0 { zero.clone() } else { q.coeff(deg_q + 1 - k) }).collect(), zero.clone());
        let r_poly = Poly::new((0..=deg_q).map(|k| q.coeff(deg_q - k)).collect(), zero.clone());
        let rinv = series_invert(&TruncSeries::from_poly(&r_poly, order))?;
        let u = solve_u_of_t(&rinv, order);
        debug_assert_eq!(u.order(), order);
        // x^(g-1) dx/y = -2 P'(u)^(-1) dt and t^2 x = R(u(t))
        let p_prime_u = TruncSeries::from_poly(&p_poly.derivative(), order).compose(&u);
        let base = series_invert(&p_prime_u)?.scale(&ZqElem::from_int(&field, -2));
        let t2x = TruncSeries::from_poly(&r_poly, order).compose(&u);

        let mut rows = vec![vec![zero.clone(); g]; g];
        let mut acc = base;
        for kappa in 1..=kappa_max {
            // expansion of x^(kappa+g-1) dx/y is t^(-2 kappa) * acc
            acc = acc.mul(&t2x);
            let row = (1..=g)
                .map(|lambda| {
                    if lambda <= kappa {
                        acc.coeff(2 * (kappa - lambda)).clone()
                    } else {
                        zero.clone()
                    }
                })
                .collect();
            rows.push(row);
        }
        Ok(PhiMinusTable { g, rows, moduli })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    /// Residue of `x^j dx/y` at `t^(-2 lambda)`, if that component is stored.
    pub fn entry(&self, j: usize, lambda: usize) -> Option<ZqElem> {
        let m = self.moduli.get(&lambda)?;
        let row = self.rows.get(j)?;
        Some(row[lambda - 1].reduce_to(m).expect("same ring"))
    }

    /// `phi_minus` of `sum_j coords[j] x^j dx/y`.
    pub fn apply(&self, coords: &[ZqElem]) -> Result<UpsilonMinus> {
        let mut components = BTreeMap::new();
        for (&lambda, m) in &self.moduli {
            let mut acc = ZqElem::zero(m);
            for (j, c) in coords.iter().enumerate() {
                if j < self.g || c.is_zero() {
                    continue;
                }
                let row = self.rows.get(j).ok_or(Error::IndexOutOfRange { index: j, bound: self.rows.len() })?;
                acc = &acc + &(&c.reduce_to(m)? * &row[lambda - 1].reduce_to(m)?);
            }
            components.insert(lambda, acc);
        }
        Ok(UpsilonMinus { components })
    }

    pub fn apply_poly(&self, a: &Poly<ZqElem>) -> Result<UpsilonMinus> {
        self.apply(a.coeffs())
    }
}

/// `phi_minus` of the form with the given coordinates in `x^i dx/y`.
pub fn phi_minus(curve: &HyperellipticCurve, coords: &[ZqElem]) -> Result<UpsilonMinus> {
    PhiMinusTable::new(curve)?.apply(coords)
}

/// Upper-triangular change of basis whose columns span the kernel of the
/// truncation map. Entries are exact elements of `Z[a]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChange {
    dim: usize,
    /// Row-major; each entry is its coordinate vector in `1, a, .., a^(n-1)`.
    entries: Vec<Vec<i64>>,
    diag: Vec<i64>,
}

impl BasisChange {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn diagonal(&self) -> &[i64] {
        &self.diag
    }
    pub fn entry_coords(&self, r: usize, c: usize) -> &[i64] {
        &self.entries[r * self.dim + c]
    }
    pub fn entry_in(&self, ctx: &Arc<RingContext>, r: usize, c: usize) -> ZqElem {
        ZqElem::from_poly_in_a(ctx, self.entry_coords(r, c))
    }
    pub fn column_in(&self, ctx: &Arc<RingContext>, c: usize) -> Vec<ZqElem> {
        (0..self.dim).map(|r| self.entry_in(ctx, r, c)).collect()
    }
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.dim).all(|r| (0..r).all(|c| self.entry_coords(r, c).iter().all(|&x| x == 0)))
    }
    pub fn determinant(&self) -> i128 {
        self.diag.iter().map(|&d| d as i128).product()
    }
    /// `v_p(det C)`, the precision consumed when inverting.
    pub fn det_valuation(&self, p: u64) -> u32 {
        self.diag.iter().map(|&d| vp(p, d as u64)).sum()
    }

    /// Solves `C x = v` by back-substitution. Every division by a diagonal
    /// entry must be exact on the representatives.
    pub fn solve(&self, v: &[ZqElem]) -> Result<Vec<ZqElem>> {
        let ctx = Arc::clone(v[0].context());
        let mut x = vec![ZqElem::zero(&ctx); self.dim];
        for i in (0..self.dim).rev() {
            let mut acc = v[i].clone();
            for j in i + 1..self.dim {
                acc = &acc - &(&self.entry_in(&ctx, i, j) * &x[j]);
            }
            x[i] = acc.div_int(self.diag[i])?;
        }
        Ok(x)
    }
}

pub fn build_integral_basis(curve: &HyperellipticCurve) -> Result<BasisChange> {
    let table = PhiMinusTable::new(curve)?;
    build_integral_basis_with(curve, &table)
}

pub fn build_integral_basis_with(curve: &HyperellipticCurve, table: &PhiMinusTable) -> Result<BasisChange> {
    let g = curve.genus();
    let dim = 2 * g;
    let n = curve.context().degree();
    let ctx = curve.context();
    let mut entries = vec![vec![0i64; n]; dim * dim];
    let mut diag = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut col = vec![vec![0i64; n]; dim];
        if i < g {
            col[i][0] = 1;
            diag.push(1);
        } else {
            let kappa = i - g + 1;
            let lead = 2 * kappa as i64 - 1;
            col[i][0] = lead;
            diag.push(lead);
            for lambda in (1..kappa).rev() {
                let Some(pivot) = table.entry(lambda + g - 1, lambda) else { continue };
                let coords: Vec<ZqElem> = col.iter().map(|c| ZqElem::from_poly_in_a(ctx, c)).collect();
                let comp = table.apply(&coords)?;
                let comp = comp.component(lambda).expect("stored component");
                let pivot_inv = pivot.inv().map_err(|_| Error::PivotNotUnit(lambda))?;
                let c = comp * &pivot_inv;
                for (k, &d) in c.coords().iter().enumerate() {
                    col[lambda + g - 1][k] -= d as i64;
                }
            }
            let coords: Vec<ZqElem> = col.iter().map(|c| ZqElem::from_poly_in_a(ctx, c)).collect();
            if !table.apply(&coords)?.is_zero() {
                return Err(Error::NotInKernel(i));
            }
        }
        for (r, e) in col.into_iter().enumerate() {
            entries[r * dim + i] = e;
        }
    }
    Ok(BasisChange { dim, entries, diag })
}

/// `C^(-1) M sigma(C)`, checked to be integral.
pub fn transform_frobenius(m: &FrobMatrix, c: &BasisChange) -> Result<FrobMatrix> {
    let dim = m.dim();
    let ctx = Arc::clone(m.context());
    let loss = c.det_valuation(ctx.p());
    if m.precision() <= loss {
        return Err(Error::InsufficientPrecision { have: m.precision(), need: loss + 1 });
    }
    let sc: Vec<ZqElem> = (0..dim * dim)
        .map(|k| c.entry_in(&ctx, k / dim, k % dim).apply_sigma())
        .collect();
    let mut out = vec![ZqElem::zero(&ctx); dim * dim];
    for col in 0..dim {
        let t: Vec<ZqElem> = (0..dim)
            .map(|r| {
                (0..dim).fold(ZqElem::zero(&ctx), |acc, k| &acc + &(m.scaled(r, k) * &sc[k * dim + col]))
            })
            .collect();
        let x = c.solve(&t).map_err(|_| Error::IntegralityViolation { row: 0, col })?;
        for (r, v) in x.into_iter().enumerate() {
            out[r * dim + col] = v;
        }
    }
    let mp = FrobMatrix::new(dim, out, m.shift(), m.precision() - loss);
    for r in 0..dim {
        for col in 0..dim {
            if mp.entry(r, col).valuation.is_some_and(|v| v < 0) {
                return Err(Error::IntegralityViolation { row: r, col });
            }
        }
    }
    Ok(mp)
}
