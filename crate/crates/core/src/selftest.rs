//! Seeded random curves and the per-curve consistency checks run by
//! `hc selftest` and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::basis::{build_integral_basis_with, compute_r, phi_minus, transform_frobenius, vp, PhiMinusTable};
use crate::curve::{count_points_naive, CoeffSpec, CurveSpec, HyperellipticCurve};
use crate::error::Result;
use crate::frobenius::{frobenius_matrix, precision_policy};
use crate::padic::ZqElem;
use crate::zeta::{char_poly_rounded, counts_from_zeta, semilinear_norm, SquareMatrix, ZetaNumerator};

/// Monic `Q` of degree `2g+1` with coefficients uniform in `F_q`, resampled
/// until it is separable mod p.
pub fn random_curve<R: Rng>(rng: &mut R, p: u64, n: usize, g: usize, precision: u32) -> HyperellipticCurve {
    loop {
        let mut coeffs: Vec<CoeffSpec> = (0..2 * g + 1)
            .map(|_| CoeffSpec::from_apoly((0..n).map(|_| rng.gen_range(0..p) as i64).collect()))
            .collect();
        coeffs.push(CoeffSpec::Int(1));
        let spec = CurveSpec { p, n, g, precision, coeffs };
        if let Ok(c) = spec.validate() {
            return c;
        }
    }
}

/// `count` curves for `(p, n, g)` at the default precision, reproducible
/// from `seed`.
pub fn random_curves(seed: u64, p: u64, n: usize, g: usize, count: usize) -> Vec<HyperellipticCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 32) ^ ((n as u64) << 24) ^ ((g as u64) << 16));
    let prec = precision_policy(p, n, g);
    (0..count).map(|_| random_curve(&mut rng, p, n, g, prec)).collect()
}

/// Outcome of every check on one curve.
#[derive(Clone, Debug)]
pub struct CurveReport {
    pub spec: CurveSpec,
    /// Smallest entry valuation of `M`.
    pub min_valuation: i64,
    pub denominator_bound: u32,
    pub basis_ok: bool,
    pub pivots_ok: bool,
    pub integral_ok: bool,
    pub numerator: ZetaNumerator,
    /// `None` when `q^2` is too large to enumerate.
    pub counts_ok: Option<bool>,
    pub stable: bool,
}

impl CurveReport {
    pub fn passed(&self) -> bool {
        self.min_valuation >= -(self.denominator_bound as i64)
            && self.basis_ok
            && self.pivots_ok
            && self.integral_ok
            && self.counts_ok != Some(false)
            && self.stable
    }
}

/// Residues of the basis forms: unit on the diagonal `l = i-g+1`, zero above
/// it, and zero for the holomorphic forms.
pub fn pivot_structure_holds(curve: &HyperellipticCurve, table: &PhiMinusTable) -> Result<bool> {
    let g = curve.genus();
    let ctx = curve.context();
    for i in 0..2 * g {
        let mut v = vec![ZqElem::zero(ctx); 2 * g];
        v[i] = ZqElem::one(ctx);
        let img = table.apply(&v)?;
        for lambda in img.lambdas() {
            let c = img.component(lambda).unwrap();
            let ok = if i < g || lambda > i + 1 - g {
                c.is_zero()
            } else if lambda == i + 1 - g {
                c.is_unit()
            } else {
                true
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn zeta_at(curve: &HyperellipticCurve) -> Result<ZetaNumerator> {
    let m = frobenius_matrix(curve)?;
    let table = PhiMinusTable::new(curve)?;
    let c = build_integral_basis_with(curve, &table)?;
    let mp = transform_frobenius(&m, &c)?;
    let norm = semilinear_norm(&SquareMatrix::new(mp.dim(), mp.integral_entries()?), curve.context().degree());
    char_poly_rounded(&norm, mp.precision())
}

const COUNT_LIMIT: u128 = 49;

pub fn check_curve(curve: &HyperellipticCurve) -> Result<CurveReport> {
    let g = curve.genus();
    let p = curve.p();
    let ctx = curve.context();
    let m = frobenius_matrix(curve)?;
    let table = PhiMinusTable::new(curve)?;
    let c = build_integral_basis_with(curve, &table)?;

    let mut diag_expect: Vec<i64> = vec![1; g];
    diag_expect.extend((1..=g as i64).map(|k| 2 * k - 1));
    let det_expect: i128 = (1..=g as i128).map(|l| 2 * l - 1).product();
    let mut basis_ok = c.is_upper_triangular() && c.diagonal() == diag_expect.as_slice() && c.determinant() == det_expect;
    for col in 0..2 * g {
        basis_ok &= phi_minus(curve, &c.column_in(ctx, col))?.is_zero();
    }
    debug_assert_eq!(c.det_valuation(p), (1..=g as u64).map(|l| vp(p, 2 * l - 1)).sum::<u32>());

    let pivots_ok = pivot_structure_holds(curve, &table)?;
    let mp = transform_frobenius(&m, &c)?;
    let integral_ok = mp.is_integral();
    let norm = semilinear_norm(&SquareMatrix::new(mp.dim(), mp.integral_entries()?), ctx.degree());
    let numerator = char_poly_rounded(&norm, mp.precision())?;

    let counts_ok = if ctx.q() <= COUNT_LIMIT {
        let t = counts_from_zeta(&numerator, 2)?;
        let mut ok = true;
        for k in 1..=2 {
            ok &= t.count(k) >= 0 && t.count(k) as u128 == count_points_naive(curve, k)?;
        }
        Some(ok)
    } else {
        None
    };
    let stable = zeta_at(&curve.with_precision(ctx.precision() + 2)?)? == numerator;

    Ok(CurveReport {
        spec: curve.spec(),
        min_valuation: m.min_valuation().unwrap_or(0).min(0),
        denominator_bound: compute_r(g, p).r_bound,
        basis_ok,
        pivots_ok,
        integral_ok,
        numerator,
        counts_ok,
        stable,
    })
}

/// Summary over the curves of one `(p, n, g)`.
#[derive(Clone, Debug)]
pub struct FamilySummary {
    pub p: u64,
    pub n: usize,
    pub g: usize,
    pub reports: Vec<Result<CurveReport>>,
}

impl FamilySummary {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.as_ref().is_ok_and(|r| r.passed()))
    }
    /// Largest `-v_p` over entries of `M`, over all curves.
    pub fn max_denominator(&self) -> i64 {
        self.reports.iter().filter_map(|r| r.as_ref().ok()).map(|r| -r.min_valuation).max().unwrap_or(0)
    }
    pub fn all_integral(&self) -> bool {
        self.reports.iter().all(|r| r.as_ref().is_ok_and(|r| r.integral_ok))
    }
}

pub fn check_family(seed: u64, p: u64, n: usize, g: usize, count: usize) -> FamilySummary {
    let reports = random_curves(seed, p, n, g, count).par_iter().map(check_curve).collect();
    FamilySummary { p, n, g, reports }
}

/// The families swept by default: `n = 1` over the small primes and genera,
/// plus the quadratic-extension cases.
pub fn default_families() -> Vec<(u64, usize, usize)> {
    let mut out = Vec::new();
    for p in [3, 5, 7, 11] {
        for g in 1..=3 {
            out.push((p, 1, g));
        }
    }
    for p in [3, 5] {
        for g in 1..=2 {
            out.push((p, 2, g));
        }
    }
    out
}
