#![allow(dead_code)]

pub mod oracle;

use hc::curve::{CoeffSpec, HyperellipticCurve};
use hc::frobenius::FrobMatrix;
use hc::selftest::random_curve;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use oracle::Q;

/// Seeded random curves over F_p at precision `n_prec`.
pub fn curves(seed: u64, p: u64, g: usize, count: usize, n_prec: u32) -> Vec<HyperellipticCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_curve(&mut rng, p, 1, g, n_prec)).collect()
}

pub fn int_coeffs(c: &HyperellipticCurve) -> Vec<i64> {
    c.coeff_specs()
        .iter()
        .map(|s| match s {
            CoeffSpec::Int(v) => *v,
            CoeffSpec::APoly(_) => panic!("prime field curves only"),
        })
        .collect()
}

/// Whether entry `(r, c)` of `m` agrees with `want` modulo `p^digits`.
pub fn entry_matches(m: &FrobMatrix, r: usize, c: usize, want: &Q, p: u64, digits: u32) -> bool {
    let s = m.shift();
    let sh = oracle::valuation(want, p).map_or(s, |v| s.max((-v).max(0) as u32));
    let modulus = (p as u128).pow(sh + digits);
    let got = m.scaled(r, c).coords()[0] as u128 * (p as u128).pow(sh - s) % modulus;
    got as u64 == oracle::residue(want, p, sh, sh + digits)
}
