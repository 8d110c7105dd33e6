//! Dense polynomials over the prime field F_p, stored as `Vec<u64>` with the
//! constant term first. Used for irreducibility tests and for the small
//! finite fields behind exhaustive point counting.

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod_p(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let mut out: Vec<u64> = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the nonzero polynomial `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let dm = degree(m).expect("division by zero polynomial");
    let lead_inv = inv_mod_p(m[dm], p);
    let mut r = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = mul_mod(r[dr], lead_inv, p);
        let shift = dr - dm;
        for (j, &mj) in m.iter().enumerate().take(dm + 1) {
            r[shift + j] = (r[shift + j] + p - mul_mod(c, mj, p)) % p;
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(d) = degree(&x) {
        let inv = inv_mod_p(x[d], p);
        for c in x.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    x
}

/// `X^(p^k)` reduced modulo `m`.
fn frobenius_power_of_x(m: &[u64], p: u64, k: usize) -> Vec<u64> {
    let mut cur = rem(&[0, 1], m, p);
    for _ in 0..k {
        // raise to the p-th power by square-and-multiply
        let mut acc = vec![1u64];
        let mut base = cur.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_rem(&acc, &base, m, p);
            }
            base = mul_rem(&base, &base, m, p);
            e >>= 1;
        }
        cur = acc;
    }
    cur
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a polynomial over F_p.
pub(crate) fn is_irreducible(m: &[u64], p: u64) -> bool {
    let Some(n) = degree(m) else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    if sub(&frobenius_power_of_x(m, p, n), &rem(&x, m, p), p) != Vec::<u64>::new() {
        return false;
    }
    for l in prime_factors(n) {
        let h = sub(&frobenius_power_of_x(m, p, n / l), &x, p);
        if degree(&gcd(m, &h, p)) != Some(0) {
            return false;
        }
    }
    true
}

/// Monic polynomial of degree `n` whose lower coefficients are the base-p
/// digits of `index`.
pub(crate) fn monic_from_index(index: u128, n: usize, p: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut k = index;
    for _ in 0..n {
        out.push((k % p as u128) as u64);
        k /= p as u128;
    }
    out.push(1);
    out
}

/// Deterministic search for a monic irreducible of degree `n` over F_p,
/// scanning candidates cyclically from `seed`.
pub(crate) fn find_irreducible(p: u64, n: usize, seed: u64) -> Option<Vec<u64>> {
    let total = (p as u128).checked_pow(n as u32)?;
    let start = seed as u128 % total;
    (0..total)
        .map(|k| monic_from_index((start + k) % total, n, p))
        .find(|m| is_irreducible(m, p))
}
