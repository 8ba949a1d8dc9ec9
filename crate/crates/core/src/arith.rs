//! Small exact integer helpers (trial division scale).

use num_integer::Integer;

pub use crate::gf::is_prime;

/// Prime factorization by trial division, primes ascending.
pub fn factor(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut d: u128 = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `v_l(n)` for `n != 0`.
pub fn valuation(mut n: i128, l: i128) -> u32 {
    assert!(n != 0 && l > 1);
    let mut v = 0;
    while n % l == 0 {
        n /= l;
        v += 1;
    }
    v
}

/// If `n = l^a` with `l` prime and `a >= 1`, returns `(l, a)`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    let f = factor(n as u128);
    (f.len() == 1).then(|| (f[0].0 as u64, f[0].1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (l, e) in factor(n as u128) {
        let l = l as u64;
        let cur = out.clone();
        let mut pw = 1;
        for _ in 0..e {
            pw *= l;
            out.extend(cur.iter().map(|d| d * pw));
        }
    }
    out.sort_unstable();
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Floor square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Hasse interval check `t^2 <= 4q`.
pub fn within_hasse(t: i64, q: u64) -> bool {
    (t as i128) * (t as i128) <= 4 * q as i128
}

pub fn pow_mod_u64(base: u64, exp: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc: u128 = 1 % m;
    let mut b = base as u128 % m;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_divisors() {
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(valuation(-16, 2), 4);
        assert_eq!(isqrt(4 * 199), 28);
    }
}
