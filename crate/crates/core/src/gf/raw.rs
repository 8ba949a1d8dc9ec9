//! Dense polynomial kernels over GF(p) on plain coefficient vectors
//! (lowest degree first, every entry already reduced below `p`).
//!
//! These back the extension-field arithmetic and the irreducible-modulus
//! search, where going through [`super::Poly`] would be needlessly slow.

pub(crate) fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo a prime.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    let (mut r0, mut r1) = (p as i64, (a % p) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p as i64) as u64
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    // p < 2^20 keeps every partial sum well inside u64 for the degrees we use.
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
        if i % 1024 == 1023 {
            out.iter_mut().for_each(|o| *o %= p);
        }
    }
    out.iter_mut().for_each(|o| *o %= p);
    trim(&mut out);
    out
}

/// Reduce `a` in place modulo a monic `m` of degree `deg(m) >= 1`.
pub(crate) fn reduce_monic(a: &mut Vec<u64>, m: &[u64], p: u64) {
    let n = m.len() - 1;
    if a.len() <= n {
        a.iter_mut().for_each(|x| *x %= p);
        trim(a);
        return;
    }
    // Entries stay below p + deg(a) * p^2 < 2^63, so reduction is deferred
    // until a coefficient is consumed.
    for i in (n..a.len()).rev() {
        let c = a[i] % p;
        a[i] = 0;
        if c == 0 {
            continue;
        }
        let neg = p - c;
        let base = i - n;
        for (j, &mj) in m[..n].iter().enumerate() {
            if mj != 0 {
                a[base + j] += neg * mj;
            }
        }
    }
    a.truncate(n);
    a.iter_mut().for_each(|x| *x %= p);
    trim(a);
}

pub(crate) fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    for i in (db..r.len()).rev() {
        let c = r[i] * lead_inv % p;
        if c == 0 {
            continue;
        }
        q[i - db] = c;
        let neg = p - c;
        for (j, &bj) in b.iter().enumerate() {
            r[i - db + j] = (r[i - db + j] + neg * bj) % p;
        }
    }
    trim(&mut q);
    trim(&mut r);
    (q, r)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    trim(&mut out);
    out
}

pub(crate) fn monic(mut a: Vec<u64>, p: u64) -> Vec<u64> {
    trim(&mut a);
    if let Some(&lead) = a.last() {
        let inv = inv_mod(lead, p);
        a.iter_mut().for_each(|c| *c = *c * inv % p);
    }
    a
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(x, p)
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub(crate) fn inverse_mod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r1);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    if r0.len() != 1 {
        return None;
    }
    let c = inv_mod(r0[0], p);
    let mut out: Vec<u64> = s0.iter().map(|&x| x * c % p).collect();
    reduce_monic(&mut out, m, p);
    Some(out)
}

pub(crate) fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = mul(a, b, p);
    reduce_monic(&mut prod, m, p);
    prod
}

pub(crate) fn powmod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    reduce_monic(&mut b, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(&acc, &b, m, p);
        }
        exp >>= 1;
        if exp > 0 {
            b = mulmod(&b, &b, m, p);
        }
    }
    acc
}

/// Ben-Or irreducibility test for a monic `f` over GF(p): `f` is
/// irreducible iff `gcd(x^(p^i) - x, f) = 1` for every `i <= deg f / 2`.
/// Reducible inputs usually exit after a handful of rounds.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    let mut h = x.clone();
    for _ in 0..n / 2 {
        h = powmod(&h, p, f, p);
        let d = sub(&h, &x, p);
        let g = gcd(f, &d, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_gcd() {
        let p = 7;
        assert_eq!(inv_mod(3, p), 5);
        // (x - 1)(x - 2) and (x - 1)(x - 3) share x - 1.
        let a = mul(&[6, 1], &[5, 1], p);
        let b = mul(&[6, 1], &[4, 1], p);
        assert_eq!(gcd(&a, &b, p), vec![6, 1]);
        assert!(!is_irreducible(&[3, 0, 1], p)); // x^2 + 3 = (x - 2)(x + 2)
        let m = vec![1, 0, 1]; // x^2 + 1, since 7 = 3 mod 4
        assert!(is_irreducible(&m, p));
        let inv = inverse_mod(&[2, 5], &m, p).unwrap();
        assert_eq!(mulmod(&inv, &[2, 5], &m, p), vec![1]);
    }
}
