use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use super::CurveModel;
use crate::error::{Error, Result};

/// Largest field order for which points are counted naively.
pub const MAX_COUNT_ORDER: u64 = 1 << 24;

/// `#E(k) = 1 + sum_x (1 + chi(x^3 + ax + b))`.
pub fn count_points(model: &CurveModel) -> Result<u64> {
    let k = model.field();
    let q = match k.order() {
        Some(q) if q <= MAX_COUNT_ORDER => q,
        _ => return Err(Error::FieldTooLarge { p: k.characteristic(), n: k.degree() }),
    };
    if k.is_prime_field() {
        let p = q;
        let mut is_sq = vec![false; p as usize];
        for y in 0..p {
            is_sq[(y * y % p) as usize] = true;
        }
        let (a, b) = (model.a().coeffs()[0], model.b().coeffs()[0]);
        let mut n = 1u64;
        for x in 0..p {
            let r = ((x * x % p + a) * x + b) % p;
            n += if r == 0 { 1 } else if is_sq[r as usize] { 2 } else { 0 };
        }
        return Ok(n);
    }
    let mut is_sq = vec![false; q as usize];
    for y in k.elements() {
        is_sq[k.index(&k.square(&y)) as usize] = true;
    }
    let mut n = 1u64;
    for x in k.elements() {
        let r = model.rhs(&x);
        n += if k.is_zero(&r) { 1 } else if is_sq[k.index(&r) as usize] { 2 } else { 0 };
    }
    Ok(n)
}

/// `t_r = alpha^r + beta^r` from `t_r = t t_(r-1) - q t_(r-2)`.
pub fn extension_trace(t: i64, q: u64, r: u32) -> BigInt {
    let (t, q) = (BigInt::from(t), BigInt::from(q));
    let mut prev = BigInt::from(2);
    let mut cur = t.clone();
    if r == 0 {
        return prev;
    }
    for _ in 1..r {
        let next = &t * &cur - &q * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `#E(GF(q^r)) = q^r + 1 - t_r`.
pub fn extension_count(t: i64, q: u64, r: u32) -> BigUint {
    let n: BigInt = BigInt::from(q).pow(r) + 1u32 - extension_trace(t, q, r);
    n.to_biguint().expect("Hasse bound keeps the count positive")
}

/// Residue of a point count modulo a machine integer.
pub(crate) fn count_mod(t: i64, q: u64, r: u32, m: u64) -> u64 {
    (extension_count(t, q, r) % m).to_u64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::Curve;
    use crate::gf::Field;

    #[test]
    fn counts_over_gf5() {
        let k = Field::new(5, 1).unwrap();
        assert_eq!(Curve::from_u64(&k, 1, 0).unwrap().order(), 4);
        let e = Curve::from_i64(&k, -1, 0).unwrap();
        assert_eq!(e.order(), 8);
        assert_eq!(e.trace(), -2);
    }

    #[test]
    fn hasse_bound_over_small_fields() {
        for p in [5u64, 7, 11, 13] {
            let k = Field::new(p, 1).unwrap();
            for a in 0..p {
                for b in 0..p {
                    if let Ok(e) = Curve::from_u64(&k, a, b) {
                        assert!(crate::arith::within_hasse(e.trace(), p));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_recurrence_matches_naive_counts() {
        // q^r <= 2^24: count the base change directly.
        for (p, a, b) in [(5u64, 1u64, 0u64), (7, 3, 2), (11, 1, 5)] {
            let k = Field::new(p, 1).unwrap();
            let e = Curve::from_u64(&k, a, b).unwrap();
            for r in 1..=3usize {
                let kr = Field::new(p, r).unwrap();
                let er = Curve::from_u64(&kr, a, b).unwrap();
                assert_eq!(BigUint::from(er.order()), extension_count(e.trace(), p, r as u32));
            }
        }
    }
}
