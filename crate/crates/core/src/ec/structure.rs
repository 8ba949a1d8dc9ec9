use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Curve, CurveModel, Point};
use crate::arith;
use crate::error::{Error, Result};

/// Generators of the Sylow l-subgroup `Z/l^e1 x Z/l^e2` (`e1 >= e2`) of a
/// curve's group of points; `p1` has order `l^e1`, `p2` order `l^e2`, and
/// `<p1> + <p2>` is direct.
#[derive(Clone, Debug)]
pub struct SylowBasis {
    pub l: u64,
    pub e1: u32,
    pub e2: u32,
    pub p1: Point,
    pub p2: Point,
}

const MAX_SAMPLES: usize = 400;

/// Log base l of the order of `pt`, known to be an l-power.
fn l_log_order(model: &CurveModel, pt: &Point, l: u64) -> u32 {
    let mut cur = pt.clone();
    let mut e = 0;
    while !cur.is_infinity() {
        cur = model.mul(&cur, l);
        e += 1;
    }
    e
}

/// Discrete log of `target` to base `gen` (order `l^a`), if it lies in `<gen>`.
fn dlog_l_power(model: &CurveModel, gen: &Point, a: u32, target: &Point, l: u64) -> Option<u128> {
    if a == 0 {
        return target.is_infinity().then_some(0);
    }
    let lu = l as u128;
    let g0 = (1..a).fold(gen.clone(), |acc, _| model.mul(&acc, l));
    let mut table = HashMap::with_capacity(l as usize);
    let mut acc = Point::Infinity;
    for d in 0..l {
        table.insert(acc.clone(), d as u128);
        acc = model.add(&acc, &g0);
    }
    let mut x: u128 = 0;
    let mut lpow: u128 = 1;
    for i in 0..a {
        let rest = model.sub(target, &model.mul_big(gen, &BigUint::from(x)));
        let mut h = rest;
        for _ in 0..(a - 1 - i) {
            h = model.mul(&h, l);
        }
        let d = *table.get(&h)?;
        x += d * lpow;
        lpow *= lu;
    }
    (model.mul_big(gen, &BigUint::from(x)) == *target).then_some(x)
}

/// Reduce `q` (order at most that of `p1`) against `<p1>`: returns `q'` of
/// order `l^k` with `<p1> + <q'>` direct and `<p1, q'> = <p1, q>`.
fn reduce_against(model: &CurveModel, p1: &Point, a1: u32, q: &Point, l: u64) -> (Point, u32) {
    let mut lk_q = q.clone();
    let mut lk: u128 = 1;
    let mut k = 0;
    loop {
        if let Some(m) = dlog_l_power(model, p1, a1, &lk_q, l) {
            debug_assert_eq!(m % lk, 0);
            let shift = model.mul_big(p1, &BigUint::from(m / lk));
            return (model.sub(q, &shift), k);
        }
        lk_q = model.mul(&lk_q, l);
        lk *= l as u128;
        k += 1;
    }
}

/// Sylow l-basis of a curve's group of points, given the exact group order.
/// Random points are projected into the Sylow subgroup and combined until
/// the generated subgroup has order `l^v_l(order)`, which certifies the
/// result.
pub fn sylow_basis(model: &CurveModel, order: &BigUint, l: u64, rng: &mut ChaCha8Rng) -> Result<SylowBasis> {
    let lb = BigUint::from(l);
    let mut cofactor = order.clone();
    let mut e = 0u32;
    while (&cofactor % &lb).bits() == 0 {
        cofactor /= &lb;
        e += 1;
    }
    if e == 0 {
        return Ok(SylowBasis { l, e1: 0, e2: 0, p1: Point::Infinity, p2: Point::Infinity });
    }
    let mut samples: Vec<(Point, u32)> = Vec::new();
    for _ in 0..MAX_SAMPLES {
        let s = model.mul_big(&model.random_point(rng), &cofactor);
        let b = l_log_order(model, &s, l);
        if b == 0 {
            continue;
        }
        samples.push((s, b));
        let best = samples.iter().enumerate().max_by_key(|(i, (_, b))| (*b, usize::MAX - i)).unwrap().0;
        let (p1, a1) = samples[best].clone();
        if a1 == e {
            return Ok(SylowBasis { l, e1: e, e2: 0, p1, p2: Point::Infinity });
        }
        let mut p2 = Point::Infinity;
        let mut a2 = 0;
        for (i, (q, _)) in samples.iter().enumerate() {
            if i == best {
                continue;
            }
            let (r, k) = reduce_against(model, &p1, a1, q, l);
            if k > a2 {
                p2 = r;
                a2 = k;
            }
        }
        if a1 + a2 == e {
            return Ok(SylowBasis { l, e1: a1, e2: a2, p1, p2 });
        }
        if a1 + a2 > e {
            return Err(Error::InvariantViolation(format!(
                "Sylow {l}-subgroup larger than l^{e}; point count is wrong"
            )));
        }
    }
    Err(Error::TorsionSearchFailed(format!("no Sylow {l}-basis after {MAX_SAMPLES} samples")))
}

pub(crate) fn curve_rng(model: &CurveModel, salt: u64) -> ChaCha8Rng {
    let k = model.field();
    let words = [k.characteristic(), k.degree() as u64, salt]
        .into_iter()
        .chain(k.modulus().iter().copied())
        .chain(model.a().coeffs().iter().copied())
        .chain(model.b().coeffs().iter().copied());
    ChaCha8Rng::seed_from_u64(crate::fnv::hash_words(words))
}

/// `E(k) = Z/n1 x Z/n2` with `n1 | n2`.
pub fn group_structure(curve: &Curve) -> Result<(u64, u64)> {
    let n = curve.order();
    let mut rng = curve_rng(curve.model(), 0);
    let (mut n1, mut n2) = (1u64, 1u64);
    for (l, _) in arith::factor(n as u128) {
        let l = l as u64;
        match sylow_basis(curve.model(), &BigUint::from(n), l, &mut rng) {
            Ok(sb) => {
                n2 *= l.pow(sb.e1);
                n1 *= l.pow(sb.e2);
            }
            Err(Error::TorsionSearchFailed(_)) if n <= 4096 => return Ok(exhaustive_structure(curve)),
            Err(e) => return Err(e),
        }
    }
    Ok((n1, n2))
}

/// Structure from the orders of all points: the exponent is `n2`.
pub(crate) fn exhaustive_structure(curve: &Curve) -> (u64, u64) {
    let n = curve.order();
    let factors = arith::factor(n as u128);
    let exponent = curve
        .model()
        .points()
        .iter()
        .map(|pt| curve.model().order_dividing(pt, n as u128, &factors))
        .max()
        .unwrap()
        .to_u64()
        .unwrap();
    (n / exponent, exponent)
}
