use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::count::{count_mod, extension_count};
use super::structure::{curve_rng, sylow_basis};
use super::{Curve, CurveModel, Point};
use crate::arith;
use crate::error::{Error, Result};
use crate::gf::{embed, Fe, Field};

/// Independent points `P`, `Q` of exact order `n` generating `E[n]`, defined
/// over the degree-`r` extension of the curve's base field.
#[derive(Clone, Debug)]
pub struct TorsionBasis {
    pub n: u64,
    pub l: u64,
    pub a: u32,
    /// Degree of the extension over the base field.
    pub r: usize,
    /// The base-changed curve the points live on.
    pub model: CurveModel,
    pub p: Point,
    pub q: Point,
    /// `e_n(P, Q)`, a primitive n-th root of unity.
    pub wp: Fe,
    base_degree: usize,
}

impl TorsionBasis {
    pub fn field(&self) -> &Field {
        self.model.field()
    }

    /// The basis `(l^k P, l^k Q)` of `E[n / l^k]`.
    pub fn reduce(&self, k: u32) -> TorsionBasis {
        assert!(k <= self.a);
        let s = self.l.pow(k);
        let p = self.model.mul(&self.p, s);
        let q = self.model.mul(&self.q, s);
        let n = self.n / s;
        let wp = self.field().pow(&self.wp, s * s);
        TorsionBasis { n, a: self.a - k, p, q, wp, model: self.model.clone(), ..*self }
    }

    /// The q-power Frobenius of the base field applied to a point.
    pub fn frobenius(&self, pt: &Point) -> Point {
        self.model.frobenius(pt, self.base_degree)
    }
}

/// Order of `x -> pi x` on `Z[pi] / n` with `pi^2 = t pi - q`.
fn frobenius_order_mod(t: i64, q: u64, n: u64) -> u64 {
    let n128 = n as i128;
    let c = [[0i128, (-(q as i128)).rem_euclid(n128)], [1, (t as i128).rem_euclid(n128)]];
    let mul = |x: &[[i128; 2]; 2], y: &[[i128; 2]; 2]| {
        let mut z = [[0i128; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                z[i][j] = (x[i][0] * y[0][j] + x[i][1] * y[1][j]) % n128;
            }
        }
        z
    };
    let id = [[1 % n128, 0], [0, 1 % n128]];
    let mut acc = c;
    let mut r = 1;
    while acc != id {
        acc = mul(&acc, &c);
        r += 1;
    }
    r
}

/// A basis of `E[n]` for `n = l^a` coprime to p, over the smallest extension
/// of the base field containing all of `E[n]`.
pub fn torsion_basis(curve: &Curve, n: u64) -> Result<TorsionBasis> {
    let p = curve.p();
    let (l, a) = arith::prime_power(n).ok_or(Error::NotPrimePower(n))?;
    if l == p {
        return Err(Error::CharDividesN { n, p });
    }
    let (q, t) = (curve.q(), curve.trace());
    let m = curve.field().degree();
    let r_max = frobenius_order_mod(t, q, n);
    let mut rng = curve_rng(curve.model(), n);
    for r in arith::divisors(r_max) {
        if arith::pow_mod_u64(q, r, n) != 1 {
            continue;
        }
        let tr = super::count::extension_trace(t, q, r as u32);
        let tr_minus_2: BigInt = tr - 2u32;
        if !(tr_minus_2 % BigInt::from(n)).is_zero() {
            continue;
        }
        if count_mod(t, q, r as u32, n * n) != 0 {
            continue;
        }
        let ext = Field::new_unbounded(p, m * r as usize)?;
        let emb = embed(curve.field(), &ext)?;
        let model = curve.model().base_change(&emb);
        let order = extension_count(t, q, r as u32);
        let sb = sylow_basis(&model, &order, l, &mut rng)?;
        if sb.e2 < a {
            continue;
        }
        let bp = model.mul(&sb.p1, l.pow(sb.e1 - a));
        let bq = model.mul(&sb.p2, l.pow(sb.e2 - a));
        let wp = weil_pairing(&model, &bp, &bq, n)
            .ok_or_else(|| Error::InvariantViolation("degenerate Weil pairing on a torsion basis".into()))?;
        let k = model.field();
        if !k.is_one(&k.pow(&wp, n)) || k.is_one(&k.pow(&wp, n / l)) {
            return Err(Error::InvariantViolation(format!("e_{n}(P, Q) is not a primitive root")));
        }
        return Ok(TorsionBasis { n, l, a, r: r as usize, model, p: bp, q: bq, wp, base_degree: m });
    }
    Err(Error::TorsionSearchFailed(format!("E[{n}] not found within degree {r_max}")))
}

/// Value at `at` of the line through `a` and `b` (tangent when equal),
/// divided by the vertical line through `a + b`; also returns `a + b`.
/// `None` if either factor vanishes at `at`.
fn line_ratio(model: &CurveModel, a: &Point, b: &Point, at: &Point) -> Option<(Fe, Point)> {
    let k = model.field();
    let (xa, ya, xb, yb) = match (a, b) {
        (Point::Infinity, _) => return Some((k.one(), b.clone())),
        (_, Point::Infinity) => return Some((k.one(), a.clone())),
        (Point::Affine(xa, ya), Point::Affine(xb, yb)) => (xa, ya, xb, yb),
    };
    let Point::Affine(x, y) = at else { return None };
    if xa == xb && k.is_zero(&k.add(ya, yb)) {
        let v = k.sub(x, xa);
        return (!k.is_zero(&v)).then(|| (v, Point::Infinity));
    }
    let lambda = if xa == xb {
        k.div(&k.add(&k.scale(&k.square(xa), 3), model.a()), &k.scale(ya, 2))?
    } else {
        k.div(&k.sub(yb, ya), &k.sub(xb, xa))?
    };
    let num = k.sub(&k.sub(y, ya), &k.mul(&lambda, &k.sub(x, xa)));
    let sum = model.add(a, b);
    let den = match &sum {
        Point::Infinity => k.one(),
        Point::Affine(xs, _) => k.sub(x, xs),
    };
    if k.is_zero(&num) || k.is_zero(&den) {
        return None;
    }
    Some((k.div(&num, &den)?, sum))
}

/// Miller's `f_{n,P}(Q)`, normalized at infinity.
fn miller(model: &CurveModel, p: &Point, q: &Point, n: u64) -> Option<Fe> {
    let k = model.field();
    let mut t = p.clone();
    let mut f = k.one();
    for i in (0..63 - n.leading_zeros()).rev() {
        let (g, t2) = line_ratio(model, &t, &t, q)?;
        f = k.mul(&k.square(&f), &g);
        t = t2;
        if (n >> i) & 1 == 1 {
            let (g, t3) = line_ratio(model, &t, p, q)?;
            f = k.mul(&f, &g);
            t = t3;
        }
    }
    t.is_infinity().then_some(f)
}

/// Weil pairing `e_n(P, Q) = (-1)^n f_P(Q) / f_Q(P)`; `None` when the
/// evaluation degenerates (e.g. `P`, `Q` dependent).
pub fn weil_pairing(model: &CurveModel, p: &Point, q: &Point, n: u64) -> Option<Fe> {
    if p.is_infinity() || q.is_infinity() || p == q {
        return None;
    }
    if n == 1 {
        return Some(model.field().one());
    }
    let k = model.field();
    let fp = miller(model, p, q, n)?;
    let fq = miller(model, q, p, n)?;
    let e = k.div(&fp, &fq)?;
    Some(if n % 2 == 1 { k.neg(&e) } else { e })
}

/// Action of the q-power Frobenius on a basis of `E[n]`: column `j` holds
/// the coordinates of the image of the `j`-th basis vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrobMatrix {
    pub n: u64,
    pub m: [[u64; 2]; 2],
}

impl FrobMatrix {
    pub fn det(&self) -> u64 {
        let n = self.n as u128;
        let [[a, b], [c, d]] = self.m.map(|r| r.map(|x| x as u128));
        ((a * d % n + n - b * c % n) % n) as u64
    }

    pub fn trace(&self) -> u64 {
        (self.m[0][0] + self.m[1][1]) % self.n
    }

    pub fn is_identity(&self) -> bool {
        self.m == [[1 % self.n, 0], [0, 1 % self.n]]
    }

    /// The same matrix acting on `E[d]` for `d | n`.
    pub fn reduce(&self, d: u64) -> FrobMatrix {
        assert_eq!(self.n % d, 0);
        FrobMatrix { n: d, m: self.m.map(|r| r.map(|x| x % d)) }
    }
}

/// Frobenius matrix on a given basis; discrete logs by exhaustive search
/// over all `n^2` elements of `<P, Q>`.
pub fn frobenius_matrix_on(curve: &Curve, basis: &TorsionBasis) -> Result<FrobMatrix> {
    let n = basis.n;
    let model = &basis.model;
    let mut table = HashMap::with_capacity((n * n) as usize);
    let mut row = Point::Infinity;
    for j in 0..n {
        let mut pt = row.clone();
        for i in 0..n {
            table.insert(pt.clone(), (i, j));
            pt = model.add(&pt, &basis.p);
        }
        row = model.add(&row, &basis.q);
    }
    if table.len() as u64 != n * n {
        return Err(Error::InvariantViolation("torsion basis is dependent".into()));
    }
    let locate = |pt: &Point| {
        table
            .get(pt)
            .copied()
            .ok_or_else(|| Error::InvariantViolation("Frobenius image outside E[n]".into()))
    };
    let (a, c) = locate(&basis.frobenius(&basis.p))?;
    let (b, d) = locate(&basis.frobenius(&basis.q))?;
    let fm = FrobMatrix { n, m: [[a, b], [c, d]] };
    let q_mod = curve.q() % n;
    let t_mod = curve.trace().rem_euclid(n as i64) as u64;
    if fm.det() != q_mod || fm.trace() != t_mod {
        return Err(Error::InvariantViolation(format!(
            "Frobenius matrix {:?} has det {} / trace {}, expected {q_mod} / {t_mod}",
            fm.m,
            fm.det(),
            fm.trace()
        )));
    }
    Ok(fm)
}

pub fn frobenius_matrix(curve: &Curve, n: u64) -> Result<FrobMatrix> {
    let basis = torsion_basis(curve, n)?;
    frobenius_matrix_on(curve, &basis)
}
