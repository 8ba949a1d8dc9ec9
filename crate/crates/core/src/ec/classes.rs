use std::collections::BTreeMap;

use super::{Curve, CurveModel};
use crate::arith;
use crate::error::{Error, Result};
use crate::gf::{Fe, Field, Poly};

/// Largest field order for which all isomorphism classes are enumerated.
pub const MAX_ENUM_ORDER: u64 = 1 << 14;

/// All k-isomorphism classes of elliptic curves over a field, grouped by
/// trace. Each class is represented by its model with the smallest
/// `(a, b)` encoding; within a trace, curves are sorted by `(j, a, b)`.
#[derive(Clone, Debug)]
pub struct ClassTable {
    field: Field,
    by_trace: BTreeMap<i64, Vec<Curve>>,
}

impl ClassTable {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn traces(&self) -> impl Iterator<Item = i64> + '_ {
        self.by_trace.keys().copied()
    }

    /// Traces not divisible by p, ascending.
    pub fn ordinary_traces(&self) -> Vec<i64> {
        let p = self.field.characteristic() as i64;
        self.traces().filter(|t| t.rem_euclid(p) != 0).collect()
    }

    pub fn class(&self, t: i64) -> &[Curve] {
        self.by_trace.get(&t).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn num_classes(&self) -> usize {
        self.by_trace.values().map(Vec::len).sum()
    }
}

/// Precomputed `(u^4, u^6)` for every unit `u`.
fn twist_scalars(k: &Field) -> Vec<(Fe, Fe)> {
    k.elements()
        .skip(1)
        .map(|u| {
            let u2 = k.square(&u);
            let u4 = k.square(&u2);
            let u6 = k.mul(&u4, &u2);
            (u4, u6)
        })
        .collect()
}

/// Enumerate every isomorphism class over `field` by marking whole orbits
/// `{(u^4 a, u^6 b)}` while scanning `(a, b)` in increasing encoding, so
/// the first member met is the canonical one.
pub fn enumerate_classes(field: &Field) -> Result<ClassTable> {
    let k = field;
    let q = match k.order() {
        Some(q) if q <= MAX_ENUM_ORDER => q,
        _ => return Err(Error::FieldTooLarge { p: k.characteristic(), n: k.degree() }),
    };
    let scalars = twist_scalars(k);
    let elems: Vec<Fe> = k.elements().collect();
    let mut seen = vec![false; (q * q) as usize];
    let mut by_trace: BTreeMap<i64, Vec<Curve>> = BTreeMap::new();
    for (ia, a) in elems.iter().enumerate() {
        for (ib, b) in elems.iter().enumerate() {
            let idx = ia * q as usize + ib;
            if seen[idx] {
                continue;
            }
            for (u4, u6) in &scalars {
                let ja = k.index(&k.mul(u4, a)) as usize;
                let jb = k.index(&k.mul(u6, b)) as usize;
                seen[ja * q as usize + jb] = true;
            }
            let Ok(model) = CurveModel::new(k, a.clone(), b.clone()) else { continue };
            let curve = Curve::from_model(model)?;
            by_trace.entry(curve.trace()).or_default().push(curve);
        }
    }
    for v in by_trace.values_mut() {
        v.sort_by_key(Curve::sort_key);
    }
    Ok(ClassTable { field: k.clone(), by_trace })
}

/// The curves of trace `t`, one per k-isomorphism class.
pub fn enumerate_isogeny_class(field: &Field, t: i64) -> Result<Vec<Curve>> {
    let q = field.order().ok_or(Error::FieldTooLarge { p: field.characteristic(), n: field.degree() })?;
    let p = field.characteristic();
    if t.rem_euclid(p as i64) == 0 {
        return Err(Error::SupersingularTrace { t, p });
    }
    if !arith::within_hasse(t, q) {
        return Err(Error::TraceOutOfRange { t, q });
    }
    Ok(enumerate_classes(field)?.class(t).to_vec())
}

/// The canonical model isomorphic to `model` (smallest `(a, b)` encoding)
/// and the scalar `u` with `(a', b') = (u^4 a, u^6 b)`.
pub fn canonical_model(model: &CurveModel) -> (CurveModel, Fe) {
    let k = model.field();
    let mut best: Option<((u128, u128), Fe, Fe, Fe)> = None;
    for u in k.elements().skip(1) {
        let u2 = k.square(&u);
        let u4 = k.square(&u2);
        let a = k.mul(&u4, model.a());
        let b = k.mul(&k.mul(&u4, &u2), model.b());
        let key = (k.index(&a), k.index(&b));
        if best.as_ref().map_or(true, |(bk, ..)| key < *bk) {
            best = Some((key, a, b, u));
        }
    }
    let (_, a, b, u) = best.expect("field has units");
    (CurveModel { field: k.clone(), a, b }, u)
}

/// Some `u` with `u^4 a1 = a2` and `u^6 b1 = b2`, if the models are
/// isomorphic over their common field.
pub fn isomorphism_scalar(m1: &CurveModel, m2: &CurveModel) -> Option<Fe> {
    let k = m1.field();
    if m2.field() != k {
        return None;
    }
    let (a1, b1, a2, b2) = (m1.a(), m1.b(), m2.a(), m2.b());
    if k.is_zero(a1) != k.is_zero(a2) || k.is_zero(b1) != k.is_zero(b2) {
        return None;
    }
    let root = |d: usize, c: Fe| -> Option<Fe> {
        let mut coeffs = vec![k.neg(&c)];
        coeffs.extend((1..d).map(|_| k.zero()));
        coeffs.push(k.one());
        Poly::new(k, coeffs).roots().ok()?.into_iter().next()
    };
    if k.is_zero(a1) {
        return root(6, k.div(b2, b1)?);
    }
    if k.is_zero(b1) {
        return root(4, k.div(a2, a1)?);
    }
    // u^2 = (b2/b1) / (a2/a1).
    let w = k.div(&k.mul(a1, b2), &k.mul(a2, b1))?;
    if k.square(&w) != k.div(a2, a1)? || k.mul(&k.square(&w), &w) != k.div(b2, b1)? {
        return None;
    }
    k.sqrt(&w)
}
