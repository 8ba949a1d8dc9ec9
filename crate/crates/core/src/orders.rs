//! Quadratic-order bookkeeping for an isogeny class: `t^2 - 4q = f^2 d_L`,
//! the conductors of `Z[pi] ⊂ End(E) ⊂ O_L`, and trace-pairing regulators.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};

/// Heights `l -> h_l` of one curve.
pub type HeightMap = BTreeMap<u64, u32>;

/// Largest |D| accepted by [`conductor_decomposition`].
pub const MAX_ABS_DISC: u128 = 1 << 42;

/// `(f, d_L)` with `D = f^2 d_L` and `d_L` fundamental.
pub fn conductor_decomposition(d: i128) -> Result<(u64, i128)> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) || d.unsigned_abs() > MAX_ABS_DISC {
        return Err(Error::NotADiscriminant(d));
    }
    let mut f: u64 = 1;
    let mut core: i128 = -1;
    for (l, e) in arith::factor(d.unsigned_abs()) {
        f *= (l as u64).pow(e / 2);
        if e % 2 == 1 {
            core *= l as i128;
        }
    }
    if core.rem_euclid(4) == 1 {
        Ok((f, core))
    } else {
        Ok((f / 2, 4 * core))
    }
}

pub fn is_fundamental(d: i128) -> bool {
    conductor_decomposition(d).is_ok_and(|(f, _)| f == 1)
}

/// `h^2 |d_L|`: the absolute determinant of the trace pairing on the order
/// of conductor `h` in the field of discriminant `d_L`.
pub fn trace_regulator(h: u64, d_l: i128) -> u128 {
    (h as u128).pow(2) * d_l.unsigned_abs()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderTower {
    pub q: u64,
    pub t: i64,
    pub disc: i128,
    pub d_l: i128,
    pub f: u64,
    pub f_factors: Vec<(u64, u32)>,
}

/// Discriminant data of `Z[pi]` for the ordinary class `(q, t)`.
pub fn order_tower(q: u64, t: i64) -> Result<OrderTower> {
    let p = arith::prime_power(q).ok_or(Error::NotPrimePower(q))?.0;
    if t.rem_euclid(p as i64) == 0 {
        return Err(Error::SupersingularTrace { t, p });
    }
    if !arith::within_hasse(t, q) {
        return Err(Error::TraceOutOfRange { t, q });
    }
    let disc = (t as i128).pow(2) - 4 * q as i128;
    let (f, d_l) = conductor_decomposition(disc)?;
    let f_factors = arith::factor(f as u128).into_iter().map(|(l, e)| (l as u64, e)).collect();
    Ok(OrderTower { q, t, disc, d_l, f, f_factors })
}

impl OrderTower {
    pub fn v_f(&self, l: u64) -> u32 {
        self.f_factors.iter().find(|&&(m, _)| m == l).map_or(0, |&(_, e)| e)
    }

    fn check_heights(&self, heights: &HeightMap) -> Result<()> {
        for (&l, &h) in heights {
            if h > self.v_f(l) {
                return Err(Error::InvariantViolation(format!(
                    "h_{l} = {h} exceeds v_{l}(f) = {} for (q, t) = ({}, {})",
                    self.v_f(l),
                    self.q,
                    self.t
                )));
            }
        }
        for &(l, _) in &self.f_factors {
            if !heights.contains_key(&l) {
                return Err(Error::InvalidInput(format!("missing height at l = {l}")));
            }
        }
        Ok(())
    }

    /// `[End(E) : Z[pi]] = prod l^{h_l}`.
    pub fn end_index(&self, heights: &HeightMap) -> Result<u64> {
        self.check_heights(heights)?;
        Ok(self.f_factors.iter().map(|&(l, _)| l.pow(heights[&l])).product())
    }

    /// Conductor of `End(E)`: `f / [End(E) : Z[pi]]`.
    pub fn end_conductor(&self, heights: &HeightMap) -> Result<u64> {
        Ok(self.f / self.end_index(heights)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharedOrder {
    /// Conductor of `End(E) ∩ End(F)`.
    pub g_o: u64,
    /// `[O : Z[pi]] = f / g_O`.
    pub n_o: u64,
    /// `l -> min(h_l(E), h_l(F))` for `l | f`.
    pub per_ell: BTreeMap<u64, u32>,
}

/// The order `End(E) ∩ End(F)` from the heights of two curves of one class.
pub fn shared_order(tower_e: &OrderTower, tower_f: &OrderTower, he: &HeightMap, hf: &HeightMap) -> Result<SharedOrder> {
    if (tower_e.q, tower_e.t) != (tower_f.q, tower_f.t) {
        return Err(Error::DifferentIsogenyClass);
    }
    tower_e.check_heights(he)?;
    tower_e.check_heights(hf)?;
    let per_ell: BTreeMap<u64, u32> = tower_e.f_factors.iter().map(|&(l, _)| (l, he[&l].min(hf[&l]))).collect();
    let n_o: u64 = per_ell.iter().map(|(&l, &h)| l.pow(h)).product();
    Ok(SharedOrder { g_o: tower_e.f / n_o, n_o, per_ell })
}
