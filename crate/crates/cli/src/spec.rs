//! Curve specifications of the form `p[,n];a,b`.
//!
//! Over a prime field the coefficients are integers taken mod p and may be
//! negative. Over GF(p^n) each coefficient is the integer encoding of a
//! field element: the base-p digits are its coefficients in the field's
//! polynomial basis.

use volcano_sha::ec::Curve;
use volcano_sha::gf::Field;
use volcano_sha::{Error, Result};

fn bad(s: &str, why: &str) -> Error {
    Error::InvalidInput(format!("curve spec {s:?}: {why} (expected p[,n];a,b)"))
}

/// Field part `p[,n]`.
pub fn parse_field(s: &str) -> Result<Field> {
    let mut it = s.split(',').map(str::trim);
    let p = it.next().and_then(|v| v.parse::<u64>().ok()).ok_or_else(|| bad(s, "bad characteristic"))?;
    let n = match it.next() {
        Some(v) => v.parse::<usize>().map_err(|_| bad(s, "bad degree"))?,
        None => 1,
    };
    if it.next().is_some() {
        return Err(bad(s, "too many field parameters"));
    }
    Field::new(p, n)
}

fn coefficient(k: &Field, s: &str, whole: &str) -> Result<volcano_sha::gf::Fe> {
    let v: i128 = s.trim().parse().map_err(|_| bad(whole, "bad coefficient"))?;
    if k.degree() == 1 {
        return Ok(k.from_i64(v.rem_euclid(k.characteristic() as i128) as i64));
    }
    let q = k.order().ok_or_else(|| bad(whole, "field too large"))?;
    if v < 0 || v as u128 >= q as u128 {
        return Err(bad(whole, "extension-field coefficient must be an encoding in [0, q)"));
    }
    Ok(k.from_index(v as u128))
}

pub fn parse_curve(s: &str) -> Result<Curve> {
    let (field, coeffs) = s.split_once(';').ok_or_else(|| bad(s, "missing ';'"))?;
    let k = parse_field(field)?;
    let (a, b) = coeffs.split_once(',').ok_or_else(|| bad(s, "missing ','"))?;
    Curve::new(&k, coefficient(&k, a, s)?, coefficient(&k, b, s)?)
}
