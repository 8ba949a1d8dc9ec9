//! Short Weierstrass curves y^2 = x^3 + ax + b over [`Field`] values.
//!
//! [`CurveModel`] carries only the equation and implements the group law over
//! any field (including large extensions used for torsion); [`Curve`] is a
//! model over a small base field together with its cached point count,
//! trace and j-invariant.

mod classes;
mod count;
mod structure;
mod torsion;

pub use classes::{canonical_model, enumerate_classes, enumerate_isogeny_class, isomorphism_scalar, ClassTable};
pub use count::{count_points, extension_count, extension_trace};
pub use structure::{group_structure, sylow_basis, SylowBasis};
pub use torsion::{
    frobenius_matrix, frobenius_matrix_on, torsion_basis, weil_pairing, FrobMatrix, TorsionBasis,
};

use std::fmt;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Embedding, Fe, Field};

/// Integer encodings of `(a, b)`.
pub type CurveKey = (u128, u128);

/// A point in affine coordinates, or the point at infinity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Infinity,
    Affine(Fe, Fe),
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine(x, y) => write!(f, "({x:?}, {y:?})"),
        }
    }
}

impl Point {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&Fe> {
        match self {
            Point::Infinity => None,
            Point::Affine(x, _) => Some(x),
        }
    }

    pub fn y(&self) -> Option<&Fe> {
        match self {
            Point::Infinity => None,
            Point::Affine(_, y) => Some(y),
        }
    }
}

/// The equation `y^2 = x^3 + ax + b` over some field, without cached data.
#[derive(Clone, PartialEq, Eq)]
pub struct CurveModel {
    field: Field,
    a: Fe,
    b: Fe,
}

impl fmt::Debug for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + {:?}x + {:?} over {:?}", self.a, self.b, self.field)
    }
}

/// Jacobian coordinates `(X : Y : Z)` for `(X/Z^2, Y/Z^3)`.
struct Jacobian {
    x: Fe,
    y: Fe,
    z: Fe,
}

impl CurveModel {
    pub fn new(field: &Field, a: Fe, b: Fe) -> Result<CurveModel> {
        let m = CurveModel { field: field.clone(), a, b };
        if field.is_zero(&m.discriminant_core()) {
            return Err(Error::SingularCurve);
        }
        Ok(m)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn a(&self) -> &Fe {
        &self.a
    }

    pub fn b(&self) -> &Fe {
        &self.b
    }

    /// `4a^3 + 27b^2`.
    pub fn discriminant_core(&self) -> Fe {
        let k = &self.field;
        let a3 = k.mul(&k.square(&self.a), &self.a);
        k.add(&k.scale(&a3, 4), &k.scale(&k.square(&self.b), 27))
    }

    pub fn j_invariant(&self) -> Fe {
        let k = &self.field;
        let a3 = k.scale(&k.mul(&k.square(&self.a), &self.a), 4);
        let num = k.scale(&a3, 1728);
        k.div(&num, &self.discriminant_core()).expect("nonsingular")
    }

    /// `x^3 + ax + b`.
    pub fn rhs(&self, x: &Fe) -> Fe {
        let k = &self.field;
        let x2 = k.square(x);
        k.add(&k.mul(&k.add(&x2, &self.a), x), &self.b)
    }

    pub fn contains(&self, pt: &Point) -> bool {
        match pt {
            Point::Infinity => true,
            Point::Affine(x, y) => self.field.square(y) == self.rhs(x),
        }
    }

    /// The same equation over a larger field.
    pub fn base_change(&self, emb: &Embedding) -> CurveModel {
        CurveModel { field: emb.ext().clone(), a: emb.apply(&self.a), b: emb.apply(&self.b) }
    }

    pub fn neg(&self, pt: &Point) -> Point {
        match pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), self.field.neg(y)),
        }
    }

    pub fn add(&self, p1: &Point, p2: &Point) -> Point {
        let k = &self.field;
        let (x1, y1, x2, y2) = match (p1, p2) {
            (Point::Infinity, _) => return p2.clone(),
            (_, Point::Infinity) => return p1.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if k.is_zero(&k.add(y1, y2)) {
                return Point::Infinity;
            }
            let num = k.add(&k.scale(&k.square(x1), 3), &self.a);
            k.div(&num, &k.scale(y1, 2)).unwrap()
        } else {
            k.div(&k.sub(y2, y1), &k.sub(x2, x1)).unwrap()
        };
        let x3 = k.sub(&k.sub(&k.square(&lambda), x1), x2);
        let y3 = k.sub(&k.mul(&lambda, &k.sub(x1, &x3)), y1);
        Point::Affine(x3, y3)
    }

    pub fn sub(&self, p1: &Point, p2: &Point) -> Point {
        self.add(p1, &self.neg(p2))
    }

    pub fn double(&self, pt: &Point) -> Point {
        self.add(pt, pt)
    }

    /// `[n]P` for a signed machine integer.
    pub fn mul_i64(&self, pt: &Point, n: i64) -> Point {
        let r = self.mul(pt, n.unsigned_abs());
        if n < 0 {
            self.neg(&r)
        } else {
            r
        }
    }

    pub fn mul(&self, pt: &Point, n: u64) -> Point {
        self.mul_big(pt, &BigUint::from(n))
    }

    /// `[n]P` by double-and-add in Jacobian coordinates.
    pub fn mul_big(&self, pt: &Point, n: &BigUint) -> Point {
        let (x, y) = match pt {
            Point::Infinity => return Point::Infinity,
            Point::Affine(x, y) => (x, y),
        };
        if n.bits() == 0 {
            return Point::Infinity;
        }
        let k = &self.field;
        let mut acc = Jacobian { x: x.clone(), y: y.clone(), z: k.one() };
        let mut acc_inf = false;
        for i in (0..n.bits() - 1).rev() {
            if !acc_inf {
                acc_inf = !self.jac_double(&mut acc);
            }
            if n.bit(i) {
                if acc_inf {
                    acc = Jacobian { x: x.clone(), y: y.clone(), z: k.one() };
                    acc_inf = false;
                } else {
                    acc_inf = !self.jac_add_affine(&mut acc, x, y);
                }
            }
        }
        if acc_inf {
            return Point::Infinity;
        }
        let zi = k.inv(&acc.z).unwrap();
        let zi2 = k.square(&zi);
        Point::Affine(k.mul(&acc.x, &zi2), k.mul(&acc.y, &k.mul(&zi2, &zi)))
    }

    /// In-place doubling; returns `false` when the result is infinity.
    fn jac_double(&self, p: &mut Jacobian) -> bool {
        let k = &self.field;
        if k.is_zero(&p.y) {
            return false;
        }
        let y2 = k.square(&p.y);
        let s = k.scale(&k.mul(&p.x, &y2), 4);
        let z2 = k.square(&p.z);
        let m = k.add(&k.scale(&k.square(&p.x), 3), &k.mul(&self.a, &k.square(&z2)));
        let x3 = k.sub(&k.square(&m), &k.scale(&s, 2));
        let y3 = k.sub(&k.mul(&m, &k.sub(&s, &x3)), &k.scale(&k.square(&y2), 8));
        let z3 = k.scale(&k.mul(&p.y, &p.z), 2);
        *p = Jacobian { x: x3, y: y3, z: z3 };
        true
    }

    /// In-place mixed addition with an affine point; returns `false` when
    /// the result is infinity.
    fn jac_add_affine(&self, p: &mut Jacobian, x2: &Fe, y2: &Fe) -> bool {
        let k = &self.field;
        let z2 = k.square(&p.z);
        let u2 = k.mul(x2, &z2);
        let s2 = k.mul(y2, &k.mul(&z2, &p.z));
        let h = k.sub(&u2, &p.x);
        let r = k.sub(&s2, &p.y);
        if k.is_zero(&h) {
            if k.is_zero(&r) {
                return self.jac_double(p);
            }
            return false;
        }
        let h2 = k.square(&h);
        let h3 = k.mul(&h2, &h);
        let xh2 = k.mul(&p.x, &h2);
        let x3 = k.sub(&k.sub(&k.square(&r), &h3), &k.scale(&xh2, 2));
        let y3 = k.sub(&k.mul(&r, &k.sub(&xh2, &x3)), &k.mul(&p.y, &h3));
        let z3 = k.mul(&p.z, &h);
        *p = Jacobian { x: x3, y: y3, z: z3 };
        true
    }

    /// Order of `P`, given a multiple `m` of it with known factorization.
    pub fn order_dividing(&self, pt: &Point, m: u128, factors: &[(u128, u32)]) -> u128 {
        let mut ord = m;
        for &(l, e) in factors {
            for _ in 0..e {
                if ord % l == 0 && self.mul_big(pt, &BigUint::from(ord / l)).is_infinity() {
                    ord /= l;
                } else {
                    break;
                }
            }
        }
        ord
    }

    /// A uniformly random affine point (never infinity).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let k = &self.field;
        loop {
            let x = k.random(rng);
            if let Some(y) = k.sqrt(&self.rhs(&x)) {
                let y = if rng.random::<bool>() { k.neg(&y) } else { y };
                return Point::Affine(x, y);
            }
        }
    }

    /// Every point, infinity first. Only for small fields.
    pub fn points(&self) -> Vec<Point> {
        let k = &self.field;
        let mut out = vec![Point::Infinity];
        for x in k.elements() {
            let r = self.rhs(&x);
            if let Some(y) = k.sqrt(&r) {
                if k.is_zero(&y) {
                    out.push(Point::Affine(x, y));
                } else {
                    let ny = k.neg(&y);
                    out.push(Point::Affine(x.clone(), y));
                    out.push(Point::Affine(x, ny));
                }
            }
        }
        out
    }

    /// Apply the q-power Frobenius, `q = p^k` with `k` the given degree.
    pub fn frobenius(&self, pt: &Point, k: usize) -> Point {
        match pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                Point::Affine(self.field.frobenius_pow(x, k), self.field.frobenius_pow(y, k))
            }
        }
    }
}

/// An elliptic curve over a base field small enough to count points
/// naively, with its count, trace and j-invariant cached.
#[derive(Clone)]
pub struct Curve {
    model: CurveModel,
    order: u64,
    trace: i64,
    j: Fe,
}

impl PartialEq for Curve {
    fn eq(&self, other: &Self) -> bool {
        self.model == other.model
    }
}

impl Eq for Curve {}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} [N={}, t={}]", self.model, self.order, self.trace)
    }
}

impl Curve {
    pub fn new(field: &Field, a: Fe, b: Fe) -> Result<Curve> {
        Self::from_model(CurveModel::new(field, a, b)?)
    }

    pub fn from_u64(field: &Field, a: u64, b: u64) -> Result<Curve> {
        Self::new(field, field.from_u64(a), field.from_u64(b))
    }

    pub fn from_i64(field: &Field, a: i64, b: i64) -> Result<Curve> {
        Self::new(field, field.from_i64(a), field.from_i64(b))
    }

    pub fn from_model(model: CurveModel) -> Result<Curve> {
        let order = count_points(&model)?;
        let q = model.field.order().unwrap();
        let trace = (q + 1) as i64 - order as i64;
        let j = model.j_invariant();
        Ok(Curve { model, order, trace, j })
    }

    pub fn model(&self) -> &CurveModel {
        &self.model
    }

    pub fn field(&self) -> &Field {
        &self.model.field
    }

    pub fn a(&self) -> &Fe {
        &self.model.a
    }

    pub fn b(&self) -> &Fe {
        &self.model.b
    }

    pub fn q(&self) -> u64 {
        self.model.field.order().unwrap()
    }

    pub fn p(&self) -> u64 {
        self.model.field.characteristic()
    }

    /// `#E(k)`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn trace(&self) -> i64 {
        self.trace
    }

    pub fn j_invariant(&self) -> &Fe {
        &self.j
    }

    pub fn is_ordinary(&self) -> bool {
        self.trace.rem_euclid(self.p() as i64) != 0
    }

    /// True for j = 0 or j = 1728, where extra automorphisms exist.
    pub fn has_special_j(&self) -> bool {
        let k = self.field();
        k.is_zero(&self.j) || self.j == k.from_u64(1728)
    }

    /// `t^2 - 4q`.
    pub fn frobenius_discriminant(&self) -> i128 {
        (self.trace as i128).pow(2) - 4 * self.q() as i128
    }

    /// Integer encodings `(a, b)`; a stable vertex key for canonical models.
    pub fn key(&self) -> CurveKey {
        let k = self.field();
        (k.index(self.a()), k.index(self.b()))
    }

    /// Integer encodings `(j, a, b)` used for deterministic ordering.
    pub fn sort_key(&self) -> (u128, u128, u128) {
        let k = self.field();
        (k.index(&self.j), k.index(self.a()), k.index(self.b()))
    }

    pub fn require_ordinary(&self) -> Result<()> {
        if self.is_ordinary() {
            Ok(())
        } else {
            Err(Error::SupersingularCurve)
        }
    }
}
