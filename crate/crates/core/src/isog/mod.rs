//! Prime-degree isogenies over k: division polynomials, rational kernels,
//! Vélu codomains and rational maps, and direction labels.

mod divpoly;

pub use divpoly::{cubic, division_poly, division_polys, rational_kernels, Kernel, MAX_ELL};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ec::{canonical_model, Curve, CurveKey, CurveModel, Point};
use crate::error::{Error, Result};
use crate::gf::{Embedding, Fe, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    Horizontal,
    Unclassified,
}

/// A normalized degree-l isogeny `E -> E'` with `E'` the canonical model
/// of its class. The map is `(x, y) -> (u^2 X(x), u^3 y X'(x))` with
/// `X = num / den^2` landing on the raw Vélu model and `u` the scalar
/// moving that model to the canonical one.
#[derive(Clone)]
pub struct Isogeny {
    domain: Curve,
    codomain: Curve,
    ell: u64,
    kernel: Kernel,
    direction: Direction,
    raw_codomain: CurveModel,
    scalar: Fe,
    num: Poly,
    den: Poly,
}

impl fmt::Debug for Isogeny {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-isogeny {:?} -> {:?} kernel {:?} ({:?})",
            self.ell,
            self.domain.key(),
            self.codomain.key(),
            self.kernel.poly,
            self.direction
        )
    }
}

impl Isogeny {
    pub fn domain(&self) -> &Curve {
        &self.domain
    }

    pub fn codomain(&self) -> &Curve {
        &self.codomain
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn degree(&self) -> u64 {
        self.ell
    }

    pub fn kernel_poly(&self) -> &Poly {
        &self.kernel.poly
    }

    pub fn rational_kernel_point(&self) -> bool {
        self.kernel.rational_point
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn set_direction(&mut self, d: Direction) {
        self.direction = d;
    }

    /// The Vélu codomain before normalization.
    pub fn raw_codomain(&self) -> &CurveModel {
        &self.raw_codomain
    }

    /// Image of a point over the base field.
    pub fn eval(&self, pt: &Point) -> Point {
        let k = self.domain.field();
        self.eval_generic(pt, k, |c: &Fe| c.clone())
    }

    /// Image of a point over an extension given by `emb`.
    pub fn eval_in(&self, emb: &Embedding, pt: &Point) -> Point {
        self.eval_generic(pt, emb.ext(), |c: &Fe| emb.apply(c))
    }

    fn eval_generic(&self, pt: &Point, ext: &crate::gf::Field, lift: impl Fn(&Fe) -> Fe) -> Point {
        let Point::Affine(x, y) = pt else { return Point::Infinity };
        let ev = |p: &Poly| p.eval_with(ext, &lift, x);
        let d = ev(&self.den);
        if ext.is_zero(&d) {
            return Point::Infinity;
        }
        let n = ev(&self.num);
        let (dn, dd) = (ev(&self.num.derivative()), ev(&self.den.derivative()));
        let d2 = ext.square(&d);
        let xx = ext.div(&n, &d2).unwrap();
        // X' = (N'D - 2ND') / D^3
        let dx = ext.div(&ext.sub(&ext.mul(&dn, &d), &ext.scale(&ext.mul(&n, &dd), 2)), &ext.mul(&d2, &d)).unwrap();
        let yy = ext.mul(y, &dx);
        let u = lift(&self.scalar);
        let u2 = ext.square(&u);
        Point::Affine(ext.mul(&u2, &xx), ext.mul(&ext.mul(&u2, &u), &yy))
    }
}

/// Power sums `sum x_i^j`, `j = 1..=3`, of the roots of a monic polynomial.
fn power_sums(d: &Poly) -> [Fe; 3] {
    let k = d.field();
    let n = d.deg();
    // e_j = (-1)^j coeff(n - j)
    let e = |j: usize| -> Fe {
        if j > n {
            return k.zero();
        }
        let c = d.coeff(n - j);
        if j % 2 == 1 {
            k.neg(&c)
        } else {
            c
        }
    };
    let (e1, e2, e3) = (e(1), e(2), e(3));
    let s1 = e1.clone();
    let s2 = k.sub(&k.square(&e1), &k.scale(&e2, 2));
    let s3 = k.add(&k.sub(&k.mul(&k.square(&e1), &e1), &k.scale(&k.mul(&e1, &e2), 3)), &k.scale(&e3, 3));
    [s1, s2, s3]
}

/// Vélu's construction from a kernel polynomial. The codomain is moved to
/// the canonical model of its isomorphism class.
pub fn velu(curve: &Curve, kernel: &Kernel, ell: u64) -> Result<Isogeny> {
    divpoly::check_ell(curve, ell)?;
    let k = curve.field();
    let model = curve.model();
    let dpoly = &kernel.poly;
    let expected_deg = if ell == 2 { 1 } else { ((ell - 1) / 2) as usize };
    if !dpoly.is_monic() || dpoly.deg() != expected_deg || !dpoly.divides(&division_poly(curve, ell)?) {
        return Err(Error::InvalidKernel);
    }
    let (a, b) = (model.a(), model.b());
    let f = cubic(model);
    let x = Poly::x(k);
    let (v, w, num) = if ell == 2 {
        let x0 = k.neg(&dpoly.coeff(0));
        let v = k.add(&k.scale(&k.square(&x0), 3), a);
        let w = k.mul(&x0, &v);
        // x + v/(x - x0) over the common denominator (x - x0)^2
        let num = x.mul(&dpoly.square()).add(&dpoly.scale(&v));
        (v, w, num)
    } else {
        let d = expected_deg as u64;
        let [s1, s2, s3] = power_sums(dpoly);
        let v = k.add(&k.scale(&s2, 6), &k.scale(a, 2 * d));
        let w = k.add(&k.add(&k.scale(&s3, 10), &k.scale(&k.mul(a, &s1), 6)), &k.scale(b, 4 * d));
        let (d1, d2) = (dpoly.derivative(), dpoly.derivative().derivative());
        let lin = Poly::new(k, vec![k.neg(&k.scale(&s1, 2)), k.from_u64(ell)]);
        let num = lin
            .mul(&dpoly.square())
            .sub(&f.derivative().mul(&d1).mul(dpoly).scale(&k.from_u64(2)))
            .add(&f.mul(&d1.square().sub(&dpoly.mul(&d2))).scale(&k.from_u64(4)));
        (v, w, num)
    };
    let a2 = k.sub(a, &k.scale(&v, 5));
    let b2 = k.sub(b, &k.scale(&w, 7));
    let raw = CurveModel::new(k, a2, b2).map_err(|_| Error::InvalidKernel)?;
    let (canon, scalar) = canonical_model(&raw);
    let codomain = Curve::from_model(canon)?;
    if codomain.trace() != curve.trace() {
        return Err(Error::InvariantViolation(format!(
            "Vélu codomain has trace {} but domain has {}",
            codomain.trace(),
            curve.trace()
        )));
    }
    Ok(Isogeny {
        domain: curve.clone(),
        codomain,
        ell,
        kernel: kernel.clone(),
        direction: Direction::Unclassified,
        raw_codomain: raw,
        scalar,
        num,
        den: dpoly.clone(),
    })
}

/// Direction of an edge from the heights of its endpoints.
pub fn direction_from_heights(h_domain: u32, h_codomain: u32) -> Result<Direction> {
    match h_codomain as i64 - h_domain as i64 {
        1 => Ok(Direction::Up),
        -1 => Ok(Direction::Down),
        0 => Ok(Direction::Horizontal),
        _ => Err(Error::InconsistentHeights { from: h_domain, to: h_codomain }),
    }
}

/// Direction of `iso` given a height lookup for its endpoints.
pub fn classify_direction(iso: &Isogeny, heights: impl Fn(&CurveKey) -> Option<u32>) -> Result<Direction> {
    let missing = || Error::InvalidInput("endpoint height not available".into());
    let hd = heights(&iso.domain.key()).ok_or_else(missing)?;
    let hc = heights(&iso.codomain.key()).ok_or_else(missing)?;
    direction_from_heights(hd, hc)
}

/// A chain of composable isogenies of the same prime degree.
#[derive(Clone, Debug)]
pub struct IsogenyPath {
    steps: Vec<Isogeny>,
}

impl IsogenyPath {
    pub fn new(steps: Vec<Isogeny>) -> Result<IsogenyPath> {
        for w in steps.windows(2) {
            if w[0].codomain.key() != w[1].domain.key() || w[0].ell != w[1].ell {
                return Err(Error::InvalidInput("isogenies are not composable".into()));
            }
        }
        Ok(IsogenyPath { steps })
    }

    pub fn steps(&self) -> &[Isogeny] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_degree(&self) -> u64 {
        self.steps.iter().map(|s| s.ell).product()
    }

    pub fn is_downward(&self) -> bool {
        self.steps.iter().all(|s| s.direction == Direction::Down)
    }

    pub fn eval(&self, pt: &Point) -> Point {
        self.steps.iter().fold(pt.clone(), |acc, s| s.eval(&acc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::torsion_basis;
    use crate::gf::{embed, Field};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_isogeny_from_x3_plus_x() {
        let k = Field::new(5, 1).unwrap();
        let e = Curve::from_u64(&k, 1, 0).unwrap();
        let kernel = Kernel { poly: Poly::x(&k), rational_point: true };
        let phi = velu(&e, &kernel, 2).unwrap();
        assert_eq!(phi.codomain().trace(), 2);
        // Oracle: naive count of the raw codomain.
        let raw = Curve::from_model(phi.raw_codomain().clone()).unwrap();
        assert_eq!(raw.trace(), 2);
    }

    #[test]
    fn invalid_kernel_is_rejected() {
        let k = Field::new(11, 1).unwrap();
        let e = Curve::from_u64(&k, 1, 3).unwrap();
        let bogus = Kernel { poly: Poly::from_u64s(&k, &[4, 1]), rational_point: false };
        let psi3 = division_poly(&e, 3).unwrap();
        assert!(!bogus.poly.divides(&psi3));
        assert_eq!(velu(&e, &bogus, 3).unwrap_err(), Error::InvalidKernel);
    }

    #[test]
    fn maps_points_and_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [13u64, 29, 41, 59] {
            let k = Field::new(p, 1).unwrap();
            for (a, b) in [(1u64, 1u64), (2, 5), (7, 3), (4, 11)] {
                let Ok(e) = Curve::from_u64(&k, a, b) else { continue };
                for ell in [2u64, 3, 5, 7] {
                    for kernel in rational_kernels(&e, ell).unwrap() {
                        let phi = velu(&e, &kernel, ell).unwrap();
                        assert_eq!(phi.codomain().trace(), e.trace());
                        let cm = phi.codomain().model();
                        for _ in 0..10 {
                            let pt = e.model().random_point(&mut rng);
                            let img = phi.eval(&pt);
                            assert!(cm.contains(&img));
                            let pt2 = e.model().random_point(&mut rng);
                            // Homomorphism.
                            let lhs = phi.eval(&e.model().add(&pt, &pt2));
                            assert_eq!(lhs, cm.add(&img, &phi.eval(&pt2)));
                        }
                    }
                }
            }
        }
    }

    /// The dual kernel phi(E[l]) is rational on the codomain, and the
    /// composite with the isogeny it defines acts as [l] on x-coordinates.
    #[test]
    fn composite_with_dual_is_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut checked = 0;
        let mut cases = Vec::new();
        for (p, ell) in [(13u64, 3u64), (29, 2), (41, 5), (23, 3), (31, 7)] {
            let k = Field::new(p, 1).unwrap();
            let found = (1..p).flat_map(|a| (1..p).map(move |b| (a, b))).find_map(|(a, b)| {
                let e = Curve::from_u64(&k, a, b).ok()?;
                (!e.has_special_j() && !rational_kernels(&e, ell).unwrap().is_empty()).then_some(e)
            });
            cases.push((k, found.unwrap(), ell));
        }
        for (k, e, ell) in cases {
            let (canon, _) = canonical_model(e.model());
            let e = Curve::from_model(canon).unwrap();
            let phi = velu(&e, &rational_kernels(&e, ell).unwrap()[0], ell).unwrap();
            let tb = torsion_basis(&e, ell).unwrap();
            let emb = embed(&k, tb.field()).unwrap();
            let img_p = phi.eval_in(&emb, &tb.p);
            let img_q = phi.eval_in(&emb, &tb.q);
            let gen = if img_p.is_infinity() { img_q } else { img_p };
            assert!(!gen.is_infinity());
            let e1 = phi.codomain().clone();
            let cm = e1.model().base_change(&emb);
            let mut xs = Vec::new();
            let mut acc = gen.clone();
            while !acc.is_infinity() {
                xs.push(acc.x().unwrap().clone());
                acc = cm.add(&acc, &gen);
            }
            let back = rational_kernels(&e1, ell)
                .unwrap()
                .into_iter()
                .find(|kr| xs.iter().all(|x| tb.field().is_zero(&emb.apply_poly(&kr.poly).eval(x))))
                .expect("dual kernel is rational");
            let psi = velu(&e1, &back, ell).unwrap();
            assert_eq!(psi.codomain().key(), e.key());
            for _ in 0..10 {
                let pt = e.model().random_point(&mut rng);
                let lhs = psi.eval(&phi.eval(&pt));
                let rhs = e.model().mul(&pt, ell);
                assert_eq!(lhs.x(), rhs.x());
            }
            assert!(psi.eval_in(&emb, &phi.eval_in(&emb, &tb.p)).is_infinity());
            assert!(psi.eval_in(&emb, &phi.eval_in(&emb, &tb.q)).is_infinity());
            checked += 1;
        }
        assert!(checked >= 2, "only {checked} cases exercised");
    }

    #[test]
    fn directions() {
        assert_eq!(direction_from_heights(1, 0).unwrap(), Direction::Down);
        assert_eq!(direction_from_heights(0, 0).unwrap(), Direction::Horizontal);
        assert_eq!(direction_from_heights(0, 1).unwrap(), Direction::Up);
        assert_eq!(direction_from_heights(0, 2).unwrap_err(), Error::InconsistentHeights { from: 0, to: 2 });
    }
}
