use crate::ec::{Curve, CurveModel};
use crate::error::{Error, Result};
use crate::gf::{embed, Fe, Field, Poly};

/// Largest isogeny degree handled.
pub const MAX_ELL: u64 = 13;

pub(crate) fn check_ell(curve: &Curve, ell: u64) -> Result<()> {
    if !crate::arith::is_prime(ell) {
        return Err(Error::NonPrimeDegree(ell));
    }
    if ell == curve.p() {
        return Err(Error::CharEqualsL(ell));
    }
    if ell > MAX_ELL {
        return Err(Error::UnsupportedDegree(ell));
    }
    Ok(())
}

/// `x^3 + ax + b` as a polynomial.
pub fn cubic(model: &CurveModel) -> Poly {
    let k = model.field();
    Poly::new(k, vec![model.b().clone(), model.a().clone(), k.zero(), k.one()])
}

/// The univariate parts `g_0, ..., g_n` of the division polynomials:
/// `psi_i = g_i` for odd `i` and `psi_i = y g_i` for even `i`.
pub fn division_polys(model: &CurveModel, n: usize) -> Vec<Poly> {
    let k = model.field();
    let (a, b) = (model.a(), model.b());
    let c = |v: i64| k.from_i64(v);
    let f2 = cubic(model).square();
    let mut g = vec![Poly::zero(k), Poly::one(k), Poly::constant(k, c(2))];
    let a2 = k.square(a);
    // 3x^4 + 6ax^2 + 12bx - a^2
    g.push(Poly::new(k, vec![k.neg(&a2), k.scale(b, 12), k.scale(a, 6), k.zero(), c(3)]));
    // 4(x^6 + 5ax^4 + 20bx^3 - 5a^2x^2 - 4abx - 8b^2 - a^3)
    let a3 = k.mul(&a2, a);
    let g4 = Poly::new(
        k,
        vec![
            k.neg(&k.add(&k.scale(&k.square(b), 8), &a3)),
            k.neg(&k.scale(&k.mul(a, b), 4)),
            k.neg(&k.scale(&a2, 5)),
            k.scale(b, 20),
            k.scale(a, 5),
            k.zero(),
            k.one(),
        ],
    );
    g.push(g4.scale(&c(4)));
    let half = k.inv(&c(2)).unwrap();
    for i in 5..=n {
        let m = i / 2;
        let next = if i % 2 == 1 {
            let (lhs, rhs) = (g[m + 2].mul(&g[m].pow(3)), g[m - 1].mul(&g[m + 1].pow(3)));
            if m % 2 == 0 {
                f2.mul(&lhs).sub(&rhs)
            } else {
                lhs.sub(&f2.mul(&rhs))
            }
        } else {
            let inner = g[m + 2].mul(&g[m - 1].square()).sub(&g[m - 2].mul(&g[m + 1].square()));
            g[m].mul(&inner).scale(&half)
        };
        g.push(next);
    }
    g.truncate(n + 1);
    g
}

/// The l-division polynomial: `x^3 + ax + b` for l = 2, otherwise the
/// degree-(l^2-1)/2 polynomial vanishing on x-coordinates of `E[l] - O`.
pub fn division_poly(curve: &Curve, ell: u64) -> Result<Poly> {
    check_ell(curve, ell)?;
    if ell == 2 {
        return Ok(cubic(curve.model()));
    }
    Ok(division_polys(curve.model(), ell as usize).pop().unwrap())
}

/// A k-rational kernel of an l-isogeny: its monic kernel polynomial and
/// whether the kernel is generated by a k-rational point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub poly: Poly,
    pub rational_point: bool,
}

/// `x(iP)` for `i = 1..=count` from `x(P)`, via division polynomials.
fn multiple_xs(g: &[Poly], f: &Poly, ext: &Field, lift: impl Fn(&Fe) -> Fe, x0: &Fe, count: usize) -> Vec<Fe> {
    let ev = |p: &Poly| p.eval_with(ext, &lift, x0);
    let fx = ev(f);
    let mut out = vec![x0.clone()];
    for i in 2..=count {
        let (gm, gi, gp) = (ev(&g[i - 1]), ev(&g[i]), ev(&g[i + 1]));
        let num = ext.mul(&gm, &gp);
        let gi2 = ext.square(&gi);
        let frac = if i % 2 == 0 {
            ext.div(&num, &ext.mul(&fx, &gi2))
        } else {
            ext.div(&ext.mul(&fx, &num), &gi2)
        }
        .expect("x0 is not a root of a lower division polynomial");
        out.push(ext.sub(x0, &frac));
    }
    out
}

/// Every k-rational cyclic subgroup of order l, as kernel polynomials in a
/// deterministic order (by polynomial encoding).
pub fn rational_kernels(curve: &Curve, ell: u64) -> Result<Vec<Kernel>> {
    check_ell(curve, ell)?;
    let k = curve.field();
    let f = cubic(curve.model());
    if ell == 2 {
        return Ok(f
            .roots()?
            .iter()
            .map(|r| Kernel { poly: Poly::linear(k, r), rational_point: true })
            .collect());
    }
    let half = ((ell - 1) / 2) as usize;
    let g = division_polys(curve.model(), ell as usize + 1);
    let psi = &g[ell as usize];
    let factors: Vec<Poly> = psi.factor()?.factors.into_iter().map(|(h, _)| h).collect();
    let mut used = vec![false; factors.len()];
    let mut out = Vec::new();
    for i in 0..factors.len() {
        let d = factors[i].deg();
        if used[i] || half % d != 0 {
            continue;
        }
        let ext = Field::new_unbounded(k.characteristic(), k.degree() * d)?;
        let emb = embed(k, &ext)?;
        let h_ext = emb.apply_poly(&factors[i]);
        let x0 = h_ext.roots()?.into_iter().next().ok_or_else(|| {
            Error::InvariantViolation("irreducible factor has no root in its splitting field".into())
        })?;
        let xs = multiple_xs(&g, &f, &ext, |c| emb.apply(c), &x0, half);
        let members: Vec<usize> = (0..factors.len())
            .filter(|&j| {
                let hj = emb.apply_poly(&factors[j]);
                xs.iter().any(|x| ext.is_zero(&hj.eval(x)))
            })
            .collect();
        let total: usize = members.iter().map(|&j| factors[j].deg()).sum();
        if total != half || members.iter().any(|&j| used[j]) {
            continue;
        }
        let mut poly = Poly::one(k);
        for &j in &members {
            used[j] = true;
            poly = poly.mul(&factors[j]);
        }
        let rational_point = d == 1 && k.is_square(&f.eval(&emb.preimage(&x0).unwrap()));
        out.push(Kernel { poly, rational_point });
    }
    out.sort_by(|a, b| a.poly.sort_key().cmp(&b.poly.sort_key()));
    Ok(out)
}
