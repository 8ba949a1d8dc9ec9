use std::fmt;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Fe, Field};
use crate::error::{Error, Result};

/// A univariate polynomial over a [`Field`], coefficients lowest degree
/// first with trailing zeros stripped (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Fe>,
}

/// Monic irreducible factors with multiplicities, plus the leading unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Fe,
    pub factors: Vec<(Poly, usize)>,
}

impl Factorization {
    /// Multiply the factorization back out.
    pub fn product(&self, field: &Field) -> Poly {
        let mut acc = Poly::constant(field, self.unit.clone());
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(f);
            }
        }
        acc
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if self.field.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c:?}")?,
                1 => write!(f, "{c:?}*x")?,
                _ => write!(f, "{c:?}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(field: &Field, coeffs: Vec<Fe>) -> Poly {
        let mut p = Poly { field: field.clone(), coeffs };
        p.trim();
        p
    }

    /// Polynomial from prime-field coefficients, lowest degree first.
    pub fn from_u64s(field: &Field, coeffs: &[u64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&c| field.from_u64(c)).collect())
    }

    pub fn from_i64s(field: &Field, coeffs: &[i64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, field.one())
    }

    pub fn constant(field: &Field, c: Fe) -> Poly {
        Poly::new(field, vec![c])
    }

    pub fn x(field: &Field) -> Poly {
        Poly::new(field, vec![field.zero(), field.one()])
    }

    /// `x - r`.
    pub fn linear(field: &Field, r: &Fe) -> Poly {
        Poly::new(field, vec![field.neg(r), field.one()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&Fe> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| self.field.is_one(c))
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.field.is_one(&self.coeffs[0])
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let k = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(k, (0..n).map(|i| k.add(&self.coeff(i), &other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let k = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(k, (0..n).map(|i| k.sub(&self.coeff(i), &other.coeff(i))).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|c| self.field.neg(c)).collect())
    }

    pub fn scale(&self, c: &Fe) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|a| self.field.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let k = &self.field;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(k);
        }
        if k.is_prime_field() {
            let p = k.characteristic();
            let a: Vec<u64> = self.coeffs.iter().map(|c| c.0[0]).collect();
            let b: Vec<u64> = other.coeffs.iter().map(|c| c.0[0]).collect();
            return Poly::from_u64s(k, &super::raw::mul(&a, &b, p));
        }
        let mut out = vec![k.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = k.add(&out[i + j], &k.mul(a, b));
            }
        }
        Poly::new(k, out)
    }

    pub fn square(&self) -> Poly {
        self.mul(self)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let k = &self.field;
        let dd = d.degree().expect("division by the zero polynomial");
        if self.coeffs.len() <= dd {
            return (Poly::zero(k), self.clone());
        }
        let lead_inv = k.inv(d.leading().unwrap()).unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![k.zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = k.mul(&r[i], &lead_inv);
            if k.is_zero(&c) {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[i - dd + j] = k.sub(&r[i - dd + j], &k.mul(&c, dj));
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        (Poly::new(k, q), Poly::new(k, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(c) => self.scale(&self.field.inv(c).unwrap()),
        }
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn mulmod(&self, other: &Poly, m: &Poly) -> Poly {
        self.mul(other).rem(m)
    }

    pub fn powmod(&self, e: &BigUint, m: &Poly) -> Poly {
        let mut acc = Poly::one(&self.field).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, m);
            if e.bit(i) {
                acc = acc.mulmod(&base, m);
            }
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut acc = Poly::one(&self.field);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.square();
            }
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let k = &self.field;
        Poly::new(
            k,
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| k.scale(c, i as u64)).collect(),
        )
    }

    pub fn eval(&self, x: &Fe) -> Fe {
        let k = &self.field;
        self.coeffs.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, x), c))
    }

    /// Evaluate at a point of a field containing the coefficient field,
    /// with coefficients mapped by `lift`.
    pub fn eval_with(&self, ext: &Field, lift: impl Fn(&Fe) -> Fe, x: &Fe) -> Fe {
        self.coeffs.iter().rev().fold(ext.zero(), |acc, c| ext.add(&ext.mul(&acc, x), &lift(c)))
    }

    /// Composition `self(g(x))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let k = &self.field;
        self.coeffs.iter().rev().fold(Poly::zero(k), |acc, c| acc.mul(g).add(&Poly::constant(k, c.clone())))
    }

    /// Same coefficients viewed over another field, via `lift`.
    pub fn map_coeffs(&self, target: &Field, lift: impl Fn(&Fe) -> Fe) -> Poly {
        Poly::new(target, self.coeffs.iter().map(lift).collect())
    }

    /// Deterministic total order: degree first, then coefficients from the
    /// constant term upward.
    pub fn sort_key(&self) -> (usize, &[Fe]) {
        (self.coeffs.len(), &self.coeffs)
    }

    /// The distinct roots in the coefficient field, sorted.
    pub fn roots(&self) -> Result<Vec<Fe>> {
        if self.is_zero() {
            return Err(Error::ZeroPoly);
        }
        if self.deg() == 0 {
            return Ok(Vec::new());
        }
        let k = &self.field;
        let f = self.monic();
        let q = k.order_big();
        let xq = Poly::x(k).powmod(&q, &f);
        let g = xq.sub(&Poly::x(k)).gcd(&f);
        let mut rng = seeded_rng(&f);
        let mut out: Vec<Fe> = equal_degree_split(&g, 1, &mut rng)
            .into_iter()
            .map(|h| k.neg(&h.coeffs[0]))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Full factorization into monic irreducibles.
    pub fn factor(&self) -> Result<Factorization> {
        if self.is_zero() {
            return Err(Error::ZeroPoly);
        }
        let k = &self.field;
        let unit = self.leading().unwrap().clone();
        let f = self.monic();
        let mut rng = seeded_rng(&f);
        let mut factors = Vec::new();
        for (sq, mult) in squarefree_decomposition(&f) {
            for (g, d) in distinct_degree(&sq) {
                for h in equal_degree_split(&g, d, &mut rng) {
                    factors.push((h, mult));
                }
            }
        }
        factors.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()).then(a.1.cmp(&b.1)));
        debug_assert!(factors.iter().all(|(h, _)| h.field() == k));
        Ok(Factorization { unit, factors })
    }

    /// True iff the polynomial is irreducible over its field.
    pub fn is_irreducible(&self) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(1) => true,
            Some(_) => self
                .factor()
                .map(|f| f.factors.len() == 1 && f.factors[0].1 == 1)
                .unwrap_or(false),
        }
    }
}

fn input_hash(f: &Poly) -> u64 {
    let k = f.field();
    let words = std::iter::once(k.characteristic())
        .chain(k.modulus().iter().copied())
        .chain(f.coeffs().iter().flat_map(|c| c.coeffs().iter().copied()));
    crate::fnv::hash_words(words)
}

fn seeded_rng(f: &Poly) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(input_hash(f))
}

/// `(g, i)` pairs with `f = prod g_i^i`, each `g_i` squarefree and monic.
fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, usize)> {
    let k = f.field().clone();
    let p = k.characteristic() as usize;
    let mut out = Vec::new();
    let df = f.derivative();
    if df.is_zero() {
        // f = g(x^p) = h^p with h's coefficients the p-th roots of g's.
        let h = pth_root(f);
        for (g, e) in squarefree_decomposition(&h) {
            out.push((g, e * p));
        }
        return out;
    }
    let mut c = f.gcd(&df);
    let mut w = f.div_exact(&c).unwrap();
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y).unwrap();
        if z.deg() > 0 {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w).unwrap();
    }
    if c.deg() > 0 {
        let h = pth_root(&c);
        for (g, e) in squarefree_decomposition(&h) {
            out.push((g, e * p));
        }
    }
    out
}

/// For `f` whose exponents are all multiples of p, the `h` with `h^p = f`.
fn pth_root(f: &Poly) -> Poly {
    let k = f.field();
    let p = k.characteristic() as usize;
    let n = k.degree();
    let coeffs = f
        .coeffs()
        .iter()
        .step_by(p)
        .map(|c| k.frobenius_pow(c, n - 1))
        .collect();
    Poly::new(k, coeffs)
}

/// Split a squarefree monic `f` into products of irreducibles of equal degree.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let k = f.field();
    let q = k.order_big();
    let x = Poly::x(k);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.clone();
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(&q, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.deg() > 0 {
            rest = rest.div_exact(&g).unwrap();
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

/// Cantor-Zassenhaus splitting of a monic product of distinct irreducibles
/// of degree `d`. Output sorted by coefficients.
fn equal_degree_split(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let k = f.field();
    if f.deg() == 0 {
        return Vec::new();
    }
    let mut done = Vec::new();
    let mut todo = vec![f.clone()];
    // (q^d - 1) / 2
    let e: BigUint = (k.order_big().pow(d as u32) - 1u32) >> 1;
    while let Some(g) = todo.pop() {
        if g.deg() == d {
            done.push(g);
            continue;
        }
        loop {
            let a = Poly::new(k, (0..g.deg()).map(|_| k.random(rng)).collect());
            if a.deg() == 0 {
                continue;
            }
            let b = a.powmod(&e, &g).sub(&Poly::one(k));
            let h = b.gcd(&g);
            if h.deg() > 0 && h.deg() < g.deg() {
                let other = g.div_exact(&h).unwrap();
                todo.push(h);
                todo.push(other);
                break;
            }
        }
    }
    done.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    done
}
