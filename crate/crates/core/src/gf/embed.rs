use super::{Fe, Field, Poly};
use crate::error::{Error, Result};

/// A ring embedding GF(p^m) -> GF(p^(mr)).
#[derive(Clone, Debug)]
pub struct Embedding {
    base: Field,
    ext: Field,
    /// Images of `1, g, g^2, ..., g^(m-1)` for the base generator `g`.
    powers: Vec<Fe>,
}

/// Embed `base` into `ext`, sending the base generator to the smallest root
/// of the base modulus in `ext`.
pub fn embed(base: &Field, ext: &Field) -> Result<Embedding> {
    let (p, m, n) = (base.characteristic(), base.degree(), ext.degree());
    if ext.characteristic() != p || n % m != 0 {
        return Err(Error::IncompatibleFields { p, from: m, to: n });
    }
    let mut powers = vec![ext.one()];
    if m > 1 {
        let modulus = Poly::from_u64s(ext, base.modulus());
        let g = modulus
            .roots()?
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvariantViolation("base modulus has no root in extension".into()))?;
        for _ in 1..m {
            let next = ext.mul(powers.last().unwrap(), &g);
            powers.push(next);
        }
    }
    Ok(Embedding { base: base.clone(), ext: ext.clone(), powers })
}

impl Embedding {
    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn ext(&self) -> &Field {
        &self.ext
    }

    pub fn apply(&self, x: &Fe) -> Fe {
        let k = &self.ext;
        x.coeffs()
            .iter()
            .zip(&self.powers)
            .fold(k.zero(), |acc, (&c, g)| if c == 0 { acc } else { k.add(&acc, &k.scale(g, c)) })
    }

    pub fn apply_poly(&self, f: &Poly) -> Poly {
        f.map_coeffs(&self.ext, |c| self.apply(c))
    }

    /// Inverse on the image; `None` when `y` is not in the embedded subfield.
    pub fn preimage(&self, y: &Fe) -> Option<Fe> {
        let m = self.base.degree();
        let n = self.ext.degree();
        // Solve sum c_i powers[i] = y over GF(p): Gaussian elimination on an
        // n x m system.
        let p = self.ext.characteristic();
        let mut rows: Vec<Vec<u64>> = (0..n)
            .map(|r| {
                let mut row: Vec<u64> = self.powers.iter().map(|g| g.coeffs()[r]).collect();
                row.push(y.coeffs()[r]);
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m {
            let Some(pr) = (r..n).find(|&i| rows[i][c] != 0) else { continue };
            rows.swap(r, pr);
            let inv = super::raw::inv_mod(rows[r][c], p);
            for v in rows[r].iter_mut() {
                *v = *v * inv % p;
            }
            for i in 0..n {
                if i != r && rows[i][c] != 0 {
                    let f = rows[i][c];
                    for j in 0..=m {
                        rows[i][j] = (rows[i][j] + p * p - f * rows[r][j]) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if rows[r..].iter().any(|row| row[m] != 0) {
            return None;
        }
        let mut out = vec![0u64; m];
        for (i, &c) in pivots.iter().enumerate() {
            out[c] = rows[i][m];
        }
        self.base.from_coeffs(&out).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prime_subfield_embeds_as_constants() {
        let k = Field::new(5, 1).unwrap();
        let e = Field::new(5, 2).unwrap();
        let emb = embed(&k, &e).unwrap();
        for c in 0..5 {
            assert_eq!(emb.apply(&k.from_u64(c)), e.from_u64(c));
        }
    }

    #[test]
    fn gf25_into_gf625_is_a_ring_map() {
        let k = Field::new(5, 2).unwrap();
        let e = Field::new(5, 4).unwrap();
        let emb = embed(&k, &e).unwrap();
        // Oracle: every root of the base modulus in GF(625) by exhaustive
        // search; the chosen image must be the smallest.
        let modulus = k.modulus();
        let roots: Vec<Fe> = e
            .elements()
            .filter(|z| {
                let v = modulus
                    .iter()
                    .rev()
                    .fold(e.zero(), |acc, &c| e.add(&e.mul(&acc, z), &e.from_u64(c)));
                e.is_zero(&v)
            })
            .collect();
        assert_eq!(roots.len(), 2);
        let smallest = roots.iter().min().unwrap();
        assert_eq!(&emb.apply(&k.generator()), smallest);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (a, b) = (k.random(&mut rng), k.random(&mut rng));
            assert_eq!(emb.apply(&k.add(&a, &b)), e.add(&emb.apply(&a), &emb.apply(&b)));
            assert_eq!(emb.apply(&k.mul(&a, &b)), e.mul(&emb.apply(&a), &emb.apply(&b)));
            assert_eq!(emb.preimage(&emb.apply(&a)), Some(a));
        }
    }

    #[test]
    fn incompatible_degrees() {
        let k = Field::new(5, 2).unwrap();
        let e = Field::new(5, 3).unwrap();
        assert_eq!(embed(&k, &e).unwrap_err(), Error::IncompatibleFields { p: 5, from: 2, to: 3 });
    }
}
