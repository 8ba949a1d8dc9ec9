//! Library results against brute-force computations that share no code
//! with the implementation beyond field arithmetic.

use volcano_sha::descent::sha_structure;
use volcano_sha::ec::{enumerate_classes, frobenius_matrix, group_structure, Curve};
use volcano_sha::gf::Field;
use volcano_sha::orders::{conductor_decomposition, order_tower};
use volcano_sha::volcano::height;

fn legendre(x: u64, p: u64) -> i64 {
    if x % p == 0 {
        return 0;
    }
    let mut r = 1u64;
    let (mut b, mut e) = (x % p, (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 { 1 } else { -1 }
}

#[test]
fn point_counts_match_character_sums() {
    for p in [5u64, 7, 11, 13, 17, 19, 23] {
        let k = Field::prime(p).unwrap();
        for a in 0..p {
            for b in 0..p {
                let Ok(e) = Curve::from_u64(&k, a, b) else { continue };
                let s: i64 = (0..p).map(|x| legendre((x * x % p * x + a * x + b) % p, p)).sum();
                assert_eq!(e.order() as i64, p as i64 + 1 + s, "p={p} a={a} b={b}");
            }
        }
    }
}

fn point_order(e: &Curve, pt: &volcano_sha::ec::Point, n: u64) -> u64 {
    (1..=n).find(|&m| n % m == 0 && e.model().mul(pt, m).is_infinity()).unwrap()
}

#[test]
fn group_structure_matches_point_orders() {
    for p in [5u64, 7, 11, 13, 17] {
        let k = Field::prime(p).unwrap();
        for a in 0..p {
            for b in 0..p {
                let Ok(e) = Curve::from_u64(&k, a, b) else { continue };
                let n = e.order();
                let pts = e.model().points();
                assert_eq!(pts.len() as u64, n);
                let exponent = pts.iter().map(|pt| point_order(&e, pt, n)).max().unwrap();
                assert_eq!(group_structure(&e).unwrap(), (n / exponent, exponent), "p={p} a={a} b={b}");
            }
        }
    }
}

#[test]
fn conductor_decomposition_matches_square_search() {
    for d in (-4000i128..0).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
        let best = (1..=64u64)
            .rev()
            .find(|&f| {
                let f2 = (f as i128).pow(2);
                d % f2 == 0 && matches!((d / f2).rem_euclid(4), 0 | 1)
            })
            .unwrap();
        assert_eq!(conductor_decomposition(d).unwrap(), (best, d / (best as i128).pow(2)), "d={d}");
    }
}

fn is_scalar(m: [[u64; 2]; 2]) -> bool {
    m[0][1] == 0 && m[1][0] == 0 && m[0][0] == m[1][1]
}

/// Height as the largest `j` for which Frobenius acts as a scalar on
/// `E[l^j]`.
fn scalar_height(e: &Curve, ell: u64, v: u32) -> u32 {
    (1..=v).take_while(|&j| is_scalar(frobenius_matrix(e, ell.pow(j)).unwrap().m)).count() as u32
}

#[test]
fn volcano_heights_match_frobenius_scalar_levels() {
    for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let k = Field::prime(p).unwrap();
        let table = enumerate_classes(&k).unwrap();
        for t in table.ordinary_traces() {
            let tower = order_tower(p, t).unwrap();
            for &(ell, v) in &tower.f_factors {
                if ell.pow(v) > 27 {
                    continue;
                }
                for e in table.class(t) {
                    assert_eq!(height(e, ell).unwrap(), scalar_height(e, ell, v), "p={p} t={t} l={ell} {e:?}");
                }
            }
        }
    }
}

#[test]
fn sha_of_a_curve_over_its_own_function_field_is_the_squared_index() {
    for p in [5u64, 7, 11, 13, 17, 19, 23] {
        let k = Field::prime(p).unwrap();
        let table = enumerate_classes(&k).unwrap();
        for t in table.ordinary_traces() {
            let tower = order_tower(p, t).unwrap();
            for e in table.class(t) {
                let index: u64 = tower
                    .f_factors
                    .iter()
                    .map(|&(ell, v)| ell.pow(scalar_height(e, ell, v)))
                    .product();
                let report = sha_structure(e, e).unwrap();
                assert_eq!(report.order, index * index, "p={p} t={t} {e:?}");
                assert_eq!(report.structure, [index, index]);
            }
        }
    }
}
