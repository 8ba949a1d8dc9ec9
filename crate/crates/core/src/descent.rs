//! Tate-Shafarevich and Selmer invariants of constant curves `E/k(F)`:
//! Sha structure from heights, the Galois-hom oracle, sigma triples,
//! Selmer shapes, the BSD identity and the non-isogenous and p-isogeny
//! formulas.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith;
use crate::ec::{canonical_model, frobenius_matrix, group_structure, Curve, CurveKey, FrobMatrix};
use crate::error::{Error, Result};
use crate::isog::{Isogeny, IsogenyPath, MAX_ELL};
use crate::orders::{order_tower, shared_order, trace_regulator, HeightMap, OrderTower};
use crate::volcano::{component_of, VolcanoGraph};

/// Source of `h_l(E)`.
pub type HeightFn<'a> = dyn Fn(&Curve, u64) -> Result<u32> + 'a;
/// Source of Frobenius matrices on `E[n]`.
pub type FrobFn<'a> = dyn Fn(&Curve, u64) -> Result<FrobMatrix> + 'a;

/// Heights from the l-volcano of each curve.
pub fn graph_height(curve: &Curve, ell: u64) -> Result<u32> {
    crate::volcano::height(curve, ell)
}

/// Key of the canonical model isomorphic to `curve`.
pub fn canonical_key(curve: &Curve) -> CurveKey {
    let (m, _) = canonical_model(curve.model());
    let k = curve.field();
    (k.index(m.a()), k.index(m.b()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveInfo {
    pub p: u64,
    pub n: usize,
    pub a: u64,
    pub b: u64,
    pub order: u64,
    pub trace: i64,
    pub j: u64,
}

impl From<&Curve> for CurveInfo {
    fn from(c: &Curve) -> Self {
        let k = c.field();
        CurveInfo {
            p: k.characteristic(),
            n: k.degree(),
            a: k.index(c.a()) as u64,
            b: k.index(c.b()) as u64,
            order: c.order(),
            trace: c.trace(),
            j: k.index(c.j_invariant()) as u64,
        }
    }
}

fn same_field(e: &Curve, f: &Curve) -> Result<()> {
    if e.field() != f.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

fn isogenous_pair(e: &Curve, f: &Curve) -> Result<OrderTower> {
    same_field(e, f)?;
    e.require_ordinary()?;
    f.require_ordinary()?;
    if e.trace() != f.trace() {
        return Err(Error::NotIsogenous);
    }
    order_tower(e.q(), e.trace())
}

/// `l -> h_l` for every `l | f`.
pub fn height_map(curve: &Curve, tower: &OrderTower, heights: &HeightFn) -> Result<HeightMap> {
    tower.f_factors.iter().map(|&(l, _)| Ok((l, heights(curve, l)?))).collect()
}

// Galois-hom oracle

/// Diagonal of the Smith normal form of an integer matrix.
pub fn smith_diagonal(mut a: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the trailing block.
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs());
            let Some((pi, pj)) = pivot else {
                diag.extend(std::iter::repeat_n(0, rows.min(cols) - t));
                return diag;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let pv = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t] / pv;
                for j in t..cols {
                    a[i][j] -= q * a[t][j];
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = a[t][j] / pv;
                for i in t..rows {
                    a[i][j] -= q * a[i][t];
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility of the remaining block by the pivot.
            let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % pv != 0);
            match bad {
                Some((i, _)) => {
                    for j in t..cols {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

/// Matrix of `X -> M_E X - X M_F` on `X = [[x0, x1], [x2, x3]]`.
fn commutator_map(me: &FrobMatrix, mf: &FrobMatrix) -> Vec<Vec<i128>> {
    let (e, f) = (me.m.map(|r| r.map(|x| x as i128)), mf.m.map(|r| r.map(|x| x as i128)));
    let mut a = vec![vec![0i128; 4]; 4];
    for col in 0..4 {
        let mut x = [[0i128; 2]; 2];
        x[col / 2][col % 2] = 1;
        for i in 0..2 {
            for j in 0..2 {
                let ex: i128 = (0..2).map(|s| e[i][s] * x[s][j]).sum();
                let xf: i128 = (0..2).map(|s| x[i][s] * f[s][j]).sum();
                a[i * 2 + j][col] = ex - xf;
            }
        }
    }
    a
}

/// `#{X in M_2(Z/n) : M_E X = X M_F}` via Smith normal form.
pub fn hom_count_snf(me: &FrobMatrix, mf: &FrobMatrix) -> u64 {
    let n = me.n;
    smith_diagonal(commutator_map(me, mf))
        .into_iter()
        .map(|d| if d == 0 { n } else { arith::gcd(d as u64, n) })
        .product()
}

/// The same count by enumerating all `n^4` matrices.
pub fn hom_count_enumerate(me: &FrobMatrix, mf: &FrobMatrix) -> u64 {
    let n = me.n;
    let (e, f) = (me.m, mf.m);
    let mut count = 0;
    for idx in 0..n.pow(4) {
        let x = [[idx % n, idx / n % n], [idx / n.pow(2) % n, idx / n.pow(3)]];
        let ok = (0..2).all(|i| {
            (0..2).all(|j| {
                let ex: u64 = (0..2).map(|s| e[i][s] * x[s][j]).sum();
                let xf: u64 = (0..2).map(|s| x[i][s] * f[s][j]).sum();
                ex % n == xf % n
            })
        });
        count += u64::from(ok);
    }
    count
}

/// Largest `n` for which the hom count is also enumerated as a self-check.
pub const ENUMERATE_LIMIT: u64 = 16;

/// `#Hom_{G_k}(F[n], E[n])` from Frobenius matrices.
pub fn hom_count(me: &FrobMatrix, mf: &FrobMatrix) -> Result<u64> {
    if me.n != mf.n {
        return Err(Error::InvalidInput("Frobenius matrices on different torsion levels".into()));
    }
    let snf = hom_count_snf(me, mf);
    if me.n <= ENUMERATE_LIMIT {
        let direct = hom_count_enumerate(me, mf);
        if direct != snf {
            return Err(Error::InvariantViolation(format!("hom count: Smith form {snf}, enumeration {direct}")));
        }
    }
    Ok(snf)
}

fn check_oracle_inputs(e: &Curve, f: &Curve, n: u64) -> Result<()> {
    same_field(e, f)?;
    if n % e.p() == 0 {
        return Err(Error::CharDividesN { n, p: e.p() });
    }
    arith::prime_power(n).ok_or(Error::NotPrimePower(n))?;
    isogenous_pair(e, f)?;
    Ok(())
}

pub fn galois_hom_count(e: &Curve, f: &Curve, n: u64) -> Result<u64> {
    galois_hom_count_with(e, f, n, &frobenius_matrix)
}

pub fn galois_hom_count_with(e: &Curve, f: &Curve, n: u64, frob: &FrobFn) -> Result<u64> {
    check_oracle_inputs(e, f, n)?;
    hom_count(&frob(e, n)?, &frob(f, n)?)
}

/// `#Sha(E/k(F))[n] = #Hom_{G_k}(F[n], E[n]) / n^2`.
pub fn sha_n_via_oracle(e: &Curve, f: &Curve, n: u64) -> Result<u64> {
    sha_n_via_oracle_with(e, f, n, &frobenius_matrix)
}

pub fn sha_n_via_oracle_with(e: &Curve, f: &Curve, n: u64, frob: &FrobFn) -> Result<u64> {
    let count = galois_hom_count_with(e, f, n, frob)?;
    if count % (n * n) != 0 {
        return Err(Error::InvariantViolation(format!("hom count {count} not divisible by n^2 = {}", n * n)));
    }
    Ok(count / (n * n))
}

// Sha structure and BSD

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCheck {
    pub n: u64,
    pub hom_count: u64,
    pub sha_n: u64,
    pub expected: u64,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum BsdCase {
    Same,
    Downward { ell: u64, steps: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BsdReport {
    #[serde(flatten)]
    pub case: BsdCase,
    pub sha_order: u64,
    pub regulator: u128,
    pub lhs: u128,
    pub rhs: u128,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Crosschecks {
    pub hom_oracle: BTreeMap<u64, OracleCheck>,
    pub bsd: Option<BsdReport>,
}

impl Crosschecks {
    pub fn passed(&self) -> bool {
        self.hom_oracle.values().all(|c| c.passed) && self.bsd.as_ref().is_none_or(|b| b.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShaReport {
    pub e: CurveInfo,
    pub f: CurveInfo,
    pub n_o: u64,
    pub structure: [u64; 2],
    pub order: u64,
    /// `l -> v_l(#Sha) = 2 min(h_l(E), h_l(F))`.
    pub per_ell: BTreeMap<u64, u32>,
    pub crosschecks: Crosschecks,
}

/// `Sha(E/k(F)) = (O/Z[pi])^2` with `O = End(E) ∩ End(F)`, from heights
/// only.
pub fn sha_from_heights(e: &Curve, f: &Curve, heights: &HeightFn) -> Result<ShaReport> {
    let tower = isogenous_pair(e, f)?;
    let (he, hf) = (height_map(e, &tower, heights)?, height_map(f, &tower, heights)?);
    let so = shared_order(&tower, &tower, &he, &hf)?;
    Ok(ShaReport {
        e: e.into(),
        f: f.into(),
        n_o: so.n_o,
        structure: [so.n_o, so.n_o],
        order: so.n_o * so.n_o,
        per_ell: so.per_ell.iter().map(|(&l, &h)| (l, 2 * h)).collect(),
        crosschecks: Crosschecks::default(),
    })
}

/// Sha structure with the hom oracle at `n = l^{v_l(f)+1}` for every
/// `l | f`, and the BSD identity when `F = E` or `E` lies below `F`.
pub fn sha_structure(e: &Curve, f: &Curve) -> Result<ShaReport> {
    let mut report = sha_from_heights(e, f, &graph_height)?;
    let tower = order_tower(e.q(), e.trace())?;
    for &(l, v) in &tower.f_factors {
        let n = l.pow(v + 1);
        report.crosschecks.hom_oracle.insert(l, oracle_check(e, f, n, report.n_o, &frobenius_matrix)?);
    }
    report.crosschecks.bsd = find_bsd_path(e, f)?
        .map(|path| bsd_identity_check(e, f, path.as_ref(), &graph_height))
        .transpose()?;
    Ok(report)
}

pub fn oracle_check(e: &Curve, f: &Curve, n: u64, n_o: u64, frob: &FrobFn) -> Result<OracleCheck> {
    let hom = galois_hom_count_with(e, f, n, frob)?;
    let sha_n = hom / (n * n);
    let g = arith::gcd(n, n_o);
    let expected = g * g;
    Ok(OracleCheck { n, hom_count: hom, sha_n, expected, passed: hom % (n * n) == 0 && sha_n == expected })
}

/// `Some(None)` when `E ≅ F`, `Some(Some(path))` for a downward path from
/// `F` to `E`, `None` when neither applies.
fn find_bsd_path(e: &Curve, f: &Curve) -> Result<Option<Option<IsogenyPath>>> {
    if canonical_key(e) == canonical_key(f) {
        return Ok(Some(None));
    }
    let tower = order_tower(e.q(), e.trace())?;
    for &(l, _) in &tower.f_factors {
        if l > MAX_ELL || l == e.p() {
            continue;
        }
        let g = component_of(f, l)?;
        if let Some(path) = downward_path(&g, &canonical_key(f), &canonical_key(e)) {
            return Ok(Some(Some(path)));
        }
    }
    Ok(None)
}

/// A purely downward path between two vertices of a component.
pub fn downward_path(g: &VolcanoGraph, from: &CurveKey, to: &CurveKey) -> Option<IsogenyPath> {
    let (s, t) = (g.vertex_index(from)?, g.vertex_index(to)?);
    let mut steps = Vec::new();
    let mut v = t;
    // Walk upward from the target; the upward edge is unique below the crater.
    while g.height(v) < g.height(s) {
        let up = g.edges().iter().find(|e| e.from == v && g.height(e.to) == g.height(v) + 1)?;
        let down = g.edges().iter().find(|e| e.from == up.to && e.to == v)?;
        steps.push(down.isogeny.clone());
        v = up.to;
    }
    if v != s || steps.is_empty() {
        return None;
    }
    steps.reverse();
    IsogenyPath::new(steps).ok()
}

/// All downward paths of length `1..=max_len` starting at `from`.
pub fn downward_paths(g: &VolcanoGraph, from: usize, max_len: u32) -> Vec<IsogenyPath> {
    let mut out = Vec::new();
    let mut frontier: Vec<(usize, Vec<Isogeny>)> = vec![(from, Vec::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (v, path) in frontier {
            for e in g.edges().iter().filter(|e| e.from == v && g.height(e.to) + 1 == g.height(v)) {
                let mut p = path.clone();
                p.push(e.isogeny.clone());
                out.push(IsogenyPath::new(p.clone()).expect("edges chain"));
                next.push((e.to, p));
            }
        }
        frontier = next;
    }
    out
}

/// Checks `#Sha(E/k(F)) R = 4q - t^2` exactly. With no path `E` must be
/// isomorphic to `F` and `R = R(g_F)`; with a downward path `F -> E` of
/// degree `l^s`, `R = l^{2s} R(g_F)`.
pub fn bsd_identity_check(e: &Curve, f: &Curve, path: Option<&IsogenyPath>, heights: &HeightFn) -> Result<BsdReport> {
    let tower = isogenous_pair(e, f)?;
    let case = match path {
        None => {
            if canonical_key(e) != canonical_key(f) {
                return Err(Error::UnsupportedConfiguration("E and F are not isomorphic and no path was given".into()));
            }
            BsdCase::Same
        }
        Some(path) => {
            let steps = path.steps();
            let ok = !steps.is_empty()
                && path.is_downward()
                && canonical_key(steps[0].domain()) == canonical_key(f)
                && steps.last().unwrap().codomain().key() == canonical_key(e);
            if !ok {
                return Err(Error::UnsupportedConfiguration("path is not a downward path from F to E".into()));
            }
            BsdCase::Downward { ell: steps[0].ell(), steps: steps.len() as u32 }
        }
    };
    let (he, hf) = (height_map(e, &tower, heights)?, height_map(f, &tower, heights)?);
    let so = shared_order(&tower, &tower, &he, &hf)?;
    let g_f = tower.end_conductor(&hf)?;
    let scale: u128 = match case {
        BsdCase::Same => 1,
        BsdCase::Downward { ell, steps } => (ell as u128).pow(2 * steps),
    };
    let regulator = scale * trace_regulator(g_f, tower.d_l);
    let sha_order = so.n_o * so.n_o;
    let lhs = sha_order as u128 * regulator;
    let rhs = (4 * e.q() as i128 - (e.trace() as i128).pow(2)) as u128;
    Ok(BsdReport { case, sha_order, regulator, lhs, rhs, passed: lhs == rhs })
}

/// `v_l(#Sha(E_i/k(E_0)))` along a downward path `E_0 -> ... -> E_s`.
pub fn downward_sha_profile(path: &IsogenyPath, heights: &HeightFn) -> Result<Vec<u32>> {
    let Some(first) = path.steps().first() else { return Ok(Vec::new()) };
    let ell = first.ell();
    let top = first.domain();
    let h0 = heights(top, ell)?;
    let mut out = vec![2 * h0];
    for s in path.steps() {
        out.push(2 * heights(s.codomain(), ell)?.min(h0));
    }
    Ok(out)
}

// Sigma triples and Selmer shapes

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaCase {
    /// `h(E1) < h(E) <= h(F)`.
    Clause1,
    /// `h(F) = 0`.
    Clause2,
    /// `h(E) < h(E1) <= h(F)`.
    Clause3,
    /// Everything else with a rational kernel generator.
    Clause4,
    /// Kernel not generated by a k-rational point.
    RemarkNonrational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelmerTriple {
    pub sigma: [u32; 3],
    pub case: SigmaCase,
    /// `(h(E), h(E1), h(F))`.
    pub heights: [u32; 3],
}

pub const LEGAL_SIGMAS: [[u32; 3]; 5] = [[1, 3, 2], [2, 2, 0], [3, 3, 0], [2, 3, 1], [1, 1, 0]];

/// Sigma triple from the kernel rationality flag and the heights of
/// `E`, `E1` and `F`.
pub fn classify_sigma(rational: bool, he: u32, h1: u32, hf: u32) -> Result<SelmerTriple> {
    if he.abs_diff(h1) > 1 {
        return Err(Error::InconsistentHeights { from: he, to: h1 });
    }
    let (sigma, case) = if !rational {
        ([1, 1, 0], SigmaCase::RemarkNonrational)
    } else if h1 < he && he <= hf {
        ([1, 3, 2], SigmaCase::Clause1)
    } else if hf == 0 {
        ([2, 2, 0], SigmaCase::Clause2)
    } else if he < h1 && h1 <= hf {
        ([3, 3, 0], SigmaCase::Clause3)
    } else {
        ([2, 3, 1], SigmaCase::Clause4)
    };
    Ok(SelmerTriple { sigma, case, heights: [he, h1, hf] })
}

/// Sigma triple for `phi: E -> E1` and `F` in the l-component `g` of `E`.
pub fn selmer_triple_in(g: &VolcanoGraph, phi: &Isogeny, f: &Curve) -> Result<SelmerTriple> {
    if !arith::is_prime(phi.ell()) {
        return Err(Error::NonPrimeDegree(phi.ell()));
    }
    let h = |key: &CurveKey| g.height_of(key).ok_or(Error::DifferentComponent);
    let he = h(&canonical_key(phi.domain()))?;
    let h1 = h(&phi.codomain().key())?;
    let hf = h(&canonical_key(f))?;
    classify_sigma(phi.rational_kernel_point(), he, h1, hf)
}

pub fn selmer_triple(phi: &Isogeny, f: &Curve) -> Result<SelmerTriple> {
    phi.domain().require_ordinary()?;
    same_field(phi.domain(), f)?;
    let g = component_of(phi.domain(), phi.ell())?;
    selmer_triple_in(&g, phi, f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelmerForm {
    /// `Sel^phi` for an isogeny whose kernel is generated by a rational point.
    Isogeny,
    /// `Sel^n` when `E[n] ⊆ E(k)`.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelmerShape {
    pub n: u64,
    pub form: SelmerForm,
    /// Cyclic orders of the `k^x / k^{xn}` copies.
    pub left: Vec<u64>,
    /// Cyclic orders of the `F[n](k)` copies.
    pub right: Vec<u64>,
    /// Invariant factors of the whole group, trivial factors dropped.
    pub invariants: Vec<u64>,
    pub order: u64,
    /// Rank over `Z/l` when `n = l` is prime.
    pub rank: Option<u32>,
}

/// Invariant factors of a direct sum of cyclic groups.
fn invariant_factors(cyclic: &[u64]) -> Vec<u64> {
    let mut by_prime: BTreeMap<u128, Vec<u32>> = BTreeMap::new();
    for &c in cyclic {
        for (l, e) in arith::factor(c as u128) {
            by_prime.entry(l).or_default().push(e);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for (l, mut es) in by_prime {
        es.sort_unstable_by(|a, b| b.cmp(a));
        for (i, e) in es.into_iter().enumerate() {
            out[len - 1 - i] *= (l as u64).pow(e);
        }
    }
    out
}

/// Shape of `Sel^phi(E/K)` (`phi` of degree `n` with rational kernel
/// generator) or of `Sel^n(E/K)` (when `E[n] ⊆ E(k)`), `K = k(F)`.
pub fn selmer_shape(n: u64, e: &Curve, f: &Curve, form: SelmerForm, phi: Option<&Isogeny>) -> Result<SelmerShape> {
    selmer_shape_with(n, e, f, form, phi, &group_structure)
}

/// [`selmer_shape`] with a caller-supplied group-structure source.
pub fn selmer_shape_with(
    n: u64,
    e: &Curve,
    f: &Curve,
    form: SelmerForm,
    phi: Option<&Isogeny>,
    structure: &dyn Fn(&Curve) -> Result<(u64, u64)>,
) -> Result<SelmerShape> {
    same_field(e, f)?;
    let q = e.q();
    let (e1, _) = structure(e)?;
    match form {
        SelmerForm::Isogeny => {
            let phi = phi.ok_or_else(|| Error::HypothesisNotMet("an isogeny is required for the single form".into()))?;
            if phi.degree() != n || !phi.rational_kernel_point() || canonical_key(phi.domain()) != canonical_key(e) {
                return Err(Error::HypothesisNotMet(format!(
                    "kernel of the degree-{} isogeny is not generated by a k-rational point of order {n} on E",
                    phi.degree()
                )));
            }
        }
        SelmerForm::Full => {
            if e1 % n != 0 {
                return Err(Error::HypothesisNotMet(format!("E[{n}] is not contained in E(k)")));
            }
        }
    }
    let copies = if form == SelmerForm::Full { 2 } else { 1 };
    let (f1, f2) = structure(f)?;
    let g = arith::gcd(n, q - 1);
    let left = vec![g; copies];
    let fn_k = [arith::gcd(n, f1), arith::gcd(n, f2)];
    let right: Vec<u64> = (0..copies).flat_map(|_| fn_k).collect();
    let all: Vec<u64> = left.iter().chain(&right).copied().collect();
    let invariants: Vec<u64> = invariant_factors(&all).into_iter().filter(|&c| c > 1).collect();
    let order = all.iter().product();
    let rank = arith::is_prime(n).then(|| all.iter().filter(|&&c| c % n == 0).count() as u32);
    Ok(SelmerShape { n, form, left, right, invariants, order, rank })
}

/// `rank_l F[l](k)`.
pub fn rational_torsion_rank(f: &Curve, ell: u64) -> Result<u32> {
    let (f1, f2) = group_structure(f)?;
    Ok(u32::from(f1 % ell == 0) + u32::from(f2 % ell == 0))
}

/// Largest `m` with `E[l^m] ⊆ E(k)`.
pub fn full_torsion_level(e: &Curve, ell: u64) -> Result<u32> {
    let (n1, _) = group_structure(e)?;
    Ok(arith::valuation(n1 as i128, ell as i128))
}

// Non-isogenous pairs and l = p

pub fn non_isogenous_sha(e: &Curve, f: &Curve) -> Result<u64> {
    same_field(e, f)?;
    if e.trace() == f.trace() {
        return Err(Error::IsogenousPair);
    }
    let d = e.order().abs_diff(f.order());
    Ok(d * d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PIsogenyDims {
    /// `(dim Sel, dim quotient)` for Frobenius descent.
    pub frobenius: [u32; 2],
    /// `(dim Sel, dim quotient)` for Verschiebung descent.
    pub verschiebung: [u32; 2],
    pub sha_p_dim: u32,
    pub p_torsion_rational: bool,
}

pub fn p_isogeny_dims(e: &Curve) -> Result<PIsogenyDims> {
    e.require_ordinary()?;
    let rational = e.order() % e.p() == 0;
    let v = if rational { 2 } else { 1 };
    Ok(PIsogenyDims { frobenius: [1, 1], verschiebung: [v, v], sha_p_dim: 0, p_torsion_rational: rational })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::enumerate_classes;
    use crate::gf::Field;
    use crate::isog::rational_kernels;
    use crate::volcano::build_graph;
    use proptest::prelude::*;

    fn x3_plus_x() -> Curve {
        Curve::from_u64(&Field::new(5, 1).unwrap(), 1, 0).unwrap()
    }

    #[test]
    fn hom_count_of_identity_mod_2() {
        let e = x3_plus_x();
        assert_eq!(galois_hom_count(&e, &e, 2).unwrap(), 16);
        assert_eq!(sha_n_via_oracle(&e, &e, 2).unwrap(), 4);
        assert_eq!(sha_n_via_oracle(&e, &e, 4).unwrap(), 4);
        assert_eq!(galois_hom_count(&e, &e, 5).unwrap_err(), Error::CharDividesN { n: 5, p: 5 });
    }

    #[test]
    fn sha_of_x3_plus_x() {
        let e = x3_plus_x();
        let r = sha_structure(&e, &e).unwrap();
        assert_eq!((r.structure, r.order), ([2, 2], 4));
        assert!(r.crosschecks.passed());
        let bsd = r.crosschecks.bsd.unwrap();
        assert_eq!((bsd.sha_order, bsd.regulator, bsd.lhs, bsd.rhs), (4, 4, 16, 16));
        let k = e.field().clone();
        let ss = Curve::from_u64(&k, 2, 0).unwrap();
        if ss.trace() != e.trace() {
            assert_eq!(sha_structure(&e, &ss).unwrap_err(), Error::NotIsogenous);
        }
    }

    #[test]
    fn non_isogenous_example() {
        let k = Field::new(5, 1).unwrap();
        let e = x3_plus_x();
        let f = Curve::from_i64(&k, -1, 0).unwrap();
        assert_eq!((e.order(), f.order()), (4, 8));
        assert_eq!(non_isogenous_sha(&e, &f).unwrap(), 16);
        assert_eq!(non_isogenous_sha(&e, &e).unwrap_err(), Error::IsogenousPair);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(classify_sigma(true, 1, 0, 1).unwrap().sigma, [1, 3, 2]);
        assert_eq!(classify_sigma(true, 0, 1, 1).unwrap().sigma, [3, 3, 0]);
        assert_eq!(classify_sigma(true, 0, 0, 0).unwrap().sigma, [2, 2, 0]);
        assert_eq!(classify_sigma(true, 1, 1, 1).unwrap().sigma, [2, 3, 1]);
        assert_eq!(classify_sigma(false, 1, 0, 1).unwrap().sigma, [1, 1, 0]);
        assert_eq!(classify_sigma(true, 0, 2, 2).unwrap_err(), Error::InconsistentHeights { from: 0, to: 2 });
    }

    #[test]
    fn selmer_shape_full_form() {
        let e = x3_plus_x();
        let s = selmer_shape(2, &e, &e, SelmerForm::Full, None).unwrap();
        assert_eq!(s.rank, Some(6));
        assert_eq!(s.invariants, vec![2; 6]);
        let phi = crate::isog::velu(&e, &rational_kernels(&e, 2).unwrap()[0], 2).unwrap();
        let single = selmer_shape(2, &e, &e, SelmerForm::Isogeny, Some(&phi)).unwrap();
        assert_eq!(single.rank, Some(3));
        // E[3] is not rational on y^2 = x^3 + x over GF(5).
        assert!(matches!(selmer_shape(3, &e, &e, SelmerForm::Full, None), Err(Error::HypothesisNotMet(_))));
    }

    #[test]
    fn p_isogeny_examples() {
        let e = x3_plus_x();
        let d = p_isogeny_dims(&e).unwrap();
        assert_eq!((d.verschiebung, d.sha_p_dim), ([1, 1], 0));
        let k = Field::new(7, 1).unwrap();
        let with_p = (0..7u64)
            .flat_map(|a| (0..7u64).map(move |b| (a, b)))
            .filter_map(|(a, b)| Curve::from_u64(&k, a, b).ok())
            .find(|c| c.is_ordinary() && c.order() % 7 == 0)
            .unwrap();
        assert_eq!(p_isogeny_dims(&with_p).unwrap().verschiebung, [2, 2]);
    }

    #[test]
    fn bsd_below_and_annihilation() {
        let e = x3_plus_x();
        let g = component_of(&e, 2).unwrap();
        let top = g.vertex_index(&e.key()).unwrap();
        let paths = downward_paths(&g, top, 3);
        assert_eq!(paths.len(), 2);
        for p in &paths {
            let below = p.steps().last().unwrap().codomain().clone();
            let r = bsd_identity_check(&below, &e, Some(p), &graph_height).unwrap();
            assert!(r.passed);
            assert_eq!(r.sha_order, 1);
            assert_eq!(downward_sha_profile(p, &graph_height).unwrap(), vec![2, 0]);
        }
    }

    /// Oracle equality and the Milne identity on small fields.
    #[test]
    fn oracle_matches_heights_small_fields() {
        for p in [5u64, 7, 11, 13, 17] {
            let k = Field::new(p, 1).unwrap();
            let table = enumerate_classes(&k).unwrap();
            for t in table.ordinary_traces() {
                let class = table.class(t);
                let tower = order_tower(k.order().unwrap(), t).unwrap();
                for e in class {
                    for f in class {
                        let sha = sha_from_heights(e, f, &graph_height).unwrap();
                        for n in [2u64, 3, 4] {
                            if n % p == 0 {
                                continue;
                            }
                            let c = oracle_check(e, f, n, sha.n_o, &frobenius_matrix).unwrap();
                            assert!(c.passed, "{e:?} {f:?} {c:?}");
                        }
                    }
                    let mine = sha_from_heights(e, e, &graph_height).unwrap();
                    let hm = height_map(e, &tower, &graph_height).unwrap();
                    let idx = tower.end_index(&hm).unwrap();
                    assert_eq!(mine.order, idx * idx);
                }
            }
        }
    }

    #[test]
    fn sigma_b_matches_graph_edges() {
        let k = Field::new(13, 1).unwrap();
        for t in enumerate_classes(&k).unwrap().ordinary_traces() {
            for g in build_graph(&k, t, 2).unwrap() {
                for edge in g.edges() {
                    for f in g.vertices() {
                        let s = selmer_triple_in(&g, &edge.isogeny, f).unwrap();
                        assert!(LEGAL_SIGMAS.contains(&s.sigma));
                        assert_eq!(s.sigma[0] + s.sigma[2], s.sigma[1]);
                    }
                }
            }
        }
    }

    fn frob(n: u64, m: [[u64; 2]; 2]) -> FrobMatrix {
        FrobMatrix { n, m }
    }

    proptest! {
        #[test]
        fn snf_count_matches_enumeration(
            n in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]),
            a in prop::array::uniform4(0u64..64),
            b in prop::array::uniform4(0u64..64),
        ) {
            let me = frob(n, [[a[0] % n, a[1] % n], [a[2] % n, a[3] % n]]);
            let mf = frob(n, [[b[0] % n, b[1] % n], [b[2] % n, b[3] % n]]);
            prop_assert_eq!(hom_count_snf(&me, &mf), hom_count_enumerate(&me, &mf));
        }

        #[test]
        fn smith_diagonal_divides(m in prop::collection::vec(prop::collection::vec(-20i128..20, 4), 4)) {
            let d = smith_diagonal(m.clone());
            for w in d.windows(2) {
                if w[1] != 0 {
                    prop_assert_eq!(w[1] % w[0].max(1), 0);
                }
                if w[0] == 0 {
                    prop_assert_eq!(w[1], 0);
                }
            }
            // Determinant up to sign equals the product of the diagonal.
            let det = det4(&m);
            prop_assert_eq!(det.abs(), d.iter().product::<i128>());
        }

        #[test]
        fn non_isogenous_is_square(p in prop::sample::select(vec![5u64, 7, 11, 13]), a1 in 0u64..13, b1 in 0u64..13, a2 in 0u64..13, b2 in 0u64..13) {
            let k = Field::new(p, 1).unwrap();
            let (Ok(e), Ok(f)) = (Curve::from_u64(&k, a1, b1), Curve::from_u64(&k, a2, b2)) else { return Ok(()) };
            match non_isogenous_sha(&e, &f) {
                Ok(v) => {
                    let r = arith::isqrt(v as u128) as u64;
                    prop_assert_eq!(r * r, v);
                }
                Err(err) => prop_assert_eq!(err, Error::IsogenousPair),
            }
        }
    }

    fn det4(m: &[Vec<i128>]) -> i128 {
        fn minor(m: &[Vec<i128>], col: usize) -> Vec<Vec<i128>> {
            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, &x)| x).collect()).collect()
        }
        fn det(m: &[Vec<i128>]) -> i128 {
            if m.len() == 1 {
                return m[0][0];
            }
            (0..m.len()).map(|j| if j % 2 == 0 { 1 } else { -1 } * m[0][j] * det(&minor(m, j))).sum()
        }
        det(m)
    }
}
