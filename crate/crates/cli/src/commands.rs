//! Single-query commands. Each returns a serializable document tagged
//! with its schema id; `main` decides the output format and exit code.

use serde::Serialize;
use serde_json::Value;

use volcano_sha::descent::{
    non_isogenous_sha, selmer_shape, selmer_triple_in, sha_structure, CurveInfo, SelmerForm, SelmerShape,
    SelmerTriple, ShaReport,
};
use volcano_sha::ec::{enumerate_classes, Curve};
use volcano_sha::gf::Field;
use volcano_sha::isog::{rational_kernels, velu};
use volcano_sha::orders::order_tower;
use volcano_sha::volcano::{build_graph, component_of, ComponentSummary, VolcanoGraph};
use volcano_sha::{Error, Result};

use crate::cache::Cache;

pub const CLASSES_SCHEMA: &str = "volcano-sha/classes/v1";
pub const VOLCANO_SCHEMA: &str = "volcano-sha/volcano/v1";
pub const SHA_SCHEMA: &str = "volcano-sha/sha/v1";
pub const SELMER_SCHEMA: &str = "volcano-sha/selmer/v1";

#[derive(Clone, Debug, Serialize)]
pub struct ClassEntry {
    pub t: i64,
    pub order: u64,
    pub f: u64,
    pub d_l: i64,
    pub size: usize,
    /// `(a, b)` encodings of the canonical model of each k-isomorphism class.
    pub curves: Vec<[u64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassesOutput {
    pub schema: &'static str,
    pub p: u64,
    pub n: usize,
    pub q: u64,
    pub num_curves: usize,
    pub supersingular_traces: Vec<i64>,
    pub classes: Vec<ClassEntry>,
}

fn ab(c: &Curve) -> [u64; 2] {
    let k = c.field();
    [k.index(c.a()) as u64, k.index(c.b()) as u64]
}

/// Ordinary isogeny classes over GF(p^n), or just the class of trace `t`.
pub fn classes(p: u64, n: usize, t: Option<i64>) -> Result<ClassesOutput> {
    let k = Field::new(p, n)?;
    let q = k.order().expect("bounded field");
    if let Some(t) = t {
        order_tower(q, t)?;
    }
    let table = enumerate_classes(&k)?;
    let mut classes = Vec::new();
    for tr in table.ordinary_traces() {
        if t.is_some_and(|t| t != tr) {
            continue;
        }
        let tower = order_tower(q, tr)?;
        let curves = table.class(tr);
        classes.push(ClassEntry {
            t: tr,
            order: (q as i64 + 1 - tr) as u64,
            f: tower.f,
            d_l: tower.d_l as i64,
            size: curves.len(),
            curves: curves.iter().map(ab).collect(),
        });
    }
    let ordinary: Vec<i64> = table.ordinary_traces();
    Ok(ClassesOutput {
        schema: CLASSES_SCHEMA,
        p,
        n,
        q,
        num_curves: table.num_classes(),
        supersingular_traces: table.traces().filter(|tr| !ordinary.contains(tr)).collect(),
        classes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VolcanoOutput {
    pub schema: &'static str,
    pub p: u64,
    pub n: usize,
    pub t: i64,
    pub ell: u64,
    pub components: Vec<ComponentSummary>,
    /// Every strict component passes every clause.
    pub passed: bool,
}

pub fn volcano_graphs(p: u64, n: usize, t: i64, ell: u64) -> Result<Vec<VolcanoGraph>> {
    let k = Field::new(p, n)?;
    build_graph(&k, t, ell)
}

pub fn volcano_document(p: u64, n: usize, t: i64, ell: u64, graphs: &[VolcanoGraph]) -> VolcanoOutput {
    let components: Vec<ComponentSummary> = graphs.iter().map(VolcanoGraph::summary).collect();
    let passed = components.iter().all(|c| !c.validation.strict || c.validation.passed());
    VolcanoOutput { schema: VOLCANO_SCHEMA, p, n, t, ell, components, passed }
}

/// JSON volcano document, through the cache when enabled.
pub fn volcano_json(p: u64, n: usize, t: i64, ell: u64, cache: &Cache) -> Result<Value> {
    let key = format!("volcano-p{p}-n{n}-t{t}-l{ell}");
    cache.get_or_insert_with(&key, || {
        let graphs = volcano_graphs(p, n, t, ell)?;
        Ok(serde_json::to_value(volcano_document(p, n, t, ell, &graphs)).expect("serializable"))
    })
}

/// Every component as one Graphviz digraph each.
pub fn volcano_dot(graphs: &[VolcanoGraph]) -> String {
    graphs.iter().map(VolcanoGraph::export_dot).collect()
}

/// Failed clauses of strict components, as `clause: detail` lines.
pub fn volcano_failures(doc: &Value) -> Vec<String> {
    let mut out = Vec::new();
    for c in doc["components"].as_array().into_iter().flatten() {
        if c["validation"]["strict"] != Value::Bool(true) {
            continue;
        }
        for cl in c["validation"]["clauses"].as_array().into_iter().flatten() {
            if cl["passed"] == Value::Bool(false) {
                out.push(format!("{}: {}", cl["clause"].as_str().unwrap_or("?"), cl["detail"].as_str().unwrap_or("")));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum ShaResult {
    Isogenous(ShaReport),
    NonIsogenous {
        e: CurveInfo,
        f: CurveInfo,
        /// `(#E(k) - #F(k))^2`.
        order: u64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct ShaOutput {
    pub schema: &'static str,
    #[serde(flatten)]
    pub result: ShaResult,
    pub passed: bool,
}

/// Isogeny test between curves over one field: equal traces.
pub fn routes_to_isogenous(e: &Curve, f: &Curve) -> bool {
    e.trace() == f.trace()
}

/// Sha(E/k(F)) from heights, with oracle and BSD cross-checks
/// for isogenous pairs, the order formula otherwise.
pub fn sha(e: &Curve, f: &Curve) -> Result<ShaOutput> {
    if e.field() != f.field() {
        return Err(Error::FieldMismatch);
    }
    e.require_ordinary()?;
    f.require_ordinary()?;
    let (result, passed) = if routes_to_isogenous(e, f) {
        let report = sha_structure(e, f)?;
        let passed = report.crosschecks.passed();
        (ShaResult::Isogenous(report), passed)
    } else {
        (ShaResult::NonIsogenous { e: e.into(), f: f.into(), order: non_isogenous_sha(e, f)? }, true)
    };
    Ok(ShaOutput { schema: SHA_SCHEMA, result, passed })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelInfo {
    pub index: usize,
    /// Coefficient encodings, constant term first.
    pub poly: Vec<u64>,
    pub rational_point: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelmerOutput {
    pub schema: &'static str,
    pub e: CurveInfo,
    pub e1: CurveInfo,
    pub f: CurveInfo,
    pub ell: u64,
    pub kernel: KernelInfo,
    pub triple: SelmerTriple,
    /// `Sel^phi(E/k(F))`; absent when the kernel has no rational generator.
    pub shape: Option<SelmerShape>,
}

/// Sigma triple and phi-Selmer shape for the `kernel`-th rational
/// l-kernel of `E` and `F` in the l-component of `E`.
pub fn selmer(e: &Curve, kernel: usize, ell: u64, f: &Curve) -> Result<SelmerOutput> {
    if e.field() != f.field() {
        return Err(Error::FieldMismatch);
    }
    e.require_ordinary()?;
    let kernels = rational_kernels(e, ell)?;
    let kr = kernels.get(kernel).ok_or_else(|| {
        Error::InvalidInput(format!("kernel index {kernel} out of range: E has {} rational {ell}-kernels", kernels.len()))
    })?;
    let phi = velu(e, kr, ell)?;
    let g = component_of(e, ell)?;
    let triple = selmer_triple_in(&g, &phi, f)?;
    let shape = if kr.rational_point { Some(selmer_shape(ell, e, f, SelmerForm::Isogeny, Some(&phi))?) } else { None };
    let k = e.field();
    Ok(SelmerOutput {
        schema: SELMER_SCHEMA,
        e: e.into(),
        e1: phi.codomain().into(),
        f: f.into(),
        ell,
        kernel: KernelInfo {
            index: kernel,
            poly: kr.poly.coeffs().iter().map(|c| k.index(c) as u64).collect(),
            rational_point: kr.rational_point,
        },
        triple,
        shape,
    })
}

/// Exit status for a library error: 1 for internal failures, 2 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvariantViolation(_) | Error::TorsionSearchFailed(_) => 1,
        _ => 2,
    }
}
