//! l-isogeny graphs of ordinary isogeny classes: construction, levelling,
//! heights, validation of the volcano axioms and DOT export.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::arith;
use crate::ec::{canonical_model, enumerate_isogeny_class, Curve, CurveKey};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::isog::{rational_kernels, velu, Direction, Isogeny};
use crate::orders::order_tower;

#[derive(Clone, Debug)]
pub struct VolcanoEdge {
    pub from: usize,
    pub to: usize,
    /// Position of the kernel in `rational_kernels(from, l)`.
    pub kernel_index: usize,
    pub isogeny: Isogeny,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VolcanoFlags {
    pub contains_j0_1728: bool,
    pub degenerate_crater: bool,
}

/// One connected component of the l-isogeny graph of an isogeny class.
/// Vertices are canonical models sorted by `(j, a, b)`; edges are the
/// isogenies out of each vertex, one per rational kernel.
#[derive(Clone, Debug)]
pub struct VolcanoGraph {
    field: Field,
    t: i64,
    ell: u64,
    vertices: Vec<Curve>,
    index: HashMap<CurveKey, usize>,
    edges: Vec<VolcanoEdge>,
    heights: Vec<u32>,
    m: u32,
    v_f: u32,
    flags: VolcanoFlags,
}

/// Breadth-first closure of `start` under `rational_kernels` and `velu`.
fn explore(start: &Curve, ell: u64) -> Result<(Vec<Curve>, Vec<VolcanoEdge>)> {
    let mut vertices = vec![start.clone()];
    let mut index: HashMap<CurveKey, usize> = [(start.key(), 0)].into();
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let src = vertices[v].clone();
        for (ki, kernel) in rational_kernels(&src, ell)?.iter().enumerate() {
            let iso = velu(&src, kernel, ell)?;
            let key = iso.codomain().key();
            let to = *index.entry(key).or_insert_with(|| {
                vertices.push(iso.codomain().clone());
                queue.push_back(vertices.len() - 1);
                vertices.len() - 1
            });
            edges.push(VolcanoEdge { from: v, to, kernel_index: ki, isogeny: iso });
        }
    }
    // Relabel in (j, a, b) order.
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by_key(|&i| vertices[i].sort_key());
    let mut relabel = vec![0; vertices.len()];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    let vertices = order.iter().map(|&i| vertices[i].clone()).collect();
    for e in &mut edges {
        e.from = relabel[e.from];
        e.to = relabel[e.to];
    }
    edges.sort_by_key(|e| (e.from, e.kernel_index));
    Ok((vertices, edges))
}

fn check_inputs(field: &Field, t: i64, ell: u64) -> Result<()> {
    let p = field.characteristic();
    if t.rem_euclid(p as i64) == 0 {
        return Err(Error::SupersingularTrace { t, p });
    }
    if !arith::is_prime(ell) {
        return Err(Error::NonPrimeDegree(ell));
    }
    if ell == p {
        return Err(Error::CharEqualsL(ell));
    }
    if ell > crate::isog::MAX_ELL {
        return Err(Error::UnsupportedDegree(ell));
    }
    Ok(())
}

/// All components of the l-isogeny graph on the trace-`t` class, ordered
/// by their smallest vertex.
pub fn build_graph(field: &Field, t: i64, ell: u64) -> Result<Vec<VolcanoGraph>> {
    check_inputs(field, t, ell)?;
    let class = enumerate_isogeny_class(field, t)?;
    let mut seen: HashSet<CurveKey> = HashSet::new();
    let mut out = Vec::new();
    for c in &class {
        if seen.contains(&c.key()) {
            continue;
        }
        let g = VolcanoGraph::from_start(c, ell)?;
        for v in &g.vertices {
            seen.insert(v.key());
        }
        out.push(g);
    }
    if seen.len() != class.len() {
        return Err(Error::InvariantViolation(format!(
            "graph reached {} vertices but the class has {}",
            seen.len(),
            class.len()
        )));
    }
    out.sort_by_key(|g| g.vertices[0].sort_key());
    Ok(out)
}

/// The component containing `curve`.
pub fn component_of(curve: &Curve, ell: u64) -> Result<VolcanoGraph> {
    curve.require_ordinary()?;
    check_inputs(curve.field(), curve.trace(), ell)?;
    let (canon, _) = canonical_model(curve.model());
    let start = if &canon == curve.model() { curve.clone() } else { Curve::from_model(canon)? };
    VolcanoGraph::from_start(&start, ell)
}

/// `h_l(E)`: distance from `E` to the floor of its l-volcano.
pub fn height(curve: &Curve, ell: u64) -> Result<u32> {
    let g = component_of(curve, ell)?;
    let (canon, _) = canonical_model(curve.model());
    let key = (curve.field().index(canon.a()), curve.field().index(canon.b()));
    Ok(g.height_of(&key).expect("start vertex is in its component"))
}

/// Kronecker symbol `(d / l)` for a prime `l`.
pub fn kronecker(d: i128, l: u64) -> i32 {
    if l == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let r = d.rem_euclid(l as i128) as u64;
    if r == 0 {
        return 0;
    }
    if arith::pow_mod_u64(r, (l - 1) / 2, l) == 1 {
        1
    } else {
        -1
    }
}

impl VolcanoGraph {
    fn from_start(start: &Curve, ell: u64) -> Result<VolcanoGraph> {
        let (vertices, edges) = explore(start, ell)?;
        let tower = order_tower(start.q(), start.trace())?;
        let index = vertices.iter().enumerate().map(|(i, v)| (v.key(), i)).collect();
        let flags = VolcanoFlags { contains_j0_1728: vertices.iter().any(Curve::has_special_j), ..Default::default() };
        let mut g = VolcanoGraph {
            field: start.field().clone(),
            t: start.trace(),
            ell,
            vertices,
            index,
            edges,
            heights: Vec::new(),
            m: 0,
            v_f: tower.v_f(ell),
            flags,
        };
        g.level();
        Ok(g)
    }

    /// Floor = vertices whose out-degree is not l+1 (all vertices when no
    /// vertex has degree l+1); heights are BFS distances to the floor.
    fn level(&mut self) {
        let n = self.vertices.len();
        let full = self.ell as usize + 1;
        let deg = self.out_degrees();
        let mut floor: Vec<usize> = (0..n).filter(|&v| deg[v] != full).collect();
        if floor.is_empty() || floor.len() == n {
            floor = (0..n).collect();
        }
        let adj = self.undirected_adjacency();
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        for &v in &floor {
            dist[v] = 0;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        self.m = dist.iter().max().unwrap() + 1;
        self.heights = dist;
        let crater = self.crater();
        self.flags.degenerate_crater = crater.len() <= 2;
        let heights = self.heights.clone();
        for e in &mut self.edges {
            let d = match heights[e.to] as i64 - heights[e.from] as i64 {
                1 => Direction::Up,
                -1 => Direction::Down,
                0 => Direction::Horizontal,
                _ => Direction::Unclassified,
            };
            e.isogeny.set_direction(d);
        }
    }

    fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            deg[e.from] += 1;
        }
        deg
    }

    fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        adj
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn trace(&self) -> i64 {
        self.t
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn vertices(&self) -> &[Curve] {
        &self.vertices
    }

    pub fn edges(&self) -> &[VolcanoEdge] {
        &self.edges
    }

    pub fn flags(&self) -> VolcanoFlags {
        self.flags
    }

    /// Number of levels.
    pub fn height_param(&self) -> u32 {
        self.m
    }

    /// `v_l(f)` for the conductor `f` of `Z[pi]`.
    pub fn conductor_valuation(&self) -> u32 {
        self.v_f
    }

    pub fn is_strict(&self) -> bool {
        !self.flags.contains_j0_1728
    }

    pub fn vertex_index(&self, key: &CurveKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn contains(&self, key: &CurveKey) -> bool {
        self.index.contains_key(key)
    }

    /// 0-based height (floor = 0).
    pub fn height(&self, v: usize) -> u32 {
        self.heights[v]
    }

    /// 1-based level.
    pub fn level_of(&self, v: usize) -> u32 {
        self.heights[v] + 1
    }

    pub fn height_of(&self, key: &CurveKey) -> Option<u32> {
        self.vertex_index(key).map(|v| self.heights[v])
    }

    pub fn heights(&self) -> impl Iterator<Item = (CurveKey, u32)> + '_ {
        self.vertices.iter().zip(&self.heights).map(|(c, &h)| (c.key(), h))
    }

    /// Vertices of the top level, ascending.
    pub fn crater(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.heights[v] + 1 == self.m).collect()
    }

    /// Vertices by level, level 1 first.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.m as usize];
        for (v, &h) in self.heights.iter().enumerate() {
            out[h as usize].push(v);
        }
        out
    }

    fn edges_from(&self, v: usize) -> impl Iterator<Item = &VolcanoEdge> {
        self.edges.iter().filter(move |e| e.from == v)
    }

    /// Duplicate one edge at a vertex of maximal out-degree (a test hook for
    /// fault injection).
    pub fn inject_extra_edge(&mut self) {
        let deg = self.out_degrees();
        let v = (0..deg.len()).max_by_key(|&v| (deg[v], std::cmp::Reverse(v))).unwrap();
        let extra = match self.edges_from(v).next() {
            Some(e) => e.clone(),
            None => return,
        };
        self.edges.push(VolcanoEdge { kernel_index: deg[v], ..extra });
        self.edges.sort_by_key(|e| (e.from, e.kernel_index));
    }

    fn vertex_label(&self, v: usize) -> [u64; 2] {
        let (a, b) = self.vertices[v].key();
        [a as u64, b as u64]
    }

    /// Check the volcano axioms, the tree structure below the crater and
    /// `m - 1 = v_l(f)`.
    pub fn validate(&self) -> ValidationReport {
        let n = self.vertices.len();
        let top = self.m - 1;
        let ell = self.ell as usize;
        let h = &self.heights;
        let deg = self.out_degrees();
        let crater = self.crater();
        let in_crater = |v: usize| h[v] == top;
        let label = |v: usize| Some(self.vertex_label(v));
        let mut clauses = Vec::new();
        let mut clause = |name: &'static str, bad: Option<usize>, detail: String| {
            clauses.push(ClauseResult { clause: name, passed: bad.is_none(), counterexample: bad.and_then(label), detail });
        };

        let bad = self.edges.iter().find(|e| h[e.from].abs_diff(h[e.to]) > 1).map(|e| e.from);
        clause("levels", bad, "every edge joins equal or adjacent levels".into());

        // Horizontal multiplicities inside the crater.
        let mut horiz: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for e in &self.edges {
            if in_crater(e.from) && in_crater(e.to) {
                *horiz.entry((e.from, e.to)).or_default() += 1;
            }
        }
        let hdeg = |v: usize| horiz.iter().filter(|((a, _), _)| *a == v).map(|(_, c)| c).sum::<usize>();
        let (bad, detail) = match crater.len() {
            1 => {
                let v = crater[0];
                let ok = hdeg(v) <= 2;
                (if ok { None } else { Some(v) }, format!("degenerate crater: one vertex with {} self-loops", hdeg(v)))
            }
            2 => {
                let (u, v) = (crater[0], crater[1]);
                let (cu, cv) = (horiz.get(&(u, v)).copied().unwrap_or(0), horiz.get(&(v, u)).copied().unwrap_or(0));
                let loops = horiz.get(&(u, u)).is_some() || horiz.get(&(v, v)).is_some();
                let ok = cu == cv && (1..=2).contains(&cu) && !loops;
                (if ok { None } else { Some(u) }, format!("degenerate crater: two vertices joined by {cu} edges"))
            }
            len => {
                let bad = crater.iter().copied().find(|&v| {
                    let nbrs: Vec<usize> = horiz.iter().filter(|((a, _), _)| *a == v).flat_map(|((_, b), c)| std::iter::repeat_n(*b, *c)).collect();
                    nbrs.len() != 2 || nbrs[0] == nbrs[1] || nbrs.contains(&v)
                });
                let connected = bad.is_none() && {
                    let mut seen = vec![false; n];
                    let mut stack = vec![crater[0]];
                    seen[crater[0]] = true;
                    let mut count = 1;
                    while let Some(v) = stack.pop() {
                        for (&(a, b), _) in &horiz {
                            if a == v && !seen[b] {
                                seen[b] = true;
                                count += 1;
                                stack.push(b);
                            }
                        }
                    }
                    count == len
                };
                (bad.or(if connected { None } else { Some(crater[0]) }), format!("crater is a cycle of length {len}"))
            }
        };
        clause("crater_cycle", bad, detail);

        let (bad, detail) = if self.m > 1 {
            let bad = (0..n).find(|&v| if h[v] == 0 { deg[v] != 1 } else { deg[v] != ell + 1 });
            (bad, format!("level-1 vertices have degree 1, all others degree {}", ell + 1))
        } else {
            let bad = (0..n).find(|&v| deg[v] > 2);
            (bad, "single level: the floor clause applies only when m > 1; crater degree at most 2".into())
        };
        clause("degree", bad, detail);

        let up = |v: usize| self.edges_from(v).filter(|e| h[e.to] == h[v] + 1).count();
        let bad = (0..n).find(|&v| if h[v] < top { up(v) != 1 } else { up(v) != 0 });
        clause("one_upward", bad, "one upward edge below the crater, none on it".into());

        let bad = (0..n).filter(|&v| h[v] > 0).find(|&v| {
            let down = self.edges_from(v).filter(|e| h[e.to] + 1 == h[v]).count();
            let side = self.edges_from(v).filter(|e| h[e.to] == h[v]).count();
            if in_crater(v) {
                down + side != deg[v]
            } else {
                down + 1 != deg[v]
            }
        });
        clause("downward", bad, "edges other than the upward one go down".into());

        let bad = self.edges.iter().find(|e| h[e.from] == h[e.to] && !in_crater(e.from)).map(|e| e.from);
        clause("horizontal_on_crater", bad, "horizontal edges lie on the crater".into());

        let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for e in &self.edges {
            *count.entry((e.from, e.to)).or_default() += 1;
        }
        let bad = count.iter().find(|(&(a, b), &c)| count.get(&(b, a)).copied().unwrap_or(0) != c).map(|(&(a, _), _)| a);
        clause("dual_edges", bad, "edge multiplicities are symmetric".into());

        clause("trees", self.tree_violation(), "removing crater edges leaves trees, one per crater vertex".into());

        let ok = top == self.v_f && h.iter().all(|&x| x <= self.v_f);
        clause(
            "conductor",
            if ok { None } else { Some(0) },
            format!("m - 1 = {top}, v_l(f) = {}", self.v_f),
        );

        let strict = self.is_strict();
        ValidationReport { strict, clauses }
    }

    /// Vertex witnessing a failure of the tree clause, if any. Non-crater
    /// edges are counted once each, from their lower endpoint.
    fn tree_violation(&self) -> Option<usize> {
        let n = self.vertices.len();
        let h = &self.heights;
        let top = self.m - 1;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            if h[e.from] == top && h[e.to] == top {
                continue;
            }
            if h[e.from] >= h[e.to] {
                continue;
            }
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            if a == b {
                return Some(e.from);
            }
            parent[a] = b;
        }
        let mut craters_per_root: HashMap<usize, usize> = HashMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            let c = craters_per_root.entry(r).or_default();
            if h[v] == top {
                *c += 1;
            }
        }
        (0..n).find(|&v| {
            let r = find(&mut parent, v);
            craters_per_root[&r] != 1
        })
    }

    /// Horizontal out-degree of the crater vertices and the Kronecker
    /// symbol `(d_L / l)` of the fundamental discriminant.
    pub fn crater_splitting(&self) -> (Vec<usize>, i32) {
        let top = self.m - 1;
        let degs = self
            .crater()
            .into_iter()
            .map(|v| self.edges_from(v).filter(|e| self.heights[e.to] == top).count())
            .collect();
        let d_l = order_tower(self.field.order().unwrap(), self.t).map(|tw| tw.d_l).unwrap_or(0);
        (degs, kronecker(d_l, self.ell))
    }

    pub fn summary(&self) -> ComponentSummary {
        let k = &self.field;
        let deg = self.out_degrees();
        let vertices = (0..self.vertices.len())
            .map(|v| {
                let [a, b] = self.vertex_label(v);
                VertexSummary {
                    a,
                    b,
                    j: k.index(self.vertices[v].j_invariant()) as u64,
                    level: self.level_of(v),
                    height: self.heights[v],
                    degree: deg[v],
                }
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeSummary {
                from: self.vertex_label(e.from),
                to: self.vertex_label(e.to),
                kernel: e.isogeny.kernel_poly().coeffs().iter().map(|c| k.index(c) as u64).collect(),
                rational_point: e.isogeny.rational_kernel_point(),
                direction: e.isogeny.direction(),
            })
            .collect();
        let (crater_degrees, kron) = self.crater_splitting();
        ComponentSummary {
            p: k.characteristic(),
            n: k.degree(),
            t: self.t,
            ell: self.ell,
            m: self.m,
            v_f: self.v_f,
            size: self.vertices.len(),
            crater: self.crater().into_iter().map(|v| self.vertex_label(v)).collect(),
            crater_degrees,
            kronecker: kron,
            flags: self.flags,
            vertices,
            edges,
            validation: self.validate(),
        }
    }

    /// Graphviz DOT text: vertices labelled `j:h`, grouped by level.
    pub fn export_dot(&self) -> String {
        let k = &self.field;
        let mut s = String::new();
        let q = k.order().unwrap();
        let _ = writeln!(s, "digraph volcano_q{}_t{}_l{} {{", q, self.t, self.ell);
        let _ = writeln!(s, "  rankdir=BT;");
        for (lvl, vs) in self.levels().iter().enumerate() {
            let _ = write!(s, "  {{ rank=same;");
            for v in vs {
                let _ = write!(s, " v{v};");
            }
            let _ = writeln!(s, " }} // level {}", lvl + 1);
        }
        for (v, c) in self.vertices.iter().enumerate() {
            let [a, b] = self.vertex_label(v);
            let _ = writeln!(
                s,
                "  v{v} [label=\"{}:{}\", tooltip=\"a={a} b={b}\"];",
                k.index(c.j_invariant()),
                self.heights[v]
            );
        }
        for e in &self.edges {
            let _ = writeln!(s, "  v{} -> v{} [label=\"{}\"];", e.from, e.to, e.kernel_index);
        }
        s.push_str("}\n");
        s
    }
}

/// Heights of every vertex of a list of components.
pub fn height_table(components: &[VolcanoGraph]) -> HashMap<CurveKey, u32> {
    components.iter().flat_map(|g| g.heights()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseResult {
    pub clause: &'static str,
    pub passed: bool,
    /// `(a, b)` encoding of a failing vertex.
    pub counterexample: Option<[u64; 2]>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// False for components with j = 0 or 1728, which are reported but
    /// not held to the axioms.
    pub strict: bool,
    pub clauses: Vec<ClauseResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClauseResult> {
        self.clauses.iter().filter(|c| !c.passed)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexSummary {
    pub a: u64,
    pub b: u64,
    pub j: u64,
    pub level: u32,
    pub height: u32,
    pub degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeSummary {
    pub from: [u64; 2],
    pub to: [u64; 2],
    pub kernel: Vec<u64>,
    pub rational_point: bool,
    pub direction: Direction,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentSummary {
    pub p: u64,
    pub n: usize,
    pub t: i64,
    pub ell: u64,
    pub m: u32,
    pub v_f: u32,
    pub size: usize,
    pub crater: Vec<[u64; 2]>,
    pub crater_degrees: Vec<usize>,
    pub kronecker: i32,
    pub flags: VolcanoFlags,
    pub vertices: Vec<VertexSummary>,
    pub edges: Vec<EdgeSummary>,
    pub validation: ValidationReport,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::{enumerate_classes, frobenius_matrix};

    fn gf(p: u64) -> Field {
        Field::new(p, 1).unwrap()
    }

    #[test]
    fn gf5_trace_2() {
        let k = gf(5);
        let e = Curve::from_u64(&k, 1, 0).unwrap();
        let g2 = component_of(&e, 2).unwrap();
        assert_eq!(g2.height_param(), 2);
        assert_eq!(height(&e, 2).unwrap(), 1);
        assert_eq!(height(&e, 3).unwrap(), 0);
        for g in build_graph(&k, 2, 3).unwrap() {
            assert_eq!(g.height_param(), 1);
            assert!(g.edges().iter().all(|e| e.isogeny.direction() != Direction::Up));
        }
        let dot = g2.export_dot();
        assert_eq!(dot, component_of(&e, 2).unwrap().export_dot());
        assert!(dot.contains("rank=same"));
    }

    #[test]
    fn errors() {
        let k = gf(5);
        assert!(matches!(build_graph(&k, 5, 2), Err(Error::SupersingularTrace { .. })));
        assert_eq!(build_graph(&k, 2, 5).unwrap_err(), Error::CharEqualsL(5));
        assert_eq!(build_graph(&k, 2, 4).unwrap_err(), Error::NonPrimeDegree(4));
        let ss = Curve::from_u64(&gf(7), 1, 0).unwrap();
        if !ss.is_ordinary() {
            assert_eq!(component_of(&ss, 2).unwrap_err(), Error::SupersingularCurve);
        }
    }

    #[test]
    fn injected_edge_breaks_degree_clause() {
        let k = gf(5);
        let mut g = component_of(&Curve::from_u64(&k, 1, 0).unwrap(), 2).unwrap();
        assert!(!g.is_strict());
        let only_dual: Vec<_> = g.validate().failures().map(|c| c.clause).collect();
        assert_eq!(only_dual, vec!["dual_edges"]);
        g.inject_extra_edge();
        assert!(g.validate().failures().any(|c| c.clause == "degree"));

        let mut strict = (5u64..62)
            .filter(|&p| arith::is_prime(p))
            .flat_map(|p| {
                let k = gf(p);
                let traces = enumerate_classes(&k).unwrap().ordinary_traces();
                traces.into_iter().map(move |t| (k.clone(), t))
            })
            .flat_map(|(k, t)| build_graph(&k, t, 2).unwrap())
            .find(|g| g.is_strict() && g.height_param() > 1)
            .unwrap();
        assert!(strict.validate().passed());
        strict.inject_extra_edge();
        assert!(strict.validate().failures().any(|c| c.clause == "degree"));
    }

    /// Height is the largest `k <= v_l(f)` such that Frobenius acts as a
    /// scalar on `E[l^k]`.
    fn scalar_height(e: &Curve, ell: u64, v_f: u32) -> u32 {
        (1..=v_f)
            .take_while(|&k| {
                let fm = frobenius_matrix(e, ell.pow(k)).unwrap();
                fm.m[0][1] == 0 && fm.m[1][0] == 0 && fm.m[0][0] == fm.m[1][1]
            })
            .count() as u32
    }

    #[test]
    fn small_sweep_validates_and_matches_frobenius_heights() {
        for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let k = gf(p);
            let table = enumerate_classes(&k).unwrap();
            for t in table.ordinary_traces() {
                for ell in [2u64, 3, 5] {
                    if ell == p {
                        continue;
                    }
                    let comps = build_graph(&k, t, ell).unwrap();
                    let total: usize = comps.iter().map(|g| g.vertices().len()).sum();
                    assert_eq!(total, table.class(t).len());
                    for g in &comps {
                        let report = g.validate();
                        if g.is_strict() {
                            assert!(report.passed(), "p={p} t={t} l={ell}: {report:?}");
                            let (degs, kron) = g.crater_splitting();
                            assert!(degs.iter().all(|&d| d as i32 == 1 + kron), "p={p} t={t} l={ell}");
                        }
                        for (v, c) in g.vertices().iter().enumerate() {
                            if ell.pow(g.conductor_valuation()) <= 9 {
                                assert_eq!(g.height(v), scalar_height(c, ell, g.conductor_valuation()), "{c:?} l={ell}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn kronecker_matches_legendre() {
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-3, 3), 0);
    }
}
