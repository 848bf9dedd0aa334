//! Canonical covers of sofic shifts and the subset structure relating them.
//!
//! Everything here works with left covers. Right covers come from transposing.

use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::graph::{graph_isomorphic, languages_related, LabelledGraph, Relation, VertexSet};
use crate::invariants::SymbolicMatrix;

pub const DEFAULT_CAP: usize = 200_000;

fn set_name(g: &LabelledGraph, s: &VertexSet) -> String {
    let names: Vec<&str> = s.ones().map(|v| g.name(v)).collect();
    format!("{{{}}}", names.join(","))
}

pub fn fischer_cover_left(g: &LabelledGraph) -> Result<LabelledGraph> {
    fischer_cover_left_with_cap(g, DEFAULT_CAP)
}

/// Left Fischer cover of the shift presented by an irreducible graph.
pub fn fischer_cover_left_with_cap(g: &LabelledGraph, cap: usize) -> Result<LabelledGraph> {
    let g = g.essentialize();
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if !g.is_irreducible() {
        return Err(Error::Reducible);
    }
    let table = g.predecessor_table();
    let k = g.alphabet().len();

    // backward subset construction
    let mut states: Vec<VertexSet> = vec![g.full_set()];
    let mut index: HashMap<VertexSet, usize> = HashMap::from([(g.full_set(), 0)]);
    let mut back: Vec<Vec<Option<usize>>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut row = vec![None; k];
        for (a, slot) in row.iter_mut().enumerate() {
            let s = g.step_back(&table, a, &states[i]);
            if s.is_clear() {
                continue;
            }
            let next = states.len();
            let j = *index.entry(s.clone()).or_insert_with(|| {
                states.push(s);
                next
            });
            if states.len() > cap {
                return Err(Error::ResourceCap(cap));
            }
            *slot = Some(j);
        }
        back.push(row);
        i += 1;
    }

    // Moore refinement: states are equivalent when they read the same words backwards
    let n = states.len();
    let mut block = vec![0usize; n];
    let mut count = 1;
    loop {
        let mut sigs: HashMap<Vec<Option<usize>>, usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let mut sig = vec![Some(block[s])];
            sig.extend(back[s].iter().map(|t| t.map(|t| block[t])));
            let len = sigs.len();
            next[s] = *sigs.entry(sig).or_insert(len);
        }
        let new_count = sigs.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    let mut det = LabelledGraph::with_alphabet(g.alphabet().clone());
    let mut rep = vec![usize::MAX; count];
    for s in 0..n {
        if rep[block[s]] == usize::MAX {
            rep[block[s]] = s;
        }
    }
    for &r in &rep {
        det.add_vertex(set_name(&g, &states[r]));
    }
    for (b, &r) in rep.iter().enumerate() {
        for (a, t) in back[r].iter().enumerate() {
            if let Some(t) = t {
                det.add_edge_idx(block[*t], a, b);
            }
        }
    }
    let det = det.essentialize();
    top_component(&det)
}

/// The unique irreducible component that receives no edge from outside itself.
fn top_component(g: &LabelledGraph) -> Result<LabelledGraph> {
    let comps = g.irreducible_components();
    let mut comp_of = vec![usize::MAX; g.vertex_count()];
    for (c, vs) in comps.iter().enumerate() {
        for &v in vs {
            comp_of[v] = c;
        }
    }
    let reach = reachability(g);
    let tops: Vec<usize> = (0..comps.len())
        .filter(|&c| {
            let v = comps[c][0];
            comps.iter().all(|other| reach[v].contains(other[0]))
        })
        .collect();
    match tops[..] {
        [c] => {
            let keep: Vec<bool> = (0..g.vertex_count()).map(|v| comp_of[v] == c).collect();
            Ok(g.induced(&keep).0)
        }
        [] => Err(Error::Reducible),
        _ => Err(Error::Invalid("several top components".into())),
    }
}

/// `reach[u]` holds every vertex reachable from `u` by a path of length ≥ 0.
fn reachability(g: &LabelledGraph) -> Vec<FixedBitSet> {
    let n = g.vertex_count();
    let mut succ = vec![Vec::new(); n];
    for e in g.edges() {
        succ[e.src].push(e.dst);
    }
    (0..n)
        .map(|s| {
            let mut seen = FixedBitSet::with_capacity(n);
            seen.insert(s);
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &succ[u] {
                    if !seen.put(v) {
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect()
}

pub fn fischer_cover_right(g: &LabelledGraph) -> Result<LabelledGraph> {
    Ok(fischer_cover_left(&g.transpose())?.transpose())
}

/// Deterministic automaton on the relations `R_w = {(u, v) : some path u → v reads w}`.
#[derive(Debug, Clone)]
pub struct RelationMonoid {
    pub n: usize,
    /// Bit `u * n + v` is set when `(u, v)` belongs to the relation.
    pub states: Vec<FixedBitSet>,
    pub transitions: Vec<Vec<usize>>,
    pub cyclic: Vec<bool>,
}

impl RelationMonoid {
    pub fn domain(&self, state: usize) -> FixedBitSet {
        let n = self.n;
        let r = &self.states[state];
        let mut d = FixedBitSet::with_capacity(n);
        for u in 0..n {
            if r.ones().any(|b| b / n == u) {
                d.insert(u);
            }
        }
        d
    }
}

pub fn relation_monoid(f: &LabelledGraph, cap: usize) -> Result<RelationMonoid> {
    let n = f.vertex_count();
    let k = f.alphabet().len();
    let mut succ = vec![vec![Vec::new(); n]; k];
    for e in f.edges() {
        succ[e.label][e.src].push(e.dst);
    }
    let mut id = FixedBitSet::with_capacity(n * n);
    for u in 0..n {
        id.insert(u * n + u);
    }
    let mut states = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut transitions = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut row = Vec::with_capacity(k);
        for s in &succ {
            let mut r = FixedBitSet::with_capacity(n * n);
            for b in states[i].ones() {
                let (u, x) = (b / n, b % n);
                for &v in &s[x] {
                    r.insert(u * n + v);
                }
            }
            let next = states.len();
            let j = *index.entry(r.clone()).or_insert_with(|| {
                states.push(r);
                next
            });
            if states.len() > cap {
                return Err(Error::ResourceCap(cap));
            }
            row.push(j);
        }
        transitions.push(row);
        i += 1;
    }
    let mut dg = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..states.len()).map(|_| dg.add_node(())).collect();
    let mut cyclic = vec![false; states.len()];
    for (s, row) in transitions.iter().enumerate() {
        for &t in row {
            dg.add_edge(nodes[s], nodes[t], ());
            if s == t {
                cyclic[s] = true;
            }
        }
    }
    for comp in tarjan_scc(&dg) {
        if comp.len() > 1 {
            for v in comp {
                cyclic[v.index()] = true;
            }
        }
    }
    Ok(RelationMonoid { n, states, transitions, cyclic })
}

/// Canonical representatives of union classes: `cl(U) = {u : P(u) ⊆ P(U)}`.
struct Closure<'a> {
    f: &'a LabelledGraph,
    memo: HashMap<VertexSet, VertexSet>,
}

impl<'a> Closure<'a> {
    fn new(f: &'a LabelledGraph) -> Self {
        Closure { f, memo: HashMap::new() }
    }

    fn of(&mut self, u: &VertexSet) -> VertexSet {
        if let Some(c) = self.memo.get(u) {
            return c.clone();
        }
        let mut c = u.clone();
        if !u.is_clear() {
            for v in 0..self.f.vertex_count() {
                if !u.contains(v) && languages_related(self.f, &self.f.set_of(&[v]), self.f, u, Relation::Contained) {
                    c.insert(v);
                }
            }
        }
        self.memo.insert(u.clone(), c.clone());
        c
    }
}

/// A cover whose vertices are union classes of sets of Fischer-cover vertices.
#[derive(Debug, Clone)]
pub struct SubsetCover {
    pub graph: LabelledGraph,
    pub fischer: LabelledGraph,
    /// Closed representative of each vertex's class, as a set of Fischer vertices.
    pub classes: Vec<VertexSet>,
}

/// Adds the edge rule `class(aV) -a-> class(V)` to a list of classes.
fn subset_cover(f: &LabelledGraph, classes: Vec<VertexSet>, closure: &mut Closure) -> Result<SubsetCover> {
    let table = f.predecessor_table();
    let mut graph = LabelledGraph::with_alphabet(f.alphabet().clone());
    let index: HashMap<VertexSet, usize> = classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    for c in &classes {
        graph.add_vertex(set_name(f, c));
    }
    for (v, c) in classes.iter().enumerate() {
        for a in 0..f.alphabet().len() {
            let pre = f.step_back(&table, a, c);
            if pre.is_clear() {
                continue;
            }
            let u = *index
                .get(&closure.of(&pre))
                .ok_or_else(|| Error::Invalid("class set not closed under predecessors".into()))?;
            graph.add_edge_idx(u, a, v);
        }
    }
    Ok(SubsetCover { graph, fischer: f.clone(), classes })
}

pub fn krieger_cover_left(f: &LabelledGraph) -> Result<SubsetCover> {
    krieger_cover_left_with_cap(f, DEFAULT_CAP)
}

/// Left Krieger cover built from a left Fischer cover (or any essential left-resolving
/// presentation).
pub fn krieger_cover_left_with_cap(f: &LabelledGraph, cap: usize) -> Result<SubsetCover> {
    if !f.is_left_resolving() {
        return Err(Error::NotLeftResolving);
    }
    let monoid = relation_monoid(f, cap)?;
    let mut closure = Closure::new(f);
    let mut classes = Vec::new();
    let mut seen = HashSet::new();
    for s in 0..monoid.states.len() {
        if !monoid.cyclic[s] {
            continue;
        }
        let d = monoid.domain(s);
        if d.is_clear() {
            continue;
        }
        let c = closure.of(&d);
        if seen.insert(c.clone()) {
            classes.push(c);
        }
    }
    subset_cover(f, classes, &mut closure)
}

pub fn past_set_cover(f: &LabelledGraph) -> Result<SubsetCover> {
    past_set_cover_with_cap(f, DEFAULT_CAP)
}

/// Classes of the source sets `s(w)` of nonempty words.
pub fn past_set_cover_with_cap(f: &LabelledGraph, cap: usize) -> Result<SubsetCover> {
    if !f.is_left_resolving() {
        return Err(Error::NotLeftResolving);
    }
    let table = f.predecessor_table();
    let mut closure = Closure::new(f);
    let mut classes: Vec<VertexSet> = Vec::new();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    let all = f.full_set();
    let push = |s: VertexSet, closure: &mut Closure, classes: &mut Vec<VertexSet>, seen: &mut HashSet<VertexSet>, queue: &mut VecDeque<VertexSet>| {
        let c = closure.of(&s);
        if seen.insert(c.clone()) {
            classes.push(c.clone());
            queue.push_back(c);
        }
    };
    for a in 0..f.alphabet().len() {
        let s = f.step_back(&table, a, &all);
        if !s.is_clear() {
            push(s, &mut closure, &mut classes, &mut seen, &mut queue);
        }
    }
    while let Some(c) = queue.pop_front() {
        for a in 0..f.alphabet().len() {
            let s = f.step_back(&table, a, &c);
            if !s.is_clear() {
                push(s, &mut closure, &mut classes, &mut seen, &mut queue);
                if classes.len() > cap {
                    return Err(Error::ResourceCap(cap));
                }
            }
        }
    }
    subset_cover(f, classes, &mut closure)
}

/// Indecomposable vertices: those whose class is not the union of the strictly smaller
/// classes below it.
pub fn indecomposable(k: &SubsetCover) -> Vec<bool> {
    let mut closure = Closure::new(&k.fischer);
    (0..k.classes.len())
        .map(|p| {
            let mut union = k.fischer.empty_set();
            for (q, c) in k.classes.iter().enumerate() {
                if q != p && c.is_subset(&k.classes[p]) {
                    union.union_with(c);
                }
            }
            closure.of(&union) != k.classes[p]
        })
        .collect()
}

/// Subgraph of the Krieger cover induced by the vertices that reach an indecomposable one.
pub fn generalized_fischer_cover(k: &SubsetCover) -> SubsetCover {
    let ind = indecomposable(k);
    let reach = reachability(&k.graph);
    let keep: Vec<bool> = (0..k.classes.len())
        .map(|v| reach[v].ones().any(|w| ind[w]))
        .collect();
    let (graph, old) = k.graph.induced(&keep);
    SubsetCover {
        graph,
        fischer: k.fischer.clone(),
        classes: old.iter().map(|&v| k.classes[v].clone()).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetClass {
    pub representative: VertexSet,
    pub class_id: usize,
    /// Fewest generalised Fischer vertices whose union lands in this class.
    pub min_size: usize,
}

/// Layer of every vertex of `cover` relative to the foundation `gfc`.
pub fn layers(cover: &SubsetCover, gfc: &SubsetCover) -> Result<Vec<SubsetClass>> {
    let mut closure = Closure::new(&cover.fischer);
    cover
        .classes
        .iter()
        .enumerate()
        .map(|(id, c)| {
            let below: Vec<&VertexSet> = gfc.classes.iter().filter(|g| g.is_subset(c)).collect();
            for size in 1..=below.len() {
                if combinations(below.len(), size).any(|pick| {
                    let mut u = cover.fischer.empty_set();
                    for i in pick {
                        u.union_with(below[i]);
                    }
                    closure.of(&u) == *c
                }) {
                    return Ok(SubsetClass { representative: c.clone(), class_id: id, min_size: size });
                }
            }
            Err(Error::Invalid(format!("vertex {id} is not a union of foundation vertices")))
        })
        .collect()
}

fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// True iff the Krieger cover is the essential part of the past set cover.
pub fn condition_star(f: &LabelledGraph) -> Result<bool> {
    let k = krieger_cover_left(f)?;
    let p = past_set_cover(f)?;
    Ok(graph_isomorphic(&k.graph, &p.graph.essentialize()).is_some())
}

/// Condensation onto the components that carry an edge; an edge joins two components
/// whenever a path does. Edges carry the sentinel label `*`.
pub fn proper_communication_graph(g: &LabelledGraph) -> (LabelledGraph, Vec<Vec<usize>>) {
    let comps = g.irreducible_components();
    let reach = reachability(g);
    let mut pc = LabelledGraph::new();
    for c in &comps {
        pc.add_vertex(set_name(g, &g.set_of(c)));
    }
    for (i, c) in comps.iter().enumerate() {
        for (j, d) in comps.iter().enumerate() {
            if i != j && reach[c[0]].contains(d[0]) {
                pc.add_edge(i, "*", j);
            }
        }
    }
    (pc, comps)
}

/// Builds a left Fischer cover whose Krieger cover has the transitive closure of the rooted
/// acyclic graph `e` as proper communication graph. With `condition_k` every loop is doubled.
pub fn range_invariant_construction(e: &LabelledGraph, condition_k: bool) -> Result<LabelledGraph> {
    let n = e.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if !e.irreducible_components().is_empty() {
        return Err(Error::Invalid("input graph has a circuit".into()));
    }
    let mut targets: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for edge in e.edges() {
        if !targets[edge.src].contains(&edge.dst) {
            targets[edge.src].push(edge.dst);
            indeg[edge.dst] += 1;
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let &[root] = &roots[..] else {
        return Err(Error::Invalid("input graph needs exactly one maximal vertex".into()));
    };
    // longest path lengths, in topological order
    let mut order = Vec::new();
    let mut deg = indeg.clone();
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        order.push(u);
        for &v in &targets[u] {
            deg[v] -= 1;
            if deg[v] == 0 {
                stack.push(v);
            }
        }
    }
    let mut level = vec![0u32; n];
    for &u in &order {
        for &v in &targets[u] {
            level[v] = level[v].max(level[u] + 1);
        }
    }
    if level.iter().any(|&l| l > 20) {
        return Err(Error::Invalid("input graph too deep".into()));
    }
    let copies = |v: usize| 1usize << level[v];
    let mut by_level: Vec<usize> = (0..n).collect();
    by_level.sort_by_key(|&v| (level[v], v));

    let mut f = LabelledGraph::new();
    let mut first = vec![0usize; n];
    for &v in &by_level {
        first[v] = f.vertex_count();
        for i in 1..=copies(v) {
            f.add_vertex(format!("{}{}", e.name(v), i));
        }
    }
    for &v in &by_level {
        for i in 0..copies(v) {
            let x = first[v] + i;
            f.add_edge(x, &format!("a_{}", e.name(v)), x);
            if condition_k {
                f.add_edge(x, &format!("a'_{}", e.name(v)), x);
            }
        }
    }
    for &u in &by_level {
        for &v in &targets[u] {
            let m = copies(v) / copies(u);
            for i in 0..copies(u) {
                for j in 0..m {
                    let label = format!("a_{},{}^{}", e.name(u), e.name(v), j + 1);
                    f.add_edge(first[u] + i, &label, first[v] + i * m + j);
                }
            }
        }
    }
    for &v in &by_level {
        if targets[v].is_empty() {
            for i in 0..copies(v) {
                f.add_edge(first[v] + i, &format!("b_{}{}", e.name(v), i + 1), first[root]);
            }
        }
    }
    Ok(f)
}

/// Label-synchronised product of `f` with itself, vertex `(u, v)` at index `u * n + v`.
pub fn fiber_product(f: &LabelledGraph) -> (SymbolicMatrix, LabelledGraph) {
    let n = f.vertex_count();
    let mut g = LabelledGraph::with_alphabet(f.alphabet().clone());
    for u in 0..n {
        for v in 0..n {
            g.add_vertex(format!("({},{})", f.name(u), f.name(v)));
        }
    }
    let mut m = SymbolicMatrix::new(n * n);
    for e1 in f.edges() {
        for e2 in f.edges() {
            if e1.label == e2.label {
                let (s, d) = (e1.src * n + e2.src, e1.dst * n + e2.dst);
                g.add_edge_idx(s, e1.label, d);
                m.push(s, d, f.label(e1));
            }
        }
    }
    (m, g)
}

pub fn fiber_product_cover(f: &LabelledGraph) -> LabelledGraph {
    fiber_product(f).1.essentialize()
}
