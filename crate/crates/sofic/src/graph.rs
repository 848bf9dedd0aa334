//! Labelled directed multigraphs and the structural predicates on them.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};

pub type VertexSet = FixedBitSet;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut a = Alphabet::default();
        for s in symbols {
            let s = s.into();
            if a.index_of(&s).is_some() {
                return Err(Error::SymbolPresent(s));
            }
            a.symbols.push(s);
        }
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, s: &str) -> Option<usize> {
        self.symbols.iter().position(|x| x == s)
    }

    /// Index of `s`, appending it if absent.
    pub fn intern(&mut self, s: &str) -> usize {
        match self.index_of(s) {
            Some(i) => i,
            None => {
                self.symbols.push(s.to_string());
                self.symbols.len() - 1
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub label: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelledGraph {
    names: Vec<String>,
    alphabet: Alphabet,
    edges: Vec<Edge>,
}

impl LabelledGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_alphabet(alphabet: Alphabet) -> Self {
        LabelledGraph { alphabet, ..Default::default() }
    }

    /// Builds a graph from `(src, label, dst)` triples over vertex names, adding vertices
    /// in order of first appearance.
    pub fn from_triples(triples: &[(&str, &str, &str)]) -> Self {
        let mut g = LabelledGraph::new();
        for &(s, a, d) in triples {
            let s = g.vertex_or_insert(s);
            let d = g.vertex_or_insert(d);
            g.add_edge(s, a, d);
        }
        g
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn vertex_or_insert(&mut self, name: &str) -> usize {
        self.vertex_index(name).unwrap_or_else(|| self.add_vertex(name))
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn add_edge(&mut self, src: usize, label: &str, dst: usize) {
        let label = self.alphabet.intern(label);
        self.add_edge_idx(src, label, dst);
    }

    pub fn add_edge_idx(&mut self, src: usize, label: usize, dst: usize) {
        assert!(src < self.names.len() && dst < self.names.len(), "edge endpoint out of range");
        assert!(label < self.alphabet.len(), "label out of range");
        self.edges.push(Edge { src, label, dst });
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn label(&self, e: &Edge) -> &str {
        self.alphabet.symbol(e.label)
    }

    pub fn empty_set(&self) -> VertexSet {
        FixedBitSet::with_capacity(self.vertex_count())
    }

    pub fn full_set(&self) -> VertexSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn set_of(&self, vs: &[usize]) -> VertexSet {
        let mut s = self.empty_set();
        for &v in vs {
            s.insert(v);
        }
        s
    }

    pub fn transpose(&self) -> LabelledGraph {
        LabelledGraph {
            names: self.names.clone(),
            alphabet: self.alphabet.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge { src: e.dst, label: e.label, dst: e.src })
                .collect(),
        }
    }

    /// Subgraph induced by the vertices flagged in `keep`, names and alphabet preserved.
    /// Also returns the old index of every new vertex.
    pub fn induced(&self, keep: &[bool]) -> (LabelledGraph, Vec<usize>) {
        let mut map = vec![usize::MAX; self.vertex_count()];
        let mut old = Vec::new();
        let mut g = LabelledGraph::with_alphabet(self.alphabet.clone());
        for v in 0..self.vertex_count() {
            if keep[v] {
                map[v] = g.add_vertex(self.names[v].clone());
                old.push(v);
            }
        }
        for e in &self.edges {
            if keep[e.src] && keep[e.dst] {
                g.edges.push(Edge { src: map[e.src], label: e.label, dst: map[e.dst] });
            }
        }
        (g, old)
    }

    pub fn essential_vertices(&self) -> Vec<bool> {
        let n = self.vertex_count();
        let mut keep = vec![true; n];
        loop {
            let mut outs = vec![false; n];
            let mut ins = vec![false; n];
            for e in &self.edges {
                if keep[e.src] && keep[e.dst] {
                    outs[e.src] = true;
                    ins[e.dst] = true;
                }
            }
            let mut changed = false;
            for v in 0..n {
                if keep[v] && !(outs[v] && ins[v]) {
                    keep[v] = false;
                    changed = true;
                }
            }
            if !changed {
                return keep;
            }
        }
    }

    pub fn essentialize(&self) -> LabelledGraph {
        self.induced(&self.essential_vertices()).0
    }

    pub fn is_essential(&self) -> bool {
        self.essential_vertices().iter().all(|&k| k)
    }

    /// Strongly connected components that carry at least one edge, each sorted, ordered by
    /// their smallest vertex.
    pub fn irreducible_components(&self) -> Vec<Vec<usize>> {
        let mut dg = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..self.vertex_count()).map(|_| dg.add_node(())).collect();
        let mut looped = vec![false; self.vertex_count()];
        for e in &self.edges {
            dg.add_edge(nodes[e.src], nodes[e.dst], ());
            if e.src == e.dst {
                looped[e.src] = true;
            }
        }
        let mut comps: Vec<Vec<usize>> = tarjan_scc(&dg)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                c.sort_unstable();
                c
            })
            .filter(|c| c.len() > 1 || looped[c[0]])
            .collect();
        comps.sort_unstable_by_key(|c| c[0]);
        comps
    }

    pub fn is_irreducible(&self) -> bool {
        let comps = self.irreducible_components();
        comps.len() == 1 && comps[0].len() == self.vertex_count()
    }

    /// `pred[a][v]` lists the sources of the `a`-edges ending at `v`.
    pub fn predecessor_table(&self) -> Vec<Vec<Vec<usize>>> {
        let mut t = vec![vec![Vec::new(); self.vertex_count()]; self.alphabet.len()];
        for e in &self.edges {
            t[e.label][e.dst].push(e.src);
        }
        t
    }

    /// `aV`: the vertices with an `a`-edge into `v`.
    pub fn step_back(&self, table: &[Vec<Vec<usize>>], a: usize, v: &VertexSet) -> VertexSet {
        let mut out = self.empty_set();
        for d in v.ones() {
            for &s in &table[a][d] {
                out.insert(s);
            }
        }
        out
    }

    pub fn is_left_resolving(&self) -> bool {
        let mut seen = HashSet::new();
        self.edges.iter().all(|e| seen.insert((e.dst, e.label)))
    }

    pub fn is_right_resolving(&self) -> bool {
        let mut seen = HashSet::new();
        self.edges.iter().all(|e| seen.insert((e.src, e.label)))
    }

    /// Starting vertices of paths labelled `word`, read right to left.
    pub fn source_set(&self, word: &[&str]) -> VertexSet {
        let table = self.predecessor_table();
        let mut v = self.full_set();
        for a in word.iter().rev() {
            match self.alphabet.index_of(a) {
                Some(a) => v = self.step_back(&table, a, &v),
                None => return self.empty_set(),
            }
        }
        v
    }

    pub fn adjacency_counts(&self) -> Vec<Vec<u64>> {
        let n = self.vertex_count();
        let mut m = vec![vec![0u64; n]; n];
        for e in &self.edges {
            m[e.src][e.dst] += 1;
        }
        m
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut g = LabelledGraph::new();
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing vertices line".into() })?;
        let rest = header
            .strip_prefix("vertices:")
            .ok_or(Error::Parse { line: ln, msg: "expected `vertices:`".into() })?;
        for name in rest.split_whitespace() {
            if g.vertex_index(name).is_some() {
                return Err(Error::Parse { line: ln, msg: format!("duplicate vertex `{name}`") });
            }
            g.add_vertex(name);
        }
        for (ln, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse { line: ln, msg: "expected `src label dst`".into() });
            }
            let find = |n: &str| {
                g.vertex_index(n)
                    .ok_or(Error::Parse { line: ln, msg: format!("unknown vertex `{n}`") })
            };
            let (s, d) = (find(parts[0])?, find(parts[2])?);
            g.add_edge(s, parts[1], d);
        }
        Ok(g)
    }
}

impl fmt::Display for LabelledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertices:")?;
        for n in &self.names {
            write!(f, " {n}")?;
        }
        writeln!(f)?;
        for e in &self.edges {
            writeln!(f, "{} {} {}", self.names[e.src], self.label(e), self.names[e.dst])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresentationReport {
    pub left_resolving: bool,
    pub right_resolving: bool,
    pub irreducible: bool,
    pub essential: bool,
    pub predecessor_separated: bool,
    pub follower_separated: bool,
}

pub fn validate_presentation(g: &LabelledGraph) -> PresentationReport {
    let ess = g.essentialize();
    PresentationReport {
        left_resolving: g.is_left_resolving(),
        right_resolving: g.is_right_resolving(),
        irreducible: g.is_irreducible(),
        essential: g.is_essential(),
        predecessor_separated: separated(&ess),
        follower_separated: separated(&ess.transpose()),
    }
}

fn separated(g: &LabelledGraph) -> bool {
    let n = g.vertex_count();
    (0..n).all(|u| {
        (u + 1..n).all(|v| !languages_related(g, &g.set_of(&[u]), g, &g.set_of(&[v]), Relation::Equal))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Relation {
    Equal,
    /// Every word readable backwards from the left set is readable from the right one.
    Contained,
}

/// Decides equality or containment of the backward-readable word languages of `u` in `g1`
/// and `v` in `g2` by exploring pairs of subsets. Labels are matched by name.
pub(crate) fn languages_related(
    g1: &LabelledGraph,
    u: &VertexSet,
    g2: &LabelledGraph,
    v: &VertexSet,
    rel: Relation,
) -> bool {
    let t1 = g1.predecessor_table();
    let t2 = g2.predecessor_table();
    let mut symbols: Vec<(Option<usize>, Option<usize>)> = Vec::new();
    for (i, s) in g1.alphabet.symbols().iter().enumerate() {
        symbols.push((Some(i), g2.alphabet.index_of(s)));
    }
    for (j, s) in g2.alphabet.symbols().iter().enumerate() {
        if g1.alphabet.index_of(s).is_none() {
            symbols.push((None, Some(j)));
        }
    }
    let ok = |s: &VertexSet, t: &VertexSet| {
        let (a, b) = (s.is_clear(), t.is_clear());
        match rel {
            Relation::Equal => a == b,
            Relation::Contained => a || !b,
        }
    };
    if !ok(u, v) {
        return false;
    }
    let mut seen: HashSet<(VertexSet, VertexSet)> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((u.clone(), v.clone()));
    queue.push_back((u.clone(), v.clone()));
    while let Some((s, t)) = queue.pop_front() {
        for &(a1, a2) in &symbols {
            let s2 = match a1 {
                Some(a) => g1.step_back(&t1, a, &s),
                None => g1.empty_set(),
            };
            let t2n = match a2 {
                Some(a) => g2.step_back(&t2, a, &t),
                None => g2.empty_set(),
            };
            if !ok(&s2, &t2n) {
                return false;
            }
            if s2.is_clear() && t2n.is_clear() {
                continue;
            }
            // once the left side is empty containment can no longer fail
            if rel == Relation::Contained && s2.is_clear() {
                continue;
            }
            if seen.insert((s2.clone(), t2n.clone())) {
                queue.push_back((s2, t2n));
            }
        }
    }
    true
}

/// True iff the union of the predecessor languages of `u` equals that of `v`.
pub fn predecessor_language_equal(g: &LabelledGraph, u: &VertexSet, v: &VertexSet) -> Result<bool> {
    if !g.is_left_resolving() {
        return Err(Error::NotLeftResolving);
    }
    Ok(languages_related(g, u, g, v, Relation::Equal))
}

/// True iff the predecessor language of `u` is contained in that of `v`.
pub fn predecessor_language_contained(g: &LabelledGraph, u: &VertexSet, v: &VertexSet) -> Result<bool> {
    if !g.is_left_resolving() {
        return Err(Error::NotLeftResolving);
    }
    Ok(languages_related(g, u, g, v, Relation::Contained))
}

/// Replaces every `a`-edge by a path of two edges labelled `a` then `d` through a new vertex.
pub fn symbol_expand(g: &LabelledGraph, a: &str, d: &str) -> Result<LabelledGraph> {
    if g.alphabet.index_of(d).is_some() {
        return Err(Error::SymbolPresent(d.to_string()));
    }
    let mut out = LabelledGraph::with_alphabet(g.alphabet.clone());
    for n in &g.names {
        out.add_vertex(n.clone());
    }
    let di = out.alphabet.intern(d);
    let ai = g.alphabet.index_of(a);
    for (k, e) in g.edges.iter().enumerate() {
        if Some(e.label) == ai {
            let name = unique_name(&out, &format!("{}.{}", g.names[e.src], k));
            let m = out.add_vertex(name);
            out.add_edge_idx(e.src, e.label, m);
            out.add_edge_idx(m, di, e.dst);
        } else {
            out.edges.push(*e);
        }
    }
    Ok(out)
}

pub(crate) fn unique_name(g: &LabelledGraph, base: &str) -> String {
    let mut name = base.to_string();
    while g.vertex_index(&name).is_some() {
        name.push('\'');
    }
    name
}

/// Searches for a vertex bijection `p` (vertex `v` of `g1` maps to `p[v]` of `g2`) that
/// carries the labelled edge multiset of `g1` onto that of `g2`.
pub fn graph_isomorphic(g1: &LabelledGraph, g2: &LabelledGraph) -> Option<Vec<usize>> {
    let n = g1.vertex_count();
    if n != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    // edge multiplicities keyed by (src, label name, dst)
    fn count(g: &LabelledGraph) -> HashMap<(usize, &str, usize), usize> {
        let mut m = HashMap::new();
        for e in &g.edges {
            *m.entry((e.src, g.label(e), e.dst)).or_default() += 1;
        }
        m
    }
    type Sig<'a> = (Vec<(&'a str, bool)>, Vec<(&'a str, bool)>);
    let c1 = count(g1);
    let c2 = count(g2);
    fn sig(g: &LabelledGraph, v: usize) -> Sig<'_> {
        let mut outs = Vec::new();
        let mut ins = Vec::new();
        for e in &g.edges {
            if e.src == v {
                outs.push((g.label(e), e.dst == v));
            }
            if e.dst == v {
                ins.push((g.label(e), e.src == v));
            }
        }
        outs.sort_unstable();
        ins.sort_unstable();
        (outs, ins)
    }
    let s1: Vec<_> = (0..n).map(|v| sig(g1, v)).collect();
    let s2: Vec<_> = (0..n).map(|v| sig(g2, v)).collect();
    let mut multiset1: Vec<_> = s1.clone();
    let mut multiset2: Vec<_> = s2.clone();
    multiset1.sort();
    multiset2.sort();
    if multiset1 != multiset2 {
        return None;
    }
    let mut p = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        v: usize,
        n: usize,
        p: &mut Vec<usize>,
        used: &mut Vec<bool>,
        compatible: &dyn Fn(usize, usize, &[usize]) -> bool,
    ) -> bool {
        if v == n {
            return true;
        }
        for w in 0..n {
            if !used[w] && compatible(v, w, p) {
                p[v] = w;
                used[w] = true;
                if rec(v + 1, n, p, used, compatible) {
                    return true;
                }
                used[w] = false;
                p[v] = usize::MAX;
            }
        }
        false
    }
    let labels: Vec<&str> = {
        let mut l: Vec<&str> = g1.alphabet.symbols().iter().map(String::as_str).collect();
        l.sort_unstable();
        l
    };
    let compatible = |v: usize, w: usize, p: &[usize]| {
        if s1[v] != s2[w] {
            return false;
        }
        // check edges between v and every already mapped vertex (including v itself)
        for (u, pu) in p.iter().take(v).copied().chain(std::iter::once(w)).enumerate() {
            for &a in &labels {
                let f1 = c1.get(&(u, a, v)).copied().unwrap_or(0);
                let f2 = c2.get(&(pu, a, w)).copied().unwrap_or(0);
                let b1 = c1.get(&(v, a, u)).copied().unwrap_or(0);
                let b2 = c2.get(&(w, a, pu)).copied().unwrap_or(0);
                if f1 != f2 || b1 != b2 {
                    return false;
                }
            }
        }
        true
    };
    if rec(0, n, &mut p, &mut used, &compatible) {
        Some(p)
    } else {
        None
    }
}
