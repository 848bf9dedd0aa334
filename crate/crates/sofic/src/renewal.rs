//! Renewal systems: the partitioning engine, SFT detection, invariants, list surgery and
//! the constructive families built from generating lists.

use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use std::fmt;

use num_bigint::BigInt;

use crate::covers::fischer_cover_left;
use crate::error::{Error, Result};
use crate::graph::{languages_related, unique_name, LabelledGraph, Relation, VertexSet};
use crate::invariants::{amalgamation_reduce, bowen_franks_with_det, BowenFranksInvariant, SparseIntMatrix};

pub type Sym = u16;
pub type Word = Vec<Sym>;

pub const DEFAULT_MAX_WORDS: usize = 10_000;

/// Splits a word into symbols: one character, then any primes, then any `_digits` groups.
pub fn tokenize(s: &str) -> Result<Vec<String>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\'' || c == '_' || c.is_whitespace() {
            return Err(Error::Invalid(format!("bad symbol start `{c}` in `{s}`")));
        }
        let mut sym = c.to_string();
        i += 1;
        loop {
            if i < chars.len() && chars[i] == '\'' {
                sym.push('\'');
                i += 1;
            } else if i + 1 < chars.len() && chars[i] == '_' && chars[i + 1].is_ascii_digit() {
                sym.push('_');
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    sym.push(chars[i]);
                    i += 1;
                }
            } else {
                break;
            }
        }
        out.push(sym);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingList {
    pub name: String,
    alphabet: Vec<String>,
    words: Vec<Word>,
}

impl GeneratingList {
    pub fn new(name: impl Into<String>, words: &[&str]) -> Result<Self> {
        let tokens = words.iter().map(|w| tokenize(w)).collect::<Result<Vec<_>>>()?;
        Self::from_symbols(name, tokens)
    }

    /// Builds a list from words given as symbol names. The alphabet is the sorted set of
    /// symbols that occur.
    pub fn from_symbols(name: impl Into<String>, words: Vec<Vec<String>>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::Invalid("empty generating list".into()));
        }
        let alphabet: Vec<String> = words.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        if alphabet.len() > Sym::MAX as usize {
            return Err(Error::Invalid("alphabet too large".into()));
        }
        let index: HashMap<&str, Sym> = alphabet.iter().enumerate().map(|(i, s)| (s.as_str(), i as Sym)).collect();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for w in &words {
            if w.is_empty() {
                return Err(Error::Invalid("empty generator".into()));
            }
            let w: Word = w.iter().map(|s| index[s.as_str()]).collect();
            if !seen.insert(w.clone()) {
                return Err(Error::Invalid("duplicate generator".into()));
            }
            out.push(w);
        }
        Ok(GeneratingList { name: name.into(), alphabet, words: out })
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn symbol_words(&self) -> Vec<Vec<String>> {
        self.words.iter().map(|w| w.iter().map(|&s| self.alphabet[s as usize].clone()).collect()).collect()
    }

    pub fn render(&self, w: &[Sym]) -> String {
        w.iter().map(|&s| self.alphabet[s as usize].as_str()).collect()
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl fmt::Display for GeneratingList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.name)?;
        for w in &self.words {
            write!(f, " {}", self.render(w))?;
        }
        Ok(())
    }
}

/// Parses `NAME: w1 w2 ...` lines; `#` starts a comment line. Lines without a name are
/// called `L<line>`.
pub fn parse_lists(text: &str) -> Result<Vec<GeneratingList>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, rest) = match line.split_once(':') {
            Some((n, r)) => (n.trim().to_string(), r),
            None => (format!("L{}", i + 1), line),
        };
        let words: Vec<&str> = rest.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty()).collect();
        let list = GeneratingList::new(name, &words).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        out.push(list);
    }
    Ok(out)
}

/// A minimal partitioning, kept in constant space: the generators in the middle only
/// matter through the positions where they end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Partitioning {
    /// 1-based start of the word inside the first generator.
    pub n_b: u16,
    pub first: u16,
    pub last: u16,
    /// Symbols of the last generator left after the word.
    pub end_len: u16,
    pub gen_count: u32,
    /// Bit `t - 1` is set when a generator ends right after position `t` of the word.
    /// Positions past 128 are not recorded, which only disables a shortcut.
    pub borders: u128,
}

fn border_bit(t: usize) -> u128 {
    if t <= 128 {
        1u128 << (t - 1)
    } else {
        0
    }
}

#[derive(Debug, Clone)]
pub struct WordEntry {
    pub word: Word,
    pub partitionings: Vec<Partitioning>,
    pub strongly_synchronizing: bool,
    pub left_extendable: bool,
    pub right_extendable: bool,
}

/// All allowed words of one length together with their minimal partitionings.
#[derive(Debug, Clone)]
pub struct WordTable {
    pub length: usize,
    pub entries: Vec<WordEntry>,
    index: HashMap<Word, usize>,
}

impl WordTable {
    fn from_map(length: usize, map: HashMap<Word, (Vec<Partitioning>, bool)>) -> Self {
        let mut entries: Vec<WordEntry> = map
            .into_iter()
            .map(|(word, (partitionings, ss))| WordEntry {
                word,
                partitionings,
                strongly_synchronizing: ss,
                left_extendable: ss,
                right_extendable: ss,
            })
            .collect();
        entries.sort_by(|a, b| a.word.cmp(&b.word));
        let index = entries.iter().enumerate().map(|(i, e)| (e.word.clone(), i)).collect();
        WordTable { length, entries, index }
    }

    pub fn get(&self, w: &[Sym]) -> Option<&WordEntry> {
        self.index.get(w).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, w: &[Sym]) -> bool {
        self.index.contains_key(w)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Precomputed facts about a list used by the table construction.
pub struct Engine<'a> {
    list: &'a GeneratingList,
    ends_with: Vec<bool>,
    starts_with: Vec<bool>,
    /// `prefix_star[g][k]`: the first `k` symbols of generator `g` lie in `L*`.
    prefix_star: Vec<Vec<bool>>,
    /// `suffix_star[g][k]`: generator `g` from position `k` on lies in `L*`.
    suffix_star: Vec<Vec<bool>>,
}

impl<'a> Engine<'a> {
    pub fn new(list: &'a GeneratingList) -> Self {
        let k = list.alphabet.len();
        let mut ends_with = vec![false; k];
        let mut starts_with = vec![false; k];
        for w in &list.words {
            ends_with[*w.last().unwrap() as usize] = true;
            starts_with[w[0] as usize] = true;
        }
        let in_star = |s: &[Sym]| {
            let mut ok = vec![false; s.len() + 1];
            ok[0] = true;
            for i in 1..=s.len() {
                ok[i] = list.words.iter().any(|g| g.len() <= i && ok[i - g.len()] && s[i - g.len()..i] == g[..]);
            }
            ok[s.len()]
        };
        let prefix_star = list.words.iter().map(|g| (0..=g.len()).map(|k| in_star(&g[..k])).collect()).collect();
        let suffix_star = list.words.iter().map(|g| (0..=g.len()).map(|k| in_star(&g[k..])).collect()).collect();
        Engine { list, ends_with, starts_with, prefix_star, suffix_star }
    }

    fn gen(&self, g: u16) -> &[Sym] {
        &self.list.words[g as usize]
    }

    pub fn first_table(&self) -> WordTable {
        let mut map: HashMap<Word, (Vec<Partitioning>, bool)> = HashMap::new();
        for (gi, g) in self.list.words.iter().enumerate() {
            for nb in 1..=g.len() {
                let end_len = g.len() - nb;
                let p = Partitioning {
                    n_b: nb as u16,
                    first: gi as u16,
                    last: gi as u16,
                    end_len: end_len as u16,
                    gen_count: 1,
                    borders: if end_len == 0 { border_bit(1) } else { 0 },
                };
                map.entry(vec![g[nb - 1]]).or_default().0.push(p);
            }
        }
        let mut t = WordTable::from_map(1, map);
        self.classify(&mut t, None);
        t
    }

    /// Words of length `l + 1` from those of length `l`.
    pub fn extend(&self, table: &WordTable) -> WordTable {
        let l = table.length;
        let mut map: HashMap<Word, (Vec<Partitioning>, bool)> = HashMap::new();
        for e in &table.entries {
            for p in &e.partitionings {
                let mut push = |sym: Sym, q: Partitioning| {
                    let mut w = e.word.clone();
                    w.push(sym);
                    let slot = map.entry(w).or_default();
                    slot.0.push(q);
                    slot.1 |= e.strongly_synchronizing;
                };
                if p.end_len > 0 {
                    // next symbol lies inside the last generator
                    let g = self.gen(p.last);
                    let mut q = *p;
                    q.end_len -= 1;
                    if q.end_len == 0 {
                        q.borders |= border_bit(l + 1);
                    }
                    push(g[g.len() - p.end_len as usize], q);
                } else {
                    for (gi, g) in self.list.words.iter().enumerate() {
                        let end_len = g.len() - 1;
                        let mut q = *p;
                        q.last = gi as u16;
                        q.end_len = end_len as u16;
                        q.gen_count += 1;
                        if end_len == 0 {
                            q.borders |= border_bit(l + 1);
                        }
                        push(g[0], q);
                    }
                }
            }
        }
        let mut t = WordTable::from_map(l + 1, map);
        self.classify(&mut t, Some(table));
        t
    }

    fn classify(&self, t: &mut WordTable, prev: Option<&WordTable>) {
        for e in t.entries.iter_mut() {
            if !e.strongly_synchronizing {
                // a strongly synchronizing suffix factor also forces it
                if let Some(prev) = prev {
                    if prev.get(&e.word[1..]).is_some_and(|f| f.strongly_synchronizing) {
                        e.strongly_synchronizing = true;
                    }
                }
            }
            if !e.strongly_synchronizing {
                e.strongly_synchronizing = self.has_common_border(&e.partitionings);
            }
            if e.strongly_synchronizing {
                e.left_extendable = true;
                e.right_extendable = true;
            } else {
                e.left_extendable = self.left_extendable(&e.partitionings);
                e.right_extendable = self.right_extendable(&e.partitionings);
            }
        }
    }

    fn has_common_border(&self, parts: &[Partitioning]) -> bool {
        parts.iter().fold(u128::MAX, |acc, p| acc & p.borders) != 0
    }

    /// The end of `p`: the rest of its last generator after the word.
    fn end(&self, p: &Partitioning) -> (u16, &[Sym]) {
        let gw = self.gen(p.last);
        (p.last, &gw[gw.len() - p.end_len as usize..])
    }

    fn beginning(&self, p: &Partitioning) -> (u16, &[Sym]) {
        (p.first, &self.gen(p.first)[..p.n_b as usize - 1])
    }

    /// Symbols `a` such that `a` followed by the word is partitioned by extending `p`.
    fn left_symbols(&self, p: &Partitioning) -> Vec<bool> {
        let mut s = vec![false; self.list.alphabet.len()];
        let (_, b) = self.beginning(p);
        match b.last() {
            Some(&a) => s[a as usize] = true,
            None => s.clone_from(&self.ends_with),
        }
        s
    }

    fn right_symbols(&self, p: &Partitioning) -> Vec<bool> {
        let mut s = vec![false; self.list.alphabet.len()];
        let (_, e) = self.end(p);
        match e.first() {
            Some(&a) => s[a as usize] = true,
            None => s.clone_from(&self.starts_with),
        }
        s
    }

    // Both checks only depend on the end (resp. beginning) of each partitioning, so the
    // partitionings are grouped by that key first.
    fn left_extendable(&self, parts: &[Partitioning]) -> bool {
        let mut groups: HashMap<(u16, usize), Vec<bool>> = HashMap::new();
        for p in parts {
            let (g, e) = self.end(p);
            let s = self.left_symbols(p);
            merge(groups.entry((g, e.len())).or_insert_with(|| vec![false; s.len()]), &s);
        }
        let allowed = union(&groups.values().cloned().collect::<Vec<_>>());
        groups.keys().all(|&(gp, lp)| {
            let gw = self.gen(gp);
            let ep = &gw[gw.len() - lp..];
            let mut ok = vec![false; allowed.len()];
            for (&(gr, lr), s) in &groups {
                let rw = self.gen(gr);
                let er = &rw[rw.len() - lr..];
                // end(p) = end(r) u with u in L*
                if ep.starts_with(er) && self.suffix_star[gp as usize][gw.len() - lp + lr] {
                    merge(&mut ok, s);
                }
            }
            covers(&ok, &allowed)
        })
    }

    fn right_extendable(&self, parts: &[Partitioning]) -> bool {
        let mut groups: HashMap<(u16, usize), Vec<bool>> = HashMap::new();
        for p in parts {
            let s = self.right_symbols(p);
            merge(groups.entry((p.first, p.n_b as usize - 1)).or_insert_with(|| vec![false; s.len()]), &s);
        }
        let allowed = union(&groups.values().cloned().collect::<Vec<_>>());
        groups.keys().all(|&(gp, lp)| {
            let bp = &self.gen(gp)[..lp];
            let mut ok = vec![false; allowed.len()];
            for (&(gr, lr), s) in &groups {
                let br = &self.gen(gr)[..lr];
                // beginning(p) = u beginning(r) with u in L*
                if bp.ends_with(br) && self.prefix_star[gp as usize][lp - lr] {
                    merge(&mut ok, s);
                }
            }
            covers(&ok, &allowed)
        })
    }
}

fn union(sets: &[Vec<bool>]) -> Vec<bool> {
    let mut out = vec![false; sets.first().map_or(0, Vec::len)];
    for s in sets {
        merge(&mut out, s);
    }
    out
}

fn merge(into: &mut [bool], s: &[bool]) {
    for (a, b) in into.iter_mut().zip(s) {
        *a |= *b;
    }
}

fn covers(ok: &[bool], need: &[bool]) -> bool {
    ok.iter().zip(need).all(|(o, n)| *o || !*n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sft { step: usize },
    Inconclusive { max_length: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSummary {
    pub length: usize,
    pub words: usize,
    pub strongly_synchronizing: usize,
    pub left_extendable: usize,
    pub right_extendable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariant {
    pub det: BigInt,
    pub bf: BowenFranksInvariant,
}

#[derive(Debug, Clone)]
pub struct InvestigationResult {
    pub list: GeneratingList,
    pub status: Status,
    pub forbidden: Vec<Word>,
    pub levels: Vec<LevelSummary>,
    pub invariant: Option<Invariant>,
}

impl InvestigationResult {
    pub fn forbidden_strings(&self) -> Vec<String> {
        self.forbidden.iter().map(|w| self.list.render(w)).collect()
    }

    /// Report line: `name: w1 w2 ... ; n ; d ; [d1,...]` for SFTs.
    pub fn line(&self) -> String {
        match (&self.status, &self.invariant) {
            (Status::Sft { step }, Some(inv)) => {
                format!("{} ; {} ; {} ; {}", self.list, step, inv.det, inv.bf.group_string())
            }
            (Status::Inconclusive { max_length }, _) => {
                let mins: Vec<String> = self
                    .levels
                    .iter()
                    .map(|s| s.left_extendable.min(s.right_extendable).to_string())
                    .collect();
                format!("{} ; inconclusive ; {} ; [{}]", self.list, max_length, mins.join(","))
            }
            (Status::Sft { step }, None) => format!("{} ; {}", self.list, step),
        }
    }
}

/// Callback consulted once when the word cap is reached; returning true doubles the budget.
pub type ContinuePrompt<'p> = &'p mut dyn FnMut(&GeneratingList, usize) -> bool;

pub fn detect_sft(list: &GeneratingList, max_words: usize) -> InvestigationResult {
    run(list, max_words, None, false)
}

pub fn investigate(list: &GeneratingList, max_words: usize) -> InvestigationResult {
    run(list, max_words, None, true)
}

pub fn investigate_with_prompt(list: &GeneratingList, max_words: usize, prompt: ContinuePrompt) -> InvestigationResult {
    run(list, max_words, Some(prompt), true)
}

fn summary(t: &WordTable) -> LevelSummary {
    LevelSummary {
        length: t.length,
        words: t.len(),
        strongly_synchronizing: t.entries.iter().filter(|e| e.strongly_synchronizing).count(),
        left_extendable: t.entries.iter().filter(|e| e.left_extendable).count(),
        right_extendable: t.entries.iter().filter(|e| e.right_extendable).count(),
    }
}

fn run(list: &GeneratingList, max_words: usize, mut prompt: Option<ContinuePrompt>, with_invariant: bool) -> InvestigationResult {
    let engine = Engine::new(list);
    let mut table = engine.first_table();
    let mut words: Vec<Vec<Word>> = Vec::new();
    let mut levels = Vec::new();
    let mut cumulative = 0;
    let mut budget = max_words;
    loop {
        cumulative += table.len();
        levels.push(summary(&table));
        words.push(table.entries.iter().map(|e| e.word.clone()).collect());
        let n = table.length;
        if table.entries.iter().all(|e| e.left_extendable) || table.entries.iter().all(|e| e.right_extendable) {
            let next = engine.extend(&table);
            words.push(next.entries.iter().map(|e| e.word.clone()).collect());
            let forbidden = forbidden_words(list, &words);
            let invariant = with_invariant.then(|| {
                let m = amalgamation_reduce(&block_matrix(&words[n - 1], &words[n]));
                let (det, bf) = bowen_franks_with_det(&m);
                Invariant { det, bf }
            });
            return InvestigationResult { list: list.clone(), status: Status::Sft { step: n }, forbidden, levels, invariant };
        }
        if cumulative > budget {
            let more = prompt.take().is_some_and(|p| p(list, n));
            if !more {
                let forbidden = forbidden_words(list, &words);
                return InvestigationResult {
                    list: list.clone(),
                    status: Status::Inconclusive { max_length: n },
                    forbidden,
                    levels,
                    invariant: None,
                };
            }
            budget += max_words;
        }
        table = engine.extend(&table);
    }
}

/// Minimal forbidden words: absent, while both maximal proper factors are allowed.
fn forbidden_words(list: &GeneratingList, words: &[Vec<Word>]) -> Vec<Word> {
    let k = list.alphabet.len() as Sym;
    let mut out = Vec::new();
    for m in 2..=words.len() {
        let shorter: HashSet<&Word> = words[m - 2].iter().collect();
        let here: HashSet<&Word> = words[m - 1].iter().collect();
        for u in &words[m - 2] {
            for a in 0..k {
                let mut w = u.clone();
                w.push(a);
                if !here.contains(&w) && shorter.contains(&w[1..].to_vec()) {
                    out.push(w);
                }
            }
        }
    }
    out
}

/// Edge-count matrix of the higher block presentation on `B_n` with edges `B_{n+1}`.
fn block_matrix(vertices: &[Word], edges: &[Word]) -> SparseIntMatrix {
    let index: HashMap<&[Sym], usize> = vertices.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut m = SparseIntMatrix::zeros(vertices.len(), vertices.len());
    let one = BigInt::from(1);
    for w in edges {
        let s = index[&w[..w.len() - 1]];
        let d = index[&w[1..]];
        m.add_to(s, d, &one);
    }
    m
}

/// Word tables for lengths `1..=max_len`.
pub fn word_tables(list: &GeneratingList, max_len: usize) -> Vec<WordTable> {
    let engine = Engine::new(list);
    let mut tables = vec![engine.first_table()];
    while tables.len() < max_len {
        let next = engine.extend(tables.last().unwrap());
        tables.push(next);
    }
    tables
}

/// Higher block presentation of step `n`: vertices `B_n`, edges `B_{n+1}` labelled by their
/// last symbol.
pub fn higher_block_shift(list: &GeneratingList, n: usize) -> LabelledGraph {
    let tables = word_tables(list, n + 1);
    let mut g = LabelledGraph::new();
    let mut index = HashMap::new();
    for e in &tables[n - 1].entries {
        index.insert(e.word.clone(), g.add_vertex(list.render(&e.word)));
    }
    for e in &tables[n].entries {
        let w = &e.word;
        let last = &list.alphabet[*w.last().unwrap() as usize];
        g.add_edge(index[&w[..n]], last, index[&w[1..]]);
    }
    g
}

/// Words of length at most `bound` all of whose minimal partitionings use one generator.
pub fn internal_words(list: &GeneratingList, bound: usize) -> Vec<Word> {
    word_tables(list, bound)
        .into_iter()
        .flat_map(|t| t.entries)
        .filter(|e| e.partitionings.iter().all(|p| p.gen_count == 1))
        .map(|e| e.word)
        .collect()
}

/// Renames symbols to `a, b, c, ...` in order of first use and sorts by length, then
/// lexicographically.
pub fn canonical_form(list: &GeneratingList) -> GeneratingList {
    let mut order: Vec<Sym> = Vec::new();
    let mut sorted = list.words.clone();
    sorted.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    for w in &sorted {
        for &s in w {
            if !order.contains(&s) {
                order.push(s);
            }
        }
    }
    let names = letter_names(order.len());
    let rename: HashMap<Sym, &str> = order.iter().zip(&names).map(|(&s, n)| (s, n.as_str())).collect();
    let words: Vec<Vec<String>> = sorted.iter().map(|w| w.iter().map(|s| rename[s].to_string()).collect()).collect();
    let mut out = GeneratingList::from_symbols(list.name.clone(), words).expect("renaming keeps the list valid");
    out.words.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

fn letter_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            let c = (b'a' + (i % 26) as u8) as char;
            if i < 26 {
                c.to_string()
            } else {
                format!("{c}_{}", i / 26)
            }
        })
        .collect()
}

/// Replaces maximal internal words by fresh symbols until only single symbols are internal.
pub fn reduce_irreducible(list: &GeneratingList) -> GeneratingList {
    let mut cur = list.clone();
    let mut fresh = 0;
    loop {
        let internal = internal_words(&cur, cur.max_len());
        let Some(max) = internal.iter().map(Vec::len).max().filter(|&m| m >= 2) else { break };
        let target = internal
            .iter()
            .filter(|w| w.len() == max)
            .min_by_key(|w| w.iter().map(|&s| cur.alphabet[s as usize].clone()).collect::<Vec<_>>())
            .unwrap()
            .clone();
        let name = loop {
            let n = format!("#{fresh}");
            fresh += 1;
            if !cur.alphabet.contains(&n) {
                break n;
            }
        };
        let words: Vec<Vec<String>> = cur
            .words
            .iter()
            .map(|w| {
                let mut out = Vec::new();
                let mut i = 0;
                while i < w.len() {
                    if w[i..].starts_with(&target) {
                        out.push(name.clone());
                        i += target.len();
                    } else {
                        out.push(cur.alphabet[w[i] as usize].clone());
                        i += 1;
                    }
                }
                out
            })
            .collect();
        let mut seen = HashSet::new();
        let words: Vec<Vec<String>> = words.into_iter().filter(|w| seen.insert(w.clone())).collect();
        cur = GeneratingList::from_symbols(cur.name.clone(), words).expect("replacement keeps the list valid");
    }
    canonical_form(&cur)
}

/// Union of two lists with the second alphabet primed when the alphabets meet.
pub fn add_lists(l1: &GeneratingList, l2: &GeneratingList) -> GeneratingList {
    let mut w2 = l2.symbol_words();
    while w2.iter().flatten().any(|s| l1.alphabet.contains(s)) {
        for w in w2.iter_mut() {
            for s in w.iter_mut() {
                s.push('\'');
            }
        }
    }
    let mut words = l1.symbol_words();
    words.extend(w2);
    GeneratingList::from_symbols(format!("{}+{}", l1.name, l2.name), words).expect("disjoint union is valid")
}

/// Replaces symbol `a` by `a_1, ..., a_k` in every possible way.
pub fn fragment(list: &GeneratingList, a: &str, k: usize) -> Result<GeneratingList> {
    if k == 0 {
        return Err(Error::Invalid("fragment count must be positive".into()));
    }
    if !list.alphabet.iter().any(|s| s == a) {
        return Err(Error::UnknownSymbol(a.to_string()));
    }
    if k == 1 {
        return Ok(list.clone());
    }
    let parts: Vec<String> = (1..=k).map(|i| format!("{a}_{i}")).collect();
    if let Some(p) = parts.iter().find(|p| list.alphabet.contains(p)) {
        return Err(Error::SymbolPresent(p.clone()));
    }
    let mut words = Vec::new();
    for w in list.symbol_words() {
        let mut acc: Vec<Vec<String>> = vec![Vec::new()];
        for s in &w {
            if s == a {
                acc = acc
                    .into_iter()
                    .flat_map(|pre| {
                        parts.iter().map(move |p| {
                            let mut v = pre.clone();
                            v.push(p.clone());
                            v
                        })
                    })
                    .collect();
            } else {
                for v in acc.iter_mut() {
                    v.push(s.clone());
                }
            }
        }
        words.extend(acc);
    }
    GeneratingList::from_symbols(list.name.clone(), words)
}

/// The symmetric list for exponents `n_1, .., n_k`. With three or more
/// letters and some `n_i = 2` its shift forbids more than the powers `a_i^{n_i}`.
pub fn symmetric_system(ns: &[usize]) -> Result<GeneratingList> {
    let k = ns.len();
    if !(2..=26).contains(&k) {
        return Err(Error::Invalid("need between 2 and 26 exponents".into()));
    }
    if ns.iter().any(|&n| n < 2) || ns.iter().all(|&n| n <= 2) {
        return Err(Error::Invalid("exponents must be at least 2 with one above 2".into()));
    }
    let letters = letter_names(k);
    let mut words: BTreeSet<Vec<String>> = BTreeSet::new();
    for i in 0..k {
        for l in 1..ns[i].saturating_sub(1) {
            let tail = vec![letters[i].clone(); l];
            for j in (0..k).filter(|&j| j != i) {
                let mut w = vec![letters[j].clone()];
                w.extend(tail.clone());
                words.insert(w);
                for m in (0..k).filter(|&m| m != j) {
                    let mut w = vec![letters[m].clone(), letters[j].clone()];
                    w.extend(tail.clone());
                    words.insert(w);
                }
            }
        }
    }
    let mut words: Vec<Vec<String>> = words.into_iter().collect();
    words.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    let name = format!("X({})", ns.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
    GeneratingList::from_symbols(name, words)
}

/// Central vertex `c` with one cycle through it per generator.
pub fn standard_loop_graph(list: &GeneratingList) -> LabelledGraph {
    let mut g = LabelledGraph::new();
    let c = g.add_vertex("c");
    for (i, w) in list.symbol_words().iter().enumerate() {
        let mut prev = c;
        for (j, s) in w.iter().enumerate() {
            let next = if j + 1 == w.len() { c } else { g.add_vertex(format!("w{}.{}", i, j + 1)) };
            g.add_edge(prev, s, next);
            prev = next;
        }
    }
    g
}

pub fn fischer_cover_of_list(list: &GeneratingList) -> Result<LabelledGraph> {
    fischer_cover_left(&standard_loop_graph(list))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderPoint {
    pub vertex: usize,
    /// Shortest (then least) word of `L*` whose source set is exactly this vertex.
    pub generator: Vec<String>,
    pub universal: bool,
}

pub fn default_gen_bound(list: &GeneratingList, fischer: &LabelledGraph) -> usize {
    2 * fischer.vertex_count() * list.max_len()
}

/// Border points of the left Fischer cover of `X(L)`, found by searching `L*` up to
/// `gen_bound` symbols.
pub fn border_points(list: &GeneratingList, fischer: &LabelledGraph, gen_bound: usize) -> Vec<BorderPoint> {
    let table = fischer.predecessor_table();
    let gens: Vec<Vec<Option<usize>>> = list
        .symbol_words()
        .iter()
        .map(|w| w.iter().map(|s| fischer.alphabet().index_of(s)).collect())
        .collect();
    let apply = |w: &[Option<usize>], s: &VertexSet| {
        let mut cur = s.clone();
        for a in w.iter().rev() {
            cur = match a {
                Some(a) => fischer.step_back(&table, *a, &cur),
                None => fischer.empty_set(),
            };
        }
        cur
    };
    let symbols = list.symbol_words();
    let mut seen: HashSet<VertexSet> = HashSet::new();
    let mut heap = BinaryHeap::new();
    let start = fischer.full_set();
    for (g, sym) in gens.iter().zip(&symbols) {
        let next = apply(g, &start);
        if g.len() <= gen_bound && !next.is_clear() {
            heap.push(Reverse((g.len(), sym.clone(), next.ones().collect::<Vec<_>>())));
        }
    }
    let mut found: HashMap<usize, Vec<String>> = HashMap::new();
    while let Some(Reverse((len, word, set))) = heap.pop() {
        let s = fischer.set_of(&set);
        if !seen.insert(s.clone()) {
            continue;
        }
        if set.len() == 1 {
            found.entry(set[0]).or_insert_with(|| word.clone());
        }
        for (g, sym) in gens.iter().zip(&symbols) {
            if len + g.len() > gen_bound {
                continue;
            }
            let next = apply(g, &s);
            if next.is_clear() || seen.contains(&next) {
                continue;
            }
            let mut w = sym.clone();
            w.extend(word.iter().cloned());
            heap.push(Reverse((len + g.len(), w, next.ones().collect())));
        }
    }
    let loop_graph = standard_loop_graph(list);
    let centre = loop_graph.set_of(&[0]);
    let mut out: Vec<BorderPoint> = found
        .into_iter()
        .map(|(v, generator)| BorderPoint {
            vertex: v,
            generator,
            universal: languages_related(fischer, &fischer.set_of(&[v]), &loop_graph, &centre, Relation::Equal),
        })
        .collect();
    out.sort_by_key(|b| b.vertex);
    out
}

/// Left Fischer cover of `X(L1 ∪ L2)` assembled from the covers of two left-modular lists.
pub fn modular_sum_fischer(
    f1: &LabelledGraph,
    b1: &[BorderPoint],
    f2: &LabelledGraph,
    b2: &[BorderPoint],
) -> Result<LabelledGraph> {
    let u1 = b1.iter().find(|b| b.universal).ok_or(Error::Invalid("first cover has no universal border point".into()))?.vertex;
    let u2 = b2.iter().find(|b| b.universal).ok_or(Error::Invalid("second cover has no universal border point".into()))?.vertex;
    if let Some(s) = f1.alphabet().symbols().iter().find(|s| f2.alphabet().index_of(s).is_some()) {
        return Err(Error::Invalid(format!("symbol `{s}` occurs in both covers")));
    }
    let mut g = LabelledGraph::new();
    let plus = g.add_vertex("P+");
    let mut map1 = vec![plus; f1.vertex_count()];
    let mut map2 = vec![plus; f2.vertex_count()];
    for (v, m) in map1.iter_mut().enumerate() {
        if v != u1 {
            let name = unique_name(&g, &format!("1.{}", f1.name(v)));
            *m = g.add_vertex(name);
        }
    }
    for (v, m) in map2.iter_mut().enumerate() {
        if v != u2 {
            let name = unique_name(&g, &format!("2.{}", f2.name(v)));
            *m = g.add_vertex(name);
        }
    }
    let others1: Vec<usize> = b1.iter().filter(|b| !b.universal).map(|b| map1[b.vertex]).collect();
    let others2: Vec<usize> = b2.iter().filter(|b| !b.universal).map(|b| map2[b.vertex]).collect();
    for (f, map, u, others) in [(f1, &map1, u1, &others2), (f2, &map2, u2, &others1)] {
        for e in f.edges() {
            g.add_edge(map[e.src], f.label(e), map[e.dst]);
            if e.dst == u {
                for &o in others {
                    g.add_edge(map[e.src], f.label(e), o);
                }
            }
        }
    }
    Ok(g)
}

/// Reduced class R list: `α, α̃, αγ₂⋯γ_rβ, βα̃γ₂⋯γ_r` and the `γ_k`, written with
/// `a = α`, `b = α̃`, `c = β` and `d, e, ...` for the `γ_k`.
pub fn class_r_list(r: usize) -> Result<GeneratingList> {
    if !(2..=23).contains(&r) {
        return Err(Error::Invalid("class R needs 2 <= r <= 23".into()));
    }
    let gammas: Vec<String> = (0..r - 1).map(|i| ((b'd' + i as u8) as char).to_string()).collect();
    let s = |x: &str| x.to_string();
    let mut words = vec![vec![s("a")], vec![s("b")]];
    let mut w = vec![s("a")];
    w.extend(gammas.iter().cloned());
    w.push(s("c"));
    words.push(w);
    let mut w = vec![s("c"), s("b")];
    w.extend(gammas.iter().cloned());
    words.push(w);
    words.extend(gammas.iter().map(|g| vec![g.clone()]));
    GeneratingList::from_symbols(format!("R{r}"), words)
}

/// Closed-form determinant for a class R list whose symbols were fragmented into the
/// given numbers of copies; `gammas` holds the counts for `γ₂, ..., γ_r`.
pub fn class_r_det(alpha: i64, alpha_t: i64, beta: i64, gammas: &[i64]) -> BigInt {
    let (a, at, b) = (BigInt::from(alpha), BigInt::from(alpha_t), BigInt::from(beta));
    let prod: BigInt = gammas.iter().map(|&g| BigInt::from(g)).product();
    let sum: BigInt = gammas.iter().map(|&g| BigInt::from(g)).sum();
    BigInt::from(1) - &a - &at - sum - (&a + &at) * &b * &prod + a * at * b * &prod * &prod
}
