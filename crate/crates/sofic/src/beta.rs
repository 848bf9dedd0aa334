//! Sofic beta-shifts given by an eventually periodic generating sequence.

use std::cmp::Ordering;
use std::fmt;

use crate::covers::{fiber_product_cover as generic_fiber_cover, krieger_cover_left};
use crate::error::{Error, Result};
use crate::graph::{graph_isomorphic, LabelledGraph};
use crate::invariants::{BowenFranksInvariant, Sign};

/// `pre (period)^∞`, kept with the shortest pre-period and period.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BetaSequence {
    pre: Vec<u32>,
    period: Vec<u32>,
}

impl BetaSequence {
    /// Normalizes and checks the lexicographic condition: every shift is at most the
    /// sequence itself, with equality only for whole periods of a periodic sequence.
    pub fn new(pre: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Invalid("period must be nonempty".into()));
        }
        if period.iter().all(|&d| d == 0) {
            return Err(Error::Invalid("period must contain a nonzero digit".into()));
        }
        let s = normalize(pre, period);
        s.check_parry()?;
        Ok(s)
    }

    /// Parses `PRE:PERIOD`. Digits are single characters unless separated by spaces or
    /// commas.
    pub fn parse(text: &str) -> Result<Self> {
        let (pre, period) = text.split_once(':').unwrap_or(("", text));
        Self::new(parse_digits(pre)?, parse_digits(period)?)
    }

    pub fn pre(&self) -> &[u32] {
        &self.pre
    }

    pub fn period(&self) -> &[u32] {
        &self.period
    }

    pub fn n(&self) -> usize {
        self.pre.len()
    }

    pub fn p(&self) -> usize {
        self.period.len()
    }

    /// Digit `i` of the infinite sequence, 0-based.
    pub fn digit(&self, i: usize) -> u32 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Vec<u32> {
        (0..len).map(|i| self.digit(i)).collect()
    }

    pub fn is_periodic(&self) -> bool {
        self.pre.is_empty()
    }

    pub fn is_sft(&self) -> bool {
        self.is_periodic()
    }

    /// How many presentations the worst bi-infinite sequence has in the Fischer cover.
    pub fn covering_multiplicity(&self) -> usize {
        if self.is_periodic() {
            1
        } else {
            2
        }
    }

    pub fn invariant_s(&self) -> u64 {
        self.period.iter().map(|&d| d as u64).sum()
    }

    pub fn is_binary(&self) -> bool {
        self.pre.iter().chain(&self.period).all(|&d| d <= 1)
    }

    /// Length of the initial block of ones.
    pub fn leading_ones(&self) -> usize {
        (0..).take_while(|&i| i < self.n() + self.p() && self.digit(i) == 1).count()
    }

    fn check_parry(&self) -> Result<()> {
        let (n, p) = (self.n(), self.p());
        if n == 0 && p == 1 {
            return Err(Error::Invalid(format!("{self} is constant")));
        }
        let window = n + 2 * p;
        let head = self.prefix(window);
        for k in 1..n + p {
            let shifted: Vec<u32> = (k..k + window).map(|i| self.digit(i)).collect();
            match shifted.cmp(&head) {
                Ordering::Greater => return Err(Error::Invalid(format!("{self}: shift by {k} is larger"))),
                Ordering::Equal if !(n == 0 && k % p == 0) => {
                    return Err(Error::Invalid(format!("{self}: shift by {k} is not smaller")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn parse_digits(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    let parts: Vec<&str> = if s.contains([' ', ',']) {
        s.split([' ', ',']).filter(|t| !t.is_empty()).collect()
    } else {
        s.split("").filter(|t| !t.is_empty()).collect()
    };
    parts
        .iter()
        .map(|t| t.parse::<u32>().map_err(|_| Error::Invalid(format!("bad digit `{t}`"))))
        .collect()
}

fn normalize(mut pre: Vec<u32>, mut period: Vec<u32>) -> BetaSequence {
    let p = period.len();
    if let Some(root) = (1..=p).find(|&d| p.is_multiple_of(d) && (d..p).all(|i| period[i] == period[i - d])) {
        period.truncate(root);
    }
    while pre.last().is_some_and(|d| Some(d) == period.last()) {
        pre.pop();
        period.rotate_right(1);
    }
    BetaSequence { pre, period }
}

impl fmt::Display for BetaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.pre.iter().chain(&self.period).any(|&d| d > 9);
        let join = |ds: &[u32]| {
            let v: Vec<String> = ds.iter().map(ToString::to_string).collect();
            v.join(if wide { "," } else { "" })
        };
        write!(f, "{}({})^∞", join(&self.pre), join(&self.period))
    }
}

/// Vertices `v1..v{n+p}`; `v_i` has edges `0..g_i` to `v1` and a `g_i` edge onwards.
pub fn right_fischer_cover(s: &BetaSequence) -> LabelledGraph {
    let m = s.n() + s.p();
    let mut g = LabelledGraph::new();
    for i in 1..=m {
        g.add_vertex(format!("v{i}"));
    }
    for i in 0..m {
        let d = s.digit(i);
        for a in 0..d {
            g.add_edge(i, &a.to_string(), 0);
        }
        let next = if i + 1 == m { s.n() } else { i + 1 };
        g.add_edge(i, &d.to_string(), next);
    }
    g
}

pub fn bf_fischer(s: &BetaSequence) -> BowenFranksInvariant {
    let sum = s.invariant_s() as i64;
    let divisors: Vec<i64> = if sum == 1 { vec![] } else { vec![sum] };
    BowenFranksInvariant::new(Sign::Negative, &divisors)
}

pub fn bf_fiber(s: &BetaSequence) -> BowenFranksInvariant {
    let sum = s.invariant_s() as i64;
    let divisors: Vec<i64> = if sum == 1 { vec![0, 0] } else { vec![sum, 0, 0] };
    BowenFranksInvariant::new(Sign::Zero, &divisors)
}

/// Right Krieger cover, obtained as the mirror image of the left one, compared with the
/// right Fischer cover.
pub fn krieger_equals_fischer_check(s: &BetaSequence) -> Result<bool> {
    let f = right_fischer_cover(s);
    let k = krieger_cover_left(&f.transpose())?;
    Ok(graph_isomorphic(&k.graph.transpose(), &f).is_some())
}

/// Fiber product cover built directly: the diagonal copy of the Fischer cover plus the
/// two off-diagonal cycles reading the period.
pub fn fiber_product_cover(s: &BetaSequence) -> Result<LabelledGraph> {
    if s.is_periodic() {
        return Err(Error::Invalid("fiber product cover needs a strictly sofic beta-shift".into()));
    }
    let f = right_fischer_cover(s);
    let m = f.vertex_count();
    let step = |v: usize, a: u32| {
        let label = a.to_string();
        f.edges().iter().find(|e| e.src == v && f.label(e) == label).map(|e| e.dst)
    };
    let run = |v: usize, w: &[u32]| w.iter().try_fold(v, |v, &a| step(v, a));
    // vertices where the period can be read around a loop; exactly two of them
    let starts: Vec<usize> = (0..m).filter(|&v| run(v, s.period()) == Some(v)).collect();
    let [u, w] = starts[..] else {
        return Err(Error::Invalid(format!("expected two period loops, found {}", starts.len())));
    };
    let cycle = |mut v: usize| {
        let mut out = vec![v];
        for &a in &s.period()[..s.p() - 1] {
            v = step(v, a).expect("period readable");
            out.push(v);
        }
        out
    };
    let (cu, cw) = (cycle(u), cycle(w));

    let mut g = LabelledGraph::new();
    for v in 0..m {
        g.add_vertex(format!("({},{})", f.name(v), f.name(v)));
    }
    for e in f.edges() {
        g.add_edge(e.src, f.label(e), e.dst);
    }
    for (x, y) in [(&cu, &cw), (&cw, &cu)] {
        let base = g.vertex_count();
        for i in 0..s.p() {
            g.add_vertex(format!("({},{})", f.name(x[i]), f.name(y[i])));
        }
        for (i, &d) in s.period().iter().enumerate() {
            for a in 0..d {
                g.add_edge(base + i, &a.to_string(), 0);
            }
            g.add_edge(base + i, &d.to_string(), base + (i + 1) % s.p());
        }
    }
    Ok(g)
}

/// The same cover computed generically from the fiber product of the Fischer cover.
pub fn fiber_product_cover_generic(s: &BetaSequence) -> LabelledGraph {
    generic_fiber_cover(&right_fischer_cover(s))
}

/// The involution `(x,y) -> (y,x)` on a fiber product cover, by vertex name.
pub fn fiber_swap(g: &LabelledGraph) -> Vec<usize> {
    (0..g.vertex_count())
        .map(|v| {
            let name = g.name(v);
            let inner = name.trim_start_matches('(').trim_end_matches(')');
            match inner.split_once(',') {
                Some((a, b)) => g.vertex_index(&format!("({b},{a})")).unwrap_or(v),
                None => v,
            }
        })
        .collect()
}

/// Replaces each digit `j` by `1^j 0`.
pub fn to_binary(s: &BetaSequence) -> Result<BetaSequence> {
    let phi = |ds: &[u32]| {
        ds.iter()
            .flat_map(|&j| std::iter::repeat_n(1, j as usize).chain(std::iter::once(0)))
            .collect::<Vec<u32>>()
    };
    BetaSequence::new(phi(&s.pre), phi(&s.period))
}

/// Runs a finite-state rewrite over the infinite sequence and reads off the eventually
/// periodic output. `f(state, digit, out)` returns the next state.
fn rewrite(s: &BetaSequence, init: usize, f: impl Fn(usize, u32, &mut Vec<u32>) -> usize) -> Result<BetaSequence> {
    let mut out = Vec::new();
    let mut state = init;
    for &d in &s.pre {
        state = f(state, d, &mut out);
    }
    let mut seen: Vec<(usize, usize)> = Vec::new();
    loop {
        if let Some(&(_, at)) = seen.iter().find(|(st, _)| *st == state) {
            let period = out.split_off(at);
            return BetaSequence::new(out, period);
        }
        seen.push((state, out.len()));
        for &d in &s.period {
            state = f(state, d, &mut out);
        }
    }
}

fn check_move(s: &BetaSequence) -> Result<usize> {
    if !s.is_binary() {
        return Err(Error::Invalid("flow moves need a binary sequence".into()));
    }
    if s.is_periodic() {
        return Err(Error::Invalid("flow moves need an aperiodic sequence".into()));
    }
    Ok(s.leading_ones())
}

/// Deletes the 0 after each occurrence of `1^n`, where `1^n` is the initial run of ones.
pub fn delete_zero_move(s: &BetaSequence) -> Result<BetaSequence> {
    let n = check_move(s)?;
    let out = rewrite(s, 0, |run, d, out| {
        if d == 1 {
            out.push(1);
            run + 1
        } else {
            if run != n {
                out.push(0);
            }
            0
        }
    })?;
    debug_assert_eq!(out.invariant_s(), s.invariant_s());
    Ok(out)
}

/// Inserts a 0 after the initial `1^k` and after each later `01^k`; needs `n/2 < k <= n`.
pub fn insert_zero_move(s: &BetaSequence, k: usize) -> Result<BetaSequence> {
    let n = check_move(s)?;
    if 2 * k <= n || k > n {
        return Err(Error::Invalid(format!("insert needs {} < k <= {n}, got {k}", n / 2)));
    }
    // state: ones since the last 0, capped at k + 1
    let out = rewrite(s, 0, |run, d, out| {
        out.push(d);
        if d == 0 {
            return 0;
        }
        let run = (run + 1).min(k + 1);
        if run == k {
            out.push(0);
        }
        run
    })?;
    debug_assert_eq!(out.invariant_s(), s.invariant_s());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    Delete,
    Insert(usize),
}

/// Greedy reduction: a move is taken only if it shrinks (pre-period, period)
/// lexicographically; deletion is tried first, then insertion with the largest `k`.
pub fn standard_form_steps(s: &BetaSequence) -> Result<Vec<(Move, BetaSequence)>> {
    let s = if s.is_binary() { s.clone() } else { to_binary(s)? };
    let mut cur = s;
    let mut steps = Vec::new();
    let measure = |b: &BetaSequence| (b.n(), b.p());
    while !cur.is_periodic() {
        let n = cur.leading_ones();
        let mut next = None;
        let d = delete_zero_move(&cur)?;
        if measure(&d) < measure(&cur) {
            next = Some((Move::Delete, d));
        } else {
            for k in (n / 2 + 1..=n).rev() {
                let c = insert_zero_move(&cur, k)?;
                if measure(&c) < measure(&cur) {
                    next = Some((Move::Insert(k), c));
                    break;
                }
            }
        }
        match next {
            Some((m, b)) => {
                cur = b.clone();
                steps.push((m, b));
            }
            None => break,
        }
    }
    Ok(steps)
}

pub fn standard_form(s: &BetaSequence) -> Result<BetaSequence> {
    let steps = standard_form_steps(s)?;
    match steps.last() {
        Some((_, b)) => Ok(b.clone()),
        None if s.is_binary() => Ok(s.clone()),
        None => to_binary(s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowVerdict {
    Equivalent,
    EquivalentAssumingConjecture,
    NotEquivalent,
    Unknown,
}

impl fmt::Display for FlowVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlowVerdict::Equivalent => "equivalent",
            FlowVerdict::EquivalentAssumingConjecture => "equivalent_assuming_conjecture",
            FlowVerdict::NotEquivalent => "not_equivalent",
            FlowVerdict::Unknown => "unknown",
        })
    }
}

pub fn classify_flow(s1: &BetaSequence, s2: &BetaSequence) -> FlowVerdict {
    let same = s1.invariant_s() == s2.invariant_s();
    match (s1.is_sft(), s2.is_sft(), same) {
        (true, true, true) => FlowVerdict::Equivalent,
        (false, false, true) => FlowVerdict::EquivalentAssumingConjecture,
        _ => FlowVerdict::NotEquivalent,
    }
}
