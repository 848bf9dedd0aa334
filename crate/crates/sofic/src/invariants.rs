//! Exact integer matrices and the flow-equivalence invariants computed from them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::LabelledGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_dense<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, v.clone().into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &BigInt) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &BigInt)> {
        self.entries.iter()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (&(r, c), v) in &self.entries {
            d[r][c] = v.clone();
        }
        d
    }

    /// `I − self`.
    pub fn identity_minus(&self) -> Self {
        assert!(self.is_square(), "identity_minus needs a square matrix");
        let mut m = Self::zeros(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            m.set(r, c, -v);
        }
        for i in 0..self.rows {
            m.add_to(i, i, &BigInt::one());
        }
        m
    }

    /// Simultaneous row/column permutation: entry `(i, j)` moves to `(p[i], p[j])`.
    pub fn permuted(&self, p: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            m.set(p[r], p[c], v.clone());
        }
        m
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let (ln, header) = lines.next().ok_or(parse_err(1, "missing `rows cols` header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(ln, "bad dimensions"))?;
        let [rows, cols] = dims[..] else { return Err(parse_err(ln, "expected `rows cols`")) };
        let mut m = Self::zeros(rows, cols);
        for (ln, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(parse_err(ln, "expected `r c value`"));
            }
            let r: usize = parts[0].parse().map_err(|_| parse_err(ln, "bad row"))?;
            let c: usize = parts[1].parse().map_err(|_| parse_err(ln, "bad column"))?;
            let v: BigInt = parts[2].parse().map_err(|_| parse_err(ln, "bad value"))?;
            if r >= rows || c >= cols {
                return Err(parse_err(ln, "index out of range"));
            }
            m.set(r, c, v);
        }
        Ok(m)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            s.push_str(&format!("{r} {c} {v}\n"));
        }
        s
    }
}

/// Edge-count matrix, labels ignored.
pub fn adjacency_matrix(g: &LabelledGraph) -> SparseIntMatrix {
    let n = g.vertex_count();
    let mut m = SparseIntMatrix::zeros(n, n);
    for e in g.edges() {
        m.add_to(e.src, e.dst, &BigInt::one());
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), Vec<String>>,
}

impl SymbolicMatrix {
    pub fn new(dim: usize) -> Self {
        SymbolicMatrix { dim, entries: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn push(&mut self, r: usize, c: usize, symbol: &str) {
        let e = self.entries.entry((r, c)).or_default();
        e.push(symbol.to_string());
        e.sort();
    }

    /// The labels at `(r, c)`, sorted.
    pub fn get(&self, r: usize, c: usize) -> &[String] {
        self.entries.get(&(r, c)).map_or(&[], Vec::as_slice)
    }

    /// Replaces every symbol by an integer weight and sums each entry.
    pub fn evaluate(&self, weight: impl Fn(&str) -> BigInt) -> SparseIntMatrix {
        let mut m = SparseIntMatrix::zeros(self.dim, self.dim);
        for (&(r, c), syms) in &self.entries {
            let v: BigInt = syms.iter().map(|s| weight(s)).sum();
            m.set(r, c, v);
        }
        m
    }
}

pub fn symbolic_adjacency(g: &LabelledGraph) -> SymbolicMatrix {
    let mut m = SymbolicMatrix::new(g.vertex_count());
    for e in g.edges() {
        m.push(e.src, e.dst, g.label(e));
    }
    m
}

/// Merges states with identical rows until no two rows agree.
pub fn amalgamation_reduce(m: &SparseIntMatrix) -> SparseIntMatrix {
    assert!(m.is_square(), "amalgamation needs a square matrix");
    let mut cur = m.clone();
    loop {
        let n = cur.rows;
        let mut rows: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); n];
        for (&(r, c), v) in &cur.entries {
            rows[r].push((c, v.clone()));
        }
        let mut group_of = vec![0usize; n];
        let mut reps: Vec<usize> = Vec::new();
        let mut seen: HashMap<&[(usize, BigInt)], usize> = HashMap::new();
        for (r, row) in rows.iter().enumerate() {
            let g = *seen.entry(row.as_slice()).or_insert_with(|| {
                reps.push(r);
                reps.len() - 1
            });
            group_of[r] = g;
        }
        if reps.len() == n {
            return cur;
        }
        let mut next = SparseIntMatrix::zeros(reps.len(), reps.len());
        for (g, &r) in reps.iter().enumerate() {
            for (c, v) in &rows[r] {
                next.add_to(g, group_of[*c], v);
            }
        }
        cur = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub divisors: Vec<BigInt>,
}

pub fn smith_normal_form(m: &SparseIntMatrix) -> SmithForm {
    let mut a = m.to_dense();
    let (rows, cols) = (m.rows, m.cols);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = smallest_entry(&a, t, t..rows, t..cols) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    let (top, low) = a.split_at_mut(i);
                    for j in t..cols {
                        low[0][j] -= &q * &top[t][j];
                    }
                    dirty |= !a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                    dirty |= !a[t][j].is_zero();
                }
            }
            if !dirty {
                break;
            }
            // a remainder survived, move the smallest one onto the pivot
            let best = (t..rows)
                .map(|i| (i, t))
                .chain((t..cols).map(|j| (t, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()))
                .expect("pivot is nonzero");
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs());
    }
    diag.resize(rows.min(cols), BigInt::zero());
    normalize_chain(&mut diag);
    SmithForm { divisors: diag }
}

fn smallest_entry(
    a: &[Vec<BigInt>],
    _t: usize,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if a[i][j].is_zero() {
                continue;
            }
            if best.is_none_or(|(k, l)| a[i][j].abs() < a[k][l].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Turns a diagonal into a divisibility chain by replacing pairs with (gcd, lcm).
fn normalize_chain(d: &mut [BigInt]) {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let (x, y) = (&d[i], &d[j]);
            let g = x.gcd(y);
            let l = if g.is_zero() { BigInt::zero() } else { (x * y).abs() / &g };
            d[i] = g;
            d[j] = l;
        }
    }
}

/// Fraction-free Bareiss elimination.
pub fn determinant(m: &SparseIntMatrix) -> BigInt {
    assert!(m.is_square(), "determinant needs a square matrix");
    let n = m.rows;
    let mut a = m.to_dense();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: &BigInt) -> Sign {
        if v.is_negative() {
            Sign::Negative
        } else if v.is_zero() {
            Sign::Zero
        } else {
            Sign::Positive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BowenFranksInvariant {
    pub sign: Sign,
    /// Nontrivial divisors of the cokernel; 0 stands for a free summand.
    pub divisors: Vec<BigInt>,
}

impl BowenFranksInvariant {
    pub fn new(sign: Sign, divisors: &[i64]) -> Self {
        BowenFranksInvariant { sign, divisors: divisors.iter().map(|&d| BigInt::from(d)).collect() }
    }

    /// `[d1,...,dk]` rendering used in report lines.
    pub fn group_string(&self) -> String {
        let parts: Vec<String> = self.divisors.iter().map(ToString::to_string).collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for BowenFranksInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Negative => write!(f, "-")?,
            Sign::Positive => write!(f, "+")?,
            Sign::Zero => {}
        }
        if self.divisors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .divisors
            .iter()
            .map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z/{d}Z") })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Determinant of `I − A` together with the signed Bowen–Franks group of `A`.
pub fn bowen_franks_with_det(a: &SparseIntMatrix) -> (BigInt, BowenFranksInvariant) {
    let b = a.identity_minus();
    let det = determinant(&b);
    let snf = smith_normal_form(&b);
    let divisors = snf.divisors.into_iter().filter(|d| !d.is_one()).collect();
    (det.clone(), BowenFranksInvariant { sign: Sign::of(&det), divisors })
}

pub fn bowen_franks(a: &SparseIntMatrix) -> BowenFranksInvariant {
    bowen_franks_with_det(a).1
}

pub fn bowen_franks_graph(g: &LabelledGraph) -> BowenFranksInvariant {
    bowen_franks(&adjacency_matrix(g))
}

pub fn franks_equivalent(b1: &BowenFranksInvariant, b2: &BowenFranksInvariant) -> bool {
    b1 == b2
}

/// Natural log of the spectral radius, `-inf` for a nilpotent matrix.
///
/// Power iteration runs on `A + I`, which is primitive on every irreducible block, so the
/// iteration converges even for periodic matrices.
pub fn entropy(m: &SparseIntMatrix, tol: f64) -> f64 {
    assert!(m.is_square(), "entropy needs a square matrix");
    let n = m.rows;
    if n == 0 || nilpotent(m) {
        return f64::NEG_INFINITY;
    }
    let entries: Vec<(usize, usize, f64)> = m
        .entries
        .iter()
        .map(|(&(r, c), v)| (r, c, v.to_f64().unwrap_or(f64::MAX)))
        .collect();
    let mut x = vec![1.0f64; n];
    let mut last = f64::NAN;
    for _ in 0..1_000_000 {
        let mut y = x.clone();
        for &(r, c, v) in &entries {
            y[r] += v * x[c];
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        let prev = x.iter().cloned().fold(0.0, f64::max);
        let rho = norm / prev;
        for v in y.iter_mut() {
            *v /= norm;
        }
        x = y;
        if (rho - last).abs() < tol / 10.0 {
            return (rho - 1.0).ln();
        }
        last = rho;
    }
    (last - 1.0).ln()
}

fn nilpotent(m: &SparseIntMatrix) -> bool {
    // acyclic support graph, i.e. no irreducible component
    let mut g = LabelledGraph::new();
    for i in 0..m.rows {
        g.add_vertex(i.to_string());
    }
    for (&(r, c), v) in &m.entries {
        if v.is_positive() {
            g.add_edge(r, "x", c);
        }
    }
    g.irreducible_components().is_empty()
}
