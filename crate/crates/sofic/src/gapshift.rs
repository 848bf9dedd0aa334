//! Gap shifts `X(S)`: binary sequences whose runs of 0s between consecutive 1s have
//! lengths in `S`, for eventually periodic `S`.

use std::collections::BTreeSet;
use std::fmt;

use crate::beta::FlowVerdict;
use crate::error::{Error, Result};
use crate::graph::LabelledGraph;
use crate::invariants::{bowen_franks_graph, BowenFranksInvariant, Sign};

/// `S = sporadic ∪ (base + period·ℕ₀)`; `period == 0` means `S` is finite.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GapSpec {
    sporadic: Vec<u64>,
    base: Vec<u64>,
    period: u64,
}

impl GapSpec {
    pub fn new(sporadic: &[u64], base: &[u64], period: u64) -> Result<Self> {
        let sporadic: Vec<u64> = sporadic.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let base: Vec<u64> = base.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if period == 0 && !base.is_empty() {
            return Err(Error::Invalid("a periodic part needs a positive period".into()));
        }
        if period > 0 && base.is_empty() {
            return Err(Error::Invalid("a positive period needs a nonempty base".into()));
        }
        if sporadic.is_empty() && base.is_empty() {
            return Err(Error::Invalid("S must be nonempty".into()));
        }
        if let (Some(lo), Some(hi)) = (base.first(), base.last()) {
            if hi - lo >= period {
                return Err(Error::Invalid(format!("base spread {} is not below the period {period}", hi - lo)));
            }
        }
        let spec = GapSpec { sporadic, base, period };
        if let Some(e) = spec.sporadic.iter().find(|&&e| spec.in_periodic(e)) {
            return Err(Error::Invalid(format!("sporadic {e} lies in the periodic part")));
        }
        Ok(spec)
    }

    /// Parses `e1,e2|f1,f2|N`, or a bare `e1,e2,...` for finite `S`.
    pub fn parse(text: &str) -> Result<Self> {
        let nums = |s: &str| -> Result<Vec<u64>> {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| Error::Invalid(format!("bad number `{t}`"))))
                .collect()
        };
        let parts: Vec<&str> = text.split('|').collect();
        match parts[..] {
            [e] => Self::new(&nums(e)?, &[], 0),
            [e, f, n] => {
                let n = n.trim().parse().map_err(|_| Error::Invalid(format!("bad period `{n}`")))?;
                Self::new(&nums(e)?, &nums(f)?, n)
            }
            _ => Err(Error::Invalid(format!("expected `e..|f..|N`, got `{text}`"))),
        }
    }

    pub fn sporadic(&self) -> &[u64] {
        &self.sporadic
    }

    pub fn base(&self) -> &[u64] {
        &self.base
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period == 0
    }

    fn in_periodic(&self, x: u64) -> bool {
        self.period > 0 && self.base.iter().any(|&f| x >= f && (x - f).is_multiple_of(self.period))
    }

    pub fn contains(&self, x: u64) -> bool {
        self.sporadic.binary_search(&x).is_ok() || self.in_periodic(x)
    }

    /// The same set written with minimal period and the lowest possible start of the
    /// periodic part.
    pub fn canonical(&self) -> GapSpec {
        if self.is_finite() {
            return self.clone();
        }
        let n = self.period;
        let start = self.sporadic.last().map_or(0, |e| e + 1).max(self.base[self.base.len() - 1]);
        let periodic_from = |d: u64, t: u64| (t..t + n).all(|x| self.contains(x) == self.contains(x + d));
        let d = (1..=n).find(|d| n.is_multiple_of(*d) && periodic_from(*d, start)).unwrap_or(n);
        let mut t = start;
        while t > 0 && self.contains(t - 1) == self.contains(t - 1 + d) {
            t -= 1;
        }
        GapSpec {
            sporadic: (0..t).filter(|&x| self.contains(x)).collect(),
            base: (t..t + d).filter(|&x| self.contains(x)).collect(),
            period: d,
        }
    }

    /// Only finite and cofinite `S` give shifts of finite type.
    pub fn is_sft(&self) -> bool {
        self.is_finite() || self.canonical().period == 1
    }
}

impl fmt::Display for GapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        if self.is_finite() {
            write!(f, "{}", join(&self.sporadic))
        } else {
            write!(f, "{}|{}|{}", join(&self.sporadic), join(&self.base), self.period)
        }
    }
}

/// Moves the sporadic part into the periodic one: the result is `{0, ...} + nℕ₀`
/// with minimal `n`.
pub fn reduce(spec: &GapSpec) -> Result<GapSpec> {
    if spec.is_finite() {
        return Err(Error::Invalid("reduce needs an infinite S".into()));
    }
    let c = spec.canonical();
    let (k, l, n) = (c.sporadic.len() as i64, c.base.len(), c.period);
    // 1 <= j <= l with j ≡ 1 - k (mod l); as a 0-based index that is -k
    let j = (-k).rem_euclid(l as i64) as usize;
    let fj = c.base[j];
    let mut base: Vec<u64> = c.base[j..].iter().map(|f| f - fj).collect();
    base.extend(c.base[..j].iter().map(|f| f + n - fj));
    Ok(GapSpec { sporadic: Vec::new(), base, period: n })
}

fn check_reduced(spec: &GapSpec) -> Result<()> {
    let ok = !spec.is_finite()
        && spec.sporadic.is_empty()
        && spec.base.first() == Some(&0)
        && spec.canonical().period == spec.period;
    if ok {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{spec} is not in reduced form")))
    }
}

/// A 0-labelled wheel `v0 -> v1 -> ... -> v{n-1} -> v0` with 1-labelled edges from
/// each `v_s`, `s` in the base, back to `v0`.
pub fn right_fischer_cover(spec: &GapSpec) -> Result<LabelledGraph> {
    check_reduced(spec)?;
    let n = spec.period as usize;
    let mut g = LabelledGraph::new();
    for i in 0..n {
        g.add_vertex(format!("v{i}"));
    }
    for i in 0..n {
        g.add_edge(i, "0", (i + 1) % n);
        if spec.base.contains(&(i as u64)) {
            g.add_edge(i, "1", 0);
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SftClass {
    /// Flow equivalent to the full shift on this many symbols.
    FullShift(usize),
}

impl fmt::Display for SftClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SftClass::FullShift(m) => write!(f, "full {m}-shift"),
        }
    }
}

pub fn classify_sft(spec: &GapSpec) -> Result<SftClass> {
    if spec.is_finite() {
        Ok(SftClass::FullShift(spec.sporadic.len()))
    } else if spec.is_sft() {
        Ok(SftClass::FullShift(2))
    } else {
        Err(Error::Invalid(format!("{spec} is strictly sofic")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapInvariants {
    /// Size of the reduced base; for finite `S`, its size.
    pub k: usize,
    /// Minimal period of the reduced form; 0 for finite `S`.
    pub n: u64,
    pub bf: BowenFranksInvariant,
    pub reduced: Option<GapSpec>,
}

impl fmt::Display for GapInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} n={} BF={}", self.k, self.n, self.bf)
    }
}

pub fn invariants(spec: &GapSpec) -> GapInvariants {
    match reduce(spec) {
        Ok(r) => {
            let bf = bowen_franks_graph(&right_fischer_cover(&r).expect("reduce output is reduced"));
            GapInvariants { k: r.base.len(), n: r.period, bf, reduced: Some(r) }
        }
        Err(_) => {
            let m = spec.sporadic.len() as i64;
            let divisors: Vec<i64> = if m == 2 { vec![] } else { vec![m - 1] };
            let sign = if m == 1 { Sign::Zero } else { Sign::Negative };
            GapInvariants { k: m as usize, n: 0, bf: BowenFranksInvariant::new(sign, &divisors), reduced: None }
        }
    }
}

/// Equal reduced forms are flow equivalent, and so are SFTs with the same full-shift
/// class; different `(k, n)` separate strictly sofic shifts. Anything else is open.
pub fn flow_distinguish(s1: &GapSpec, s2: &GapSpec) -> FlowVerdict {
    match (classify_sft(s1), classify_sft(s2)) {
        (Ok(a), Ok(b)) => {
            return if a == b { FlowVerdict::Equivalent } else { FlowVerdict::NotEquivalent };
        }
        (Ok(_), Err(_)) | (Err(_), Ok(_)) => return FlowVerdict::NotEquivalent,
        _ => {}
    }
    let (i1, i2) = (invariants(s1), invariants(s2));
    if (i1.k, i1.n) != (i2.k, i2.n) {
        FlowVerdict::NotEquivalent
    } else if i1.reduced == i2.reduced {
        FlowVerdict::Equivalent
    } else {
        FlowVerdict::Unknown
    }
}
