//! Quivers, Euclidean type detection and the canonical presets.
//!
//! Vertices are 0-based internally and 1-based in every text format.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub tail: usize,
    pub head: usize,
}

/// Finite acyclic quiver. Equality ignores the order of the arrow list.
#[derive(Clone, Debug, Eq, Serialize, Deserialize)]
pub struct Quiver {
    n: usize,
    arrows: Vec<Arrow>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.sorted_arrows() == other.sorted_arrows()
    }
}

impl std::hash::Hash for Quiver {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.sorted_arrows().hash(state);
    }
}

impl Quiver {
    /// Builds a quiver from 0-based arrows, rejecting loops and oriented cycles.
    pub fn new(n: usize, arrows: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQuiver("no vertices".into()));
        }
        let mut list = Vec::with_capacity(arrows.len());
        for (t, h) in arrows {
            if t >= n || h >= n {
                return Err(Error::InvalidQuiver(format!("arrow {}->{} out of range 1..{n}", t + 1, h + 1)));
            }
            if t == h {
                return Err(Error::InvalidQuiver(format!("loop at vertex {}", t + 1)));
            }
            list.push(Arrow { tail: t, head: h });
        }
        let q = Quiver { n, arrows: list };
        if q.topological_order().is_none() {
            return Err(Error::InvalidQuiver("oriented cycle".into()));
        }
        Ok(q)
    }

    /// Same as [`Quiver::new`] with 1-based arrows.
    pub fn from_one_based(n: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        if arrows.iter().any(|&(t, h)| t == 0 || h == 0) {
            return Err(Error::InvalidQuiver("vertex 0 does not exist; vertices are 1-based".into()));
        }
        Self::new(n, arrows.iter().map(|&(t, h)| (t - 1, h - 1)).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// Arrows as 1-based pairs, in stored order.
    pub fn arrows_one_based(&self) -> Vec<(usize, usize)> {
        self.arrows.iter().map(|a| (a.tail + 1, a.head + 1)).collect()
    }

    pub fn sorted_arrows(&self) -> Vec<Arrow> {
        let mut a = self.arrows.clone();
        a.sort();
        a
    }

    pub fn is_sink(&self, i: usize) -> bool {
        self.arrows.iter().all(|a| a.tail != i)
    }

    pub fn is_source(&self, i: usize) -> bool {
        self.arrows.iter().all(|a| a.head != i)
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.is_sink(i)).collect()
    }

    pub fn sources(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.is_source(i)).collect()
    }

    /// Number of arrows between `i` and `j` in either direction.
    pub fn edge_multiplicity(&self, i: usize, j: usize) -> usize {
        self.arrows
            .iter()
            .filter(|a| (a.tail == i && a.head == j) || (a.tail == j && a.head == i))
            .count()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.arrows.iter().filter(|a| a.tail == i || a.head == i).count()
    }

    /// Neighbours of `i`, one entry per arrow.
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        self.arrows
            .iter()
            .filter_map(|a| {
                if a.tail == i {
                    Some(a.head)
                } else if a.head == i {
                    Some(a.tail)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Kahn order (tails before heads), or `None` on an oriented cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        for a in &self.arrows {
            indeg[a.head] += 1;
        }
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for a in self.arrows.iter().filter(|a| a.tail == v) {
                indeg[a.head] -= 1;
                if indeg[a.head] == 0 {
                    queue.push_back(a.head);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Every arrow reversed.
    pub fn opposite(&self) -> Quiver {
        Quiver {
            n: self.n,
            arrows: self.arrows.iter().map(|a| Arrow { tail: a.head, head: a.tail }).collect(),
        }
    }

    /// Reverses every arrow at a sink or source.
    pub fn flip(&self, i: usize) -> Result<Quiver> {
        if i >= self.n || !(self.is_sink(i) || self.is_source(i)) {
            return Err(Error::NotSinkOrSource(i + 1));
        }
        Ok(self.flip_unchecked(i))
    }

    pub(crate) fn flip_unchecked(&self, i: usize) -> Quiver {
        let arrows = self
            .arrows
            .iter()
            .map(|&a| if a.tail == i || a.head == i { Arrow { tail: a.head, head: a.tail } } else { a })
            .collect();
        Quiver { n: self.n, arrows }
    }

    /// Undirected edge multiset, each edge as (min, max), sorted.
    pub fn underlying_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.arrows.iter().map(|a| (a.tail.min(a.head), a.tail.max(a.head))).collect();
        e.sort();
        e
    }

    pub fn same_graph(&self, other: &Quiver) -> bool {
        self.n == other.n && self.underlying_edges() == other.underlying_edges()
    }
}

/// `n=3; 3->1 3->2 2->1`
impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};", self.n)?;
        for a in &self.arrows {
            write!(f, " {}->{}", a.tail + 1, a.head + 1)?;
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct QuiverDoc {
    n: usize,
    arrows: Vec<(usize, usize)>,
}

/// Parses a preset name, the `n=<count>` text form or the JSON form, and
/// checks that the result is a connected Euclidean quiver.
pub fn parse_quiver(text: &str) -> Result<Quiver> {
    let t = text.trim();
    let q = if t.starts_with('{') {
        let doc: QuiverDoc = serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))?;
        Quiver::from_one_based(doc.n, &doc.arrows)?
    } else if t.starts_with("n=") || t.starts_with("n =") {
        parse_text_form(t)?
    } else {
        return Ok(CanonicalPreset::by_name(t)?.quiver);
    };
    if !q.is_connected() {
        return Err(Error::InvalidQuiver("underlying graph is disconnected".into()));
    }
    detect_type(&q)?;
    Ok(q)
}

fn parse_text_form(t: &str) -> Result<Quiver> {
    let mut tokens = t.split(|c: char| c.is_whitespace() || c == ';' || c == ',').filter(|s| !s.is_empty());
    let mut head = tokens.next().unwrap_or_default().to_string();
    if head == "n" || head == "n=" {
        // tolerate `n = 3`
        for tok in tokens.by_ref() {
            head.push_str(tok);
            if !tok.ends_with('=') && tok != "=" {
                break;
            }
        }
    }
    let count = head
        .strip_prefix("n=")
        .and_then(|c| c.parse::<usize>().ok())
        .ok_or_else(|| Error::Parse(format!("expected n=<count>, got {head:?}")))?;
    let mut arrows = Vec::new();
    for tok in tokens {
        let (a, b) = tok.split_once("->").ok_or_else(|| Error::Parse(format!("expected t->h, got {tok:?}")))?;
        let a = a.parse::<usize>().map_err(|_| Error::Parse(format!("bad vertex in {tok:?}")))?;
        let b = b.parse::<usize>().map_err(|_| Error::Parse(format!("bad vertex in {tok:?}")))?;
        arrows.push((a, b));
    }
    Quiver::from_one_based(count, &arrows)
}

impl FromStr for Quiver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_quiver(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EuclideanType {
    /// Cycle with `p` arrows one way round and `q` the other, `p <= q`.
    A { p: usize, q: usize },
    D(usize),
    E6,
    E7,
    E8,
}

impl EuclideanType {
    pub fn vertex_count(self) -> usize {
        match self {
            EuclideanType::A { p, q } => p + q,
            EuclideanType::D(m) => m + 1,
            EuclideanType::E6 => 7,
            EuclideanType::E7 => 8,
            EuclideanType::E8 => 9,
        }
    }

    pub fn is_a(self) -> bool {
        matches!(self, EuclideanType::A { .. })
    }
}

impl fmt::Display for EuclideanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EuclideanType::A { p, q } => write!(f, "A~{p},{q}"),
            EuclideanType::D(m) => write!(f, "D~{m}"),
            EuclideanType::E6 => write!(f, "E~6"),
            EuclideanType::E7 => write!(f, "E~7"),
            EuclideanType::E8 => write!(f, "E~8"),
        }
    }
}

pub fn detect_type(q: &Quiver) -> Result<EuclideanType> {
    let n = q.vertex_count();
    let deg: Vec<usize> = (0..n).map(|i| q.degree(i)).collect();
    if !q.is_connected() {
        return Err(Error::NotEuclidean("disconnected graph".into()));
    }
    if n >= 2 && deg.iter().all(|&d| d == 2) {
        return cycle_type(q);
    }
    if q.arrows().len() != n - 1 {
        return Err(Error::NotEuclidean(format!("{n} vertices, {} arrows, not a cycle", q.arrows().len())));
    }
    let branch: Vec<usize> = (0..n).filter(|&i| deg[i] >= 3).collect();
    let arms = |b: usize| -> Vec<usize> {
        let mut lens: Vec<usize> = q.neighbours(b).into_iter().map(|w| arm_length(q, b, w)).collect();
        lens.sort();
        lens
    };
    match branch.as_slice() {
        [b] if deg[*b] == 4 && n == 5 => Ok(EuclideanType::D(4)),
        [b] if deg[*b] == 3 => match arms(*b).as_slice() {
            [2, 2, 2] => Ok(EuclideanType::E6),
            [1, 3, 3] => Ok(EuclideanType::E7),
            [1, 2, 5] => Ok(EuclideanType::E8),
            other => Err(Error::NotEuclidean(format!("star with arms {other:?}"))),
        },
        [a, b] if deg[*a] == 3 && deg[*b] == 3 => {
            let leaves = |v: usize| q.neighbours(v).into_iter().filter(|&w| deg[w] == 1).count();
            if leaves(*a) == 2 && leaves(*b) == 2 {
                Ok(EuclideanType::D(n - 1))
            } else {
                Err(Error::NotEuclidean("two branch points without short arms".into()))
            }
        }
        _ => Err(Error::NotEuclidean(format!("degree sequence {deg:?}"))),
    }
}

/// Vertices on the arm that leaves `from` through `first`, stopping at a
/// leaf or another branch point.
fn arm_length(q: &Quiver, from: usize, first: usize) -> usize {
    let (mut prev, mut cur, mut len) = (from, first, 1);
    loop {
        let next: Vec<usize> = q.neighbours(cur).into_iter().filter(|&w| w != prev).collect();
        if next.len() != 1 {
            return len;
        }
        (prev, cur) = (cur, next[0]);
        len += 1;
    }
}

fn cycle_type(q: &Quiver) -> Result<EuclideanType> {
    let n = q.vertex_count();
    let arrows = q.arrows();
    let mut used = vec![false; arrows.len()];
    let (mut cur, mut forward, mut backward) = (0usize, 0usize, 0usize);
    for _ in 0..n {
        let k = (0..arrows.len())
            .find(|&k| !used[k] && (arrows[k].tail == cur || arrows[k].head == cur))
            .ok_or_else(|| Error::NotEuclidean("broken cycle".into()))?;
        used[k] = true;
        if arrows[k].tail == cur {
            forward += 1;
            cur = arrows[k].head;
        } else {
            backward += 1;
            cur = arrows[k].tail;
        }
    }
    if cur != 0 || used.iter().any(|u| !u) {
        return Err(Error::NotEuclidean("graph is not a single cycle".into()));
    }
    let (p, q) = (forward.min(backward), forward.max(backward));
    if p == 0 {
        return Err(Error::InvalidQuiver("oriented cycle".into()));
    }
    Ok(EuclideanType::A { p, q })
}

/// A canonically oriented quiver together with the order in which the
/// appendix-style displays list its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalPreset {
    pub name: String,
    pub ty: EuclideanType,
    pub quiver: Quiver,
    /// `layout[k]` is the 0-based vertex shown at display position `k`.
    pub layout: Vec<usize>,
}

impl CanonicalPreset {
    pub fn new(ty: EuclideanType) -> Result<Self> {
        let (arrows, layout): (Vec<(usize, usize)>, Vec<usize>) = match ty {
            EuclideanType::A { p, q } => {
                if p == 0 || p > q {
                    return Err(Error::InvalidQuiver(format!("A~{p},{q} needs 1 <= p <= q")));
                }
                let n = p + q;
                // upper arm n -> p -> ... -> 1, lower arm n -> n-1 -> ... -> p+1 -> 1
                let mut upper: Vec<usize> = vec![n];
                upper.extend((1..=p).rev());
                let mut lower: Vec<usize> = vec![n];
                lower.extend((p + 1..n).rev());
                lower.push(1);
                let mut arrows = Vec::new();
                for w in upper.windows(2).chain(lower.windows(2)) {
                    arrows.push((w[0], w[1]));
                }
                arrows.sort_by_key(|&(t, h)| (std::cmp::Reverse(t), h));
                let layout = if p == 1 {
                    [1, n].into_iter().chain(2..n).collect()
                } else {
                    (2..=p).chain([1, n]).chain(p + 1..n).collect()
                };
                (arrows, layout)
            }
            EuclideanType::D(m) => {
                if m < 4 {
                    return Err(Error::InvalidQuiver(format!("D~{m} needs m >= 4")));
                }
                let mut arrows = vec![(3, m + 1), (4, m + 1)];
                for v in (6..=m + 1).rev() {
                    arrows.push((v, v - 1));
                }
                arrows.push((5, 1));
                arrows.push((5, 2));
                let layout = [2, 3].into_iter().chain(5..=m + 1).chain([1, 4]).collect();
                (arrows, layout)
            }
            EuclideanType::E6 => (
                vec![(1, 2), (2, 3), (4, 3), (5, 4), (6, 3), (7, 6)],
                vec![7, 6, 1, 2, 3, 4, 5],
            ),
            EuclideanType::E7 => (
                vec![(1, 2), (2, 3), (3, 4), (5, 4), (6, 5), (7, 6), (8, 4)],
                (8..=8).chain(1..=7).collect(),
            ),
            EuclideanType::E8 => (
                vec![(1, 2), (2, 3), (4, 3), (5, 4), (6, 5), (7, 6), (8, 7), (9, 3)],
                (9..=9).chain(1..=8).collect(),
            ),
        };
        let quiver = Quiver::from_one_based(ty.vertex_count(), &arrows)?;
        let name = match ty {
            EuclideanType::A { p: 1, q: 1 } => "K".to_string(),
            other => other.to_string(),
        };
        Ok(CanonicalPreset { name, ty, quiver, layout: layout.into_iter().map(|v| v - 1).collect() })
    }

    /// `A~p,q`, `D~m`, `E~6`, `E~7`, `E~8` or `K`.
    pub fn by_name(name: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown preset {name:?}"));
        let name = name.trim();
        let ty = if name == "K" {
            EuclideanType::A { p: 1, q: 1 }
        } else if let Some(rest) = name.strip_prefix("A~") {
            let (p, q) = rest.split_once(',').ok_or_else(bad)?;
            let p: usize = p.trim().parse().map_err(|_| bad())?;
            let q: usize = q.trim().parse().map_err(|_| bad())?;
            EuclideanType::A { p, q }
        } else if let Some(rest) = name.strip_prefix("D~") {
            EuclideanType::D(rest.parse().map_err(|_| bad())?)
        } else {
            match name {
                "E~6" => EuclideanType::E6,
                "E~7" => EuclideanType::E7,
                "E~8" => EuclideanType::E8,
                _ => return Err(bad()),
            }
        };
        Self::new(ty)
    }

    /// Reorders a vertex-indexed vector into display order.
    pub fn to_layout(&self, v: &[i64]) -> Vec<i64> {
        self.layout.iter().map(|&i| v[i]).collect()
    }

    /// Inverse of [`CanonicalPreset::to_layout`].
    pub fn from_layout(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (k, &i) in self.layout.iter().enumerate() {
            out[i] = v[k];
        }
        out
    }
}

/// The fifteen presets that carry appendix tables.
pub const APPENDIX_PRESETS: [&str; 15] = [
    "A~1,2", "A~1,3", "A~1,4", "A~2,2", "A~2,3", "A~2,4", "A~3,3", "A~3,4", "A~3,5", "D~4", "D~5", "D~6", "E~6",
    "E~7", "E~8",
];

#[cfg(test)]
mod tests {
    use super::*;

    fn one_based(q: &Quiver) -> Vec<(usize, usize)> {
        q.arrows_one_based()
    }

    #[test]
    fn preset_a12_matches_text_form() {
        let p = parse_quiver("A~1,2").unwrap();
        assert_eq!(p, Quiver::from_one_based(3, &[(3, 1), (3, 2), (2, 1)]).unwrap());
        assert_eq!(one_based(&p), vec![(3, 1), (3, 2), (2, 1)]);
        assert_eq!(parse_quiver("n=3; 3->1 3->2 2->1").unwrap(), p);
        assert_eq!(parse_quiver("n=3\n3->1\n3->2\n2->1\n").unwrap(), p);
        assert_eq!(parse_quiver(r#"{"n": 3, "arrows": [[3,1],[3,2],[2,1]]}"#).unwrap(), p);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_quiver("n=3; 1->2 2->3 3->1"), Err(Error::InvalidQuiver(_))));
        assert!(matches!(parse_quiver("n=3; 1->2"), Err(Error::InvalidQuiver(_))));
        assert!(matches!(parse_quiver("n=3; 1->2 2->3"), Err(Error::NotEuclidean(_))));
        assert!(matches!(parse_quiver("n=3; 1->4"), Err(Error::InvalidQuiver(_))));
        assert!(matches!(parse_quiver("n=2; 1-2"), Err(Error::Parse(_))));
        assert!(matches!(parse_quiver("F~4"), Err(Error::Parse(_))));
    }

    #[test]
    fn detects_types() {
        for (name, ty) in [
            ("A~1,2", EuclideanType::A { p: 1, q: 2 }),
            ("A~3,5", EuclideanType::A { p: 3, q: 5 }),
            ("K", EuclideanType::A { p: 1, q: 1 }),
            ("D~4", EuclideanType::D(4)),
            ("D~7", EuclideanType::D(7)),
            ("E~6", EuclideanType::E6),
            ("E~7", EuclideanType::E7),
            ("E~8", EuclideanType::E8),
        ] {
            assert_eq!(detect_type(&parse_quiver(name).unwrap()).unwrap(), ty, "{name}");
        }
    }

    #[test]
    fn cycle_parameters_follow_arrow_directions() {
        // 1->2->3->4 and 1->4: three arrows one way, one the other
        let q = parse_quiver("n=4; 1->2 2->3 3->4 1->4").unwrap();
        assert_eq!(detect_type(&q).unwrap(), EuclideanType::A { p: 1, q: 3 });
        let q = parse_quiver("n=4; 1->2 3->2 3->4 1->4").unwrap();
        assert_eq!(detect_type(&q).unwrap(), EuclideanType::A { p: 2, q: 2 });
    }

    #[test]
    fn sinks_and_sources() {
        let q = parse_quiver("A~1,2").unwrap();
        assert_eq!(q.sinks(), vec![0]);
        assert_eq!(q.sources(), vec![2]);
        let single = Quiver::from_one_based(2, &[(2, 1)]).unwrap();
        assert_eq!(single.sinks(), vec![0]);
        assert_eq!(single.sources(), vec![1]);
        for name in APPENDIX_PRESETS {
            let q = parse_quiver(name).unwrap();
            let op = q.opposite();
            assert_eq!(op.sinks(), q.sources());
            assert_eq!(op.sources(), q.sinks());
        }
    }

    #[test]
    fn kronecker_has_parallel_arrows() {
        let k = parse_quiver("K").unwrap();
        assert_eq!(one_based(&k), vec![(2, 1), (2, 1)]);
        assert_eq!(k.edge_multiplicity(0, 1), 2);
    }

    #[test]
    fn flip_reverses_arrows_at_vertex() {
        let q = parse_quiver("A~1,2").unwrap();
        let f = q.flip(0).unwrap();
        assert_eq!(f, Quiver::from_one_based(3, &[(1, 3), (3, 2), (1, 2)]).unwrap());
        assert_eq!(f.flip(0).unwrap(), q);
        assert_eq!(q.flip(1), Err(Error::NotSinkOrSource(2)));
    }

    #[test]
    fn layout_roundtrip() {
        let p = CanonicalPreset::by_name("A~2,3").unwrap();
        assert_eq!(p.layout, vec![1, 0, 4, 2, 3]);
        let v = vec![10, 20, 30, 40, 50];
        assert_eq!(p.from_layout(&p.to_layout(&v)), v);
    }
}
