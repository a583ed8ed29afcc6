//! Real roots, tubes and the symbolic coordinates `P(n,i)`, `I(n,i)`,
//! `R[e]^l(t)` of exceptional modules.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::appendix::appendix_for;
use crate::error::{Error, Result};
use crate::forms::EuclideanQuiver;
use crate::lattice::DimVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TubeLabel {
    Zero,
    One,
    Infinity,
    Synthetic(usize),
}

impl fmt::Display for TubeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TubeLabel::Zero => write!(f, "0"),
            TubeLabel::One => write!(f, "1"),
            TubeLabel::Infinity => write!(f, "inf"),
            TubeLabel::Synthetic(k) => write!(f, "T{k}"),
        }
    }
}

impl FromStr for TubeLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(TubeLabel::Zero),
            "1" => Ok(TubeLabel::One),
            "inf" => Ok(TubeLabel::Infinity),
            _ => s
                .strip_prefix('T')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1 && !s[1..].starts_with('0'))
                .map(TubeLabel::Synthetic)
                .ok_or_else(|| Error::InvalidModule(format!("tube label {s:?}"))),
        }
    }
}

/// A non-homogeneous tube. `mouth[l - 1]` is `dim R^l(1)` and
/// `Φ(mouth[l]) = mouth[l - 1]` cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TubeLayout {
    pub label: TubeLabel,
    pub mouth: Vec<DimVector>,
}

impl Serialize for TubeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl TubeLayout {
    pub fn rank(&self) -> usize {
        self.mouth.len()
    }

    /// `dim R^l(t)`, `l` 1-based, any `t >= 1`.
    pub fn regular(&self, l: usize, t: usize) -> DimVector {
        let m = self.rank();
        let mut v = DimVector::zeros(self.mouth[0].len());
        for j in 0..t {
            v = &v + &self.mouth[(l - 1 + j) % m];
        }
        v
    }

    /// `(l, t)` with `t < m` such that `x = dim R^l(t)`.
    pub fn locate(&self, x: &DimVector) -> Option<(usize, usize)> {
        let m = self.rank();
        (1..=m).flat_map(|l| (1..m).map(move |t| (l, t))).find(|&(l, t)| &self.regular(l, t) == x)
    }

    /// Index `l` of the top `R^{l+t-1}(1)` of `R^l(t)`.
    pub fn top_index(&self, l: usize, t: usize) -> usize {
        (l + t - 2) % self.rank() + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModuleId {
    /// `P(n,i)`, vertex 1-based.
    Preproj { n: u32, vertex: usize },
    /// `I(n,i)`, vertex 1-based.
    Preinj { n: u32, vertex: usize },
    /// `R[e]^l(t)`.
    Regular { tube: TubeLabel, l: usize, t: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Preprojective,
    Regular,
    Preinjective,
}

impl ModuleId {
    pub fn family(&self) -> Family {
        match self {
            ModuleId::Preproj { .. } => Family::Preprojective,
            ModuleId::Preinj { .. } => Family::Preinjective,
            ModuleId::Regular { .. } => Family::Regular,
        }
    }

    /// Appendix-style spelling: `P(0,3)`, `I(1,2)`, `R_inf^2(1)`.
    pub fn appendix_text(&self) -> String {
        match self {
            ModuleId::Regular { tube, l, t } => format!("R_{tube}^{l}({t})"),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleId::Preproj { n, vertex } => write!(f, "P({n},{vertex})"),
            ModuleId::Preinj { n, vertex } => write!(f, "I({n},{vertex})"),
            ModuleId::Regular { tube, l, t } => write!(f, "R[{tube}]^{l}({t})"),
        }
    }
}

fn parse_uint(s: &str, whole: &str) -> Result<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return Err(Error::InvalidModule(whole.to_string()));
    }
    s.parse().map_err(|_| Error::InvalidModule(whole.to_string()))
}

/// Strict grammar: `P(n,i)`, `I(n,i)`, `R[e]^l(t)`; no whitespace.
impl FromStr for ModuleId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidModule(s.to_string());
        if let Some(rest) = s.strip_prefix("R[") {
            let (label, rest) = rest.split_once("]^").ok_or_else(bad)?;
            let (l, rest) = rest.split_once('(').ok_or_else(bad)?;
            let t = rest.strip_suffix(')').ok_or_else(bad)?;
            let (l, t) = (parse_uint(l, s)?, parse_uint(t, s)?);
            if l == 0 || t == 0 {
                return Err(bad());
            }
            return Ok(ModuleId::Regular { tube: label.parse().map_err(|_| bad())?, l, t });
        }
        let (kind, rest) = s.split_at(s.len().min(1));
        let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (n, i) = inner.split_once(',').ok_or_else(bad)?;
        let n = u32::try_from(parse_uint(n, s)?).map_err(|_| bad())?;
        let vertex = parse_uint(i, s)?;
        if vertex == 0 {
            return Err(bad());
        }
        match kind {
            "P" => Ok(ModuleId::Preproj { n, vertex }),
            "I" => Ok(ModuleId::Preinj { n, vertex }),
            _ => Err(bad()),
        }
    }
}

impl Serialize for ModuleId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModuleId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl EuclideanQuiver {
    pub fn is_positive_real_root(&self, x: &DimVector) -> bool {
        x.len() == self.n() && x.is_positive() && self.tits(x) == 1
    }

    pub fn is_exceptional_root(&self, x: &DimVector) -> bool {
        self.is_positive_real_root(x) && (self.defect(x) != 0 || x.leq(self.delta()))
    }

    /// First vertex with `δ_e = 1`.
    pub fn extending_vertex(&self) -> usize {
        self.delta().iter().position(|&d| d == 1).expect("δ has an entry equal to 1")
    }

    /// All roots, both signs, of the finite diagram left after deleting the
    /// extending vertex.
    pub fn finite_roots(&self) -> &[DimVector] {
        self.finite_roots.get_or_init(|| {
            let n = self.n();
            let e = self.extending_vertex();
            let sym = |x: &DimVector, j: usize| {
                let ej = DimVector::unit(n, j);
                self.euler(x, &ej) + self.euler(&ej, x)
            };
            let mut seen: HashSet<DimVector> = HashSet::new();
            let mut queue: VecDeque<DimVector> = (0..n).filter(|&i| i != e).map(|i| DimVector::unit(n, i)).collect();
            while let Some(x) = queue.pop_front() {
                if !seen.insert(x.clone()) {
                    continue;
                }
                for j in (0..n).filter(|&j| j != e) {
                    let c = sym(&x, j);
                    if c != 0 {
                        let mut y = x.clone();
                        y[j] -= c;
                        if !seen.contains(&y) {
                            queue.push_back(y);
                        }
                    }
                }
            }
            let mut roots: Vec<DimVector> = seen.into_iter().collect();
            roots.sort();
            for r in &roots {
                assert_eq!(self.tits(r), 1, "finite root {r} fails q = 1");
            }
            roots
        })
    }

    /// Positive real roots `x <= bound`, sorted lexicographically.
    pub fn roots_below(&self, bound: &DimVector) -> Result<Vec<DimVector>> {
        self.check_vector(bound)?;
        let e = self.extending_vertex();
        let mut out = BTreeSet::new();
        for alpha in self.finite_roots() {
            for k in 0..=bound[e].max(-1) {
                let x = alpha + &self.delta().scale(k);
                if x.is_positive() && x.leq(bound) {
                    debug_assert_eq!(self.tits(&x), 1);
                    out.insert(x);
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    pub fn exceptional_roots_below(&self, bound: &DimVector) -> Result<Vec<DimVector>> {
        Ok(self.roots_below(bound)?.into_iter().filter(|x| self.is_exceptional_root(x)).collect())
    }

    /// Non-homogeneous tubes, ranks descending.
    pub fn tubes(&self) -> Result<&[TubeLayout]> {
        self.tubes.get_or_init(|| self.compute_tubes()).as_deref().map_err(Clone::clone)
    }

    pub fn tube(&self, label: TubeLabel) -> Result<&TubeLayout> {
        self.tubes()?
            .iter()
            .find(|t| t.label == label)
            .ok_or_else(|| Error::InvalidModule(format!("no tube labelled {label}")))
    }

    fn compute_tubes(&self) -> Result<Vec<TubeLayout>> {
        let delta = self.delta();
        let candidates: Vec<DimVector> =
            self.roots_below(delta)?.into_iter().filter(|x| self.defect(x) == 0).collect();
        let mut assigned: HashSet<DimVector> = HashSet::new();
        let mut orbits: Vec<Vec<DimVector>> = Vec::new();
        for x in &candidates {
            if assigned.contains(x) {
                continue;
            }
            let mut orbit = vec![x.clone()];
            let mut y = self.phi(x);
            while &y != x {
                if !y.is_positive() || !y.leq(delta) || orbit.len() > self.n() {
                    return Err(Error::Verification(format!("Φ-orbit of {x} leaves the box below δ at {y}")));
                }
                orbit.push(y.clone());
                y = self.phi(&y);
            }
            assigned.extend(orbit.iter().cloned());
            let sum = orbit.iter().fold(DimVector::zeros(self.n()), |acc, v| &acc + v);
            if &sum == delta {
                orbits.push(orbit);
            }
        }
        // mouth order runs against Φ
        let mouth_from = |anchor: &DimVector, m: usize| {
            let mut mouth = vec![anchor.clone()];
            while mouth.len() < m {
                let next = self.phi_inv(mouth.last().unwrap());
                mouth.push(next);
            }
            mouth
        };
        if let Some(app) = appendix_for(self.quiver()) {
            let mut tubes = Vec::new();
            for at in &app.tubes {
                let want: BTreeSet<&DimVector> = at.mouth.iter().collect();
                let orbit = orbits
                    .iter()
                    .find(|o| o.iter().collect::<BTreeSet<_>>() == want)
                    .ok_or_else(|| Error::Verification(format!("{}: no detected tube matches T_{}", app.name, at.label)))?;
                let mouth = mouth_from(&at.mouth[0], orbit.len());
                if mouth != at.mouth {
                    return Err(Error::Verification(format!(
                        "{}: tube T_{} is not ordered against Φ",
                        app.name, at.label
                    )));
                }
                tubes.push(TubeLayout { label: at.label, mouth });
            }
            if tubes.len() != orbits.len() {
                return Err(Error::Verification(format!("{}: detected {} tubes", app.name, orbits.len())));
            }
            return Ok(tubes);
        }
        let mut keyed: Vec<(usize, DimVector)> =
            orbits.iter().map(|o| (o.len(), o.iter().min().unwrap().clone())).collect();
        keyed.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        Ok(keyed
            .into_iter()
            .enumerate()
            .map(|(k, (m, anchor))| TubeLayout { label: TubeLabel::Synthetic(k + 1), mouth: mouth_from(&anchor, m) })
            .collect())
    }

    pub fn dim_of(&self, id: &ModuleId) -> Result<DimVector> {
        let n = self.n();
        let bad = || Error::InvalidModule(id.to_string());
        match *id {
            ModuleId::Preproj { n: k, vertex } => {
                if vertex == 0 || vertex > n {
                    return Err(bad());
                }
                Ok(self.phi_pow(&self.cartan().column(vertex - 1), -i64::from(k)))
            }
            ModuleId::Preinj { n: k, vertex } => {
                if vertex == 0 || vertex > n {
                    return Err(bad());
                }
                Ok(self.phi_pow(&self.cartan().row(vertex - 1), i64::from(k)))
            }
            ModuleId::Regular { tube, l, t } => {
                let layout = self.tube(tube)?;
                let m = layout.rank();
                if l == 0 || l > m || t == 0 || t >= m {
                    return Err(bad());
                }
                Ok(layout.regular(l, t))
            }
        }
    }

    pub fn identify(&self, x: &DimVector) -> Result<ModuleId> {
        self.check_vector(x)?;
        if !self.is_exceptional_root(x) {
            return Err(Error::NotExceptional(x.to_string()));
        }
        let n = self.n();
        let bound = 10 * (n as i64 + x.max_coord());
        let d = self.defect(x);
        if d == 0 {
            for tube in self.tubes()? {
                if let Some((l, t)) = tube.locate(x) {
                    return Ok(ModuleId::Regular { tube: tube.label, l, t });
                }
            }
            return Err(Error::Verification(format!("regular root {x} lies in no tube")));
        }
        let mut y = x.clone();
        for k in 0..=bound {
            let hit = (0..n).find(|&i| {
                if d < 0 {
                    self.cartan().column(i) == y
                } else {
                    self.cartan().row(i) == y
                }
            });
            if let Some(i) = hit {
                let k = u32::try_from(k).map_err(|_| Error::IterationBound(x.to_string()))?;
                return Ok(if d < 0 {
                    ModuleId::Preproj { n: k, vertex: i + 1 }
                } else {
                    ModuleId::Preinj { n: k, vertex: i + 1 }
                });
            }
            y = if d < 0 { self.phi(&y) } else { self.phi_inv(&y) };
        }
        Err(Error::IterationBound(format!("{x} after {bound} Coxeter steps")))
    }

    /// For a regular exceptional root: its tube and `(l, t)`.
    pub fn regular_position(&self, x: &DimVector) -> Option<(&TubeLayout, usize, usize)> {
        if self.defect(x) != 0 {
            return None;
        }
        let tubes = self.tubes().ok()?;
        tubes.iter().find_map(|tube| tube.locate(x).map(|(l, t)| (tube, l, t)))
    }

    /// Mouth vectors of socle and top of a regular exceptional root.
    pub fn regular_socle_top(&self, x: &DimVector) -> Option<(DimVector, DimVector)> {
        let (tube, l, t) = self.regular_position(x)?;
        Some((tube.mouth[l - 1].clone(), tube.mouth[tube.top_index(l, t) - 1].clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::APPENDIX_PRESETS;
    use proptest::prelude::*;

    fn eq(name: &str) -> EuclideanQuiver {
        EuclideanQuiver::parse(name).unwrap()
    }

    fn v<const N: usize>(c: [i64; N]) -> DimVector {
        DimVector::from(c)
    }

    fn id(s: &str) -> ModuleId {
        s.parse().unwrap()
    }

    #[test]
    fn module_id_grammar() {
        assert_eq!(id("P(1,1)"), ModuleId::Preproj { n: 1, vertex: 1 });
        assert_eq!(id("I(0,12)"), ModuleId::Preinj { n: 0, vertex: 12 });
        assert_eq!(id("R[inf]^2(1)"), ModuleId::Regular { tube: TubeLabel::Infinity, l: 2, t: 1 });
        assert_eq!(id("R[T3]^1(2)"), ModuleId::Regular { tube: TubeLabel::Synthetic(3), l: 1, t: 2 });
        for bad in ["P(1, 1)", "p(1,1)", "P(-1,1)", "P(1,0)", "R_0^1(1)", "R[2]^1(1)", "R[0]^0(1)", "P(01,1)", "X", ""] {
            assert!(bad.parse::<ModuleId>().is_err(), "{bad}");
        }
        for s in ["P(0,3)", "I(12,7)", "R[0]^1(1)", "R[T1]^3(2)"] {
            assert_eq!(id(s).to_string(), s);
        }
        assert_eq!(id("R[inf]^2(1)").appendix_text(), "R_inf^2(1)");
    }

    #[test]
    fn real_and_exceptional_roots() {
        let a12 = eq("A~1,2");
        assert!(a12.is_positive_real_root(&v([0, 1, 0])));
        assert!(!a12.is_positive_real_root(&v([1, 1, 1])));
        assert!(a12.is_positive_real_root(&v([2, 2, 1])));
        assert!(a12.is_exceptional_root(&v([1, 0, 0])));
        assert!(a12.is_positive_real_root(&v([1, 2, 1])));
        assert!(!a12.is_exceptional_root(&v([1, 2, 1])));
        assert!(eq("A~1,3").is_exceptional_root(&v([1, 0, 1, 1])));
    }

    #[test]
    fn roots_below_delta_a12() {
        let a12 = eq("A~1,2");
        let roots = a12.roots_below(a12.delta()).unwrap();
        assert_eq!(
            roots,
            vec![v([0, 0, 1]), v([0, 1, 0]), v([0, 1, 1]), v([1, 0, 0]), v([1, 0, 1]), v([1, 1, 0])]
        );
        assert!(a12.roots_below(&v([0, 0, 0])).unwrap().is_empty());
    }

    fn box_scan(eq: &EuclideanQuiver, bound: &DimVector) -> Vec<DimVector> {
        let n = bound.len();
        let mut out = Vec::new();
        let mut x = DimVector::zeros(n);
        loop {
            if x.is_positive() && eq.tits(&x) == 1 {
                out.push(x.clone());
            }
            let mut k = 0;
            while k < n && x[k] == bound[k] {
                x[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
            x[k] += 1;
        }
        out.sort();
        out
    }

    #[test]
    fn roots_below_matches_box_scan() {
        for name in ["A~1,2", "A~2,2", "A~1,3", "D~4", "K"] {
            let e = eq(name);
            let bound = e.delta().scale(3);
            assert_eq!(e.roots_below(&bound).unwrap(), box_scan(&e, &bound), "{name}");
        }
    }

    #[test]
    fn tube_examples() {
        let a12 = eq("A~1,2");
        let t = a12.tubes().unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].label, TubeLabel::Zero);
        assert_eq!(t[0].mouth, vec![v([0, 1, 0]), v([1, 0, 1])]);
        let d4 = eq("D~4");
        let labels: Vec<String> = d4.tubes().unwrap().iter().map(|t| t.label.to_string()).collect();
        assert_eq!(labels, ["1", "inf", "0"]);
        let ranks: Vec<usize> = eq("E~6").tubes().unwrap().iter().map(TubeLayout::rank).collect();
        assert_eq!(ranks, [3, 3, 2]);
    }

    #[test]
    fn synthetic_tube_labels() {
        let q = eq("n=4; 2->1 2->3 4->3 4->1");
        let tubes = q.tubes().unwrap();
        assert_eq!(tubes.len(), 2);
        assert_eq!(tubes[0].label, TubeLabel::Synthetic(1));
        assert_eq!(tubes[1].label, TubeLabel::Synthetic(2));
        assert!(tubes[0].mouth[0] < tubes[1].mouth[0]);
        assert!(eq("K").tubes().unwrap().is_empty());
    }

    #[test]
    fn dim_of_examples() {
        let a12 = eq("A~1,2");
        assert_eq!(a12.dim_of(&id("P(1,1)")).unwrap(), v([2, 2, 1]));
        assert_eq!(a12.dim_of(&id("I(1,2)")).unwrap(), v([2, 2, 3]));
        assert_eq!(eq("A~1,3").dim_of(&id("R[0]^1(2)")).unwrap(), v([1, 0, 1, 1]));
        assert!(a12.dim_of(&id("R[0]^1(2)")).is_err());
        assert!(a12.dim_of(&id("P(0,4)")).is_err());
        assert!(a12.dim_of(&id("R[1]^1(1)")).is_err());
    }

    #[test]
    fn identify_examples() {
        let a12 = eq("A~1,2");
        assert_eq!(a12.identify(&v([2, 2, 1])).unwrap(), id("P(1,1)"));
        assert_eq!(a12.identify(&v([0, 1, 0])).unwrap(), id("R[0]^1(1)"));
        assert!(matches!(a12.identify(&v([1, 1, 1])), Err(Error::NotExceptional(_))));
        assert!(matches!(a12.identify(&v([1, 2, 1])), Err(Error::NotExceptional(_))));
    }

    #[test]
    fn socle_top_convention() {
        let a13 = eq("A~1,3");
        let (soc, top) = a13.regular_socle_top(&v([1, 0, 1, 1])).unwrap();
        let t = a13.tube(TubeLabel::Zero).unwrap();
        assert_eq!(soc, t.mouth[0]);
        assert_eq!(top, t.mouth[1]);
    }

    #[test]
    fn tau_shifts_preprojectives() {
        for name in APPENDIX_PRESETS {
            let e = eq(name);
            for i in 1..=e.n() {
                for k in 1..6u32 {
                    let x = e.dim_of(&ModuleId::Preproj { n: k, vertex: i }).unwrap();
                    let y = e.dim_of(&ModuleId::Preproj { n: k - 1, vertex: i }).unwrap();
                    assert_eq!(e.phi(&x), y);
                }
            }
            for tube in e.tubes().unwrap() {
                for l in 1..=tube.rank() {
                    for t in 1..tube.rank() {
                        assert!(tube.regular(l, t).lt(e.delta()));
                    }
                }
            }
        }
    }

    fn random_id() -> impl Strategy<Value = (usize, u8, u32, usize, usize, usize)> {
        (0..APPENDIX_PRESETS.len(), 0u8..3, 0u32..8, 1usize..10, 0usize..3, 1usize..5)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn identify_inverts_dim_of((k, kind, n, vertex, tube, l) in random_id()) {
            let e = eq(APPENDIX_PRESETS[k]);
            let vertex = (vertex - 1) % e.n() + 1;
            let id = match kind {
                0 => ModuleId::Preproj { n, vertex },
                1 => ModuleId::Preinj { n, vertex },
                _ => {
                    let tubes = e.tubes().unwrap();
                    let layout = &tubes[tube % tubes.len()];
                    let m = layout.rank();
                    ModuleId::Regular { tube: layout.label, l: (l - 1) % m + 1, t: (vertex - 1) % (m - 1) + 1 }
                }
            };
            let x = e.dim_of(&id).unwrap();
            prop_assert!(e.is_exceptional_root(&x));
            prop_assert_eq!(e.identify(&x).unwrap(), id);
        }
    }
}
