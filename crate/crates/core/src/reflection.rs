//! Simple reflections, sink/source flip sequences, and the reflection
//! procedure for Schofield pairs over an arbitrary orientation.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::EuclideanQuiver;
use crate::lattice::DimVector;
use crate::quiver::{CanonicalPreset, Quiver};
use crate::schofield::SchofieldPair;

/// `s_i(x)`: negate coordinate `i` and add its neighbours, with multiplicity.
pub fn reflect_vector(q: &Quiver, i: usize, x: &DimVector) -> DimVector {
    let mut y = x.clone();
    y[i] = -x[i] + q.neighbours(i).into_iter().map(|j| x[j]).sum::<i64>();
    y
}

pub fn flip_vertex(q: &Quiver, i: usize) -> Result<Quiver> {
    q.flip(i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlipMode {
    Sink,
    Source,
}

impl FlipMode {
    fn legal(self, q: &Quiver, i: usize) -> bool {
        match self {
            FlipMode::Sink => q.is_sink(i),
            FlipMode::Source => q.is_source(i),
        }
    }

    fn name(self) -> &'static str {
        match self {
            FlipMode::Sink => "sink",
            FlipMode::Source => "source",
        }
    }
}

/// Vertices `i_1..i_t` (0-based), each a sink (or source) at its step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SinkSequence {
    pub vertices: Vec<usize>,
    pub mode: FlipMode,
}

impl SinkSequence {
    /// Applies every flip, checking legality at each step.
    pub fn replay(&self, q: &Quiver) -> Result<Quiver> {
        let mut cur = q.clone();
        for &i in &self.vertices {
            if !self.mode.legal(&cur, i) {
                return Err(Error::IllegalFlip { vertex: i + 1, expected: self.mode.name() });
            }
            cur = cur.flip_unchecked(i);
        }
        Ok(cur)
    }

    /// The sequence that undoes this one: reversed order, opposite mode.
    pub fn inverse(&self) -> SinkSequence {
        SinkSequence {
            vertices: self.vertices.iter().rev().copied().collect(),
            mode: match self.mode {
                FlipMode::Sink => FlipMode::Source,
                FlipMode::Source => FlipMode::Sink,
            },
        }
    }
}

/// Breadth-first search over orientations reachable by flips of one kind,
/// stopping at the first one accepted by `goal`.
fn search(q: &Quiver, mode: FlipMode, goal: impl Fn(&Quiver) -> bool) -> Option<(Quiver, Vec<usize>)> {
    let mut parent: HashMap<Quiver, Option<(Quiver, usize)>> = HashMap::new();
    let mut queue = VecDeque::from([q.clone()]);
    parent.insert(q.clone(), None);
    while let Some(cur) = queue.pop_front() {
        if goal(&cur) {
            let mut path = Vec::new();
            let mut at = cur.clone();
            while let Some(Some((prev, i))) = parent.get(&at) {
                path.push(*i);
                at = prev.clone();
            }
            path.reverse();
            return Some((cur, path));
        }
        for i in 0..cur.vertex_count() {
            if mode.legal(&cur, i) {
                let next = cur.flip_unchecked(i);
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((cur.clone(), i)));
                    queue.push_back(next);
                }
            }
        }
    }
    None
}

fn flip_sequence(q: &Quiver, target: &Quiver, mode: FlipMode) -> Result<SinkSequence> {
    if !q.same_graph(target) {
        return Err(Error::NoFlipSequence("underlying graphs differ".into()));
    }
    let (_, vertices) = search(q, mode, |c| c == target)
        .ok_or_else(|| Error::NoFlipSequence(format!("{target} is not reachable by {} flips", mode.name())))?;
    Ok(SinkSequence { vertices, mode })
}

pub fn sink_sequence(q: &Quiver, target: &Quiver) -> Result<SinkSequence> {
    flip_sequence(q, target, FlipMode::Sink)
}

pub fn source_sequence(q: &Quiver, target: &Quiver) -> Result<SinkSequence> {
    flip_sequence(q, target, FlipMode::Source)
}

/// Orientation the procedure computes in: the canonical preset when it has
/// the same labelled graph and is reachable; otherwise, for cycles, the
/// nearest orientation with one source and one sink, and for trees the one
/// with every arrow pointing to the smaller vertex.
pub fn procedure_target(eq: &EuclideanQuiver) -> Result<Quiver> {
    let q = eq.quiver();
    let preset = CanonicalPreset::new(eq.ty())?.quiver;
    if preset.same_graph(q) && search(q, FlipMode::Sink, |c| c == &preset).is_some() {
        return Ok(preset);
    }
    let found = if eq.ty().is_a() {
        search(q, FlipMode::Sink, |c| c.sinks().len() == 1 && c.sources().len() == 1)
    } else {
        search(q, FlipMode::Sink, |c| c.arrows().iter().all(|a| a.tail > a.head))
    };
    found.map(|(t, _)| t).ok_or_else(|| Error::NoFlipSequence("no standard orientation reachable".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DroppedPair {
    pub step: usize,
    pub vertex: usize,
    pub pair: SchofieldPair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransportStep {
    pub vertex: usize,
    pub support_before: usize,
    pub support_after: usize,
    pub pairs_before: usize,
    pub pairs_after: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Transport {
    pub quiver: Quiver,
    pub z: DimVector,
    pub pairs: Vec<SchofieldPair>,
    pub dropped: Vec<DroppedPair>,
    pub steps: Vec<TransportStep>,
}

/// Pushes `z` and its pairs through the flips of `seq`, dropping a pair
/// when its submodule (sink mode) or factor (source mode) is the simple
/// at the flipped vertex. Ids are re-resolved in the final orientation.
pub fn transport_pairs(q: &Quiver, seq: &SinkSequence, pairs: &[SchofieldPair], z: &DimVector) -> Result<Transport> {
    let mut t = Transport { quiver: q.clone(), z: z.clone(), pairs: pairs.to_vec(), dropped: Vec::new(), steps: Vec::new() };
    for (step, &i) in seq.vertices.iter().enumerate() {
        t.flip(step, i, seq.mode)?;
    }
    if !seq.vertices.is_empty() {
        t.resolve(&EuclideanQuiver::new(t.quiver.clone())?)?;
    }
    Ok(t)
}

impl Transport {
    fn flip(&mut self, step: usize, i: usize, mode: FlipMode) -> Result<()> {
        let cur = &self.quiver;
        if !mode.legal(cur, i) {
            return Err(Error::IllegalFlip { vertex: i + 1, expected: mode.name() });
        }
        let simple = DimVector::unit(cur.vertex_count(), i);
        if self.z == simple {
            return Err(Error::KilledSimple(i + 1));
        }
        let before = (self.z.support(), self.pairs.len());
        let mut kept = Vec::with_capacity(self.pairs.len());
        for mut p in std::mem::take(&mut self.pairs) {
            let killed = match mode {
                FlipMode::Sink => p.x.dim == simple,
                FlipMode::Source => p.y.dim == simple,
            };
            if killed {
                self.dropped.push(DroppedPair { step, vertex: i + 1, pair: p });
                continue;
            }
            if p.x.dim == simple || p.y.dim == simple {
                return Err(Error::Verification(format!("pair {p} has the wrong side killed at vertex {}", i + 1)));
            }
            p.x.dim = reflect_vector(cur, i, &p.x.dim);
            p.y.dim = reflect_vector(cur, i, &p.y.dim);
            kept.push(p);
        }
        self.pairs = kept;
        self.z = reflect_vector(cur, i, &self.z);
        self.quiver = cur.flip_unchecked(i);
        self.steps.push(TransportStep {
            vertex: i + 1,
            support_before: before.0,
            support_after: self.z.support(),
            pairs_before: before.1,
            pairs_after: self.pairs.len(),
        });
        Ok(())
    }

    fn resolve(&mut self, eq: &EuclideanQuiver) -> Result<()> {
        for p in &mut self.pairs {
            p.x.id = eq.identify(&p.x.dim)?;
            p.y.id = eq.identify(&p.y.dim)?;
        }
        Ok(())
    }
}

/// The non-special pair of `z` whose `mode`-killed side is the simple at
/// `i`, if there is one. Only the single lattice point `z − e_i` is tested.
fn killed_pair(eq: &EuclideanQuiver, z: &DimVector, i: usize, mode: FlipMode) -> Result<Option<SchofieldPair>> {
    let simple = DimVector::unit(eq.n(), i);
    let rest = z - &simple;
    if !eq.is_exceptional_root(&rest) {
        return Ok(None);
    }
    let (x, y) = match mode {
        FlipMode::Sink => (simple, rest),
        FlipMode::Source => (rest, simple),
    };
    if eq.euler(&x, &y) != 0 {
        return Ok(None);
    }
    Ok(Some(SchofieldPair { x: eq.member(x)?, y: eq.member(y)?, u: 1, v: 1, special: false }))
}

/// Everything the reflection procedure did for one `z`.
#[derive(Clone, Debug, Serialize)]
pub struct ProcedureOutcome {
    pub target: Quiver,
    pub forward: SinkSequence,
    /// Forward flips, one per vertex of `forward`.
    pub forward_steps: Vec<TransportStep>,
    pub reflected_z: DimVector,
    pub target_pairs: Vec<SchofieldPair>,
    /// Flips on the way back, one per vertex of the inverse sequence.
    pub back_steps: Vec<TransportStep>,
    /// Pairs lost on the way back (the drop rule).
    pub dropped: Vec<DroppedPair>,
    /// Pairs killed by a forward flip; reinserted at the matching step on
    /// the way back, since no pair of the reflected module maps onto them.
    pub restored: Vec<DroppedPair>,
    pub pairs: Vec<SchofieldPair>,
}

/// Case 1 (`z` preinjective or regular): sink flips to the target, pairs
/// there, source flips back. Case 2 (`z` preprojective): the dual. The
/// special pair is computed in the original orientation.
pub fn run_procedure(eq: &EuclideanQuiver, z: &DimVector) -> Result<ProcedureOutcome> {
    eq.check_vector(z)?;
    if !eq.is_exceptional_root(z) {
        return Err(Error::NotExceptional(z.to_string()));
    }
    let q = eq.quiver();
    let target = procedure_target(eq)?;
    let forward = if eq.defect(z) < 0 { source_sequence(q, &target)? } else { sink_sequence(q, &target)? };

    // forward push, remembering the orientation and killed pair at each step
    let mut push = Transport { quiver: q.clone(), z: z.clone(), pairs: Vec::new(), dropped: Vec::new(), steps: Vec::new() };
    let mut killed: Vec<Option<SchofieldPair>> = Vec::new();
    let mut stage_eq = eq.clone();
    for (step, &i) in forward.vertices.iter().enumerate() {
        killed.push(killed_pair(&stage_eq, &push.z, i, forward.mode)?);
        push.flip(step, i, forward.mode)?;
        stage_eq = EuclideanQuiver::new(push.quiver.clone())?;
    }
    let target_pairs = stage_eq.nonspecial_pairs(&push.z)?;

    let back_seq = forward.inverse();
    let mut back = Transport {
        quiver: target.clone(),
        z: push.z.clone(),
        pairs: target_pairs.clone(),
        dropped: Vec::new(),
        steps: Vec::new(),
    };
    let mut restored = Vec::new();
    for (step, &i) in back_seq.vertices.iter().enumerate() {
        back.flip(step, i, back_seq.mode)?;
        let forward_step = forward.vertices.len() - 1 - step;
        if let Some(p) = killed[forward_step].take() {
            restored.push(DroppedPair { step, vertex: i + 1, pair: p.clone() });
            back.pairs.push(p);
        }
    }
    if &back.z != z || &back.quiver != q {
        return Err(Error::Verification("reflecting back did not return to the start".into()));
    }
    back.resolve(eq)?;
    let mut pairs = back.pairs;
    pairs.sort_by(|a, b| a.x.dim.cmp(&b.x.dim));
    pairs.extend(eq.special_pair(z)?);
    Ok(ProcedureOutcome {
        target,
        forward,
        forward_steps: push.steps,
        reflected_z: push.z,
        target_pairs,
        back_steps: back.steps,
        dropped: back.dropped,
        restored,
        pairs,
    })
}

pub fn pairs_any_orientation(eq: &EuclideanQuiver, z: &DimVector) -> Result<Vec<SchofieldPair>> {
    Ok(run_procedure(eq, z)?.pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{parse_quiver, APPENDIX_PRESETS};
    use proptest::prelude::*;

    fn v<const N: usize>(c: [i64; N]) -> DimVector {
        DimVector::from(c)
    }

    #[test]
    fn reflect_example() {
        let q = parse_quiver("A~1,2").unwrap();
        assert_eq!(reflect_vector(&q, 0, &v([2, 2, 1])), v([1, 2, 1]));
    }

    #[test]
    fn delta_is_fixed_by_reflections() {
        for name in APPENDIX_PRESETS {
            let eq = EuclideanQuiver::parse(name).unwrap();
            for i in 0..eq.n() {
                assert_eq!(&reflect_vector(eq.quiver(), i, eq.delta()), eq.delta(), "{name} vertex {}", i + 1);
            }
        }
    }

    #[test]
    fn sequences_replay_to_target() {
        let q = parse_quiver("D~4").unwrap();
        assert!(sink_sequence(&q, &q).unwrap().vertices.is_empty());
        // reverse the arm 3->5
        let bent = Quiver::from_one_based(5, &[(5, 3), (5, 1), (5, 2), (4, 5)]).unwrap();
        let seq = sink_sequence(&bent, &q).unwrap();
        assert!(!seq.vertices.is_empty());
        assert_eq!(seq.replay(&bent).unwrap(), q);
        assert_eq!(seq.inverse().replay(&q).unwrap(), bent);
        let src = source_sequence(&bent, &q).unwrap();
        assert_eq!(src.replay(&bent).unwrap(), q);
        let other = parse_quiver("A~1,2").unwrap();
        assert!(matches!(sink_sequence(&q, &other), Err(Error::NoFlipSequence(_))));
    }

    #[test]
    fn transport_roundtrip_and_drop() {
        let eq = EuclideanQuiver::parse("A~1,2").unwrap();
        let z = v([2, 2, 1]);
        let pairs = eq.nonspecial_pairs(&z).unwrap();
        let empty = SinkSequence { vertices: vec![], mode: FlipMode::Sink };
        assert_eq!(transport_pairs(eq.quiver(), &empty, &pairs, &z).unwrap().pairs, pairs);
        let seq = SinkSequence { vertices: vec![0], mode: FlipMode::Sink };
        let there = transport_pairs(eq.quiver(), &seq, &pairs, &z).unwrap();
        let back = transport_pairs(&there.quiver, &seq.inverse(), &there.pairs, &there.z).unwrap();
        assert_eq!(back.pairs, pairs);
        assert_eq!(back.z, z);
        // P(0,2) = (1,1,0) has the single pair (R_0^1(1), P(0,1)) with X = S(1)
        let z = v([1, 1, 0]);
        let pairs = eq.nonspecial_pairs(&z).unwrap();
        assert_eq!(pairs[0].x.dim, v([1, 0, 0]));
        let t = transport_pairs(eq.quiver(), &seq, &pairs, &z).unwrap();
        assert_eq!(t.dropped.len(), 1);
        assert_eq!(t.z.support(), z.support() - 1);
        let killed = transport_pairs(eq.quiver(), &seq, &[], &v([1, 0, 0]));
        assert_eq!(killed.unwrap_err(), Error::KilledSimple(1));
    }

    #[test]
    fn procedure_on_canonical_matches_direct() {
        let eq = EuclideanQuiver::parse("D~4").unwrap();
        for z in eq.exceptional_roots_below(&eq.delta().scale(2)).unwrap() {
            assert_eq!(pairs_any_orientation(&eq, &z).unwrap(), eq.all_pairs(&z).unwrap());
        }
    }

    fn random_orientation(name: &'static str) -> impl Strategy<Value = Quiver> {
        let base = parse_quiver(name).unwrap();
        prop::collection::vec(any::<bool>(), base.arrows().len()).prop_filter_map("cyclic", move |flips| {
            let arrows = base
                .arrows()
                .iter()
                .zip(flips)
                .map(|(a, f)| if f { (a.head, a.tail) } else { (a.tail, a.head) })
                .collect();
            Quiver::new(base.vertex_count(), arrows).ok()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn procedure_agrees_with_direct_on_e6(q in random_orientation("E~6")) {
            let eq = EuclideanQuiver::new(q).unwrap();
            for z in eq.exceptional_roots_below(eq.delta()).unwrap() {
                let mut a = pairs_any_orientation(&eq, &z).unwrap();
                let mut b = eq.all_pairs(&z).unwrap();
                a.sort_by_key(SchofieldPair::key);
                b.sort_by_key(SchofieldPair::key);
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn reflections_preserve_forms(q in random_orientation("D~5"), x in prop::collection::vec(-6i64..=6, 6)) {
            let x = DimVector::new(x);
            let eq = EuclideanQuiver::new(q.clone()).unwrap();
            for i in q.sinks().into_iter().chain(q.sources()) {
                let flipped = EuclideanQuiver::new(q.flip(i).unwrap()).unwrap();
                let y = reflect_vector(&q, i, &x);
                prop_assert_eq!(reflect_vector(&q, i, &y), x.clone());
                prop_assert_eq!(flipped.tits(&y), eq.tits(&x));
                if eq.is_exceptional_root(&x) && x != DimVector::unit(6, i) {
                    prop_assert_eq!(flipped.defect(&y), eq.defect(&x));
                }
            }
        }
    }
}
