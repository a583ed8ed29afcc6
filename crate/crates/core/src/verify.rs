//! Verification suites: goldens, the brute-force oracle, and sampled
//! invariants. Sampling is driven by a seeded ChaCha stream, so equal seeds
//! give identical reports.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::appendix::appendix_preset;
use crate::error::{Error, Result};
use crate::forms::EuclideanQuiver;
use crate::golden::{check_formulas, compare, embedded_corpus, embedded_formulas};
use crate::lattice::DimVector;
use crate::oracle::bruteforce_pairs;
use crate::quiver::{EuclideanType, Quiver, APPENDIX_PRESETS};
use crate::reflection::{reflect_vector, run_procedure, FlipMode, ProcedureOutcome};
use crate::schofield::SchofieldPair;

const KEPT_FAILURES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    /// The first few failures.
    pub failures: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        CheckOutcome { name: name.to_string(), checked: 0, failed: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(detail());
        }
    }

    fn fail(&mut self, detail: String) {
        self.failed += 1;
        if self.failures.len() < KEPT_FAILURES {
            self.failures.push(detail);
        }
    }

    /// Counts an engine error as one failed check.
    fn guard<T>(&mut self, context: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checked += 1;
                self.fail(format!("{context}: {e}"));
                None
            }
        }
    }
}

fn keys(pairs: &[SchofieldPair]) -> BTreeSet<(String, String, u32, u32)> {
    pairs.iter().map(SchofieldPair::key).collect()
}

/// Cartan matrix, Coxeter matrix and δ against the printed headers.
pub fn matrix_goldens(presets: &[&str]) -> CheckOutcome {
    let mut out = CheckOutcome::new("matrix goldens");
    for &name in presets {
        let Some(printed) = appendix_preset(name) else {
            out.fail(format!("{name}: no printed header"));
            continue;
        };
        let Some(eq) = out.guard(name, EuclideanQuiver::new(printed.quiver.clone())) else { continue };
        out.record(eq.cartan() == &printed.cartan, || format!("{name}: C = {} but printed {}", eq.cartan(), printed.cartan));
        out.record(eq.coxeter() == &printed.coxeter, || {
            format!("{name}: Φ = {} but printed {}", eq.coxeter(), printed.coxeter)
        });
        out.record(eq.delta() == &printed.delta, || format!("{name}: δ = {} but printed {}", eq.delta(), printed.delta));
    }
    out
}

/// The embedded corpus, restricted to `presets` when given.
pub fn pair_goldens(presets: Option<&[&str]>) -> CheckOutcome {
    let mut out = CheckOutcome::new("pair goldens");
    let entries: Vec<_> =
        embedded_corpus().into_iter().filter(|e| presets.is_none_or(|p| p.contains(&e.preset.as_str()))).collect();
    let report = compare(&entries);
    out.checked = report.checked;
    for d in report.diffs {
        let mut msg = format!("{} {} (line {})", d.preset, d.module, d.line);
        if let Some(e) = d.error {
            let _ = write!(msg, ": {e}");
        }
        if !d.missing.is_empty() {
            let _ = write!(msg, " missing {}", d.missing.join(" "));
        }
        if !d.extra.is_empty() {
            let _ = write!(msg, " extra {}", d.extra.join(" "));
        }
        out.fail(msg);
    }
    out
}

/// Each general-`n` row at `count` consecutive admissible `n`.
pub fn formula_goldens(count: i64) -> CheckOutcome {
    let mut out = CheckOutcome::new("general-n formulas");
    let report = check_formulas(&embedded_formulas(), count);
    out.checked = report.instances;
    for d in report.diffs {
        let mut msg = format!("{} {} at n = {} (line {})", d.preset, d.row, d.n, d.line);
        if let Some(e) = d.error {
            let _ = write!(msg, ": {e}");
        }
        if !d.missing.is_empty() {
            let _ = write!(msg, " missing {}", d.missing.join(" "));
        }
        if !d.extra.is_empty() {
            let _ = write!(msg, " extra {}", d.extra.join(" "));
        }
        out.fail(msg);
    }
    out
}

/// `bruteforce_pairs` against `all_pairs` on every exceptional `z ≤ kδ`.
pub fn oracle_equivalence(presets: &[&str], k: i64) -> CheckOutcome {
    let mut out = CheckOutcome::new("oracle equivalence");
    for &name in presets {
        let Some(eq) = out.guard(name, EuclideanQuiver::parse(name)) else { continue };
        let Some(roots) = out.guard(name, eq.exceptional_roots_below(&eq.delta().scale(k))) else { continue };
        for z in roots {
            let ctx = format!("{name} z = {z}");
            let Some(brute) = out.guard(&ctx, bruteforce_pairs(&eq, &z)) else { continue };
            let Some(engine) = out.guard(&ctx, eq.all_pairs(&z)) else { continue };
            let (b, e) = (keys(&brute), keys(&engine));
            out.record(b == e, || {
                let only_b: Vec<_> = b.difference(&e).map(|k| format!("{k:?}")).collect();
                let only_e: Vec<_> = e.difference(&b).map(|k| format!("{k:?}")).collect();
                format!("{ctx}: oracle only {only_b:?}, engine only {only_e:?}")
            });
        }
    }
    out
}

/// Count theorem and the Ext bound, together over every exceptional `z ≤ kδ`.
pub fn count_and_ext_bound(presets: &[&str], k: i64) -> (CheckOutcome, CheckOutcome) {
    let mut count = CheckOutcome::new("count theorem");
    let mut ext = CheckOutcome::new("ext bound");
    for &name in presets {
        let Some(eq) = count.guard(name, EuclideanQuiver::parse(name)) else { continue };
        let Some(roots) = count.guard(name, eq.exceptional_roots_below(&eq.delta().scale(k))) else { continue };
        let delta = eq.delta();
        for z in roots {
            let ctx = format!("{name} z = {z}");
            let Some(pairs) = count.guard(&ctx, eq.all_pairs(&z)) else { continue };
            count.record(pairs.len() + 1 == z.support(), || {
                format!("{ctx}: {} pairs for support {}", pairs.len(), z.support())
            });
            let d = eq.defect(&z);
            let admits = d.abs() == 1
                && (1..).map(|u| &z - &delta.scale(u)).take_while(|r| r.is_nonneg()).any(|r| {
                    !r.is_zero() && eq.is_positive_real_root(&r)
                });
            let specials = pairs.iter().filter(|p| p.special).count();
            count.record(specials == usize::from(admits), || format!("{ctx}: {specials} special pairs, expected {}", u8::from(admits)));
            for p in &pairs {
                let e = -eq.euler(&p.y.dim, &p.x.dim);
                let ok = if p.special {
                    e == 2 && &(&p.x.dim + &p.y.dim) == delta && eq.defect(&p.x.dim) == -1 && eq.defect(&p.y.dim) == 1
                } else {
                    e == 1
                };
                ext.record(ok, || format!("{ctx}: pair {p} has −⟨y,x⟩ = {e}"));
            }
        }
    }
    (count, ext)
}

/// Every check of `check_pair` on every pair of every exceptional `z ≤ kδ`.
pub fn pair_properties(presets: &[&str], k: i64) -> CheckOutcome {
    let mut out = CheckOutcome::new("pair properties");
    for &name in presets {
        let Some(eq) = out.guard(name, EuclideanQuiver::parse(name)) else { continue };
        let Some(roots) = out.guard(name, eq.exceptional_roots_below(&eq.delta().scale(k))) else { continue };
        for z in roots {
            let Some(pairs) = out.guard(&format!("{name} z = {z}"), eq.all_pairs(&z)) else { continue };
            for p in &pairs {
                let r = eq.check_pair(&z, p);
                out.record(r.passed(), || {
                    let names: Vec<_> = r.failures().iter().map(|c| c.name).collect();
                    format!("{name} z = {z} pair {p}: {}", names.join(", "))
                });
            }
        }
    }
    out
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DimVector {
    DimVector::new((0..n).map(|_| rng.gen_range(-10..=10)).collect())
}

/// `⟨a,b⟩ = −⟨b,Φa⟩`, `q ≥ 0` and `Φδ = δ` on random vectors.
pub fn form_identities(presets: &[&str], samples: usize, rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut out = CheckOutcome::new("form identities");
    for &name in presets {
        let Some(eq) = out.guard(name, EuclideanQuiver::parse(name)) else { continue };
        let n = eq.n();
        out.record(&eq.phi(eq.delta()) == eq.delta(), || format!("{name}: Φδ ≠ δ"));
        for _ in 0..samples {
            let (a, b) = (random_vector(rng, n), random_vector(rng, n));
            out.record(eq.euler(&a, &b) == -eq.euler(&b, &eq.phi(&a)), || format!("{name}: ⟨a,b⟩ ≠ −⟨b,Φa⟩ at a = {a}, b = {b}"));
            out.record(eq.tits(&a) >= 0, || format!("{name}: q({a}) < 0"));
        }
    }
    out
}

pub fn expected_tube_ranks(ty: EuclideanType) -> Vec<usize> {
    let mut r = match ty {
        EuclideanType::A { p, q } => [p, q].into_iter().filter(|&k| k != 1).collect(),
        EuclideanType::D(m) => vec![2, 2, m - 2],
        EuclideanType::E6 => vec![3, 3, 2],
        EuclideanType::E7 => vec![4, 3, 2],
        EuclideanType::E8 => vec![5, 3, 2],
    };
    r.sort_unstable_by(|a, b| b.cmp(a));
    r
}

/// Tube ranks per type; each mouth sums to δ and is a single Φ-orbit.
pub fn tube_structure(presets: &[&str]) -> CheckOutcome {
    let mut out = CheckOutcome::new("tube structure");
    for &name in presets {
        let Some(eq) = out.guard(name, EuclideanQuiver::parse(name)) else { continue };
        let Some(tubes) = out.guard(name, eq.tubes()) else { continue };
        let mut ranks: Vec<usize> = tubes.iter().map(|t| t.rank()).collect();
        ranks.sort_unstable_by(|a, b| b.cmp(a));
        let want = expected_tube_ranks(eq.ty());
        out.record(ranks == want, || format!("{name}: ranks {ranks:?}, expected {want:?}"));
        for tube in tubes {
            let m = tube.rank();
            let sum = tube.mouth.iter().fold(DimVector::zeros(eq.n()), |acc, v| &acc + v);
            out.record(&sum == eq.delta(), || format!("{name} tube {}: mouth sums to {sum}", tube.label));
            for l in 0..m {
                let prev = &tube.mouth[(l + m - 1) % m];
                out.record(&eq.phi(&tube.mouth[l]) == prev, || format!("{name} tube {}: Φ breaks the mouth at {}", tube.label, l + 1));
            }
        }
    }
    out
}

/// A uniformly chosen acyclic orientation of the preset's graph.
pub fn random_orientation(name: &str, rng: &mut ChaCha8Rng) -> Result<Quiver> {
    let base = EuclideanQuiver::parse(name)?;
    let edges: Vec<(usize, usize)> = base.quiver().arrows().iter().map(|a| (a.tail, a.head)).collect();
    for _ in 0..1000 {
        let arrows = edges.iter().map(|&(t, h)| if rng.gen_bool(0.5) { (t, h) } else { (h, t) }).collect();
        if let Ok(q) = Quiver::new(base.n(), arrows) {
            return Ok(q);
        }
    }
    Err(Error::InvalidQuiver(format!("no acyclic orientation of {name} found")))
}

/// The reflection procedure against direct enumeration on random
/// orientations, with the drop rule checked at every flip on the way back.
pub fn procedure_consistency(specs: &[(&str, usize)], k: i64, rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut out = CheckOutcome::new("procedure consistency");
    for &(name, count) in specs {
        for _ in 0..count {
            let Some(q) = out.guard(name, random_orientation(name, rng)) else { continue };
            let Some(eq) = out.guard(name, EuclideanQuiver::new(q.clone())) else { continue };
            let Some(roots) = out.guard(name, eq.exceptional_roots_below(&eq.delta().scale(k))) else { continue };
            for z in roots {
                let ctx = format!("{q} z = {z}");
                let Some(direct) = out.guard(&ctx, eq.all_pairs(&z)) else { continue };
                let Some(outcome) = out.guard(&ctx, run_procedure(&eq, &z)) else { continue };
                out.record(keys(&direct) == keys(&outcome.pairs), || format!("{ctx}: procedure and direct enumeration differ"));
                drop_rule(&mut out, &ctx, &outcome);
            }
        }
    }
    out
}

fn drop_rule(out: &mut CheckOutcome, ctx: &str, o: &ProcedureOutcome) {
    let back = o.forward.inverse();
    let mut quiver = o.target.clone();
    let mut z = o.reflected_z.clone();
    for (step, (&i, record)) in back.vertices.iter().zip(&o.back_steps).enumerate() {
        let dropped: Vec<_> = o.dropped.iter().filter(|d| d.step == step).collect();
        let restored = o.restored.iter().filter(|d| d.step == step).count();
        let simple = DimVector::unit(quiver.vertex_count(), i);
        out.record(record.pairs_after + dropped.len() == record.pairs_before, || {
            format!("{ctx}: step {step} went {} → {} with {} drops", record.pairs_before, record.pairs_after, dropped.len())
        });
        for d in &dropped {
            let killed = if back.mode == FlipMode::Sink { &d.pair.x.dim } else { &d.pair.y.dim };
            out.record(killed == &simple, || format!("{ctx}: step {step} dropped {} without a simple member", d.pair));
        }
        z = reflect_vector(&quiver, i, &z);
        quiver = match quiver.flip(i) {
            Ok(q) => q,
            Err(e) => {
                out.fail(format!("{ctx}: {e}"));
                return;
            }
        };
        let direct = EuclideanQuiver::new(quiver.clone()).and_then(|eq| eq.nonspecial_pairs(&z));
        let Some(direct) = out.guard(ctx, direct) else { return };
        out.record(direct.len() == record.pairs_after + restored, || {
            format!("{ctx}: step {step} carries {} + {restored} pairs, direct count {}", record.pairs_after, direct.len())
        });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Golden,
    Oracle,
    Invariants,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "golden" => Ok(Suite::Golden),
            "oracle" => Ok(Suite::Oracle),
            "invariants" => Ok(Suite::Invariants),
            "all" => Ok(Suite::All),
            _ => Err(Error::Parse(format!("unknown suite {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Root bound for the count theorem, in multiples of δ.
    pub count_bound: i64,
    pub samples: usize,
    pub orientations: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, count_bound: 3, samples: 1000, orientations: 10 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CheckOutcome::passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            if o.passed() {
                let _ = writeln!(s, "PASS {} ({} checks)", o.name, o.checked);
            } else {
                let _ = writeln!(s, "FAIL {} ({} of {} checks failed)", o.name, o.failed, o.checked);
                for f in &o.failures {
                    let _ = writeln!(s, "  {f}");
                }
            }
        }
        s
    }
}

pub const SMALL_PRESETS: [&str; 3] = ["A~1,2", "A~2,2", "D~4"];

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut outcomes = Vec::new();
    if matches!(suite, Suite::Golden | Suite::All) {
        outcomes.push(matrix_goldens(&APPENDIX_PRESETS));
        outcomes.push(pair_goldens(None));
        outcomes.push(formula_goldens(5));
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        outcomes.push(oracle_equivalence(&SMALL_PRESETS, 2));
    }
    if matches!(suite, Suite::Invariants | Suite::All) {
        outcomes.push(form_identities(&APPENDIX_PRESETS, config.samples, &mut rng));
        outcomes.push(tube_structure(&APPENDIX_PRESETS));
        let (count, ext) = count_and_ext_bound(&APPENDIX_PRESETS, config.count_bound);
        outcomes.push(count);
        outcomes.push(ext);
        outcomes.push(procedure_consistency(&[("D~4", config.orientations), ("A~2,3", config.orientations)], 2, &mut rng));
    }
    VerifyReport { suite, seed: config.seed, outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(matrix_goldens(&["A~1,2", "D~4"]).passed());
        assert!(oracle_equivalence(&["A~1,2"], 2).passed());
        assert!(tube_structure(&["A~2,3", "D~6", "E~7"]).passed());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(form_identities(&["A~1,2"], 50, &mut rng).passed());
        let (c, e) = count_and_ext_bound(&["A~2,2", "D~4"], 2);
        assert!(c.passed() && e.passed(), "{c:?} {e:?}");
    }

    #[test]
    fn procedure_on_small_orientations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let o = procedure_consistency(&[("D~4", 2), ("A~2,3", 2)], 2, &mut rng);
        assert!(o.passed(), "{o:?}");
    }

    #[test]
    fn orientations_follow_seed() {
        let a = random_orientation("A~2,3", &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = random_orientation("A~2,3", &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn expected_ranks() {
        assert_eq!(expected_tube_ranks(EuclideanType::A { p: 1, q: 3 }), vec![3]);
        assert_eq!(expected_tube_ranks(EuclideanType::D(4)), vec![2, 2, 2]);
    }
}
