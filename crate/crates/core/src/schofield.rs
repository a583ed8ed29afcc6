//! Schofield pairs `0 → uX → Z → vY → 0` of an exceptional root `z`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{Family, ModuleId};
use crate::error::{Error, Result};
use crate::forms::EuclideanQuiver;
use crate::lattice::DimVector;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Member {
    pub id: ModuleId,
    pub dim: DimVector,
}

/// `x` is the submodule side, `y` the factor side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchofieldPair {
    pub x: Member,
    pub y: Member,
    pub u: u32,
    pub v: u32,
    pub special: bool,
}

impl SchofieldPair {
    /// `(Y,X)` with multiplicities, as the appendix prints it: `(I(0,3),2P(0,2))`.
    pub fn appendix_text(&self) -> String {
        let side = |k: u32, id: &ModuleId| {
            if k == 1 {
                id.appendix_text()
            } else {
                format!("{k}{}", id.appendix_text())
            }
        };
        format!("({},{})", side(self.v, &self.y.id), side(self.u, &self.x.id))
    }

    /// `(Y,X)` in the strict id grammar: `(I(0,3),2*P(0,2))`.
    pub fn corpus_text(&self) -> String {
        let side = |k: u32, id: &ModuleId| if k == 1 { id.to_string() } else { format!("{k}*{id}") };
        format!("({},{})", side(self.v, &self.y.id), side(self.u, &self.x.id))
    }

    pub fn key(&self) -> (String, String, u32, u32) {
        (self.x.id.to_string(), self.y.id.to_string(), self.u, self.v)
    }
}

impl fmt::Display for SchofieldPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.corpus_text())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub checks: Vec<Check>,
}

impl PairReport {
    fn push(&mut self, name: &'static str, holds: bool, detail: String) {
        self.checks.push(Check { name, holds, detail });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Factors,
    Submodules,
}

/// Prediction of the non-special partners of `z` on one side, for type Ã.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Characterization {
    pub side: Side,
    pub vectors: Vec<DimVector>,
}

impl EuclideanQuiver {
    fn require_exceptional(&self, z: &DimVector) -> Result<()> {
        self.check_vector(z)?;
        if self.is_exceptional_root(z) {
            Ok(())
        } else {
            Err(Error::NotExceptional(z.to_string()))
        }
    }

    pub fn member(&self, dim: DimVector) -> Result<Member> {
        Ok(Member { id: self.identify(&dim)?, dim })
    }

    /// Pairs with `u = v = 1`, sorted by `x`.
    pub fn nonspecial_pairs(&self, z: &DimVector) -> Result<Vec<SchofieldPair>> {
        self.require_exceptional(z)?;
        if z.support() <= 1 {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for x in self.exceptional_roots_below(z)? {
            if &x == z {
                continue;
            }
            let y = z - &x;
            if !self.is_exceptional_root(&y) || self.euler(&x, &y) != 0 {
                continue;
            }
            let back = self.euler(&y, &x);
            if back != -1 {
                return Err(Error::Verification(format!("orthogonal split {x} + {y} of {z} has ⟨y,x⟩ = {back}")));
            }
            out.push(SchofieldPair { x: self.member(x)?, y: self.member(y)?, u: 1, v: 1, special: false });
        }
        Ok(out)
    }

    /// The unique pair with `x + y = δ`, present when `|∂z| = 1` and `z > δ`.
    pub fn special_pair(&self, z: &DimVector) -> Result<Option<SchofieldPair>> {
        self.require_exceptional(z)?;
        let d = self.defect(z);
        if d.abs() != 1 {
            return Ok(None);
        }
        let delta = self.delta();
        for k in 1.. {
            let r = z - &delta.scale(k);
            if !r.is_nonneg() {
                return Ok(None);
            }
            if r.is_positive() && r.lt(delta) && self.is_positive_real_root(&r) && self.defect(&r) == d {
                let other = delta - &r;
                let k = u32::try_from(k).map_err(|_| Error::IterationBound(z.to_string()))?;
                let pair = if d < 0 {
                    SchofieldPair { x: self.member(r)?, y: self.member(other)?, u: k + 1, v: k, special: true }
                } else {
                    SchofieldPair { x: self.member(other)?, y: self.member(r)?, u: k, v: k + 1, special: true }
                };
                return Ok(Some(pair));
            }
        }
        unreachable!()
    }

    /// Non-special pairs then the special one; the count must be `s(z) − 1`.
    pub fn all_pairs(&self, z: &DimVector) -> Result<Vec<SchofieldPair>> {
        let mut pairs = self.nonspecial_pairs(z)?;
        if z.support() <= 1 {
            return Ok(pairs);
        }
        pairs.extend(self.special_pair(z)?);
        let expected = z.support() - 1;
        if pairs.len() != expected {
            return Err(Error::Verification(format!(
                "{z} has {} pairs, support predicts {expected}",
                pairs.len()
            )));
        }
        Ok(pairs)
    }

    pub fn all_pairs_of(&self, id: &ModuleId) -> Result<Vec<SchofieldPair>> {
        self.all_pairs(&self.dim_of(id)?)
    }

    /// Evaluates every Euler-form identity that applies to a proposed pair.
    pub fn check_pair(&self, z: &DimVector, pair: &SchofieldPair) -> PairReport {
        let mut r = PairReport::default();
        let (x, y) = (&pair.x.dim, &pair.y.dim);
        let (u, v) = (i64::from(pair.u), i64::from(pair.v));
        if x.len() != self.n() || y.len() != self.n() || z.len() != self.n() {
            r.push("shape", false, "vector length differs from vertex count".into());
            return r;
        }
        let sum = &x.scale(u) + &y.scale(v);
        r.push("sum", &sum == z, format!("{u}·{x} + {v}·{y} = {sum}"));
        let xy = self.euler(x, y);
        r.push("orthogonal", xy == 0, format!("⟨x,y⟩ = {xy}"));
        let ext = -self.euler(y, x);
        r.push("ext-bound", ext == 1 || ext == 2, format!("−⟨y,x⟩ = {ext}"));
        r.push("ext-formula", u * u + v * v - 1 == ext * u * v, format!("u²+v²−1 = {}", u * u + v * v - 1));
        r.push(
            "exceptional",
            self.is_exceptional_root(x) && self.is_exceptional_root(y),
            "both members exceptional".into(),
        );
        if pair.special {
            let delta = self.delta();
            let ok = (u - v).abs() == 1
                && &(x + y) == delta
                && self.defect(x) == -1
                && self.defect(y) == 1
                && ext == 2;
            r.push("special-shape", ok, format!("|u−v| = {}, ∂x = {}, ∂y = {}", (u - v).abs(), self.defect(x), self.defect(y)));
        } else {
            r.push("nonspecial-shape", u == 1 && v == 1 && ext == 1, format!("u = {u}, v = {v}"));
        }
        let regular = |w: &DimVector| self.defect(w) == 0;
        if !pair.special {
            if regular(x) && regular(z) {
                let same = match (self.regular_position(x), self.regular_position(z)) {
                    (Some((tx, lx, _)), Some((tz, lz, _))) => tx.label == tz.label && lx == lz,
                    _ => false,
                };
                r.push("same-socle", same, "x and z start at the same mouth vector".into());
            } else {
                let xz = self.euler(x, z);
                r.push("hom-x-z", xz == 1, format!("⟨x,z⟩ = {xz}"));
            }
            if regular(y) && regular(z) {
                let same = match (self.regular_position(y), self.regular_position(z)) {
                    (Some((ty, ly, tyl)), Some((tz, lz, tzl))) => {
                        ty.label == tz.label && ty.top_index(ly, tyl) == tz.top_index(lz, tzl)
                    }
                    _ => false,
                };
                r.push("same-top", same, "y and z end at the same mouth vector".into());
            } else {
                let zy = self.euler(z, y);
                r.push("hom-z-y", zy == 1, format!("⟨z,y⟩ = {zy}"));
            }
            if regular(z) && self.defect(x) == -1 {
                if let Some((_, top)) = self.regular_socle_top(z) {
                    let h = self.euler(x, &top);
                    r.push("preprojective-top", h == 1 && x.lt(z), format!("⟨x, top z⟩ = {h}"));
                }
            }
        }
        r
    }

    /// Type Ã only: the partners predicted from tube tops and socles.
    ///
    /// `∂z = −1`: factors are the regular exceptionals below `z` whose top
    /// `r` has `⟨z,r⟩ = 1`. `∂z = 1`: dually, submodules by socle.
    /// `z` regular: submodules are the shorter modules with the same socle
    /// plus the preprojectives `p < z` with `⟨p, top z⟩ = 1`.
    pub fn atype_factor_characterization(&self, z: &DimVector) -> Result<Characterization> {
        if !self.ty().is_a() {
            return Err(Error::WrongType(format!("{} is not of type Ã", self.ty())));
        }
        self.require_exceptional(z)?;
        let tubes = self.tubes()?;
        let d = self.defect(z);
        let mut vectors = Vec::new();
        let side = match d {
            -1 | 1 => {
                for tube in tubes {
                    let m = tube.rank();
                    for l in 1..=m {
                        for t in 1..m {
                            let rv = tube.regular(l, t);
                            if !rv.lt(z) {
                                continue;
                            }
                            let hit = if d < 0 {
                                self.euler(z, &tube.mouth[tube.top_index(l, t) - 1]) == 1
                            } else {
                                self.euler(&tube.mouth[l - 1], z) == 1
                            };
                            if hit {
                                vectors.push(rv);
                            }
                        }
                    }
                }
                if d < 0 {
                    Side::Factors
                } else {
                    Side::Submodules
                }
            }
            0 => {
                let (tube, l, t) = self
                    .regular_position(z)
                    .ok_or_else(|| Error::Verification(format!("regular root {z} lies in no tube")))?;
                for s in 1..t {
                    vectors.push(tube.regular(l, s));
                }
                let top = &tube.mouth[tube.top_index(l, t) - 1];
                for p in self.exceptional_roots_below(z)? {
                    if p.lt(z) && self.defect(&p) == -1 && self.euler(&p, top) == 1 {
                        vectors.push(p);
                    }
                }
                Side::Submodules
            }
            _ => return Err(Error::WrongType(format!("defect {d} does not occur in type Ã"))),
        };
        vectors.sort();
        Ok(Characterization { side, vectors })
    }
}

/// Appendix listing order: special pair last; non-special pairs ordered by
/// the factor for preinjective `z` and by the submodule otherwise.
pub fn appendix_order(z_family: Family, pairs: &mut [SchofieldPair]) {
    fn id_key(id: &ModuleId) -> (u8, u32, usize, usize) {
        match *id {
            ModuleId::Regular { l, t, .. } => (0, 0, l, t),
            ModuleId::Preproj { n, vertex } => (1, n, vertex, 0),
            ModuleId::Preinj { n, vertex } => (2, n, vertex, 0),
        }
    }
    pairs.sort_by(|a, b| {
        let side = |p: &SchofieldPair| {
            if z_family == Family::Preinjective {
                id_key(&p.y.id)
            } else {
                id_key(&p.x.id)
            }
        };
        a.special.cmp(&b.special).then_with(|| side(a).cmp(&side(b)))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::APPENDIX_PRESETS;

    fn eq(name: &str) -> EuclideanQuiver {
        EuclideanQuiver::parse(name).unwrap()
    }

    fn v<const N: usize>(c: [i64; N]) -> DimVector {
        DimVector::from(c)
    }

    fn texts(pairs: &[SchofieldPair]) -> Vec<String> {
        pairs.iter().map(SchofieldPair::appendix_text).collect()
    }

    #[test]
    fn nonspecial_examples() {
        let a12 = eq("A~1,2");
        let p = a12.nonspecial_pairs(&v([2, 2, 1])).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].x.dim, v([2, 1, 1]));
        assert_eq!(p[0].y.dim, v([0, 1, 0]));
        assert_eq!(texts(&p), ["(R_0^1(1),P(0,3))"]);
        assert!(a12.nonspecial_pairs(&v([1, 0, 0])).unwrap().is_empty());
        let d4 = eq("D~4");
        let mut p = d4.nonspecial_pairs(&v([1, 1, 0, 0, 1])).unwrap();
        assert!(p.windows(2).all(|w| w[0].x.dim < w[1].x.dim));
        appendix_order(Family::Preprojective, &mut p);
        assert_eq!(texts(&p), ["(P(1,1),P(0,1))", "(P(1,2),P(0,2))"]);
        assert!(matches!(a12.nonspecial_pairs(&v([1, 1, 1])), Err(Error::NotExceptional(_))));
    }

    #[test]
    fn special_examples() {
        let a12 = eq("A~1,2");
        let s = a12.special_pair(&v([2, 2, 1])).unwrap().unwrap();
        assert_eq!(s.appendix_text(), "(I(0,3),2P(0,2))");
        assert_eq!((s.u, s.v), (2, 1));
        let s = a12.special_pair(&v([2, 2, 3])).unwrap().unwrap();
        assert_eq!(s.appendix_text(), "(3I(0,3),2P(0,2))");
        assert_eq!(a12.special_pair(&v([1, 0, 0])).unwrap(), None);
    }

    #[test]
    fn all_pairs_examples() {
        let a12 = eq("A~1,2");
        assert_eq!(texts(&a12.all_pairs(&v([2, 2, 1])).unwrap()), ["(R_0^1(1),P(0,3))", "(I(0,3),2P(0,2))"]);
        assert!(a12.all_pairs(&v([0, 0, 1])).unwrap().is_empty());
        let e6 = eq("E~6");
        let mut pairs = e6.all_pairs_of(&"R[1]^1(2)".parse().unwrap()).unwrap();
        appendix_order(Family::Regular, &mut pairs);
        assert_eq!(
            texts(&pairs),
            ["(R_1^2(1),R_1^1(1))", "(I(3,7),P(0,5))", "(I(2,1),P(1,7))", "(I(1,5),P(2,1))", "(I(0,7),P(3,5))"]
        );
    }

    #[test]
    fn check_pair_reports() {
        let a12 = eq("A~1,2");
        let z = v([2, 2, 1]);
        let pairs = a12.all_pairs(&z).unwrap();
        let r = a12.check_pair(&z, &pairs[0]);
        assert!(r.passed(), "{r:?}");
        assert!(r.checks.iter().any(|c| c.name == "ext-bound" && c.detail == "−⟨y,x⟩ = 1"));
        let r = a12.check_pair(&z, &pairs[1]);
        assert!(r.passed(), "{r:?}");
        assert!(r.checks.iter().any(|c| c.name == "ext-bound" && c.detail == "−⟨y,x⟩ = 2"));
        let mut swapped = pairs[0].clone();
        std::mem::swap(&mut swapped.x, &mut swapped.y);
        assert!(!a12.check_pair(&z, &swapped).passed());
        let mut wrong = pairs[0].clone();
        wrong.x.dim = v([1, 1, 0]);
        assert!(!a12.check_pair(&z, &wrong).passed());
    }

    #[test]
    fn atype_characterization_examples() {
        let a12 = eq("A~1,2");
        let z = a12.dim_of(&"P(2,1)".parse().unwrap()).unwrap();
        let c = a12.atype_factor_characterization(&z).unwrap();
        assert_eq!(c.side, Side::Factors);
        let ys: Vec<DimVector> = a12.nonspecial_pairs(&z).unwrap().into_iter().map(|p| p.y.dim).collect();
        assert_eq!(c.vectors, ys);
        let a13 = eq("A~1,3");
        let c = a13.atype_factor_characterization(&v([1, 0, 1, 1])).unwrap();
        assert_eq!(c.side, Side::Submodules);
        assert!(c.vectors.contains(&a13.dim_of(&"R[0]^1(1)".parse().unwrap()).unwrap()));
        assert!(matches!(eq("D~4").atype_factor_characterization(&v([1, 0, 0, 0, 0])), Err(Error::WrongType(_))));
    }

    #[test]
    fn count_and_hubery_on_small_presets() {
        for name in APPENDIX_PRESETS.iter().take(6) {
            let e = eq(name);
            for z in e.exceptional_roots_below(&e.delta().scale(2)).unwrap() {
                let pairs = e.all_pairs(&z).unwrap();
                for p in &pairs {
                    let r = e.check_pair(&z, p);
                    assert!(r.passed(), "{name} {z} {p}: {:?}", r.failures());
                }
            }
        }
    }
}
