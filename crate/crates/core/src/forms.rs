//! Euler and Tits forms, Cartan and Coxeter matrices, δ and defect.

use std::sync::OnceLock;

use crate::catalog::TubeLayout;
use crate::error::{Error, Result};
use crate::lattice::{DimVector, IntMatrix};
use crate::quiver::{detect_type, EuclideanType, Quiver};

/// `⟨x,y⟩ = Σ x_i y_i − Σ_α x_t(α) y_h(α)`, summed directly.
pub fn euler_form(q: &Quiver, x: &DimVector, y: &DimVector) -> Result<i64> {
    x.check_len(q.vertex_count())?;
    y.check_len(q.vertex_count())?;
    Ok(euler_unchecked(q, x, y))
}

pub(crate) fn euler_unchecked(q: &Quiver, x: &DimVector, y: &DimVector) -> i64 {
    let diag: i64 = x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
    let off: i64 = q.arrows().iter().map(|a| x[a.tail] * y[a.head]).sum();
    diag - off
}

pub fn tits_form(q: &Quiver, x: &DimVector) -> Result<i64> {
    euler_form(q, x, x)
}

/// Matrix `E` with `⟨x,y⟩ = xᵀ E y`.
pub fn euler_matrix(q: &Quiver) -> IntMatrix {
    let mut e = IntMatrix::identity(q.vertex_count());
    for a in q.arrows() {
        e.set(a.tail, a.head, e.get(a.tail, a.head) - 1);
    }
    e
}

/// `C[i][j]` counts paths from `j` to `i`; column `j` is `dim P(j)`.
pub fn cartan_matrix(q: &Quiver) -> IntMatrix {
    let n = q.vertex_count();
    let order = q.topological_order().expect("quiver is acyclic by construction");
    let mut c = IntMatrix::zeros(n, n);
    for j in 0..n {
        // paths from j: walk forward in topological order
        let mut paths = vec![0i64; n];
        paths[j] = 1;
        for &v in &order {
            if paths[v] == 0 {
                continue;
            }
            for a in q.arrows().iter().filter(|a| a.tail == v) {
                paths[a.head] += paths[v];
            }
        }
        for (i, &p) in paths.iter().enumerate() {
            c.set(i, j, p);
        }
    }
    c
}

/// `Φ = −Cᵀ C⁻¹`.
pub fn coxeter_matrix(q: &Quiver) -> IntMatrix {
    let c = cartan_matrix(q);
    let inv = c.inverse_unimodular().expect("Cartan matrix of an acyclic quiver is unimodular");
    c.transpose().mul(&inv).neg()
}

/// Positive primitive generator of the radical of the Tits form.
pub fn delta(q: &Quiver) -> Result<DimVector> {
    let e = euler_matrix(q);
    let sym = e.add(&e.transpose());
    let kernel = sym.integer_kernel();
    let [v] = kernel.as_slice() else {
        return Err(Error::NotEuclidean(format!("radical has rank {}", kernel.len())));
    };
    let g = v.gcd().max(1);
    let mut v = DimVector::new(v.iter().map(|c| c / g).collect());
    if v.iter().any(|&c| c < 0) {
        v = -&v;
    }
    if v.iter().any(|&c| c <= 0) {
        return Err(Error::NotEuclidean(format!("radical generator {v} is not sincere")));
    }
    Ok(v)
}

/// A Euclidean quiver with its matrices and δ computed once.
#[derive(Debug)]
pub struct EuclideanQuiver {
    quiver: Quiver,
    ty: EuclideanType,
    cartan: IntMatrix,
    coxeter: IntMatrix,
    coxeter_inv: IntMatrix,
    euler: IntMatrix,
    delta: DimVector,
    pub(crate) tubes: OnceLock<Result<Vec<TubeLayout>>>,
    pub(crate) finite_roots: OnceLock<Vec<DimVector>>,
}

impl Clone for EuclideanQuiver {
    fn clone(&self) -> Self {
        EuclideanQuiver {
            quiver: self.quiver.clone(),
            ty: self.ty,
            cartan: self.cartan.clone(),
            coxeter: self.coxeter.clone(),
            coxeter_inv: self.coxeter_inv.clone(),
            euler: self.euler.clone(),
            delta: self.delta.clone(),
            tubes: OnceLock::new(),
            finite_roots: OnceLock::new(),
        }
    }
}

impl EuclideanQuiver {
    pub fn new(quiver: Quiver) -> Result<Self> {
        let ty = detect_type(&quiver)?;
        let cartan = cartan_matrix(&quiver);
        let cartan_inv = cartan.inverse_unimodular()?;
        let coxeter = cartan.transpose().mul(&cartan_inv).neg();
        let coxeter_inv = cartan.mul(&cartan_inv.transpose()).neg();
        debug_assert_eq!(coxeter.mul(&coxeter_inv), IntMatrix::identity(quiver.vertex_count()));
        let delta = delta(&quiver)?;
        Ok(EuclideanQuiver {
            euler: euler_matrix(&quiver),
            quiver,
            ty,
            cartan,
            coxeter,
            coxeter_inv,
            delta,
            tubes: OnceLock::new(),
            finite_roots: OnceLock::new(),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(crate::quiver::parse_quiver(text)?)
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn ty(&self) -> EuclideanType {
        self.ty
    }

    pub fn n(&self) -> usize {
        self.quiver.vertex_count()
    }

    pub fn cartan(&self) -> &IntMatrix {
        &self.cartan
    }

    pub fn coxeter(&self) -> &IntMatrix {
        &self.coxeter
    }

    pub fn coxeter_inv(&self) -> &IntMatrix {
        &self.coxeter_inv
    }

    pub fn delta(&self) -> &DimVector {
        &self.delta
    }

    /// `⟨x,y⟩` through the cached Euler matrix.
    pub fn euler(&self, x: &DimVector, y: &DimVector) -> i64 {
        self.euler.bilinear(x, y)
    }

    pub fn tits(&self, x: &DimVector) -> i64 {
        self.euler(x, x)
    }

    /// `∂x = ⟨δ,x⟩`.
    pub fn defect(&self, x: &DimVector) -> i64 {
        self.euler(&self.delta, x)
    }

    pub fn phi(&self, x: &DimVector) -> DimVector {
        self.coxeter.apply(x)
    }

    pub fn phi_inv(&self, x: &DimVector) -> DimVector {
        self.coxeter_inv.apply(x)
    }

    pub fn phi_pow(&self, x: &DimVector, k: i64) -> DimVector {
        let mut v = x.clone();
        for _ in 0..k.unsigned_abs() {
            v = if k > 0 { self.phi(&v) } else { self.phi_inv(&v) };
        }
        v
    }

    pub fn check_vector(&self, x: &DimVector) -> Result<()> {
        x.check_len(self.n())
    }
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
    fn euler_examples() {
        let q = parse_quiver("A~1,2").unwrap();
        assert_eq!(euler_form(&q, &v([1, 0, 0]), &v([1, 0, 0])).unwrap(), 1);
        assert_eq!(euler_form(&q, &v([2, 1, 1]), &v([0, 1, 0])).unwrap(), 0);
        assert_eq!(euler_form(&q, &v([1, 1, 1]), &v([1, 1, 1])).unwrap(), 0);
        assert_eq!(tits_form(&q, &v([2, 2, 1])).unwrap(), 1);
        assert!(matches!(euler_form(&q, &v([1, 0]), &v([1, 0, 0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cartan_and_coxeter_a12() {
        let q = parse_quiver("A~1,2").unwrap();
        assert_eq!(cartan_matrix(&q).to_string(), "[[1,1,2],[0,1,1],[0,0,1]]");
        assert_eq!(coxeter_matrix(&q).to_string(), "[[-1,1,1],[-1,0,2],[-2,1,2]]");
    }

    #[test]
    fn cartan_without_arrows_is_identity() {
        let q = Quiver::new(3, vec![]).unwrap();
        assert_eq!(cartan_matrix(&q), IntMatrix::identity(3));
    }

    #[test]
    fn delta_examples() {
        let d = |name| delta(&parse_quiver(name).unwrap()).unwrap();
        assert_eq!(d("A~1,2"), v([1, 1, 1]));
        assert_eq!(d("D~4"), v([1, 1, 1, 1, 2]));
        assert_eq!(d("E~8"), v([2, 4, 6, 5, 4, 3, 2, 1, 3]));
        assert_eq!(d("K"), v([1, 1]));
    }

    #[test]
    fn defect_examples() {
        let eq = EuclideanQuiver::parse("A~1,2").unwrap();
        assert_eq!(eq.defect(&v([1, 0, 0])), -1);
        assert_eq!(eq.defect(&v([0, 0, 1])), 1);
        assert_eq!(eq.defect(eq.delta()), 0);
    }

    #[test]
    fn delta_is_fixed_by_coxeter() {
        for name in APPENDIX_PRESETS.iter().copied().chain(["K", "D~9", "A~4,6"]) {
            let eq = EuclideanQuiver::parse(name).unwrap();
            assert_eq!(&eq.phi(eq.delta()), eq.delta(), "{name}");
            assert_eq!(&eq.phi_inv(eq.delta()), eq.delta(), "{name}");
            assert_eq!(eq.tits(eq.delta()), 0);
        }
    }

    fn preset_and_vectors() -> impl Strategy<Value = (usize, Vec<i64>, Vec<i64>)> {
        (0..APPENDIX_PRESETS.len()).prop_flat_map(|k| {
            let n = parse_quiver(APPENDIX_PRESETS[k]).unwrap().vertex_count();
            (Just(k), prop::collection::vec(-10i64..=10, n), prop::collection::vec(-10i64..=10, n))
        })
    }

    proptest! {
        #[test]
        fn form_identities((k, a, b) in preset_and_vectors()) {
            let eq = EuclideanQuiver::parse(APPENDIX_PRESETS[k]).unwrap();
            let (a, b) = (DimVector::new(a), DimVector::new(b));
            let direct = euler_form(eq.quiver(), &a, &b).unwrap();
            prop_assert_eq!(direct, eq.euler(&a, &b));
            prop_assert_eq!(direct, -eq.euler(&b, &eq.phi(&a)));
            let cinv_t = eq.cartan().inverse_unimodular().unwrap().transpose();
            prop_assert_eq!(direct, cinv_t.bilinear(&a, &b));
            prop_assert!(eq.tits(&a) >= 0);
            prop_assert_eq!(eq.defect(&(&a + &b)), eq.defect(&a) + eq.defect(&b));
            prop_assert_eq!(eq.defect(&a), -eq.euler(&a, eq.delta()));
        }
    }
}
