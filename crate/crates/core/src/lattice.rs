//! Integer vectors and square matrices over the vertex lattice.
//!
//! Arithmetic is plain `i64`; the workspace builds with overflow checks in
//! every profile, so an overflow aborts instead of wrapping.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension vector, indexed by 0-based vertex. Ordering is lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(Vec<i64>);

impl DimVector {
    pub fn new(coords: Vec<i64>) -> Self {
        DimVector(coords)
    }

    pub fn zeros(n: usize) -> Self {
        DimVector(vec![0; n])
    }

    /// Unit vector at a 0-based vertex.
    pub fn unit(n: usize, vertex: usize) -> Self {
        let mut v = vec![0; n];
        v[vertex] = 1;
        DimVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, i64> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Nonnegative and nonzero.
    pub fn is_positive(&self) -> bool {
        self.is_nonneg() && !self.is_zero()
    }

    /// Componentwise `self <= other`.
    pub fn leq(&self, other: &DimVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise `self <= other` and `self != other`.
    pub fn lt(&self, other: &DimVector) -> bool {
        self.leq(other) && self != other
    }

    /// Number of nonzero coordinates.
    pub fn support(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    pub fn scale(&self, k: i64) -> DimVector {
        DimVector(self.0.iter().map(|&c| c * k).collect())
    }

    pub fn max_coord(&self) -> i64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn gcd(&self) -> i64 {
        self.0.iter().fold(0, |g, &c| gcd(g, c))
    }

    pub fn dot(&self, other: &DimVector) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: n, got: self.0.len() })
        }
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl From<Vec<i64>> for DimVector {
    fn from(v: Vec<i64>) -> Self {
        DimVector(v)
    }
}

impl<const N: usize> From<[i64; N]> for DimVector {
    fn from(v: [i64; N]) -> Self {
        DimVector(v.to_vec())
    }
}

impl Index<usize> for DimVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for DimVector {
    fn index_mut(&mut self, i: usize) -> &mut i64 {
        &mut self.0[i]
    }
}

impl Add for &DimVector {
    type Output = DimVector;
    fn add(self, rhs: &DimVector) -> DimVector {
        assert_eq!(self.len(), rhs.len(), "vector length mismatch");
        DimVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &DimVector {
    type Output = DimVector;
    fn sub(self, rhs: &DimVector) -> DimVector {
        assert_eq!(self.len(), rhs.len(), "vector length mismatch");
        DimVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &DimVector {
    type Output = DimVector;
    fn neg(self) -> DimVector {
        DimVector(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Accepts `(1,2,3)`, `1,2,3`, `[1, 2, 3]` or `1 2 3`.
impl FromStr for DimVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let coords = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad coordinate {t:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if coords.is_empty() {
            return Err(Error::Parse(format!("empty vector {s:?}")));
        }
        Ok(DimVector(coords))
    }
}

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> DimVector {
        DimVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> DimVector {
        DimVector((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).into_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &DimVector) -> DimVector {
        assert_eq!(self.cols, v.len(), "matrix/vector shape mismatch");
        DimVector((0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum()).collect())
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &DimVector, y: &DimVector) -> i64 {
        x.dot(&self.apply(y))
    }

    /// Exact inverse of a unimodular matrix by Euclidean row reduction.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        if self.rows != self.cols {
            return Err(Error::NotUnimodular);
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = Self::identity(n).to_rows();
        for k in 0..n {
            loop {
                let pivot = (k..n).filter(|&r| a[r][k] != 0).min_by_key(|&r| a[r][k].abs());
                let Some(p) = pivot else { return Err(Error::NotUnimodular) };
                a.swap(k, p);
                inv.swap(k, p);
                let mut clean = true;
                for r in k + 1..n {
                    if a[r][k] != 0 {
                        let q = a[r][k] / a[k][k];
                        sub_row(&mut a, r, k, q);
                        sub_row(&mut inv, r, k, q);
                        clean &= a[r][k] == 0;
                    }
                }
                if clean {
                    break;
                }
            }
            match a[k][k] {
                1 => {}
                -1 => {
                    negate_row(&mut a, k);
                    negate_row(&mut inv, k);
                }
                _ => return Err(Error::NotUnimodular),
            }
        }
        for k in (0..n).rev() {
            for r in 0..k {
                let q = a[r][k];
                if q != 0 {
                    sub_row(&mut a, r, k, q);
                    sub_row(&mut inv, r, k, q);
                }
            }
        }
        Self::from_rows(inv)
    }

    /// A Z-basis of the integer kernel `{v : M v = 0}`.
    pub fn integer_kernel(&self) -> Vec<DimVector> {
        // Row-reduce Mᵀ with unimodular operations U; the rows of U that
        // land on zero rows of U Mᵀ span the kernel of M.
        let mut m = self.transpose().to_rows();
        let n = self.cols;
        let mut u = Self::identity(n).to_rows();
        let mut pivot_row = 0;
        for col in 0..self.rows {
            if pivot_row == n {
                break;
            }
            loop {
                let pivot = (pivot_row..n).filter(|&r| m[r][col] != 0).min_by_key(|&r| m[r][col].abs());
                let Some(p) = pivot else { break };
                m.swap(pivot_row, p);
                u.swap(pivot_row, p);
                let mut clean = true;
                for r in pivot_row + 1..n {
                    if m[r][col] != 0 {
                        let q = m[r][col] / m[pivot_row][col];
                        sub_row(&mut m, r, pivot_row, q);
                        sub_row(&mut u, r, pivot_row, q);
                        clean &= m[r][col] == 0;
                    }
                }
                if clean {
                    pivot_row += 1;
                    break;
                }
            }
        }
        (pivot_row..n).map(|r| DimVector(u[r].clone())).collect()
    }
}

fn sub_row(m: &mut [Vec<i64>], target: usize, source: usize, q: i64) {
    let src = m[source].clone();
    for (t, s) in m[target].iter_mut().zip(src) {
        *t -= q * s;
    }
}

fn negate_row(m: &mut [Vec<i64>], r: usize) {
    for c in m[r].iter_mut() {
        *c = -*c;
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
