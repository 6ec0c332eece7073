use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest dimension accepted by [`SymMatrix`].
pub const MIN_DIM: usize = 3;

/// Dense real symmetric `n x n` matrix, row-major.
///
/// Symmetry is exact: constructors reject any `a[i][j] != a[j][i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { n, data: vec![0.0; n * n] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.n + i] = d;
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        check_dim(n)?;
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch(n, row.len()));
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(n * n, data.len()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                // bitwise comparison would reject -0.0 vs 0.0; value equality is intended
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Builds a matrix from the upper triangle produced by `f(i, j)` with `i <= j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Squared Frobenius norm `sum a_ij^2`.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `A^2`, symmetric by construction.
    pub fn square(&self) -> SymMatrix {
        self.mul_sym(self)
    }

    /// Product of two commuting-in-use symmetric matrices, upper triangle mirrored.
    ///
    /// Only meaningful when the exact product is symmetric (powers of one matrix).
    pub(crate) fn mul_sym(&self, other: &SymMatrix) -> SymMatrix {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        SymMatrix { n, data: out }
    }

    pub fn scaled(&self, t: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * t).collect(),
        }
    }

    /// `A + lambda I`.
    pub fn shifted(&self, lambda: f64) -> SymMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += lambda;
        }
        out
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(SymMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Frobenius inner product `tr(A B)`.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// `Q A Q^T` for a square `q` (row-major), symmetrized from the upper triangle.
    pub fn conjugate(&self, q: &Square) -> Result<SymMatrix> {
        if q.n() != self.n {
            return Err(Error::DimensionMismatch(self.n, q.n()));
        }
        let n = self.n;
        // t = Q A
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                t[i * n + j] = (0..n).map(|k| q.get(i, k) * self.get(k, j)).sum();
            }
        }
        SymMatrix::from_upper_fn(n, |i, j| (0..n).map(|k| t[i * n + k] * q.get(j, k)).sum())
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < MIN_DIM {
        Err(Error::BadDimension(n, MIN_DIM))
    } else {
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.rows()
    }
}

/// General dense square matrix (eigenvector bases, orthogonal transforms).
#[derive(Debug, Clone, PartialEq)]
pub struct Square {
    n: usize,
    data: Vec<f64>,
}

impl Square {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "square matrix data length");
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Square {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.data[i * n + j];
            }
        }
        Square { n, data: out }
    }

    pub fn matmul(&self, other: &Square) -> Square {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Square { n, data: out }
    }

    /// Applies the plane rotation `[c s; -s c]` to rows `p` and `q` from the left.
    pub fn rotate_rows(&mut self, p: usize, q: usize, c: f64, s: f64) {
        let n = self.n;
        for j in 0..n {
            let a = self.data[p * n + j];
            let b = self.data[q * n + j];
            self.data[p * n + j] = c * a + s * b;
            self.data[q * n + j] = -s * a + c * b;
        }
    }

    /// Max deviation of `Q Q^T` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let qqt = self.matmul(&self.transpose());
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((qqt.get(i, j) - target).abs());
            }
        }
        worst
    }
}
