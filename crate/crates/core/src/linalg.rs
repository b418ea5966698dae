//! Small dense linear algebra for symmetric positive-definite systems.

use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// Square dense matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(PricingError::InvalidModel(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).take(self.n).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// Largest absolute asymmetry `|m_ik - m_ki|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for k in (i + 1)..self.n {
                worst = worst.max((self[(i, k)] - self[(k, i)]).abs());
            }
        }
        worst
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..self.n {
            for k in 0..self.n {
                if i != k {
                    worst = worst.max(self[(i, k)]);
                }
            }
        }
        worst
    }

    /// Weighted sum `Σ w_k M_k` of equally sized matrices.
    pub fn weighted_sum<'a>(terms: impl IntoIterator<Item = (f64, &'a Matrix)>) -> Option<Matrix> {
        let mut acc: Option<Matrix> = None;
        for (w, m) in terms {
            let acc = acc.get_or_insert_with(|| Matrix::zeros(m.n));
            if acc.n != m.n {
                return None;
            }
            for (a, b) in acc.data.iter_mut().zip(&m.data) {
                *a += w * b;
            }
        }
        acc
    }

    /// Cholesky factor of the principal submatrix indexed by `idx`.
    pub fn cholesky_sub(&self, idx: &[usize]) -> Option<Cholesky> {
        let k = idx.len();
        let mut l = vec![0.0; k * k];
        for r in 0..k {
            for c in 0..=r {
                let mut s = self[(idx[r], idx[c])];
                for t in 0..c {
                    s -= l[r * k + t] * l[c * k + t];
                }
                if r == c {
                    if s <= 0.0 || !s.is_finite() {
                        return None;
                    }
                    l[r * k + r] = s.sqrt();
                } else {
                    l[r * k + c] = s / l[c * k + c];
                }
            }
        }
        Some(Cholesky { k, l })
    }

    pub fn cholesky(&self) -> Option<Cholesky> {
        let idx: Vec<usize> = (0..self.n).collect();
        self.cholesky_sub(&idx)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, k): (usize, usize)) -> &f64 {
        &self.data[i * self.n + k]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, k): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + k]
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = PricingError;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(&rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.rows()
    }
}

/// Lower-triangular factor `L` with `A = L L'`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    k: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let k = self.k;
        let mut y = b.to_vec();
        for r in 0..k {
            let mut s = y[r];
            for t in 0..r {
                s -= self.l[r * k + t] * y[t];
            }
            y[r] = s / self.l[r * k + r];
        }
        for r in (0..k).rev() {
            let mut s = y[r];
            for t in (r + 1)..k {
                s -= self.l[t * k + r] * y[t];
            }
            y[r] = s / self.l[r * k + r];
        }
        y
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
