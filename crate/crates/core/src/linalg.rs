//! Small dense linear algebra for least squares: a row-major matrix and a
//! Householder QR factorization with rank detection.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Build from a column-major list of columns of equal length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Shape("columns of unequal length".into()));
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Xᵀ v.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &x) in out.iter_mut().zip(self.row(i)) {
                *o += x * vi;
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Householder QR of a tall matrix, kept in compact form.
#[derive(Clone, Debug)]
pub struct Qr {
    /// R in the upper triangle, Householder vectors below the diagonal.
    packed: Matrix,
    /// Scalar factor of each reflector.
    tau: Vec<f64>,
}

impl Qr {
    /// Factorize `a`; fails if a column is (numerically) a combination of
    /// the preceding ones.
    pub fn new(a: &Matrix) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if m < n {
            return Err(Error::Shape(format!("{m} rows < {n} columns")));
        }
        let scale = (0..n)
            .map(|j| a.column(j).iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let tol = scale * (m.max(n) as f64) * f64::EPSILON * 16.0;

        let mut r = a.clone();
        let mut tau = vec![0.0; n];
        let mut dependent = Vec::new();
        for k in 0..n {
            let norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
            if norm <= tol {
                dependent.push(k);
                continue;
            }
            let alpha = if r[(k, k)] > 0.0 { -norm } else { norm };
            let v0 = r[(k, k)] - alpha;
            // v = (1, x[k+1..]/v0), tau = -v0/alpha
            for i in k + 1..m {
                r[(i, k)] /= v0;
            }
            tau[k] = -v0 / alpha;
            r[(k, k)] = alpha;
            for j in k + 1..n {
                let mut s = r[(k, j)];
                for i in k + 1..m {
                    s += r[(i, k)] * r[(i, j)];
                }
                s *= tau[k];
                r[(k, j)] -= s;
                for i in k + 1..m {
                    let vik = r[(i, k)];
                    r[(i, j)] -= s * vik;
                }
            }
        }
        if !dependent.is_empty() {
            return Err(Error::Singular {
                dependent_columns: dependent,
            });
        }
        Ok(Self { packed: r, tau })
    }

    /// Qᵀ b.
    fn apply_qt(&self, b: &[f64]) -> Vec<f64> {
        let (m, n) = (self.packed.rows(), self.packed.cols());
        let mut y = b.to_vec();
        for k in 0..n {
            let mut s = y[k];
            for i in k + 1..m {
                s += self.packed[(i, k)] * y[i];
            }
            s *= self.tau[k];
            y[k] -= s;
            for i in k + 1..m {
                y[i] -= s * self.packed[(i, k)];
            }
        }
        y
    }

    fn solve_upper(&self, rhs: &mut [f64]) {
        let n = self.packed.cols();
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for j in i + 1..n {
                s -= self.packed[(i, j)] * rhs[j];
            }
            rhs[i] = s / self.packed[(i, i)];
        }
    }

    /// Least-squares solution of `a x ≈ b`.
    pub fn solve_least_squares(&self, b: &[f64]) -> Vec<f64> {
        let n = self.packed.cols();
        let mut y = self.apply_qt(b);
        y.truncate(n);
        self.solve_upper(&mut y);
        y
    }

    /// (AᵀA)⁻¹ = R⁻¹ R⁻ᵀ.
    pub fn gram_inverse(&self) -> Matrix {
        let n = self.packed.cols();
        // R⁻¹ column by column.
        let mut rinv = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            self.solve_upper(&mut e);
            for i in 0..n {
                rinv[(i, j)] = e[i];
            }
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n).map(|k| rinv[(i, k)] * rinv[(j, k)]).sum();
            }
        }
        out
    }

    /// Absolute diagonal of R; its extreme ratio is a cheap condition proxy.
    pub fn r_diagonal(&self) -> Vec<f64> {
        (0..self.packed.cols()).map(|i| self.packed[(i, i)].abs()).collect()
    }
}
