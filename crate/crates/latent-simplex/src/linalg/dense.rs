//! Dense column-major matrix used for vertex matrices, latent points,
//! weights, and subspace bases.

use crate::error::{Error, Result};

use super::vecops;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    /// Column-major, length `n_rows * n_cols`.
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Validates length and finiteness of a column-major entry buffer.
    pub fn from_column_major(n_rows: usize, n_cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                context: "dense entry buffer length",
                expected: n_rows * n_cols,
                actual: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(crate::error::invalid("non-finite dense entry"));
        }
        Ok(Self { n_rows, n_cols, entries })
    }

    pub fn from_columns(n_rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(n_rows * columns.len());
        for col in columns {
            if col.len() != n_rows {
                return Err(Error::DimensionMismatch {
                    context: "dense column length",
                    expected: n_rows,
                    actual: col.len(),
                });
            }
            entries.extend_from_slice(col);
        }
        Self::from_column_major(n_rows, columns.len(), entries)
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for j in 0..n_cols {
            for i in 0..n_rows {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[j * self.n_rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[j * self.n_rows + i] = v;
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.entries[j * self.n_rows..(j + 1) * self.n_rows]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.entries[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        vecops::norm(self.column(j))
    }

    pub fn set_column(&mut self, j: usize, col: &[f64]) {
        self.column_mut(j).copy_from_slice(col);
    }

    /// New matrix keeping the listed columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(self.n_rows, indices.len());
        for (t, &j) in indices.iter().enumerate() {
            out.set_column(t, self.column(j));
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// y = M x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols, "matvec input length");
        let mut y = vec![0.0; self.n_rows];
        for j in 0..self.n_cols {
            vecops::axpy(&mut y, x[j], self.column(j));
        }
        y
    }

    /// z = Mᵀ y
    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.n_rows, "matvec_t input length");
        (0..self.n_cols).map(|j| vecops::dot(self.column(j), y)).collect()
    }

    /// selfᵀ · other
    pub fn transpose_times(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_rows, other.n_rows, "transpose_times inner dimension");
        DenseMatrix::from_fn(self.n_cols, other.n_cols, |i, j| {
            vecops::dot(self.column(i), other.column(j))
        })
    }

    /// self · other
    pub fn times(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_cols, other.n_rows, "times inner dimension");
        let mut out = DenseMatrix::zeros(self.n_rows, other.n_cols);
        for j in 0..other.n_cols {
            let out_col = out.column_mut(j);
            for t in 0..self.n_cols {
                vecops::axpy(out_col, other.get(t, j), self.column(t));
            }
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries,
        }
    }
}
