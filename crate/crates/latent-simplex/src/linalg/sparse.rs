//! Column-compressed sparse matrix with O(nnz) matrix-vector kernels.

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::dense::DenseMatrix;

/// Column count below which `matvec_t` stays sequential; above it the
/// per-column dot products run on the rayon pool. Each output entry is
/// computed by exactly one task, so results are bitwise identical for any
/// thread count.
const PAR_COLUMN_THRESHOLD: usize = 8192;

/// Sparse d×n matrix stored as one `(row, value)` list per column, rows
/// strictly increasing, no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    columns: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    /// Builds from per-column entry lists, validating the storage invariants.
    pub fn new(n_rows: usize, n_cols: usize, columns: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if columns.len() != n_cols {
            return Err(Error::DimensionMismatch {
                context: "sparse column count",
                expected: n_cols,
                actual: columns.len(),
            });
        }
        for (j, col) in columns.iter().enumerate() {
            let mut prev: Option<usize> = None;
            for &(i, v) in col {
                if i >= n_rows {
                    return Err(crate::error::invalid(format!(
                        "row index {i} out of range in column {j}"
                    )));
                }
                if let Some(p) = prev {
                    if i <= p {
                        return Err(crate::error::invalid(format!(
                            "row indices not strictly increasing in column {j}"
                        )));
                    }
                }
                if v == 0.0 {
                    return Err(crate::error::invalid(format!(
                        "stored explicit zero at ({i}, {j})"
                    )));
                }
                if !v.is_finite() {
                    return Err(crate::error::invalid(format!(
                        "non-finite entry at ({i}, {j})"
                    )));
                }
                prev = Some(i);
            }
        }
        Ok(Self { n_rows, n_cols, columns })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            columns: (0..n).map(|j| vec![(j, 1.0)]).collect(),
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            columns: vec![Vec::new(); n_cols],
        }
    }

    /// Keeps exact nonzeros of a dense matrix.
    pub fn from_dense(m: &DenseMatrix) -> Self {
        let columns = (0..m.n_cols())
            .map(|j| {
                m.column(j)
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(i, &v)| (i, v))
                    .collect()
            })
            .collect();
        Self {
            n_rows: m.n_rows(),
            n_cols: m.n_cols(),
            columns,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (j, col) in self.columns.iter().enumerate() {
            let out_col = out.column_mut(j);
            for &(i, v) in col {
                out_col[i] = v;
            }
        }
        out
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        self.columns[j]
            .iter()
            .map(|&(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// y = A x, O(nnz).
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                context: "matvec input length",
                expected: self.n_cols,
                actual: x.len(),
            });
        }
        let mut y = vec![0.0; self.n_rows];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    /// z = Aᵀ y in a single pass over the stored entries.
    pub fn matvec_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.n_rows {
            return Err(Error::DimensionMismatch {
                context: "matvec_t input length",
                expected: self.n_rows,
                actual: y.len(),
            });
        }
        let mut z = vec![0.0; self.n_cols];
        self.apply_adjoint_into(y, &mut z);
        Ok(z)
    }

    pub(crate) fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for (j, col) in self.columns.iter().enumerate() {
            let xj = x[j];
            if xj != 0.0 {
                for &(i, v) in col {
                    y[i] += v * xj;
                }
            }
        }
    }

    pub(crate) fn apply_adjoint_into(&self, y: &[f64], z: &mut [f64]) {
        let dot_col = |col: &Vec<(usize, f64)>| col.iter().map(|&(i, v)| v * y[i]).sum::<f64>();
        if self.n_cols >= PAR_COLUMN_THRESHOLD {
            z.par_iter_mut()
                .zip(self.columns.par_iter())
                .for_each(|(zj, col)| *zj = dot_col(col));
        } else {
            for (zj, col) in z.iter_mut().zip(&self.columns) {
                *zj = dot_col(col);
            }
        }
    }

    /// Mean of the columns indexed by `subset`, accumulated in index order.
    pub fn column_mean(&self, subset: &[usize]) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_rows];
        for &j in subset {
            for &(i, v) in &self.columns[j] {
                acc[i] += v;
            }
        }
        let inv = 1.0 / subset.len() as f64;
        for x in &mut acc {
            *x *= inv;
        }
        acc
    }
}
