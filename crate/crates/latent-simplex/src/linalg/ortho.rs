//! Orthonormal column bases and modified Gram-Schmidt.

use crate::error::{Error, Result};
use crate::rng;

use super::dense::DenseMatrix;
use super::vecops;

/// Maximum allowed deviation of BᵀB from the identity.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Residual threshold (relative to the largest input column norm) below
/// which a column counts as linearly dependent.
const RANK_DROP_TOL: f64 = 1e-12;

/// Dense d×r matrix whose columns are pairwise orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    basis: DenseMatrix,
}

impl OrthoBasis {
    /// Validates |BᵀB − I|_max ≤ 1e-10.
    pub fn new(basis: DenseMatrix) -> Result<Self> {
        let gram = basis.transpose_times(&basis);
        let dev = gram.sub(&DenseMatrix::identity(basis.n_cols())).max_abs();
        if dev > ORTHONORMALITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "columns not orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Ambient dimension d.
    pub fn dim(&self) -> usize {
        self.basis.n_rows()
    }

    /// Number of basis columns r.
    pub fn rank(&self) -> usize {
        self.basis.n_cols()
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.basis
    }

    /// Projection of x onto the spanned subspace, B(Bᵀx).
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.basis.matvec(&self.basis.matvec_t(x))
    }
}

/// Gram-Schmidt output; `rank_deficient` is set when at least one column
/// had to be replaced by a random vector.
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    pub basis: OrthoBasis,
    pub rank_deficient: bool,
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
///
/// Columns whose residual falls below 1e-12 times the largest input column
/// norm are replaced by random unit vectors orthogonalized against the
/// already accepted ones, and the result is flagged rank-deficient.
/// Requires d ≥ r.
pub fn gram_schmidt(z: &DenseMatrix) -> Result<GramSchmidt> {
    let d = z.n_rows();
    let r = z.n_cols();
    if d < r {
        return Err(Error::DimensionMismatch {
            context: "gram_schmidt needs at least as many rows as columns",
            expected: r,
            actual: d,
        });
    }

    let max_col_norm = (0..r).map(|j| z.column_norm(j)).fold(0.0_f64, f64::max);
    let drop_threshold = RANK_DROP_TOL * max_col_norm;

    let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(r);
    let mut rank_deficient = false;

    for j in 0..r {
        let mut v = z.column(j).to_vec();
        orthogonalize_twice(&mut v, &accepted);
        let mut residual = vecops::norm(&v);

        if residual <= drop_threshold {
            rank_deficient = true;
            // Internal fixed-seed stream keeps replacement deterministic.
            let mut rng = rng::seeded(0x6f72_7468, j as u64);
            loop {
                v = rng::unit_gaussian(&mut rng, d);
                orthogonalize_twice(&mut v, &accepted);
                residual = vecops::norm(&v);
                if residual > 1e-6 {
                    break;
                }
            }
        }

        vecops::scale(&mut v, 1.0 / residual);
        accepted.push(v);
    }

    let basis = OrthoBasis::new(DenseMatrix::from_columns(d, &accepted)?)?;
    Ok(GramSchmidt { basis, rank_deficient })
}

fn orthogonalize_twice(v: &mut [f64], accepted: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in accepted {
            let c = vecops::dot(q, v);
            vecops::axpy(v, -c, q);
        }
    }
}
