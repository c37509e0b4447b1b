//! Subspace geometry: principal-angle distance and constrained null spaces.

use crate::error::{Error, Result};

use super::dense::DenseMatrix;
use super::ortho::OrthoBasis;
use super::svd::{rank_at, small_svd, RANK_TOL};

/// Largest principal-angle sine from F to G.
///
/// For equal dimensions this is √(1 − s_min(FᵀG)²) and is symmetric; in
/// general it is the spectral norm of (I − GGᵀ)F and may be asymmetric
/// (it equals 1 whenever dim F > dim G).
pub fn sin_theta(f: &OrthoBasis, g: &OrthoBasis) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            context: "sin_theta ambient dimension",
            expected: f.dim(),
            actual: g.dim(),
        });
    }
    if f.rank() == g.rank() {
        let c = f.basis().transpose_times(g.basis());
        let s = small_svd(&c).singular_values;
        let s_min = s.last().copied().unwrap_or(0.0).clamp(0.0, 1.0);
        Ok((1.0 - s_min * s_min).max(0.0).sqrt())
    } else {
        // (I − GGᵀ)F, column by column.
        let gtf = g.basis().transpose_times(f.basis());
        let proj = g.basis().times(&gtf);
        let residual = f.basis().sub(&proj);
        let s1 = small_svd(&residual).singular_values.first().copied().unwrap_or(0.0);
        Ok(s1.clamp(0.0, 1.0))
    }
}

/// Intersection of span(V) with the null space of C, for C with fewer rows
/// than V has columns.
///
/// Works in V-coordinates: the null-space basis N of the small matrix C is
/// lifted to U = V·N, so every returned column u satisfies u ∈ span(V) and
/// C(Vᵀu) = 0 to roundoff. The rank of C is counted at 1e-10 relative to
/// its largest singular value; the result has k − rank(C) columns.
pub fn null_space_within(v: &OrthoBasis, c: &DenseMatrix) -> Result<OrthoBasis> {
    let k = v.rank();
    let r = c.n_rows();
    if c.n_cols() != k {
        return Err(Error::DimensionMismatch {
            context: "null_space_within constraint width",
            expected: k,
            actual: c.n_cols(),
        });
    }
    if r >= k {
        return Err(crate::error::invalid(format!(
            "null_space_within needs fewer constraints ({r}) than subspace dimensions ({k})"
        )));
    }

    let svd = small_svd(c);
    let rank = rank_at(&svd.singular_values, RANK_TOL);
    if rank == 0 {
        return Ok(v.clone());
    }
    let null_cols: Vec<usize> = (rank..k).collect();
    let n = svd.right.select_columns(&null_cols);
    OrthoBasis::new(v.basis().times(&n))
}
