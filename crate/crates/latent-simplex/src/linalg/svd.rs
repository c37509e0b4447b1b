//! Full SVD of small dense matrices by one-sided Jacobi iteration.
//!
//! The algorithm rotates pairs of columns of G until all are mutually
//! orthogonal; column norms are then the singular values, the accumulated
//! rotations form the right factor, and normalized columns the left one.
//! Jacobi is chosen over bidiagonalization for bitwise reproducibility
//! across platforms.

use super::dense::DenseMatrix;
use super::vecops;

/// Relative tolerance at which a column pair counts as orthogonal.
const JACOBI_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

/// Relative singular-value threshold for every rank decision.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SmallSvd {
    /// Non-increasing, one per column of the input (q values).
    pub singular_values: Vec<f64>,
    /// p×q; columns for vanishing singular values are zero.
    pub left: DenseMatrix,
    /// q×q orthonormal right factor; its trailing columns span the null space.
    pub right: DenseMatrix,
}

impl SmallSvd {
    /// Number of singular values above `RANK_TOL` times the largest.
    pub fn rank(&self) -> usize {
        rank_at(&self.singular_values, RANK_TOL)
    }
}

pub fn rank_at(singular_values: &[f64], rel_tol: f64) -> usize {
    match singular_values.first() {
        None | Some(0.0) => 0,
        Some(&s1) => singular_values.iter().filter(|&&s| s > rel_tol * s1).count(),
    }
}

/// Full SVD of a p×q matrix with p·q small (dense path only).
pub fn small_svd(g: &DenseMatrix) -> SmallSvd {
    let p = g.n_rows();
    let q = g.n_cols();
    assert!(p * q <= 1_000_000, "small_svd is restricted to small matrices");

    let mut w = g.clone();
    let mut v = DenseMatrix::identity(q);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..q {
            for j in (i + 1)..q {
                let (a, b, c) = pair_moments(&w, i, j);
                if c.abs() <= JACOBI_TOL * (a * b).sqrt() || c == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * c);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate_columns(&mut w, i, j, cs, sn);
                rotate_columns(&mut v, i, j, cs, sn);
            }
        }
        if !rotated {
            break;
        }
    }

    // Sort by column norm, descending; stable so exact ties keep index order.
    let mut order: Vec<usize> = (0..q).collect();
    let norms: Vec<f64> = (0..q).map(|j| w.column_norm(j)).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let mut singular_values = Vec::with_capacity(q);
    let mut left = DenseMatrix::zeros(p, q);
    let mut right = DenseMatrix::zeros(q, q);
    for (t, &j) in order.iter().enumerate() {
        let s = norms[j];
        singular_values.push(s);
        right.set_column(t, v.column(j));
        if s > 0.0 {
            let mut col = w.column(j).to_vec();
            vecops::scale(&mut col, 1.0 / s);
            left.set_column(t, &col);
        }
    }

    SmallSvd { singular_values, left, right }
}

fn pair_moments(w: &DenseMatrix, i: usize, j: usize) -> (f64, f64, f64) {
    let ci = w.column(i);
    let cj = w.column(j);
    (vecops::dot(ci, ci), vecops::dot(cj, cj), vecops::dot(ci, cj))
}

fn rotate_columns(m: &mut DenseMatrix, i: usize, j: usize, cs: f64, sn: f64) {
    for row in 0..m.n_rows() {
        let a = m.get(row, i);
        let b = m.get(row, j);
        m.set(row, i, cs * a - sn * b);
        m.set(row, j, sn * a + cs * b);
    }
}
