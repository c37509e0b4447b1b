//! Power-iteration kernels: top-k left singular subspace and spectral-norm
//! estimation for matrices given only through matrix-vector products.

use crate::error::{Error, Result};
use crate::rng::{self, stream};

use super::dense::DenseMatrix;
use super::ortho::{gram_schmidt, OrthoBasis};
use super::sparse::SparseMatrix;
use super::vecops;

/// A linear map with an adjoint; lets the kernels run on A − P without
/// materializing the difference.
pub trait LinearOperator {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    /// out = B x
    fn apply(&self, x: &[f64], out: &mut [f64]);
    /// out = Bᵀ y
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]);
}

impl LinearOperator for SparseMatrix {
    fn n_rows(&self) -> usize {
        self.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.n_cols()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.apply_into(x, out);
    }
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        self.apply_adjoint_into(y, out);
    }
}

impl LinearOperator for DenseMatrix {
    fn n_rows(&self) -> usize {
        self.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.n_cols()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.matvec(x));
    }
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.matvec_t(y));
    }
}

/// Sparse-minus-dense difference A − P as an operator.
pub struct MatrixDifference<'a> {
    a: &'a SparseMatrix,
    p: &'a DenseMatrix,
}

impl<'a> MatrixDifference<'a> {
    pub fn new(a: &'a SparseMatrix, p: &'a DenseMatrix) -> Result<Self> {
        if a.n_rows() != p.n_rows() || a.n_cols() != p.n_cols() {
            return Err(Error::DimensionMismatch {
                context: "matrix difference shapes",
                expected: a.n_rows() * a.n_cols(),
                actual: p.n_rows() * p.n_cols(),
            });
        }
        Ok(Self { a, p })
    }
}

impl LinearOperator for MatrixDifference<'_> {
    fn n_rows(&self) -> usize {
        self.a.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.a.n_cols()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.a.apply_into(x, out);
        let px = self.p.matvec(x);
        for (o, v) in out.iter_mut().zip(&px) {
            *o -= v;
        }
    }
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        self.a.apply_adjoint_into(y, out);
        let py = self.p.matvec_t(y);
        for (o, v) in out.iter_mut().zip(&py) {
            *o -= v;
        }
    }
}

/// Subspace power iteration: T rounds of Z = A Aᵀ Q followed by
/// Gram-Schmidt, from a seeded random orthonormal start.
///
/// If the random start comes out rank-deficient it is redrawn with an
/// incremented seed; deficiencies during the iteration (rank(A) < k) are
/// healed by Gram-Schmidt's column replacement and left alone, since
/// restarting could never converge on such inputs.
pub fn subspace_power(
    op: &impl LinearOperator,
    k: usize,
    iters: usize,
    seed: u64,
) -> Result<OrthoBasis> {
    let d = op.n_rows();
    let n = op.n_cols();
    if k < 1 || k > d.min(n) {
        return Err(crate::error::invalid(format!(
            "subspace dimension k={k} out of range 1..={}",
            d.min(n)
        )));
    }
    if iters < 1 {
        return Err(crate::error::invalid("subspace_power needs iters >= 1"));
    }

    let mut q = init_basis(d, k, seed)?;
    let mut w = vec![0.0; n];
    let mut z = DenseMatrix::zeros(d, k);
    for _ in 0..iters {
        for j in 0..k {
            op.apply_adjoint(q.basis().column(j), &mut w);
            op.apply(&w, z.column_mut(j));
        }
        q = gram_schmidt(&z)?.basis;
    }
    Ok(q)
}

fn init_basis(d: usize, k: usize, seed: u64) -> Result<OrthoBasis> {
    for attempt in 0..16 {
        let mut rng = rng::seeded(seed.wrapping_add(attempt), stream::POWER_INIT);
        let q0 = DenseMatrix::from_columns(
            d,
            &(0..k).map(|_| rng::gaussian_vec(&mut rng, d)).collect::<Vec<_>>(),
        )?;
        let gs = gram_schmidt(&q0)?;
        if !gs.rank_deficient {
            return Ok(gs.basis);
        }
    }
    // A Gaussian start is full rank with probability one; falling through
    // here means d < k was already rejected, so just take the healed basis.
    let mut rng = rng::seeded(seed, stream::POWER_INIT);
    let q0 = DenseMatrix::from_columns(
        d,
        &(0..k).map(|_| rng::gaussian_vec(&mut rng, d)).collect::<Vec<_>>(),
    )?;
    Ok(gram_schmidt(&q0)?.basis)
}

/// Spectral-norm estimate from power iteration on BᵀB.
#[derive(Debug, Clone, Copy)]
pub struct SpectralEstimate {
    /// Estimated largest singular value; never exceeds the true one.
    pub value: f64,
    /// Relative change between the last two iterates, as a convergence
    /// indicator.
    pub rel_change: f64,
}

/// Power iteration on BᵀB from a seeded random start. The returned value
/// is |B x| for a unit vector x, hence an underestimate of s₁(B).
pub fn spectral_norm(op: &impl LinearOperator, iters: usize, seed: u64) -> SpectralEstimate {
    assert!(iters >= 1, "spectral_norm needs iters >= 1");
    let d = op.n_rows();
    let n = op.n_cols();
    if d == 0 || n == 0 {
        return SpectralEstimate { value: 0.0, rel_change: 0.0 };
    }

    let mut rng = rng::seeded(seed, stream::SPECTRAL);
    let mut x = rng::unit_gaussian(&mut rng, n);
    let mut y = vec![0.0; d];
    let mut z = vec![0.0; n];

    let mut value = 0.0;
    let mut prev = 0.0;
    for _ in 0..iters {
        op.apply(&x, &mut y);
        let s = vecops::norm(&y);
        if s < 1e-300 {
            return SpectralEstimate { value: 0.0, rel_change: 0.0 };
        }
        prev = value;
        value = s;
        op.apply_adjoint(&y, &mut z);
        let nz = vecops::norm(&z);
        if nz < 1e-300 {
            break;
        }
        x.copy_from_slice(&z);
        vecops::scale(&mut x, 1.0 / nz);
    }
    let rel_change = if value > 0.0 { (value - prev).abs() / value } else { 0.0 };
    SpectralEstimate { value, rel_change }
}
