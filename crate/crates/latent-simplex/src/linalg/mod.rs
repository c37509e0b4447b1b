//! Sparse and dense linear-algebra kernels: matrix-vector products,
//! orthonormalization, subspace power iteration, small SVDs, spectral-norm
//! estimation, and principal-angle geometry.
//!
//! Everything here is a pure function of its inputs plus an explicit seed;
//! values are immutable once built and safe to share across threads.

mod dense;
mod ortho;
mod power;
mod sparse;
mod subspace;
mod svd;
pub(crate) mod vecops;

pub use dense::DenseMatrix;
pub use ortho::{gram_schmidt, GramSchmidt, OrthoBasis, ORTHONORMALITY_TOL};
pub use power::{spectral_norm, subspace_power, LinearOperator, MatrixDifference, SpectralEstimate};
pub use sparse::SparseMatrix;
pub use subspace::{null_space_within, sin_theta};
pub use svd::{rank_at, small_svd, SmallSvd, RANK_TOL};
