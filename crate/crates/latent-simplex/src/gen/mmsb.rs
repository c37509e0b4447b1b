//! Mixed-membership bipartite graph generator: edge probabilities
//! P = (W⁽¹⁾)ᵀ B W⁽²⁾ with Dirichlet membership weights, observed as
//! independent Bernoulli edges.

use rand::Rng;

use crate::error::Result;
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::rng::{self, stream};

use super::dirichlet::dirichlet_with;
use super::{Instance, ModelKind, ModelParams};

/// Generates a d×n bipartite adjacency matrix over k communities with
/// block-connection matrix `b` (entries in [0, 1]).
///
/// The vertex matrix is M = (W⁽¹⁾)ᵀB, so the bundle satisfies P = M W⁽²⁾
/// with W⁽²⁾ stored as the instance weights. The maximum expected degree
/// ν = max(max row sum, max column sum of P) is reported in the params.
pub fn gen_mmsb(
    d: usize,
    n: usize,
    k: usize,
    b: &DenseMatrix,
    beta: f64,
    seed: u64,
) -> Result<Instance> {
    if k < 1 || d < k {
        return Err(crate::error::invalid(format!("need d >= k >= 1, got d={d}, k={k}")));
    }
    if b.n_rows() != k || b.n_cols() != k {
        return Err(crate::error::invalid(format!(
            "block matrix must be {k}x{k}, got {}x{}",
            b.n_rows(),
            b.n_cols()
        )));
    }
    if (0..k).any(|j| b.column(j).iter().any(|&x| !(0.0..=1.0).contains(&x))) {
        return Err(crate::error::invalid("block matrix entries must lie in [0, 1]"));
    }
    if beta <= 0.0 {
        return Err(crate::error::invalid("beta must be positive"));
    }

    let mut w_rng = rng::seeded(seed, stream::GEN_WEIGHTS);
    let mut w1 = DenseMatrix::zeros(k, d);
    for j in 0..d {
        w1.set_column(j, &dirichlet_with(beta, k, &mut w_rng));
    }
    let mut w2 = DenseMatrix::zeros(k, n);
    for j in 0..n {
        w2.set_column(j, &dirichlet_with(beta, k, &mut w_rng));
    }

    // M = (W1)ᵀ B, one vertex per community described by d edge
    // probabilities toward the first part.
    let m = w1.transpose_times(b);
    let p = m.times(&w2);

    let mut a_rng = rng::seeded(seed, stream::GEN_OBSERVED);
    let mut columns = Vec::with_capacity(n);
    for j in 0..n {
        let mut col = Vec::new();
        for (i, &pij) in p.column(j).iter().enumerate() {
            if a_rng.gen_bool(pij.clamp(0.0, 1.0)) {
                col.push((i, 1.0));
            }
        }
        columns.push(col);
    }
    let a = SparseMatrix::new(d, n, columns)?;

    let mut nu = 0.0_f64;
    for j in 0..n {
        nu = nu.max(p.column(j).iter().sum());
    }
    for i in 0..d {
        nu = nu.max((0..n).map(|j| p.get(i, j)).sum());
    }

    Ok(Instance {
        a,
        p,
        m,
        w: w2,
        model: ModelKind::Mmsb,
        params: ModelParams::Mmsb { b: b.clone(), beta, nu },
        seed,
    })
}
