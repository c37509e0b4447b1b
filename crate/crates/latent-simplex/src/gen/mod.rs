//! Ground-truth instance generators for the three model specializations:
//! topic models (multinomial word counts), mixed-membership bipartite
//! graphs, and adversarial clustering. Each returns the full
//! (A, P, M, W) bundle so recovery can be verified exactly.

mod clustering;
mod dirichlet;
mod lda;
mod mmsb;

pub use clustering::gen_adversarial_clustering;
pub use dirichlet::dirichlet_sample;
pub use lda::{gen_lda, TopicSpec};
pub use mmsb::gen_mmsb;

use crate::error::Result;
use crate::linalg::{gram_schmidt, DenseMatrix, SparseMatrix};
use crate::rng::{self, stream};

/// d×k vertex matrix with orthonormal random columns scaled to the given
/// norm; well-separatedness is maximal (α = 1) by construction.
pub fn random_orthonormal_vertices(
    d: usize,
    k: usize,
    vertex_norm: f64,
    seed: u64,
) -> Result<DenseMatrix> {
    if k < 1 || d < k {
        return Err(crate::error::invalid(format!("need d >= k >= 1, got d={d}, k={k}")));
    }
    if vertex_norm <= 0.0 {
        return Err(crate::error::invalid("vertex_norm must be positive"));
    }
    let mut rng = rng::seeded(seed, stream::GEN_MODEL);
    let raw = DenseMatrix::from_columns(
        d,
        &(0..k).map(|_| rng::gaussian_vec(&mut rng, d)).collect::<Vec<_>>(),
    )?;
    let mut m = gram_schmidt(&raw)?.basis.into_matrix();
    for j in 0..k {
        for x in m.column_mut(j) {
            *x *= vertex_norm;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Lda,
    Mmsb,
    AdversarialClustering,
    Custom,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Lda => "lda",
            ModelKind::Mmsb => "mmsb",
            ModelKind::AdversarialClustering => "adversarial_clustering",
            ModelKind::Custom => "custom",
        }
    }
}

/// What the adversary did: which columns were protected per cluster and the
/// displacement applied to every column.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryPlan {
    /// Per-cluster protected index sets, ⌊δn⌋ each.
    pub protected: Vec<Vec<usize>>,
    /// d×n displacement applied to both the observed and latent columns.
    pub displacements: DenseMatrix,
    /// Noise scale σ measured on the pre-adversary pair (A, P); protected
    /// displacements are capped at 4σ/√δ.
    pub sigma: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Lda {
        m_words: usize,
        beta: f64,
    },
    Mmsb {
        b: DenseMatrix,
        beta: f64,
        /// Maximum expected degree: max of all row and column sums of P.
        nu: f64,
    },
    AdversarialClustering {
        noise_scale: f64,
        delta: f64,
        adversary: f64,
        cluster_sizes: Vec<usize>,
        plan: AdversaryPlan,
    },
    Custom,
}

/// A generated ground-truth bundle: observed data A, latent points P = MW,
/// vertices M, and simplex weights W.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub a: SparseMatrix,
    pub p: DenseMatrix,
    pub m: DenseMatrix,
    pub w: DenseMatrix,
    pub model: ModelKind,
    pub params: ModelParams,
    pub seed: u64,
}

impl Instance {
    pub fn d(&self) -> usize {
        self.a.n_rows()
    }

    pub fn n(&self) -> usize {
        self.a.n_cols()
    }

    pub fn k(&self) -> usize {
        self.m.n_cols()
    }
}
