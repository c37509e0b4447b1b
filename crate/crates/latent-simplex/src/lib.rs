//! Learning the vertices of a latent simplex from heavily perturbed data.
//!
//! The columns of an observed sparse matrix A are noisy perturbations of
//! latent points lying in the convex hull of k unknown vertices. Individual
//! perturbations can be as large as the simplex itself, but subset
//! smoothing (replacing the data cloud by the polytope of all ⌊δn⌋-subset
//! averages) concentrates the noise enough that k carefully chosen linear
//! optimizations recover the vertices. [`simplex::lls`] implements the
//! solver; [`gen`] builds synthetic ground-truth instances (topic-model,
//! mixed-membership graph, and adversarial-clustering specializations);
//! [`diag`] measures the separation/noise/proximity quantities the
//! recovery guarantee depends on and verifies results against ground truth.

pub mod diag;
pub mod gen;
pub mod kmeans;
pub mod linalg;
pub mod simplex;

mod error;
mod rng;

pub use error::{Error, Result};
