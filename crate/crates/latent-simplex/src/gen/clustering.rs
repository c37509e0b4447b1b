//! Adversarial clustering generator: every latent point sits exactly on a
//! cluster vertex, bounded noise is added, and an adversary then moves
//! points toward the other clusters' hull: arbitrarily far for most
//! points, but by at most 4σ/√δ for ⌊δn⌋ protected points per cluster.

use rand::Rng;

use crate::error::Result;
use crate::linalg::{spectral_norm, DenseMatrix, MatrixDifference, SparseMatrix};
use crate::rng::{self, stream};

use super::{AdversaryPlan, Instance, ModelKind, ModelParams};

/// Generates a clustering instance.
///
/// Columns are laid out cluster by cluster; the protected set of each
/// cluster is its first ⌊δn⌋ columns. The adversary moves every
/// unprotected point j by `adversary`·(c_j − P_j) where c_j is the
/// centroid of the other clusters' vertices; protected points are left in
/// place, which keeps their displacement inside the 4σ/√δ budget
/// (σ measured on the pre-adversary pair). The same displacement is
/// applied to the observed and the latent column, so A − P is unchanged
/// by the adversary.
pub fn gen_adversarial_clustering(
    d: usize,
    n: usize,
    k: usize,
    m: &DenseMatrix,
    cluster_sizes: &[usize],
    noise_scale: f64,
    delta: f64,
    adversary: f64,
    seed: u64,
) -> Result<Instance> {
    if m.n_rows() != d || m.n_cols() != k {
        return Err(crate::error::invalid(format!(
            "vertex matrix must be {d}x{k}, got {}x{}",
            m.n_rows(),
            m.n_cols()
        )));
    }
    if cluster_sizes.len() != k {
        return Err(crate::error::invalid("one cluster size per vertex required"));
    }
    if cluster_sizes.iter().sum::<usize>() != n {
        return Err(crate::error::invalid("cluster sizes must sum to n"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(crate::error::invalid("delta must lie in (0, 1]"));
    }
    let protected_size = (delta * n as f64).floor() as usize;
    if protected_size < 1 {
        return Err(crate::error::invalid("floor(delta*n) must be at least 1"));
    }
    if cluster_sizes.iter().any(|&s| s < protected_size) {
        return Err(crate::error::invalid(
            "every cluster must hold at least floor(delta*n) points",
        ));
    }
    if !(0.0..=1.0).contains(&adversary) {
        return Err(crate::error::invalid("adversary strength must lie in [0, 1]"));
    }
    if noise_scale < 0.0 {
        return Err(crate::error::invalid("noise_scale must be non-negative"));
    }
    for a in 0..k {
        for b in (a + 1)..k {
            let same = m.column(a).iter().zip(m.column(b)).all(|(x, y)| x == y);
            if same {
                return Err(crate::error::invalid(format!(
                    "vertices {a} and {b} are identical"
                )));
            }
        }
    }

    let assignment: Vec<usize> = cluster_sizes
        .iter()
        .enumerate()
        .flat_map(|(ell, &size)| std::iter::repeat(ell).take(size))
        .collect();

    // Base latent points on the vertices, observed points with iid bounded
    // noise per coordinate.
    let mut p = DenseMatrix::zeros(d, n);
    for (j, &ell) in assignment.iter().enumerate() {
        p.set_column(j, m.column(ell));
    }
    let mut a_dense = p.clone();
    if noise_scale > 0.0 {
        let mut noise_rng = rng::seeded(seed, stream::GEN_OBSERVED);
        for j in 0..n {
            for x in a_dense.column_mut(j) {
                *x += noise_rng.gen_range(-noise_scale..=noise_scale);
            }
        }
    }

    // Noise scale of the pre-adversary pair; the adversary leaves A − P
    // invariant, so this is also the final sigma.
    let sigma = {
        let a_sparse = SparseMatrix::from_dense(&a_dense);
        let diff = MatrixDifference::new(&a_sparse, &p)?;
        spectral_norm(&diff, 200, seed ^ 0x5157_4e0a).value / (n as f64).sqrt()
    };

    let protected: Vec<Vec<usize>> = {
        let mut start = 0;
        cluster_sizes
            .iter()
            .map(|&size| {
                let set: Vec<usize> = (start..start + protected_size).collect();
                start += size;
                set
            })
            .collect()
    };
    let is_protected: Vec<bool> = {
        let mut flags = vec![false; n];
        for set in &protected {
            for &j in set {
                flags[j] = true;
            }
        }
        flags
    };

    let mut w = DenseMatrix::zeros(k, n);
    let mut displacements = DenseMatrix::zeros(d, n);
    for (j, &ell) in assignment.iter().enumerate() {
        let strength = if k > 1 && !is_protected[j] { adversary } else { 0.0 };

        let mut weights = vec![0.0; k];
        if strength > 0.0 {
            for t in 0..k {
                weights[t] = strength / (k - 1) as f64;
            }
        }
        weights[ell] = 1.0 - strength;
        w.set_column(j, &weights);

        // Move the latent point to M·w and shift the observed point by the
        // identical displacement.
        let moved = m.matvec(&weights);
        let delta_col: Vec<f64> = moved
            .iter()
            .zip(p.column(j))
            .map(|(new, old)| new - old)
            .collect();
        displacements.set_column(j, &delta_col);
        p.set_column(j, &moved);
        let a_col = a_dense.column_mut(j);
        for (x, dx) in a_col.iter_mut().zip(&delta_col) {
            *x += dx;
        }
    }

    let a = SparseMatrix::from_dense(&a_dense);
    let plan = AdversaryPlan { protected, displacements, sigma, delta };
    Ok(Instance {
        a,
        p,
        m: m.clone(),
        w,
        model: ModelKind::AdversarialClustering,
        params: ModelParams::AdversarialClustering {
            noise_scale,
            delta,
            adversary,
            cluster_sizes: cluster_sizes.to_vec(),
            plan,
        },
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_vertices(d: usize, k: usize) -> DenseMatrix {
        DenseMatrix::from_fn(d, k, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    #[test]
    fn no_noise_no_adversary_copies_vertices() {
        let m = unit_vertices(4, 2);
        let inst =
            gen_adversarial_clustering(4, 10, 2, &m, &[5, 5], 0.0, 0.2, 0.0, 3).unwrap();
        assert_eq!(inst.a.to_dense(), inst.p);
        for j in 0..10 {
            let col = inst.p.column(j);
            assert!(col == m.column(0) || col == m.column(1));
        }
    }

    #[test]
    fn protected_points_move_at_most_the_cap() {
        let m = unit_vertices(6, 3);
        let inst = gen_adversarial_clustering(6, 30, 3, &m, &[10, 10, 10], 0.05, 0.1, 1.0, 9)
            .unwrap();
        let ModelParams::AdversarialClustering { plan, .. } = &inst.params else {
            panic!("wrong params variant")
        };
        let cap = 4.0 * plan.sigma / plan.delta.sqrt();
        for set in &plan.protected {
            assert_eq!(set.len(), 3); // floor(0.1 * 30)
            for &j in set {
                let shift: f64 = plan
                    .displacements
                    .column(j)
                    .iter()
                    .map(|x| x * x)
                    .sum::<f64>()
                    .sqrt();
                assert!(shift <= cap + 1e-12, "protected column {j} moved {shift} > {cap}");
            }
        }
    }

    #[test]
    fn adversary_leaves_perturbation_invariant() {
        let m = unit_vertices(5, 2);
        let base =
            gen_adversarial_clustering(5, 20, 2, &m, &[10, 10], 0.1, 0.2, 0.0, 41).unwrap();
        let moved =
            gen_adversarial_clustering(5, 20, 2, &m, &[10, 10], 0.1, 0.2, 0.8, 41).unwrap();
        let base_diff = base.a.to_dense().sub(&base.p);
        let moved_diff = moved.a.to_dense().sub(&moved.p);
        assert!(base_diff.sub(&moved_diff).max_abs() <= 1e-12);
    }

    #[test]
    fn infeasible_sizes_are_rejected() {
        let m = unit_vertices(3, 2);
        assert!(gen_adversarial_clustering(3, 10, 2, &m, &[9, 1], 0.0, 0.2, 0.0, 0).is_err());
        assert!(gen_adversarial_clustering(3, 10, 2, &m, &[4, 4], 0.0, 0.2, 0.0, 0).is_err());
        let dup = DenseMatrix::from_columns(3, &[vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]])
            .unwrap();
        assert!(gen_adversarial_clustering(3, 10, 2, &dup, &[5, 5], 0.0, 0.2, 0.0, 0).is_err());
    }
}
