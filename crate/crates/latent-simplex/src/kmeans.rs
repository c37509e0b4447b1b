//! Lloyd's-iteration k-means baseline, used to contrast classical
//! clustering with vertex recovery on adversarial instances.

use rand::Rng;

use crate::error::Result;
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::rng::{self, stream};

#[derive(Debug, Clone)]
pub struct KmeansResult {
    /// d×k cluster centers.
    pub centers: DenseMatrix,
    pub assignments: Vec<usize>,
    /// Sum of squared distances to the assigned centers.
    pub inertia: f64,
    pub iterations: usize,
}

/// Lloyd's iterations from a distance-weighted seeded start, run until the
/// assignment is stable or `max_iters` is hit.
pub fn lloyd_kmeans(
    a: &SparseMatrix,
    k: usize,
    max_iters: usize,
    seed: u64,
) -> Result<KmeansResult> {
    let n = a.n_cols();
    let d = a.n_rows();
    if k < 1 || k > n {
        return Err(crate::error::invalid(format!("k={k} out of range 1..={n}")));
    }

    let col_sq: Vec<f64> = (0..n)
        .map(|j| a.column(j).iter().map(|&(_, v)| v * v).sum())
        .collect();
    let dist_sq = |j: usize, center: &[f64], center_sq: f64| -> f64 {
        let dot: f64 = a.column(j).iter().map(|&(i, v)| v * center[i]).sum();
        (col_sq[j] - 2.0 * dot + center_sq).max(0.0)
    };

    // Distance-weighted seeding.
    let mut rng = rng::seeded(seed, stream::KMEANS);
    let mut centers = DenseMatrix::zeros(d, k);
    let first = rng.gen_range(0..n);
    centers.set_column(0, &a.column_mean(&[first]));
    let mut nearest = vec![f64::INFINITY; n];
    for c in 1..k {
        let prev = centers.column(c - 1).to_vec();
        let prev_sq: f64 = prev.iter().map(|x| x * x).sum();
        for j in 0..n {
            nearest[j] = nearest[j].min(dist_sq(j, &prev, prev_sq));
        }
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (j, &w) in nearest.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = j;
                    break;
                }
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centers.set_column(c, &a.column_mean(&[pick]));
    }

    let mut assignments = vec![0usize; n];
    let mut iterations = 0;
    for iter in 0..max_iters {
        iterations = iter + 1;
        let center_sq: Vec<f64> = (0..k)
            .map(|c| centers.column(c).iter().map(|x| x * x).sum())
            .collect();
        let mut changed = false;
        for j in 0..n {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let dsq = dist_sq(j, centers.column(c), center_sq[c]);
                if dsq < best_d {
                    best_d = dsq;
                    best = c;
                }
            }
            if assignments[j] != best {
                assignments[j] = best;
                changed = true;
            }
        }
        if !changed && iter > 0 {
            break;
        }

        let mut sums = DenseMatrix::zeros(d, k);
        let mut counts = vec![0usize; k];
        for j in 0..n {
            let c = assignments[j];
            counts[c] += 1;
            let col = sums.column_mut(c);
            for &(i, v) in a.column(j) {
                col[i] += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // Re-seed an empty cluster at the point farthest from its center.
                let center_sq: Vec<f64> = (0..k)
                    .map(|t| centers.column(t).iter().map(|x| x * x).sum())
                    .collect();
                let far = (0..n)
                    .max_by(|&x, &y| {
                        let dx = dist_sq(x, centers.column(assignments[x]), center_sq[assignments[x]]);
                        let dy = dist_sq(y, centers.column(assignments[y]), center_sq[assignments[y]]);
                        dx.partial_cmp(&dy).unwrap()
                    })
                    .unwrap();
                centers.set_column(c, &a.column_mean(&[far]));
            } else {
                let inv = 1.0 / counts[c] as f64;
                let mut col = sums.column(c).to_vec();
                for x in &mut col {
                    *x *= inv;
                }
                centers.set_column(c, &col);
            }
        }
    }

    let center_sq: Vec<f64> = (0..k)
        .map(|c| centers.column(c).iter().map(|x| x * x).sum())
        .collect();
    let inertia = (0..n)
        .map(|j| dist_sq(j, centers.column(assignments[j]), center_sq[assignments[j]]))
        .sum();

    Ok(KmeansResult { centers, assignments, inertia, iterations })
}
