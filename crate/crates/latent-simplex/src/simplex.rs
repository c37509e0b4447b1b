//! The solver core: subspace initialization, k rounds of random-direction
//! selection, and the subset-smoothing argmax oracle.
//!
//! Each round optimizes |u·x| over the polytope whose vertices are all
//! ⌊δn⌋-subset averages of the data columns, which reduces to averaging
//! the ⌊δn⌋ largest (or smallest) dot products u·A_j. The direction u for
//! round r+1 is drawn from the intersection of the top-k singular subspace
//! with the null space of the r vertex estimates found so far, so each
//! round is forced toward a new vertex.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::linalg::{
    gram_schmidt, null_space_within, small_svd, subspace_power, DenseMatrix, OrthoBasis,
    SparseMatrix,
};
use crate::rng::{self, stream};

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct LlsConfig {
    /// Number of vertices to recover.
    pub k: usize,
    /// Subset-size fraction; each returned subset has ⌊delta·n⌋ columns.
    /// Must lie in (0, 1/k].
    pub delta: f64,
    /// Power-iteration count for the initial subspace; defaults to
    /// ⌈10·ln d⌉ when `None`.
    pub power_iters: Option<usize>,
    pub seed: u64,
    /// Replace the power-iteration start with an exact truncated SVD
    /// (small instances only; used for oracle testing).
    pub use_exact_svd: bool,
}

impl LlsConfig {
    pub fn new(k: usize, delta: f64, seed: u64) -> Self {
        Self { k, delta, power_iters: None, seed, use_exact_svd: false }
    }

    /// Validates against a d×n data shape and returns the subset size m.
    pub fn validate_for(&self, d: usize, n: usize) -> Result<usize> {
        if self.k < 1 || self.k > d.min(n) {
            return Err(crate::error::invalid(format!(
                "k={} out of range 1..={}",
                self.k,
                d.min(n)
            )));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0 / self.k as f64) {
            return Err(crate::error::invalid(format!(
                "delta={} must lie in (0, 1/k]",
                self.delta
            )));
        }
        let m = (self.delta * n as f64).floor() as usize;
        if m < 1 {
            return Err(crate::error::invalid(format!(
                "delta={} gives an empty subset for n={n}",
                self.delta
            )));
        }
        Ok(m)
    }

    pub fn effective_power_iters(&self, d: usize) -> usize {
        self.power_iters
            .unwrap_or_else(|| (10.0 * (d.max(2) as f64).ln()).ceil() as usize)
    }
}

/// Solver output: k subsets of column indices, their averages as vertex
/// estimates, the directions used, and the signed optima.
#[derive(Debug, Clone, PartialEq)]
pub struct LlsResult {
    /// k subsets of size m = ⌊δn⌋, each sorted ascending.
    pub subsets: Vec<Vec<usize>>,
    /// d×k; column ℓ is the average of the data columns in `subsets[ℓ]`.
    pub vertex_estimates: DenseMatrix,
    /// d×k; the unit direction optimized in each round.
    pub directions: DenseMatrix,
    /// Signed optimum u·A_S per round.
    pub opt_values: Vec<f64>,
    pub seed: u64,
}

impl LlsResult {
    pub fn k(&self) -> usize {
        self.subsets.len()
    }

    /// True when two rounds returned the same subset, which the recovery
    /// guarantee rules out; reported as an assumption-violation diagnostic.
    pub fn has_duplicate_subsets(&self) -> bool {
        for i in 0..self.subsets.len() {
            for j in (i + 1)..self.subsets.len() {
                if self.subsets[i] == self.subsets[j] {
                    return true;
                }
            }
        }
        false
    }
}

/// Wall-time split between the subspace phase and the selection rounds.
#[derive(Debug, Clone, Copy)]
pub struct LlsTiming {
    pub svd_phase: Duration,
    pub rounds_phase: Duration,
}

/// Maximizes |u·A_S| over all subsets S of exactly m column indices.
///
/// Computes z_j = u·A_j in one pass, then compares the mean over the m
/// largest z_j with the mean over the m smallest and returns whichever has
/// the larger magnitude (ties favor the top set; ties between equal z_j
/// favor smaller column indices). The returned value is the signed mean;
/// the subset comes back sorted ascending.
pub fn subset_smooth_argmax(
    a: &SparseMatrix,
    u: &[f64],
    m: usize,
) -> Result<(Vec<usize>, f64)> {
    let n = a.n_cols();
    if m < 1 || m > n {
        return Err(crate::error::invalid(format!(
            "subset size m={m} out of range 1..={n}"
        )));
    }
    if u.iter().all(|&x| x == 0.0) {
        return Err(crate::error::invalid("zero direction vector"));
    }
    let z = a.matvec_t(u)?;

    let top = extreme_indices(&z, m, true);
    let bottom = extreme_indices(&z, m, false);
    let top_mean = mean_over(&z, &top);
    let bottom_mean = mean_over(&z, &bottom);

    if top_mean.abs() >= bottom_mean.abs() {
        Ok((top, top_mean))
    } else {
        Ok((bottom, bottom_mean))
    }
}

/// Indices of the m largest (or smallest) values, equal values resolved
/// toward smaller indices; result sorted ascending.
fn extreme_indices(z: &[f64], m: usize, largest: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z.len()).collect();
    if largest {
        order.sort_unstable_by(|&a, &b| {
            z[b].partial_cmp(&z[a]).unwrap().then(a.cmp(&b))
        });
    } else {
        order.sort_unstable_by(|&a, &b| {
            z[a].partial_cmp(&z[b]).unwrap().then(a.cmp(&b))
        });
    }
    let mut chosen = order[..m].to_vec();
    chosen.sort_unstable();
    chosen
}

fn mean_over(z: &[f64], subset: &[usize]) -> f64 {
    subset.iter().map(|&j| z[j]).sum::<f64>() / subset.len() as f64
}

/// Seeded unit vector drawn uniformly from the subspace spanned by U:
/// U·g normalized, with g standard Gaussian.
pub fn random_direction(u: &OrthoBasis, seed: u64) -> Vec<f64> {
    let mut attempt = 0u64;
    loop {
        let mut rng = rng::seeded(seed.wrapping_add(attempt), stream::DIRECTION_BASE);
        let g = rng::gaussian_vec(&mut rng, u.rank());
        let mut v = u.basis().matvec(&g);
        let norm = crate::linalg::vecops::norm(&v);
        if norm > 1e-300 {
            crate::linalg::vecops::scale(&mut v, 1.0 / norm);
            return v;
        }
        attempt += 1;
    }
}

/// Runs the full solver on A.
pub fn lls(a: &SparseMatrix, cfg: &LlsConfig) -> Result<LlsResult> {
    lls_timed(a, cfg).map(|(result, _)| result)
}

/// Same as [`lls`] but also reports the subspace/rounds wall-time split.
pub fn lls_timed(a: &SparseMatrix, cfg: &LlsConfig) -> Result<(LlsResult, LlsTiming)> {
    let d = a.n_rows();
    let n = a.n_cols();
    let m = cfg.validate_for(d, n)?;
    let k = cfg.k;

    let svd_start = Instant::now();
    let v = if cfg.use_exact_svd {
        exact_top_subspace(a, k)?
    } else {
        subspace_power(a, k, cfg.effective_power_iters(d), cfg.seed)?
    };
    let svd_phase = svd_start.elapsed();

    let rounds_start = Instant::now();
    let mut subsets: Vec<Vec<usize>> = Vec::with_capacity(k);
    let mut estimates = DenseMatrix::zeros(d, k);
    let mut directions = DenseMatrix::zeros(d, k);
    let mut opt_values = Vec::with_capacity(k);

    for round in 0..k {
        let selection_space = if round == 0 {
            v.clone()
        } else {
            let found = estimates.select_columns(&(0..round).collect::<Vec<_>>());
            let constraints = found.transpose_times(v.basis());
            null_space_within(&v, &constraints)?
        };
        if selection_space.rank() == 0 {
            return Err(Error::DegenerateSubspace { round });
        }

        // Splitmix-style round mixing keeps the direction streams of runs
        // with adjacent seeds disjoint.
        let round_seed = cfg
            .seed
            .wrapping_add((round as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let u = random_direction(&selection_space, round_seed);
        let (subset, value) = subset_smooth_argmax(a, &u, m)?;
        estimates.set_column(round, &a.column_mean(&subset));
        directions.set_column(round, &u);
        subsets.push(subset);
        opt_values.push(value);
    }
    let rounds_phase = rounds_start.elapsed();

    Ok((
        LlsResult {
            subsets,
            vertex_estimates: estimates,
            directions,
            opt_values,
            seed: cfg.seed,
        },
        LlsTiming { svd_phase, rounds_phase },
    ))
}

/// Exact truncated SVD start: top-k left singular vectors of a densified A.
fn exact_top_subspace(a: &SparseMatrix, k: usize) -> Result<OrthoBasis> {
    let d = a.n_rows();
    let n = a.n_cols();
    if d * n > 1_000_000 {
        return Err(crate::error::invalid(
            "exact SVD path is restricted to small instances",
        ));
    }
    if k > d.min(n) {
        return Err(crate::error::invalid(format!(
            "k={k} out of range for exact SVD"
        )));
    }
    let svd = small_svd(&a.to_dense());
    let top = svd.left.select_columns(&(0..k).collect::<Vec<_>>());
    // Heals zero columns when rank(A) < k.
    Ok(gram_schmidt(&top)?.basis)
}
