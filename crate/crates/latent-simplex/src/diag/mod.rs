//! Assumption measurement and result verification: well-separatedness α,
//! noise scale σ, vertex proximity, spectral-bound ratios, polytope
//! distance estimates, and permutation-matched vertex errors.

mod simplex_distance;

pub use simplex_distance::dist_to_simplex;

use crate::error::{Error, Result};
use crate::gen::Instance;
use crate::linalg::{
    rank_at, small_svd, spectral_norm, subspace_power, vecops, DenseMatrix, MatrixDifference,
    SparseMatrix, SpectralEstimate, RANK_TOL,
};
use crate::rng::{self, stream};
use crate::simplex::subset_smooth_argmax;

/// Iteration count used whenever diagnostics measure σ; the estimate is an
/// underestimate by construction, so the convergence indicator is reported
/// alongside rather than claiming exactness.
const SIGMA_POWER_ITERS: usize = 200;

/// Fixed internal seed for the σ power iteration, so measurement functions
/// need no seed argument and stay deterministic.
const SIGMA_SEED: u64 = 0x7369_676d;

/// Spectral-bound constant k⁹-denominator factor.
const SPECTRAL_BOUND_FACTOR: f64 = 4500.0;

/// Recovery-bound constant in 150·k⁴/α · σ/√δ.
const RECOVERY_BOUND_FACTOR: f64 = 150.0;

/// Well-separatedness: the minimum over vertices of the component of
/// M_ℓ orthogonal to the span of the other columns, relative to the
/// largest column norm. 1 for orthonormal columns, 0 for rank-deficient M.
pub fn measure_alpha(m: &DenseMatrix) -> Result<f64> {
    let k = m.n_cols();
    if k < 2 {
        return Err(crate::error::invalid("alpha needs at least two vertices"));
    }
    let mut max_norm = 0.0_f64;
    for ell in 0..k {
        let norm = m.column_norm(ell);
        if norm == 0.0 {
            return Err(crate::error::invalid(format!("vertex {ell} is the zero vector")));
        }
        max_norm = max_norm.max(norm);
    }

    let mut alpha = f64::INFINITY;
    for ell in 0..k {
        let others: Vec<usize> = (0..k).filter(|&t| t != ell).collect();
        let sub = m.select_columns(&others);
        let svd = small_svd(&sub);
        let rank = rank_at(&svd.singular_values, RANK_TOL);
        // Least-squares residual of M_ℓ against the other columns.
        let mut residual = m.column(ell).to_vec();
        for t in 0..rank {
            let q = svd.left.column(t);
            let c = vecops::dot(q, &residual);
            vecops::axpy(&mut residual, -c, q);
        }
        alpha = alpha.min(vecops::norm(&residual) / max_norm);
    }
    Ok(alpha)
}

/// Noise scale σ = ‖A − P‖/√n, estimated by power iteration on the
/// never-materialized difference operator.
pub fn measure_sigma(a: &SparseMatrix, p: &DenseMatrix) -> Result<f64> {
    measure_sigma_detailed(a, p).map(|(sigma, _)| sigma)
}

/// σ together with the power-iteration convergence indicator.
pub fn measure_sigma_detailed(
    a: &SparseMatrix,
    p: &DenseMatrix,
) -> Result<(f64, SpectralEstimate)> {
    let diff = MatrixDifference::new(a, p)?;
    let est = spectral_norm(&diff, SIGMA_POWER_ITERS, SIGMA_SEED);
    Ok((est.value / (a.n_cols() as f64).sqrt(), est))
}

/// Outcome of the proximity check at a given δ.
#[derive(Debug, Clone)]
pub struct ProximityReport {
    /// Latent columns within radius 4σ/√δ of each vertex.
    pub counts: Vec<usize>,
    /// True when every vertex has at least ⌊δn⌋ columns in range.
    pub pass: bool,
    /// Largest δ′ on the halving grid {δ, δ/2, δ/4, …} that passes its own
    /// self-consistent test (radius evaluated at δ′); 0 when none does.
    pub delta_realized: f64,
}

/// Counts latent columns near each vertex and searches the halving grid
/// for the largest self-consistently satisfied δ.
pub fn check_proximity(
    p: &DenseMatrix,
    m: &DenseMatrix,
    sigma: f64,
    delta: f64,
) -> Result<ProximityReport> {
    if p.n_rows() != m.n_rows() {
        return Err(Error::DimensionMismatch {
            context: "proximity latent/vertex dimension",
            expected: p.n_rows(),
            actual: m.n_rows(),
        });
    }
    let k = m.n_cols();
    if !(delta > 0.0 && delta <= 1.0 / k as f64) {
        return Err(crate::error::invalid("delta must lie in (0, 1/k]"));
    }
    let n = p.n_cols();

    let counts_at = |d: f64| -> Vec<usize> {
        let radius = 4.0 * sigma / d.sqrt();
        (0..k)
            .map(|ell| {
                (0..n)
                    .filter(|&j| {
                        let dist = column_distance(p.column(j), m.column(ell));
                        dist <= radius
                    })
                    .count()
            })
            .collect()
    };
    let passes = |d: f64, counts: &[usize]| -> bool {
        let need = (d * n as f64).floor() as usize;
        counts.iter().all(|&c| c >= need)
    };

    let counts = counts_at(delta);
    let pass = passes(delta, &counts);

    let mut delta_realized = 0.0;
    let mut probe = delta;
    while (probe * n as f64).floor() >= 1.0 {
        let c = counts_at(probe);
        if passes(probe, &c) {
            delta_realized = probe;
            break;
        }
        probe /= 2.0;
    }

    Ok(ProximityReport { counts, pass, delta_realized })
}

fn column_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Directed distance estimates between the latent simplex K = CH(M) and
/// the subset-smoothed polytope K′ of all ⌊δn⌋-subset averages.
///
/// The K→K′ side is an upper estimate: per vertex, the best of the m
/// nearest data columns and the subset selected along the direction from
/// the vertex centroid. The K′→K side is a sampled lower bound: optima of
/// random directions are genuine vertices of K′, and each contributes its
/// distance to K.
pub fn hausdorff_estimate(
    a: &SparseMatrix,
    m: &DenseMatrix,
    delta: f64,
    n_dirs: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let n = a.n_cols();
    let d = a.n_rows();
    if m.n_rows() != d {
        return Err(Error::DimensionMismatch {
            context: "hausdorff vertex dimension",
            expected: d,
            actual: m.n_rows(),
        });
    }
    let subset_size = (delta * n as f64).floor() as usize;
    if subset_size < 1 {
        return Err(crate::error::invalid("floor(delta*n) must be at least 1"));
    }
    let k = m.n_cols();

    let centroid: Vec<f64> = {
        let mut c = vec![0.0; d];
        for ell in 0..k {
            vecops::axpy(&mut c, 1.0 / k as f64, m.column(ell));
        }
        c
    };

    let mut dist_k_to_kp = 0.0_f64;
    for ell in 0..k {
        let vertex = m.column(ell);
        let near = nearest_columns(a, vertex, subset_size);
        let mut best = column_distance(&a.column_mean(&near), vertex);

        let dir = vecops::sub(vertex, &centroid);
        if vecops::norm(&dir) > 0.0 {
            let (subset, _) = subset_smooth_argmax(a, &dir, subset_size)?;
            best = best.min(column_distance(&a.column_mean(&subset), vertex));
        }
        dist_k_to_kp = dist_k_to_kp.max(best);
    }

    let mut rng = rng::seeded(seed, stream::HAUSDORFF);
    let mut dist_kp_to_k = 0.0_f64;
    for _ in 0..n_dirs {
        let dir = rng::unit_gaussian(&mut rng, d);
        let (subset, _) = subset_smooth_argmax(a, &dir, subset_size)?;
        let point = a.column_mean(&subset);
        let (dist, _) = dist_to_simplex(&point, m);
        dist_kp_to_k = dist_kp_to_k.max(dist);
    }

    Ok((dist_k_to_kp, dist_kp_to_k))
}

/// Indices of the m columns of A closest to the target vector, ties toward
/// smaller indices; result sorted ascending.
fn nearest_columns(a: &SparseMatrix, target: &[f64], m: usize) -> Vec<usize> {
    let target_sq = vecops::dot(target, target);
    let mut scored: Vec<(f64, usize)> = (0..a.n_cols())
        .map(|j| {
            let col = a.column(j);
            let col_sq: f64 = col.iter().map(|&(_, v)| v * v).sum();
            let dot: f64 = col.iter().map(|&(i, v)| v * target[i]).sum();
            (col_sq - 2.0 * dot + target_sq, j)
        })
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut chosen: Vec<usize> = scored[..m].iter().map(|&(_, j)| j).collect();
    chosen.sort_unstable();
    chosen
}

/// Permutation matching of estimated vertices against ground truth.
#[derive(Debug, Clone)]
pub struct VertexMatch {
    /// `permutation[ell]` is the estimate column matched to true vertex ell.
    pub permutation: Vec<usize>,
    pub errors: Vec<f64>,
    pub max_error: f64,
    /// False when the assignment came from the greedy heuristic (k > 8).
    pub exhaustive: bool,
}

/// Matches estimate columns to true vertices, minimizing the maximum
/// per-vertex distance: exhaustively over permutations for k ≤ 8, greedily
/// by increasing pairwise distance above that.
pub fn match_vertices(estimates: &DenseMatrix, m: &DenseMatrix) -> Result<VertexMatch> {
    if estimates.n_rows() != m.n_rows() || estimates.n_cols() != m.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "vertex match shapes",
            expected: m.n_rows() * m.n_cols(),
            actual: estimates.n_rows() * estimates.n_cols(),
        });
    }
    let k = m.n_cols();
    let dist = DenseMatrix::from_fn(k, k, |ell, c| {
        column_distance(m.column(ell), estimates.column(c))
    });

    let (permutation, exhaustive) = if k <= 8 {
        (best_permutation(&dist, k), true)
    } else {
        (greedy_assignment(&dist, k), false)
    };

    let errors: Vec<f64> = (0..k).map(|ell| dist.get(ell, permutation[ell])).collect();
    let max_error = errors.iter().fold(0.0_f64, |a, &b| a.max(b));
    Ok(VertexMatch { permutation, errors, max_error, exhaustive })
}

fn best_permutation(dist: &DenseMatrix, k: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    permute(&mut perm, 0, &mut |p| {
        let worst = (0..k).map(|ell| dist.get(ell, p[ell])).fold(0.0_f64, f64::max);
        if best.as_ref().map_or(true, |(b, _)| worst < *b) {
            best = Some((worst, p.to_vec()));
        }
    });
    best.unwrap().1
}

fn permute(items: &mut [usize], from: usize, visit: &mut impl FnMut(&[usize])) {
    if from == items.len() {
        visit(items);
        return;
    }
    for i in from..items.len() {
        items.swap(from, i);
        permute(items, from + 1, visit);
        items.swap(from, i);
    }
}

fn greedy_assignment(dist: &DenseMatrix, k: usize) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize, usize)> = (0..k)
        .flat_map(|ell| (0..k).map(move |c| (ell, c)))
        .map(|(ell, c)| (dist.get(ell, c), ell, c))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut perm = vec![usize::MAX; k];
    let mut taken = vec![false; k];
    for (_, ell, c) in pairs {
        if perm[ell] == usize::MAX && !taken[c] {
            perm[ell] = c;
            taken[c] = true;
        }
    }
    perm
}

/// Pass flags for the three structural assumptions, plus the constant-free
/// variant of the spectral bound.
#[derive(Debug, Clone, Copy)]
pub struct AssumptionFlags {
    /// α is bounded away from zero.
    pub well_separated: bool,
    /// Every vertex has ⌊δn⌋ latent columns within 4σ/√δ.
    pub proximity: bool,
    /// σ/√δ ≤ α³·min‖M_ℓ‖/(4500k⁹), the literal constant-laden bound.
    pub spectral_literal: bool,
    /// σ/√δ ≤ α·min‖M_ℓ‖, the constant-free trend version.
    pub spectral_constant_free: bool,
}

/// Measured assumption quantities and (optionally) matched vertex errors.
#[derive(Debug, Clone)]
pub struct DiagnosticsReport {
    pub alpha: f64,
    pub sigma: f64,
    /// Relative change of the last two σ power iterates.
    pub sigma_rel_change: f64,
    pub delta: f64,
    pub delta_realized: f64,
    pub proximity_counts: Vec<usize>,
    /// (σ/√δ) over α³·min‖M_ℓ‖/(4500k⁹); > 1 means the literal assumption
    /// fails (expected at desk scale for k ≥ 2).
    pub spectral_ratio: f64,
    /// (σ/√δ) over α·min‖M_ℓ‖.
    pub spectral_ratio_constant_free: f64,
    pub s_k_m: f64,
    pub s_k_p: f64,
    /// s_k(P)/(σ√n); ∞ when σ = 0.
    pub s_k_p_over_sigma_sqrt_n: f64,
    /// Upper estimate of Dist(K → K′).
    pub hausdorff_k_to_kprime: f64,
    /// Sampled lower bound of Dist(K′ → K).
    pub hausdorff_lb: f64,
    /// Recovery bound 150k⁴σ/(α√δ); ∞ when α = 0.
    pub bound_150: f64,
    /// Per-vertex matched errors; empty unless estimates were supplied.
    pub matched_errors: Vec<f64>,
    pub max_matched_error: Option<f64>,
    pub flags: AssumptionFlags,
}

impl DiagnosticsReport {
    /// Max matched error relative to σ/√δ, for trend analysis across noise
    /// scales; `None` without estimates or when σ = 0.
    pub fn error_over_noise(&self) -> Option<f64> {
        let max = self.max_matched_error?;
        let scale = self.sigma / self.delta.sqrt();
        (scale > 0.0).then(|| max / scale)
    }
}

/// Measures every assumption quantity of a generated instance at the given
/// δ. Matched-error fields stay empty; use [`verification_report`] when
/// vertex estimates are available.
pub fn assumption_report(inst: &Instance, delta: f64) -> Result<DiagnosticsReport> {
    report_impl(inst, delta, None)
}

/// Full report including permutation-matched vertex errors of `estimates`.
pub fn verification_report(
    inst: &Instance,
    delta: f64,
    estimates: &DenseMatrix,
) -> Result<DiagnosticsReport> {
    report_impl(inst, delta, Some(estimates))
}

fn report_impl(
    inst: &Instance,
    delta: f64,
    estimates: Option<&DenseMatrix>,
) -> Result<DiagnosticsReport> {
    let k = inst.k();
    let n = inst.n();
    let d = inst.d();
    if !(delta > 0.0 && delta <= 1.0 / k as f64) {
        return Err(crate::error::invalid("delta must lie in (0, 1/k]"));
    }

    let alpha = if k >= 2 { measure_alpha(&inst.m)? } else { 1.0 };
    let (sigma, sigma_est) = measure_sigma_detailed(&inst.a, &inst.p)?;
    let proximity = check_proximity(&inst.p, &inst.m, sigma, delta)?;

    let min_vertex_norm = (0..k).map(|ell| inst.m.column_norm(ell)).fold(f64::INFINITY, f64::min);
    let noise_per_delta = sigma / delta.sqrt();
    let spectral_ratio = if sigma == 0.0 {
        0.0
    } else {
        let budget = alpha.powi(3) * min_vertex_norm / (SPECTRAL_BOUND_FACTOR * (k as f64).powi(9));
        noise_per_delta / budget
    };
    let spectral_ratio_constant_free = if sigma == 0.0 {
        0.0
    } else {
        noise_per_delta / (alpha * min_vertex_norm)
    };

    // s_k(M) from the k×k Gram matrix; s_k(P) from the k top left singular
    // directions of P (P has rank at most k, so the compressed k×k Gram
    // catches all of its spectrum).
    let s_k_m = {
        let gram = inst.m.transpose_times(&inst.m);
        small_svd(&gram).singular_values[k - 1].max(0.0).sqrt()
    };
    let s_k_p = {
        let iters = (10.0 * (d.max(2) as f64).ln()).ceil() as usize;
        let q = subspace_power(&inst.p, k, iters, inst.seed ^ 0x736b_70)?;
        let c = q.basis().transpose_times(&inst.p); // k×n
        let gram = DenseMatrix::from_fn(k, k, |i, j| {
            (0..n).map(|t| c.get(i, t) * c.get(j, t)).sum()
        });
        small_svd(&gram).singular_values[k - 1].max(0.0).sqrt()
    };
    let s_k_p_over_sigma_sqrt_n = if sigma > 0.0 {
        s_k_p / (sigma * (n as f64).sqrt())
    } else {
        f64::INFINITY
    };

    let (hausdorff_k_to_kprime, hausdorff_lb) =
        hausdorff_estimate(&inst.a, &inst.m, delta, 32, inst.seed ^ 0x6864)?;

    let bound_150 = if alpha > 0.0 {
        RECOVERY_BOUND_FACTOR * (k as f64).powi(4) * noise_per_delta / alpha
    } else {
        f64::INFINITY
    };

    let (matched_errors, max_matched_error) = match estimates {
        Some(est) => {
            let matched = match_vertices(est, &inst.m)?;
            (matched.errors, Some(matched.max_error))
        }
        None => (Vec::new(), None),
    };

    let flags = AssumptionFlags {
        well_separated: alpha > 1e-9,
        proximity: proximity.pass,
        spectral_literal: spectral_ratio <= 1.0,
        spectral_constant_free: spectral_ratio_constant_free <= 1.0,
    };

    Ok(DiagnosticsReport {
        alpha,
        sigma,
        sigma_rel_change: sigma_est.rel_change,
        delta,
        delta_realized: proximity.delta_realized,
        proximity_counts: proximity.counts,
        spectral_ratio,
        spectral_ratio_constant_free,
        s_k_m,
        s_k_p,
        s_k_p_over_sigma_sqrt_n,
        hausdorff_k_to_kprime,
        hausdorff_lb,
        bound_150,
        matched_errors,
        max_matched_error,
        flags,
    })
}
