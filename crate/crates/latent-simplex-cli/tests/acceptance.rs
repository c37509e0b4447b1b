//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured values (`--nocapture` to see them).
//!
//! Tests with wall-clock assertions (01, 05, 10) serialize on a shared
//! gate so concurrent tests do not distort their timings. For the
//! cleanest scaling numbers run the suite with `--test-threads=1`.

use std::sync::Mutex;
use std::time::Instant;

use latent_simplex::diag::{
    check_proximity, hausdorff_estimate, match_vertices, measure_alpha, measure_sigma,
};
use latent_simplex::gen::{
    dirichlet_sample, gen_adversarial_clustering, gen_lda, gen_mmsb, Instance, TopicSpec,
};
use latent_simplex::kmeans::lloyd_kmeans;
use latent_simplex::linalg::{
    gram_schmidt, sin_theta, subspace_power, DenseMatrix, OrthoBasis, SparseMatrix,
};
use latent_simplex::simplex::{lls, lls_timed, subset_smooth_argmax, LlsConfig};
use latent_simplex_cli::commands::{cmd_bench, BenchConfig};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static TIMING_GATE: Mutex<()> = Mutex::new(());

fn to_nalgebra(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.n_rows(), m.n_cols(), |i, j| m.get(i, j))
}

fn unit_vertices(d: usize, k: usize) -> DenseMatrix {
    DenseMatrix::from_fn(d, k, |i, j| if i == j { 1.0 } else { 0.0 })
}

fn column_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Dense-oracle noise scale: top singular value of A − P over √n.
fn dense_sigma(inst: &Instance) -> f64 {
    let a = inst.a.to_dense();
    let diff = DMatrix::from_fn(inst.d(), inst.n(), |i, j| a.get(i, j) - inst.p.get(i, j));
    diff.svd(false, false).singular_values[0] / (inst.n() as f64).sqrt()
}

/// Exhaustive maximizer of |mean z_S| over all m-subsets, in lexicographic
/// order with ascending-index summation (the same arithmetic the solver
/// uses, so exact ties stay exact).
fn brute_force_argmax(z: &[f64], m: usize) -> (Vec<usize>, f64) {
    let n = z.len();
    let mut subset: Vec<usize> = (0..m).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let mean = subset.iter().map(|&j| z[j]).sum::<f64>() / m as f64;
        if best.as_ref().map_or(true, |(_, b)| mean.abs() > b.abs()) {
            best = Some((subset.clone(), mean));
        }
        let mut i = m;
        loop {
            if i == 0 {
                return best.unwrap();
            }
            i -= 1;
            if subset[i] != i + n - m {
                break;
            }
        }
        subset[i] += 1;
        for t in (i + 1)..m {
            subset[t] = subset[t - 1] + 1;
        }
    }
}

/// Criterion 1: the subset-smoothing oracle equals exhaustive search over
/// all C(n, m) subsets, exactly, on 200 random inputs in under 10 s.
#[test]
fn acceptance_01_subset_oracle_equivalence() {
    let _gate = TIMING_GATE.lock().unwrap();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..200 {
        let d = rng.gen_range(2..=6);
        let n = rng.gen_range(4..=14);
        let m = rng.gen_range(1..=n);
        let dense = DenseMatrix::from_fn(d, n, |_, _| rng.sample(rand_distr::StandardNormal));
        let a = SparseMatrix::from_dense(&dense);
        let u: Vec<f64> = (0..d).map(|_| rng.sample(rand_distr::StandardNormal)).collect();

        let (subset, value) = subset_smooth_argmax(&a, &u, m).unwrap();
        let z = a.matvec_t(&u).unwrap();
        let (oracle_subset, oracle_value) = brute_force_argmax(&z, m);
        assert_eq!(
            value.abs(),
            oracle_value.abs(),
            "case {case}: |value| differs from exhaustive search"
        );
        assert_eq!(subset, oracle_subset, "case {case}: subset differs");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "oracle check took {elapsed:?}");
    println!(
        "acceptance 01 subset-smoothing oracle equivalence: PASS (200/200 exact, {:.2}s)",
        elapsed.as_secs_f64()
    );
}

/// Criterion 2: |A_S − P_S| ≤ σ√n/√|S| with the dense-oracle σ, on 20
/// generated instances × 100 random subsets, no failures.
#[test]
fn acceptance_02_subset_average_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut instances: Vec<Instance> = Vec::new();
    for seed in 0..7u64 {
        instances
            .push(gen_lda(100, 200, 3, 40, 1.0 / 3.0, &TopicSpec::PowerLaw, seed).unwrap());
    }
    let b = DenseMatrix::from_column_major(2, 2, vec![0.5, 0.08, 0.08, 0.35]).unwrap();
    for seed in 0..7u64 {
        instances.push(gen_mmsb(80, 200, 2, &b, 0.5, seed).unwrap());
    }
    let m3 = unit_vertices(50, 3);
    for seed in 0..6u64 {
        instances.push(
            gen_adversarial_clustering(50, 200, 3, &m3, &[67, 67, 66], 0.1, 0.2, 0.3, seed)
                .unwrap(),
        );
    }

    let mut trials = 0;
    for inst in &instances {
        let sigma = dense_sigma(inst);
        let n = inst.n();
        let mut indices: Vec<usize> = (0..n).collect();
        for _ in 0..100 {
            indices.shuffle(&mut rng);
            let m = rng.gen_range(1..=n);
            let subset = &indices[..m];
            let a_mean = inst.a.column_mean(subset);
            let mut p_mean = vec![0.0; inst.d()];
            for &j in subset {
                for (x, v) in p_mean.iter_mut().zip(inst.p.column(j)) {
                    *x += v;
                }
            }
            for x in &mut p_mean {
                *x /= m as f64;
            }
            let lhs = column_distance(&a_mean, &p_mean);
            let rhs = sigma * (n as f64).sqrt() / (m as f64).sqrt();
            assert!(lhs <= rhs * (1.0 + 1e-10), "|A_S - P_S| = {lhs} > {rhs}");
            trials += 1;
        }
    }
    println!("acceptance 02 subset-average inequality: PASS ({trials}/{trials} trials)");
}

/// Criterion 3: both directed polytope-distance estimates stay within
/// 5σ/√δ on 10 clustering instances that pass proximity.
#[test]
fn acceptance_03_polytope_distance_bound() {
    let delta = 0.2;
    let mut checked = 0;
    for seed in 0..10u64 {
        let k = 2 + (seed as usize % 3);
        let d = 30 + 5 * (seed as usize % 4);
        let n = 400;
        let m = unit_vertices(d, k);
        let mut sizes = vec![n / k; k];
        sizes[0] += n % k;
        let noise = 0.05 + 0.02 * (seed as f64 % 3.0);
        let adversary = 0.3 * (seed as f64 % 2.0);
        let inst = gen_adversarial_clustering(
            d, n, k, &m, &sizes, noise, delta, adversary, 300 + seed,
        )
        .unwrap();
        let sigma = measure_sigma(&inst.a, &inst.p).unwrap();
        let proximity = check_proximity(&inst.p, &inst.m, sigma, delta).unwrap();
        assert!(proximity.pass, "seed {seed}: instance must pass proximity");

        let (k_to_kp, kp_to_k) =
            hausdorff_estimate(&inst.a, &inst.m, delta, 32, 7000 + seed).unwrap();
        let budget = 5.0 * sigma / delta.sqrt();
        assert!(k_to_kp <= budget, "seed {seed}: K->K' {k_to_kp} > {budget}");
        assert!(kp_to_k <= budget, "seed {seed}: K'->K {kp_to_k} > {budget}");
        checked += 1;
    }
    println!("acceptance 03 polytope distance within 5σ/√δ: PASS ({checked}/10 instances)");
}

/// Criterion 4: noiseless instances with ⌊δn⌋ vertex copies recover every
/// vertex to 1e-9, on all 20 seeds.
#[test]
fn acceptance_04_noiseless_exactness() {
    let d = 20;
    let n = 300;
    let k = 3;
    let delta = 0.25;
    let m = unit_vertices(d, k);
    let mut worst = 0.0_f64;
    for seed in 0..20u64 {
        // Half the seeds exercise the adversary; protected points stay
        // exactly on the vertices because sigma = 0.
        let adversary = if seed % 2 == 0 { 0.0 } else { 0.4 };
        let inst = gen_adversarial_clustering(
            d, n, k, &m, &[100, 100, 100], 0.0, delta, adversary, 400 + seed,
        )
        .unwrap();
        let cfg = LlsConfig::new(k, delta, seed);
        let result = lls(&inst.a, &cfg).unwrap();
        let matched = match_vertices(&result.vertex_estimates, &inst.m).unwrap();
        assert!(
            matched.max_error <= 1e-9,
            "seed {seed}: noiseless error {}",
            matched.max_error
        );
        worst = worst.max(matched.max_error);
    }
    println!("acceptance 04 noiseless exactness: PASS (20/20 seeds, worst error {worst:.3e})");
}

/// Criterion 5: on k=3, d=50, n=2000 clustering instances with moderate
/// noise, the matched error beats 150k⁴σ/(α√δ) on ≥18/20 seeds and the
/// calibration target 10σ/√δ on ≥15/20 seeds, each run under 5 s.
#[test]
fn acceptance_05_recovery_bound() {
    let _gate = TIMING_GATE.lock().unwrap();
    let d = 50;
    let n = 2000;
    let k = 3;
    let delta = 0.2;
    let m = unit_vertices(d, k);

    let mut bound_hits = 0;
    let mut calib_hits = 0;
    let mut worst_ratio = 0.0_f64;
    for seed in 0..20u64 {
        let inst = gen_adversarial_clustering(
            d, n, k, &m, &[667, 667, 666], 0.1, delta, 0.0, 500 + seed,
        )
        .unwrap();
        let alpha = measure_alpha(&inst.m).unwrap();
        assert!(alpha >= 0.5, "seed {seed}: alpha {alpha} below 0.5");
        let sigma = measure_sigma(&inst.a, &inst.p).unwrap();

        let start = Instant::now();
        let cfg = LlsConfig::new(k, delta, seed);
        let (result, _) = lls_timed(&inst.a, &cfg).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        assert!(elapsed < 5.0, "seed {seed}: run took {elapsed:.2}s");

        let matched = match_vertices(&result.vertex_estimates, &inst.m).unwrap();
        let noise_scale = sigma / delta.sqrt();
        let bound = 150.0 * (k as f64).powi(4) * noise_scale / alpha;
        if matched.max_error <= bound {
            bound_hits += 1;
        }
        if matched.max_error <= 10.0 * noise_scale {
            calib_hits += 1;
        }
        worst_ratio = worst_ratio.max(matched.max_error / noise_scale);
    }
    assert!(bound_hits >= 18, "recovery bound held on only {bound_hits}/20 seeds");
    assert!(calib_hits >= 15, "calibration target held on only {calib_hits}/20 seeds");
    println!(
        "acceptance 05 recovery bound: PASS (bound {bound_hits}/20, 10σ/√δ {calib_hits}/20, \
         worst error/(σ/√δ) = {worst_ratio:.3})"
    );
}

/// Criterion 6: on the ±1 two-cluster line (lifted to the plane so the
/// vertices are independent), most points dragged halfway to the other
/// side: the solver lands within 0.2 of ±1 while 2-means lands within 0.2
/// of ±.5, on ≥18/20 seeds.
#[test]
fn acceptance_06_adversarial_robustness() {
    let n = 1000;
    let delta = 0.05;
    // First coordinate carries the ±1 line; the constant second
    // coordinate makes the two vertices linearly independent without
    // changing any pairwise geometry along the line.
    let m = DenseMatrix::from_columns(2, &[vec![-1.0, 1.0], vec![1.0, 1.0]]).unwrap();

    let mut solver_hits = 0;
    let mut kmeans_hits = 0;
    for seed in 0..20u64 {
        let inst = gen_adversarial_clustering(
            2,
            n,
            2,
            &m,
            &[n / 2, n / 2],
            0.05,
            delta,
            0.25, // displacement 0.25·|(±2,0)| = 0.5, the halfway move
            600 + seed,
        )
        .unwrap();

        let cfg = LlsConfig::new(2, delta, seed);
        let result = lls(&inst.a, &cfg).unwrap();
        let matched = match_vertices(&result.vertex_estimates, &inst.m).unwrap();
        let mut xs: Vec<f64> = (0..2)
            .map(|ell| result.vertex_estimates.get(0, matched.permutation[ell]))
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if (xs[0] + 1.0).abs() <= 0.2 && (xs[1] - 1.0).abs() <= 0.2 {
            solver_hits += 1;
        }

        let km = lloyd_kmeans(&inst.a, 2, 200, seed).unwrap();
        let mut centers = [km.centers.get(0, 0), km.centers.get(0, 1)];
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if (centers[0] + 0.5).abs() <= 0.2 && (centers[1] - 0.5).abs() <= 0.2 {
            kmeans_hits += 1;
        }
    }
    assert!(solver_hits >= 18, "solver near ±1 on only {solver_hits}/20 seeds");
    assert!(kmeans_hits >= 18, "2-means near ±.5 on only {kmeans_hits}/20 seeds");
    println!(
        "acceptance 06 adversarial robustness: PASS (solver ±1: {solver_hits}/20, \
         2-means ±.5: {kmeans_hits}/20)"
    );
}

/// Criterion 7: with spectral gap s_{k+1}/s_k ≤ 1/2, ⌈10·ln d⌉ power
/// iterations reach the dense-SVD top-k subspace to 1e-6, on 20/20
/// random matrices with d, n ≤ 100.
#[test]
fn acceptance_07_subspace_power_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0_f64;
    for case in 0..20 {
        let d = rng.gen_range(20..=100);
        let n = rng.gen_range(20..=100);
        let max_k = 4.min(d.min(n) - 1).max(1);
        let k = rng.gen_range(1..=max_k);

        let mut spectrum = vec![0.0; (k + 3).min(d.min(n))];
        let mut top = 10.0;
        for s in spectrum.iter_mut().take(k) {
            *s = top;
            top *= rng.gen_range(0.75..0.95);
        }
        spectrum[k] = spectrum[k - 1] * rng.gen_range(0.2..0.5);
        for t in (k + 1)..spectrum.len() {
            spectrum[t] = spectrum[t - 1] * 0.8;
        }

        let raw_u = DenseMatrix::from_fn(d, spectrum.len(), |_, _| {
            rng.sample(rand_distr::StandardNormal)
        });
        let raw_v = DenseMatrix::from_fn(n, spectrum.len(), |_, _| {
            rng.sample(rand_distr::StandardNormal)
        });
        let u = gram_schmidt(&raw_u).unwrap().basis;
        let v = gram_schmidt(&raw_v).unwrap().basis;
        let mut dense = DenseMatrix::zeros(d, n);
        for (t, &s) in spectrum.iter().enumerate() {
            for j in 0..n {
                let vt = v.basis().get(j, t);
                for i in 0..d {
                    let cur = dense.get(i, j);
                    dense.set(i, j, cur + s * u.basis().get(i, t) * vt);
                }
            }
        }
        let a = SparseMatrix::from_dense(&dense);

        let iters = (10.0 * (d as f64).ln()).ceil() as usize;
        let q = subspace_power(&a, k, iters, 7000 + case).unwrap();

        let svd = to_nalgebra(&dense).svd(true, false);
        let nu = svd.u.unwrap();
        let oracle_cols: Vec<Vec<f64>> =
            (0..k).map(|j| nu.column(j).iter().copied().collect()).collect();
        let oracle =
            OrthoBasis::new(DenseMatrix::from_columns(d, &oracle_cols).unwrap()).unwrap();
        let s = sin_theta(&q, &oracle).unwrap();
        assert!(s <= 1e-6, "case {case} (d={d}, n={n}, k={k}): sin-theta {s:.3e}");
        worst = worst.max(s);
    }
    println!(
        "acceptance 07 subspace power convergence: PASS (20/20, worst sin-theta {worst:.3e})"
    );
}

/// Criterion 8: Dirichlet(1/k) corner mass Prob(x₁ ≥ 1−ζ) ≥ ζ²/3k, with
/// three binomial standard errors of slack, over 1e6 draws per setting.
#[test]
fn acceptance_08_dirichlet_corner_mass() {
    let draws = 1_000_000u64;
    for &(k, zeta) in &[(3usize, 0.2), (5, 0.3), (10, 0.5)] {
        let beta = 1.0 / k as f64;
        let mut hits = 0u64;
        for i in 0..draws {
            let w = dirichlet_sample(beta, k, (k as u64) << 32 | i);
            if w[0] >= 1.0 - zeta {
                hits += 1;
            }
        }
        let freq = hits as f64 / draws as f64;
        let bound = zeta * zeta / (3.0 * k as f64);
        let se = (bound * (1.0 - bound) / draws as f64).sqrt();
        assert!(
            freq >= bound - 3.0 * se,
            "k={k}, zeta={zeta}: frequency {freq:.5} below {bound:.5} - 3se"
        );
        println!(
            "acceptance 08 dirichlet corner mass (k={k}, ζ={zeta}): PASS \
             (freq {freq:.5} ≥ bound {bound:.5})"
        );
    }
}

/// Criterion 9: observed columns are unbiased with binomial variance,
/// within 5 standard errors per coordinate over 1e4 resamples.
#[test]
fn acceptance_09_observation_moments() {
    let d = 20;
    let resamples = 10_000;
    let m_words = 30;
    let total: f64 = (1..=d).map(|r| 1.0 / r as f64).sum();
    let topic: Vec<f64> = (0..d).map(|r| 1.0 / ((r + 1) as f64 * total)).collect();
    let spec = TopicSpec::Explicit(DenseMatrix::from_columns(d, &[topic.clone()]).unwrap());
    // k = 1 pins every latent column to the same topic vector, so the n
    // observed columns are iid resamples of one distribution.
    let inst = gen_lda(d, resamples, 1, m_words, 1.0, &spec, 909).unwrap();

    let dense = inst.a.to_dense();
    let nf = resamples as f64;
    let mf = m_words as f64;
    let mut worst_z_mean = 0.0_f64;
    let mut worst_z_var = 0.0_f64;
    for i in 0..d {
        let p = topic[i];
        let mean: f64 = (0..resamples).map(|j| dense.get(i, j)).sum::<f64>() / nf;
        let var: f64 =
            (0..resamples).map(|j| (dense.get(i, j) - mean).powi(2)).sum::<f64>() / (nf - 1.0);
        let true_var = p * (1.0 - p) / mf;
        let se_mean = (true_var / nf).sqrt();
        let z_mean = (mean - p).abs() / se_mean;
        assert!(z_mean <= 5.0, "coordinate {i}: mean off by {z_mean:.2} se");

        let q = 1.0 - p;
        let mu4 = (mf * p * q * (1.0 + 3.0 * (mf - 2.0) * p * q)) / mf.powi(4);
        let se_var = ((mu4 - true_var * true_var).max(0.0) / nf).sqrt().max(1e-15);
        let z_var = (var - true_var).abs() / se_var;
        assert!(z_var <= 5.0, "coordinate {i}: variance off by {z_var:.2} se");
        worst_z_mean = worst_z_mean.max(z_mean);
        worst_z_var = worst_z_var.max(z_var);
    }
    println!(
        "acceptance 09 observation moments: PASS (worst mean z {worst_z_mean:.2}, \
         worst variance z {worst_z_var:.2})"
    );
}

/// Criterion 10: the selection rounds scale with nnz. Doubling nnz keeps
/// the rounds-phase time ratio in [1.5, 3] across three consecutive
/// doublings, and doubling k does the same.
#[test]
fn acceptance_10_scaling() {
    let _gate = TIMING_GATE.lock().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = BenchConfig {
        sizes: vec![12_500, 25_000, 50_000, 100_000],
        ks: vec![4, 8],
        d: 100,
        nnz_per_col: 20,
        delta: 0.01,
        seed: 10,
        power_iters: Some(5),
        reps: 5,
        out: Some(dir.path().join("bench.csv")),
    };
    let rows = cmd_bench(&cfg).unwrap();
    assert!(dir.path().join("bench.csv").exists());

    let k4: Vec<_> = rows.iter().filter(|r| r.k == 4).collect();
    let mut ratios = Vec::new();
    for pair in k4.windows(2) {
        let nnz_ratio = pair[1].nnz as f64 / pair[0].nnz as f64;
        assert!((1.8..=2.2).contains(&nnz_ratio), "sizes must roughly double nnz");
        let ratio = pair[1].rounds_ms / pair[0].rounds_ms;
        assert!(
            (1.5..=3.0).contains(&ratio),
            "nnz doubling gave rounds ratio {ratio:.3} (rows {:?} -> {:?})",
            pair[0],
            pair[1]
        );
        ratios.push(ratio);
    }
    assert_eq!(ratios.len(), 3);

    let biggest = *cfg.sizes.last().unwrap();
    let r4 = k4.iter().find(|r| r.n == biggest).unwrap().rounds_ms;
    let r8 = rows
        .iter()
        .find(|r| r.k == 8 && r.n == biggest)
        .unwrap()
        .rounds_ms;
    let k_ratio = r8 / r4;
    assert!(
        (1.5..=3.0).contains(&k_ratio),
        "k doubling gave rounds ratio {k_ratio:.3}"
    );
    println!(
        "acceptance 10 scaling: PASS (nnz-doubling ratios {:.2}/{:.2}/{:.2}, \
         k-doubling ratio {k_ratio:.2})",
        ratios[0], ratios[1], ratios[2]
    );
}
