//! The four experiment commands: generate ground-truth instances, run the
//! solver on a data file, verify results against ground truth, and
//! benchmark scaling.

use std::path::{Path, PathBuf};
use std::time::Instant;

use latent_simplex::diag::{verification_report, DiagnosticsReport};
use latent_simplex::gen::{
    gen_adversarial_clustering, gen_lda, gen_mmsb, random_orthonormal_vertices, Instance,
    ModelKind, ModelParams, TopicSpec,
};
use latent_simplex::linalg::DenseMatrix;
use latent_simplex::simplex::{lls_timed, LlsConfig};

use crate::error::{CliError, CliResult};
use crate::io::{
    read_dense_csv, read_json, read_matrix_market, write_dense_csv, write_json,
    write_matrix_market, write_subsets, InstanceMeta, RunMeta,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Lda,
    Mmsb,
    Cluster,
}

/// Everything cmd_generate needs: the model, its parameters, and where to
/// write the instance.
#[derive(Debug, Clone)]
pub struct GenerateConfig {
    pub model: ModelChoice,
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Words per document (topic models); also the per-column nnz bound.
    pub m_words: usize,
    /// Explicit topic vectors as a d×k CSV; power-law topics when absent.
    pub topics_file: Option<PathBuf>,
    /// Dirichlet concentration; defaults to 1/k.
    pub beta: Option<f64>,
    pub b_diag: f64,
    pub b_off: f64,
    pub noise_scale: f64,
    pub delta: f64,
    pub adversary: f64,
    pub vertex_norm: f64,
}

pub fn build_instance(cfg: &GenerateConfig) -> CliResult<Instance> {
    let beta = cfg.beta.unwrap_or(1.0 / cfg.k as f64);
    let inst = match cfg.model {
        ModelChoice::Lda => {
            let topics = match &cfg.topics_file {
                Some(path) => TopicSpec::Explicit(read_dense_csv(path)?),
                None => TopicSpec::PowerLaw,
            };
            gen_lda(cfg.d, cfg.n, cfg.k, cfg.m_words, beta, &topics, cfg.seed)?
        }
        ModelChoice::Mmsb => {
            let b = DenseMatrix::from_fn(cfg.k, cfg.k, |i, j| {
                if i == j {
                    cfg.b_diag
                } else {
                    cfg.b_off
                }
            });
            gen_mmsb(cfg.d, cfg.n, cfg.k, &b, beta, cfg.seed)?
        }
        ModelChoice::Cluster => {
            let m = random_orthonormal_vertices(cfg.d, cfg.k, cfg.vertex_norm, cfg.seed)?;
            let mut sizes = vec![cfg.n / cfg.k; cfg.k];
            for extra in 0..cfg.n % cfg.k {
                sizes[extra] += 1;
            }
            gen_adversarial_clustering(
                cfg.d,
                cfg.n,
                cfg.k,
                &m,
                &sizes,
                cfg.noise_scale,
                cfg.delta,
                cfg.adversary,
                cfg.seed,
            )?
        }
    };
    Ok(inst)
}

/// Writes A.mtx, M.csv, P.csv, W.csv, and meta.json into the output
/// directory.
pub fn cmd_generate(cfg: &GenerateConfig) -> CliResult<InstanceMeta> {
    let inst = build_instance(cfg)?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;

    write_matrix_market(&cfg.out.join("A.mtx"), &inst.a)?;
    write_dense_csv(&cfg.out.join("M.csv"), &inst.m)?;
    write_dense_csv(&cfg.out.join("P.csv"), &inst.p)?;
    write_dense_csv(&cfg.out.join("W.csv"), &inst.w)?;

    let mut meta = InstanceMeta {
        model: inst.model.as_str().to_string(),
        d: inst.d(),
        n: inst.n(),
        k: inst.k(),
        seed: inst.seed,
        m_words: None,
        beta: None,
        nu: None,
        noise_scale: None,
        delta: None,
        adversary: None,
        cluster_sizes: None,
        sigma_measured: None,
    };
    match &inst.params {
        ModelParams::Lda { m_words, beta } => {
            meta.m_words = Some(*m_words);
            meta.beta = Some(*beta);
        }
        ModelParams::Mmsb { beta, nu, .. } => {
            meta.beta = Some(*beta);
            meta.nu = Some(*nu);
        }
        ModelParams::AdversarialClustering {
            noise_scale,
            delta,
            adversary,
            cluster_sizes,
            plan,
        } => {
            meta.noise_scale = Some(*noise_scale);
            meta.delta = Some(*delta);
            meta.adversary = Some(*adversary);
            meta.cluster_sizes = Some(cluster_sizes.clone());
            meta.sigma_measured = Some(plan.sigma);
        }
        ModelParams::Custom => {}
    }
    write_json(&cfg.out.join("meta.json"), &meta)?;
    Ok(meta)
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub a_file: PathBuf,
    pub k: usize,
    pub delta: f64,
    pub seed: u64,
    pub power_iters: Option<usize>,
    pub use_exact_svd: bool,
    pub out: PathBuf,
}

/// Runs the solver on a MatrixMarket file and writes subsets.txt,
/// estimates.csv, directions.csv, and run.json with the wall-time split.
pub fn cmd_run(cfg: &RunConfig) -> CliResult<RunMeta> {
    let a = read_matrix_market(&cfg.a_file)?;
    let lls_cfg = LlsConfig {
        k: cfg.k,
        delta: cfg.delta,
        power_iters: cfg.power_iters,
        seed: cfg.seed,
        use_exact_svd: cfg.use_exact_svd,
    };
    let total_start = Instant::now();
    let (result, timing) = lls_timed(&a, &lls_cfg)?;
    let total_ms = total_start.elapsed().as_secs_f64() * 1e3;

    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    write_subsets(&cfg.out.join("subsets.txt"), &result.subsets)?;
    write_dense_csv(&cfg.out.join("estimates.csv"), &result.vertex_estimates)?;
    write_dense_csv(&cfg.out.join("directions.csv"), &result.directions)?;

    let run = RunMeta {
        k: cfg.k,
        delta: cfg.delta,
        seed: cfg.seed,
        power_iters: lls_cfg.effective_power_iters(a.n_rows()),
        use_exact_svd: cfg.use_exact_svd,
        opt_values: result.opt_values.clone(),
        duplicate_subsets: result.has_duplicate_subsets(),
        svd_ms: timing.svd_phase.as_secs_f64() * 1e3,
        rounds_ms: timing.rounds_phase.as_secs_f64() * 1e3,
        total_ms,
    };
    write_json(&cfg.out.join("run.json"), &run)?;
    Ok(run)
}

#[derive(Debug)]
pub struct VerifyOutcome {
    pub report: DiagnosticsReport,
    pub pass: bool,
}

/// Verifies a result directory against a generated instance directory and
/// writes the diagnostics report. Passing means the matched error stays
/// within the recovery bound 150k⁴σ/(α√δ).
pub fn cmd_verify(
    instance_dir: &Path,
    result_dir: &Path,
    report_out: Option<&Path>,
) -> CliResult<VerifyOutcome> {
    for ground_truth in ["P.csv", "M.csv"] {
        let path = instance_dir.join(ground_truth);
        if !path.exists() {
            return Err(CliError::io(
                &path,
                std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    "cannot verify: instance has no ground truth (P/M)",
                ),
            ));
        }
    }

    let meta: InstanceMeta = read_json(&instance_dir.join("meta.json"))?;
    let a = read_matrix_market(&instance_dir.join("A.mtx"))?;
    let p = read_dense_csv(&instance_dir.join("P.csv"))?;
    let m = read_dense_csv(&instance_dir.join("M.csv"))?;
    let w = read_dense_csv(&instance_dir.join("W.csv"))?;
    let run: RunMeta = read_json(&result_dir.join("run.json"))?;
    let estimates = read_dense_csv(&result_dir.join("estimates.csv"))?;

    if estimates.n_rows() != m.n_rows() || estimates.n_cols() != m.n_cols() {
        return Err(CliError::Usage(format!(
            "estimates are {}x{} but ground truth is {}x{}",
            estimates.n_rows(),
            estimates.n_cols(),
            m.n_rows(),
            m.n_cols()
        )));
    }

    let model = match meta.model.as_str() {
        "lda" => ModelKind::Lda,
        "mmsb" => ModelKind::Mmsb,
        "adversarial_clustering" => ModelKind::AdversarialClustering,
        _ => ModelKind::Custom,
    };
    let inst = Instance {
        a,
        p,
        m,
        w,
        model,
        params: ModelParams::Custom,
        seed: meta.seed,
    };

    let report = verification_report(&inst, run.delta, &estimates)?;
    let max_err = report.max_matched_error.unwrap_or(f64::INFINITY);
    // The 1e-9 floor absorbs subset-average roundoff, which is all that
    // separates exact recovery from the bound when sigma = 0.
    let pass = report.bound_150.is_finite() && max_err <= report.bound_150 + 1e-9;

    let report_path = report_out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| result_dir.join("report.txt"));
    write_report(&report_path, &report, pass)?;
    Ok(VerifyOutcome { report, pass })
}

fn write_report(path: &Path, report: &DiagnosticsReport, pass: bool) -> CliResult<()> {
    let mut lines = vec![
        format!("alpha = {:.6e}", report.alpha),
        format!("sigma = {:.6e}", report.sigma),
        format!("sigma_rel_change = {:.3e}", report.sigma_rel_change),
        format!("delta = {:.6e}", report.delta),
        format!("delta_realized = {:.6e}", report.delta_realized),
        format!("proximity_counts = {:?}", report.proximity_counts),
        format!("spectral_ratio = {:.6e}", report.spectral_ratio),
        format!(
            "spectral_ratio_constant_free = {:.6e}",
            report.spectral_ratio_constant_free
        ),
        format!("s_k_M = {:.6e}", report.s_k_m),
        format!("s_k_P = {:.6e}", report.s_k_p),
        format!(
            "s_k_P_over_sigma_sqrt_n = {:.6e}",
            report.s_k_p_over_sigma_sqrt_n
        ),
        format!("hausdorff_K_to_Kprime = {:.6e}", report.hausdorff_k_to_kprime),
        format!("hausdorff_Kprime_to_K_lb = {:.6e}", report.hausdorff_lb),
        format!("bound_150 = {:.6e}", report.bound_150),
        format!("pass_well_separated = {}", report.flags.well_separated),
        format!("pass_proximity = {}", report.flags.proximity),
        format!("pass_spectral_literal = {}", report.flags.spectral_literal),
        format!(
            "pass_spectral_constant_free = {}",
            report.flags.spectral_constant_free
        ),
    ];
    if let Some(max_err) = report.max_matched_error {
        lines.push(format!("matched_errors = {:?}", report.matched_errors));
        lines.push(format!("max_matched_error = {max_err:.6e}"));
        if let Some(ratio) = report.error_over_noise() {
            lines.push(format!("error_over_sigma_sqrt_delta = {ratio:.6e}"));
        }
    }
    lines.push(format!("verify_pass = {pass}"));
    std::fs::write(path, lines.join("\n") + "\n").map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Column counts; consecutive entries should double n (and so nnz).
    pub sizes: Vec<usize>,
    /// Vertex counts; one pass of every size per k.
    pub ks: Vec<usize>,
    pub d: usize,
    pub nnz_per_col: usize,
    pub delta: f64,
    pub seed: u64,
    pub power_iters: Option<usize>,
    pub reps: usize,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub nnz: usize,
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub svd_ms: f64,
    pub rounds_ms: f64,
    pub total_ms: f64,
    /// rounds_ms relative to the previous row of the same k.
    pub rounds_ratio: Option<f64>,
}

/// Generates sparse topic-model data per size, times the solver phases
/// (minimum over `reps` repetitions), and reports the doubling ratios.
pub fn cmd_bench(cfg: &BenchConfig) -> CliResult<Vec<BenchRow>> {
    if cfg.sizes.len() < 3 {
        return Err(CliError::Usage("bench needs at least 3 sizes".into()));
    }
    if cfg.reps < 1 {
        return Err(CliError::Usage("bench needs reps >= 1".into()));
    }
    if cfg.ks.is_empty() {
        return Err(CliError::Usage("bench needs at least one k".into()));
    }

    // One instance per size, shared by every k, so rows with the same n
    // compare solver cost at identical nnz.
    let gen_k = cfg.ks[0];
    let instances: Vec<_> = cfg
        .sizes
        .iter()
        .enumerate()
        .map(|(idx, &n)| {
            gen_lda(
                cfg.d,
                n,
                gen_k,
                cfg.nnz_per_col,
                1.0 / gen_k as f64,
                &TopicSpec::PowerLaw,
                cfg.seed.wrapping_add(idx as u64),
            )
        })
        .collect::<Result<_, _>>()?;

    let mut rows: Vec<BenchRow> = Vec::new();
    for &k in &cfg.ks {
        let mut prev_rounds: Option<f64> = None;
        for (inst, &n) in instances.iter().zip(&cfg.sizes) {
            let lls_cfg = LlsConfig {
                k,
                delta: cfg.delta,
                power_iters: cfg.power_iters,
                seed: cfg.seed,
                use_exact_svd: false,
            };
            let mut svd_ms = f64::INFINITY;
            let mut rounds_ms = f64::INFINITY;
            let mut total_ms = f64::INFINITY;
            for _ in 0..cfg.reps {
                let start = Instant::now();
                let (_, timing) = lls_timed(&inst.a, &lls_cfg)?;
                total_ms = total_ms.min(start.elapsed().as_secs_f64() * 1e3);
                svd_ms = svd_ms.min(timing.svd_phase.as_secs_f64() * 1e3);
                rounds_ms = rounds_ms.min(timing.rounds_phase.as_secs_f64() * 1e3);
            }
            let rounds_ratio = prev_rounds.map(|p| rounds_ms / p);
            prev_rounds = Some(rounds_ms);
            rows.push(BenchRow {
                nnz: inst.a.nnz(),
                d: cfg.d,
                n,
                k,
                svd_ms,
                rounds_ms,
                total_ms,
                rounds_ratio,
            });
        }
    }

    if let Some(out) = &cfg.out {
        let mut text = String::from("nnz,d,n,k,svd_ms,rounds_ms,total_ms,rounds_ratio\n");
        for row in &rows {
            let ratio = row
                .rounds_ratio
                .map(|r| format!("{r:.3}"))
                .unwrap_or_default();
            text.push_str(&format!(
                "{},{},{},{},{:.3},{:.3},{:.3},{}\n",
                row.nnz, row.d, row.n, row.k, row.svd_ms, row.rounds_ms, row.total_ms, ratio
            ));
        }
        std::fs::write(out, text).map_err(|e| CliError::io(out, e))?;
    }
    Ok(rows)
}
