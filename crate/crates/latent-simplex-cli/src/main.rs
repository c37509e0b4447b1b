use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use latent_simplex_cli::commands::{
    cmd_bench, cmd_generate, cmd_run, cmd_verify, BenchConfig, GenerateConfig, ModelChoice,
    RunConfig,
};
use latent_simplex_cli::error::CliError;

/// Recovers the vertices of a latent simplex from heavily perturbed data
/// by subset smoothing, with generators, verification, and benchmarks.
#[derive(Parser)]
#[command(name = "lks", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a ground-truth instance (A.mtx, M/P/W.csv, meta.json).
    Generate(GenerateArgs),
    /// Run the solver on a MatrixMarket data file.
    Run(RunArgs),
    /// Verify a result directory against a generated instance.
    Verify(VerifyArgs),
    /// Time the solver phases across sizes and vertex counts.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Model specialization.
    #[arg(long, value_parser = parse_model)]
    model: ModelChoice,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Words per document (lda).
    #[arg(long, default_value_t = 50)]
    m_words: usize,
    /// Explicit topic vectors as a d×k CSV (lda); power-law when absent.
    #[arg(long)]
    topics: Option<PathBuf>,
    /// Dirichlet concentration; defaults to 1/k.
    #[arg(long)]
    beta: Option<f64>,
    /// Within-community edge probability (mmsb).
    #[arg(long, default_value_t = 0.4)]
    b_diag: f64,
    /// Cross-community edge probability (mmsb).
    #[arg(long, default_value_t = 0.05)]
    b_off: f64,
    /// Per-coordinate noise bound (cluster).
    #[arg(long, default_value_t = 0.1)]
    noise_scale: f64,
    /// Protected fraction per cluster (cluster).
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Adversary strength in [0, 1] (cluster).
    #[arg(long, default_value_t = 0.0)]
    adversary: f64,
    /// Vertex norm (cluster).
    #[arg(long, default_value_t = 1.0)]
    vertex_norm: f64,
}

#[derive(Args)]
struct RunArgs {
    /// MatrixMarket data file.
    #[arg(long)]
    a_file: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Power-iteration count; defaults to ceil(10·ln d).
    #[arg(long)]
    iters: Option<usize>,
    /// Use the exact truncated SVD start (small instances only).
    #[arg(long, default_value_t = false)]
    exact_svd: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance directory written by `generate`.
    #[arg(long)]
    instance: PathBuf,
    /// Result directory written by `run`.
    #[arg(long)]
    result: PathBuf,
    /// Report path; defaults to <result>/report.txt.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated column counts; consecutive entries should double.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    ks: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    d: usize,
    #[arg(long, default_value_t = 20)]
    nnz_per_col: usize,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Power-iteration count; defaults to ceil(10·ln d).
    #[arg(long)]
    iters: Option<usize>,
    /// Repetitions per size; minimum time is reported.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<ModelChoice, String> {
    match s {
        "lda" => Ok(ModelChoice::Lda),
        "mmsb" => Ok(ModelChoice::Mmsb),
        "cluster" => Ok(ModelChoice::Cluster),
        other => Err(format!("unknown model `{other}` (expected lda|mmsb|cluster)")),
    }
}

fn init_thread_pool() {
    let threads = std::env::var("LKS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1);
    // Ignore the error if a pool already exists (e.g. under a test harness).
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome: Result<ExitCode, CliError> = match cli.command {
        Command::Generate(args) => {
            let cfg = GenerateConfig {
                model: args.model,
                d: args.d,
                n: args.n,
                k: args.k,
                seed: args.seed,
                out: args.out,
                m_words: args.m_words,
                topics_file: args.topics,
                beta: args.beta,
                b_diag: args.b_diag,
                b_off: args.b_off,
                noise_scale: args.noise_scale,
                delta: args.delta,
                adversary: args.adversary,
                vertex_norm: args.vertex_norm,
            };
            cmd_generate(&cfg).map(|meta| {
                println!(
                    "generated {} instance: d={} n={} k={} seed={} -> {}",
                    meta.model,
                    meta.d,
                    meta.n,
                    meta.k,
                    meta.seed,
                    cfg.out.display()
                );
                ExitCode::SUCCESS
            })
        }
        Command::Run(args) => {
            let cfg = RunConfig {
                a_file: args.a_file,
                k: args.k,
                delta: args.delta,
                seed: args.seed,
                power_iters: args.iters,
                use_exact_svd: args.exact_svd,
                out: args.out,
            };
            cmd_run(&cfg).map(|run| {
                println!(
                    "solved k={} delta={} seed={}: svd {:.3} ms, rounds {:.3} ms -> {}",
                    run.k,
                    run.delta,
                    run.seed,
                    run.svd_ms,
                    run.rounds_ms,
                    cfg.out.display()
                );
                ExitCode::SUCCESS
            })
        }
        Command::Verify(args) => cmd_verify(&args.instance, &args.result, args.out.as_deref())
            .map(|outcome| {
                let max_err = outcome
                    .report
                    .max_matched_error
                    .map(|e| format!("{e:.6e}"))
                    .unwrap_or_else(|| "n/a".into());
                println!(
                    "verify: max matched error {max_err}, bound {:.6e}, pass = {}",
                    outcome.report.bound_150, outcome.pass
                );
                if outcome.pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }),
        Command::Bench(args) => {
            let cfg = BenchConfig {
                sizes: args.sizes,
                ks: args.ks,
                d: args.d,
                nnz_per_col: args.nnz_per_col,
                delta: args.delta,
                seed: args.seed,
                power_iters: args.iters,
                reps: args.reps,
                out: args.out,
            };
            cmd_bench(&cfg).map(|rows| {
                println!("nnz,d,n,k,svd_ms,rounds_ms,total_ms,rounds_ratio");
                for row in rows {
                    let ratio = row
                        .rounds_ratio
                        .map(|r| format!("{r:.3}"))
                        .unwrap_or_default();
                    println!(
                        "{},{},{},{},{:.3},{:.3},{:.3},{}",
                        row.nnz, row.d, row.n, row.k, row.svd_ms, row.rounds_ms, row.total_ms,
                        ratio
                    );
                }
                ExitCode::SUCCESS
            })
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
