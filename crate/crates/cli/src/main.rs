//! `ergoscope`: ergotropic and geometric entanglement analysis for pure
//! Gaussian states, from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ergoscope::commands::{self, ComputeOptions, OptimizerOptions};
use ergoscope::{verify, Result, VERIFY_FAILURE_EXIT};

#[derive(Parser)]
#[command(
    name = "ergoscope",
    version,
    about = "Ergotropic and geometric entanglement analysis for pure Gaussian states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate quantifiers on a covariance-matrix JSON file
    Compute(ComputeArgs),
    /// Sample random pure states and write one JSON file per state
    Generate(GenerateArgs),
    /// Sweep random states and write one CSV row of quantifiers each
    Scatter(ScatterArgs),
    /// Re-check library invariants at full sample counts
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// Covariance-matrix JSON file
    file: PathBuf,
    /// Emit every quantity defined for the state
    #[arg(long)]
    all: bool,
    /// Symplectic spectrum
    #[arg(long)]
    spectrum: bool,
    /// Covariance trace and Hamiltonian energy
    #[arg(long)]
    energy: bool,
    /// State purity
    #[arg(long)]
    purity: bool,
    /// Renyi-2 and von Neumann entropies
    #[arg(long)]
    entropy: bool,
    /// Work extractable by global Gaussian unitaries
    #[arg(long = "global-ergotropy")]
    global_ergotropy: bool,
    /// Bipartite gap for a bipartition like "0,2|1,3" (repeatable)
    #[arg(long = "delta2", value_name = "BIPARTITION")]
    delta2: Vec<String>,
    /// k-local gap for a partition like "0,2|1|3" (repeatable)
    #[arg(long = "partition", value_name = "PARTITION")]
    partition: Vec<String>,
    /// Minimize the k-local gap over all k-block partitions
    #[arg(long)]
    score: bool,
    /// Block count for --score
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Cap on partitions scanned per score
    #[arg(long, value_name = "COUNT")]
    budget: Option<u128>,
    /// Geometric measure from marginal overlaps
    #[arg(long)]
    ggm: bool,
    /// Total entanglement relative to squeezed products
    #[arg(long)]
    gtme: bool,
    #[command(flatten)]
    optimizer: OptimizerFlags,
    /// Optimizer seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OptimizerFlags {
    /// Optimizer restarts
    #[arg(long)]
    restarts: Option<usize>,
    /// Optimizer iteration cap per restart
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Optimizer stagnation tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// JSON file with optimizer settings
    /// {"restarts", "max_iters", "tol", "seed"}
    #[arg(long = "optimizer-config", value_name = "FILE")]
    optimizer_config: Option<PathBuf>,
}

impl OptimizerFlags {
    fn into_options(self, seed: Option<u64>) -> OptimizerOptions {
        OptimizerOptions {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            seed,
            config_file: self.optimizer_config,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Mode count
    #[arg(long)]
    modes: usize,
    /// Covariance trace of every sampled state
    #[arg(long)]
    energy: f64,
    /// Number of states to write
    #[arg(long, default_value_t = 1)]
    samples: u64,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct ScatterArgs {
    /// Mode count (2 to 6)
    #[arg(long)]
    modes: usize,
    /// Covariance trace of every sampled state
    #[arg(long)]
    energy: f64,
    /// Number of rows
    #[arg(long)]
    samples: u64,
    /// Sweep seed; also feeds the per-sample optimizer streams
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    optimizer: OptimizerFlags,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run a single suite by name (default: all suites)
    #[arg(long)]
    suite: Option<String>,
    /// Base seed for every randomized check
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(err) = ergoscope::init_thread_pool() {
        eprintln!("error: {err}");
        return ExitCode::from(err.exit_code());
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Compute(args) => {
            let options = ComputeOptions {
                all: args.all,
                spectrum: args.spectrum,
                energy: args.energy,
                purity: args.purity,
                entropy: args.entropy,
                global_ergotropy: args.global_ergotropy,
                delta2: args.delta2,
                partitions: args.partition,
                score: args.score,
                k: args.k,
                budget: args.budget,
                ggm: args.ggm,
                gtme: args.gtme,
                optimizer: args.optimizer.into_options(args.seed),
            };
            let report = commands::cmd_compute(&args.file, &options)?;
            println!("{}", pretty(&report));
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate(args) => {
            let paths =
                commands::cmd_generate(args.modes, args.energy, args.samples, args.seed, &args.out)?;
            let summary = serde_json::json!({
                "out_dir": args.out,
                "files": paths.len(),
                "first": paths.first(),
                "last": paths.last(),
            });
            println!("{}", pretty(&summary));
            Ok(ExitCode::SUCCESS)
        }
        Command::Scatter(args) => {
            let optimizer = args.optimizer.into_options(None).resolve()?;
            let summary = commands::cmd_scatter(
                args.modes,
                args.energy,
                args.samples,
                args.seed,
                &optimizer,
                &args.out,
            )?;
            println!(
                "{}",
                pretty(&serde_json::to_value(&summary).expect("plain fields"))
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let outcomes = verify::run(args.suite.as_deref(), args.seed)?;
            for outcome in &outcomes {
                for line in outcome.human_lines() {
                    eprintln!("{line}");
                }
            }
            let summary = verify::summary_json(&outcomes, args.seed);
            println!("{}", pretty(&summary));
            if outcomes.iter().all(|o| o.passed) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(VERIFY_FAILURE_EXIT))
            }
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON value serializes")
}
