//! Command-line entry point: `generate` synthesizes a drifting CSV stream,
//! `run` scores one stream and writes score/trace files, `bench` compares
//! the adaptive pool against baselines across seeds.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use driftpool_core::eval::{run_benchmark, stream_auc, write_scores_csv, write_trace_csv};
use driftpool_core::stream::{run_prequential, Batch, CsvStream, DriftScenario, DriftStream};
use driftpool_core::{
    Error, InferenceMode, MergeMode, ModelConfig, PoolConfig, RunConfig, RunResult, UpdateMode,
};

#[derive(Parser)]
#[command(name = "driftpool", version, about = "Online anomaly detection with an adaptive autoencoder pool")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled CSV stream from a scenario file.
    Generate {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Score one stream and write scores.csv and trace.csv.
    Run(RunArgs),
    /// Compare the adaptive pool against the incremental baseline.
    Bench(BenchArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// CSV stream input (header row; features as floats).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Scenario file describing a synthetic stream.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InferenceModeArg {
    ConceptDriven,
    SingleModel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MergeModeArg {
    Similarity,
    Always,
    Never,
}

#[derive(Args)]
struct EngineOpts {
    /// Pool reliability threshold triggering a major update.
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    /// Latent similarity threshold for merging models.
    #[arg(long, default_value_t = 0.8)]
    gamma: f64,
    /// Training epochs for a newly created model.
    #[arg(long, default_value_t = 5)]
    epochs_init: usize,
    /// Training epochs for an incremental update.
    #[arg(long, default_value_t = 1)]
    epochs_update: usize,
    /// Bottleneck width; defaults to max(1, d/8) for input width d.
    #[arg(long)]
    latent_dim: Option<usize>,
    /// Encoder depth (decoder mirrors it).
    #[arg(long, default_value_t = 2)]
    hidden_layers: usize,
    #[arg(long, default_value_t = 1e-3)]
    learning_rate: f64,
    /// Base seed for model initialization.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = InferenceModeArg::ConceptDriven)]
    inference_mode: InferenceModeArg,
    #[arg(long, value_enum, default_value_t = MergeModeArg::Similarity)]
    merge_mode: MergeModeArg,
}

impl EngineOpts {
    fn run_config(&self, input_dim: usize) -> Result<RunConfig> {
        if input_dim < 2 {
            bail!("input dimension must be at least 2, got {input_dim}");
        }
        let latent_dim = self.latent_dim.unwrap_or_else(|| (input_dim / 8).max(1));
        let pool = PoolConfig {
            alpha: self.alpha,
            gamma: self.gamma,
            epochs_init: self.epochs_init,
            epochs_update: self.epochs_update,
            inference_mode: match self.inference_mode {
                InferenceModeArg::ConceptDriven => InferenceMode::ConceptDriven,
                InferenceModeArg::SingleModel => InferenceMode::SingleModel,
            },
            merge_mode: match self.merge_mode {
                MergeModeArg::Similarity => MergeMode::Similarity,
                MergeModeArg::Always => MergeMode::Always,
                MergeModeArg::Never => MergeMode::Never,
            },
            update_mode: UpdateMode::DriftAware,
        };
        let model = ModelConfig {
            latent_dim,
            hidden_layers: self.hidden_layers,
            learning_rate: self.learning_rate,
            minibatch_size: 32,
        };
        Ok(RunConfig::new(pool, model, self.seed))
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Label column name for CSV input; defaults to "label" when present.
    #[arg(long)]
    label_column: Option<String>,
    /// Batch size for CSV input (scenario files carry their own).
    #[arg(long, default_value_t = 512)]
    batch_size: usize,
    #[command(flatten)]
    engine: EngineOpts,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Number of repetitions; repetition s shifts stream and model seeds by s.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    /// Also run the ablation variants (no_merge, always_merge, single_model).
    #[arg(long)]
    ablations: bool,
    #[command(flatten)]
    engine: EngineOpts,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { scenario, out_dir } => generate(&scenario, &out_dir),
        Command::Run(args) => run(args),
        Command::Bench(args) => bench(args),
    }
}

fn generate(scenario_path: &Path, out_dir: &Path) -> Result<()> {
    let scenario = DriftScenario::load(scenario_path)
        .with_context(|| format!("loading scenario {}", scenario_path.display()))?;
    let batches: Vec<Batch> = DriftStream::new(&scenario)?
        .collect::<driftpool_core::Result<_>>()?;
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("stream.csv");
    driftpool_core::stream::write_stream_csv(&path, &batches)?;
    println!(
        "wrote {} batches ({} points, dim {}) to {}",
        batches.len(),
        batches.len() * scenario.batch_size,
        scenario.dim,
        path.display()
    );
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let (result, dim) = match (&args.source.input, &args.source.scenario) {
        (Some(input), None) => run_csv(&args, input)?,
        (None, Some(scenario_path)) => {
            let scenario = DriftScenario::load(scenario_path)
                .with_context(|| format!("loading scenario {}", scenario_path.display()))?;
            let cfg = args.engine.run_config(scenario.dim)?;
            let result = run_prequential(DriftStream::new(&scenario)?, &cfg)?;
            (result, scenario.dim)
        }
        // clap's arg group guarantees exactly one source.
        _ => unreachable!("clap enforces exactly one of --input/--scenario"),
    };

    std::fs::create_dir_all(&args.out_dir)?;
    let scores_path = args.out_dir.join("scores.csv");
    let trace_path = args.out_dir.join("trace.csv");
    write_scores_csv(&scores_path, &result)?;
    write_trace_csv(&trace_path, &result)?;

    let mut summary = format!(
        "scored {} batches (dim {}), pool size {}, {} major updates",
        result.scored_batches(),
        dim,
        result.pool_sizes.last().copied().unwrap_or(1),
        result.major_updates(),
    );
    if result.labels.is_some() {
        summary.push_str(&format!(", stream AUC {:.4}", stream_auc(&result)?));
    }
    println!("{summary}");
    println!("wrote {} and {}", scores_path.display(), trace_path.display());
    Ok(())
}

fn run_csv(args: &RunArgs, input: &Path) -> Result<(RunResult, usize)> {
    // Explicit --label-column must exist; otherwise a column named "label"
    // is used when present.
    let stream = match &args.label_column {
        Some(name) => CsvStream::open(input, args.batch_size, Some(name))?,
        None => match CsvStream::open(input, args.batch_size, Some("label")) {
            Ok(stream) => stream,
            Err(Error::MissingLabelColumn(_)) => CsvStream::open(input, args.batch_size, None)?,
            Err(e) => return Err(e.into()),
        },
    };
    let dim = stream.dim();
    let cfg = args.engine.run_config(dim)?;
    let result = run_prequential(stream, &cfg)
        .with_context(|| format!("running stream {}", input.display()))?;
    Ok((result, dim))
}

fn bench(args: BenchArgs) -> Result<()> {
    let scenario = DriftScenario::load(&args.scenario)
        .with_context(|| format!("loading scenario {}", args.scenario.display()))?;
    let cfg = args.engine.run_config(scenario.dim)?;
    let report = run_benchmark(&scenario, &cfg, args.seeds, args.ablations)?;

    std::fs::create_dir_all(&args.out_dir)?;
    let report_path = args.out_dir.join("report.csv");
    report.write_csv(&report_path)?;
    print!("{report}");
    println!("wrote {}", report_path.display());
    Ok(())
}
