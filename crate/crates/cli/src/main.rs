//! `rlsref`: generate or ingest trajectory data, fit predictors, roll them
//! out with or without goal refinement, and score the results.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rls_refine::data::Scenario;
use rls_refine::rollout::BackboneKind;

mod commands;
mod config;
mod files;

use config::{Feedback, List, SolverName, Switch};

#[derive(Debug)]
pub enum CliError {
    /// Filesystem failure; exit code 1.
    Io(String),
    /// Bad flags, config or input content; exit code 2.
    Invalid(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Invalid(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Invalid(m) => f.write_str(m),
        }
    }
}

impl From<rls_refine::Error> for CliError {
    fn from(e: rls_refine::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rlsref", version, about = "Goal-point refinement of rollout trajectory predictors")]
struct Cli {
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic corpus as JSONL.
    GenSynth(GenSynthArgs),
    /// Convert an NGSIM trajectory CSV to JSONL segments.
    IngestNgsim(IngestArgs),
    /// Fit a backbone and a goal model; write a model file.
    Fit(FitArgs),
    /// Roll a fitted model out over a dataset.
    Predict(PredictArgs),
    /// Score a predictions file against ground truth.
    Eval(EvalArgs),
    /// Fit backbones and compare vanilla and refined rollouts.
    Ablate(AblateArgs),
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    /// Sample interval in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// History intervals (histories hold tau + 1 points).
    #[arg(long)]
    tau: Option<usize>,
    /// Predicted future steps.
    #[arg(long)]
    horizon: Option<usize>,
}

#[derive(Debug, Args)]
struct GenSynthArgs {
    /// cv, ca, lane-change or turn.
    #[arg(long)]
    scenario: Option<Scenario>,
    #[arg(long)]
    n: Option<usize>,
    /// Position noise standard deviation, m.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Window advance in downsampled points.
    #[arg(long)]
    stride: Option<usize>,
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Also write train/val/test JSONL files, split by vehicle, to this directory.
    #[arg(long, value_name = "DIR")]
    split_dir: Option<PathBuf>,
    /// Train, validation and test ratios.
    #[arg(long)]
    split: Option<List<f64>>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Autoregressive lag order.
    #[arg(long)]
    lag: Option<usize>,
    /// Ridge penalty for the ar and goal regressions.
    #[arg(long)]
    ridge: Option<f64>,
    /// cv/ca window in points (default: the whole history).
    #[arg(long)]
    window: Option<usize>,
    /// batch or rls.
    #[arg(long)]
    solver: Option<SolverName>,
    /// Forgetting factor for the rls solver.
    #[arg(long)]
    forgetting: Option<f64>,
    /// Goal anchor steps, e.g. 5,10,15,20,25.
    #[arg(long)]
    anchors: Option<List<usize>>,
    /// Rotate goal features into the heading frame (on|off).
    #[arg(long)]
    rotate: Option<Switch>,
}

#[derive(Debug, Args)]
struct RefineArgs {
    /// Variance of the virtual anchor at the last observation, m².
    #[arg(long)]
    eps: Option<f64>,
    /// Variance growth per step past the last anchor, m².
    #[arg(long)]
    beta: Option<f64>,
    /// Multiplies every goal covariance.
    #[arg(long)]
    goal_cov_scale: Option<f64>,
    /// fused or raw.
    #[arg(long)]
    feedback: Option<Feedback>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    val: Option<PathBuf>,
    /// cv, ca or ar.
    #[arg(long)]
    predictor: Option<BackboneKind>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// on or off.
    #[arg(long)]
    refine: Option<Switch>,
    #[command(flatten)]
    refine_cfg: RefineArgs,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    predictions: PathBuf,
    /// Ground-truth JSONL.
    #[arg(long)]
    data: PathBuf,
    /// Metrics CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AblateArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    val: Option<PathBuf>,
    #[arg(long)]
    test: PathBuf,
    /// Backbones to compare, e.g. cv,ca,ar.
    #[arg(long)]
    predictors: Option<List<BackboneKind>>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    refine_cfg: RefineArgs,
    /// Report CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config::FileConfig::load(cli.config.as_deref()).and_then(|cfg| match cli.command {
        Command::GenSynth(a) => commands::gen_synth(&cfg, a),
        Command::IngestNgsim(a) => commands::ingest_ngsim(&cfg, a),
        Command::Fit(a) => commands::fit(&cfg, a),
        Command::Predict(a) => commands::predict(&cfg, a),
        Command::Eval(a) => commands::eval(&cfg, a),
        Command::Ablate(a) => commands::ablate(&cfg, a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rlsref: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
