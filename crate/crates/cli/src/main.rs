mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "lanecode", version, about = "Differential delay and buffer analysis for RLNC multilane transmission")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the loop-free paths between two nodes.
    Paths(PathsArgs),
    /// Evaluate the closed-form model over a sweep.
    Analyze(AnalyzeArgs),
    /// Run Monte-Carlo replications and compare them with the model.
    Simulate(SimulateArgs),
    /// Check every closed form against brute-force enumeration.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct NetworkArgs {
    /// Topology file, or `nsfnet`.
    #[arg(long, conflicts_with_all = ["abstract_paths", "delays"])]
    pub topology: Option<String>,
    /// Abstract network with delays 1..=F'.
    #[arg(long = "abstract", value_name = "F'", conflicts_with = "delays")]
    pub abstract_paths: Option<usize>,
    /// Explicit delay vector, e.g. `2,3,4,4`.
    #[arg(long)]
    pub delays: Option<String>,
    #[arg(long)]
    pub src: Option<usize>,
    #[arg(long)]
    pub dst: Option<usize>,
    #[arg(long, default_value_t = lanecode::paths::DEFAULT_MAX_HOPS)]
    pub max_hops: usize,
    /// Use one entry per wavelength instead of one per fiber route.
    #[arg(long)]
    pub wavelengths: bool,
}

#[derive(Args, Debug)]
struct PathsArgs {
    /// Topology given positionally: `paths nsfnet 0 5`.
    #[arg(value_name = "TOPOLOGY")]
    topology_pos: Option<String>,
    #[arg(value_name = "SRC")]
    src_pos: Option<usize>,
    #[arg(value_name = "DST")]
    dst_pos: Option<usize>,
    #[arg(long)]
    topology: Option<String>,
    #[arg(long)]
    src: Option<usize>,
    #[arg(long)]
    dst: Option<usize>,
    #[arg(long, default_value_t = lanecode::paths::DEFAULT_MAX_HOPS)]
    max_hops: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub r: usize,
    /// Per-path blocking probability.
    #[arg(long, default_value_t = 0.0)]
    pub pb: f64,
    /// `param:lo:hi:step` with param one of N, k, r, pb. Repeat for a grid.
    #[arg(long)]
    pub sweep: Vec<String>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub point: PointArgs,
    /// Available paths; defaults to all existing paths.
    #[arg(long = "available", visible_alias = "n-avail", value_name = "N")]
    pub available: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value = "lnc-rnd")]
    pub method: String,
    /// Exactly N uniformly chosen paths available, instead of blocking.
    #[arg(long = "available", visible_alias = "n-avail", value_name = "N")]
    pub available: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = lanecode::sim::DEFAULT_FRAMES)]
    pub frames: usize,
    #[arg(long, default_value_t = lanecode::sim::DEFAULT_FRAME_BYTES)]
    pub frame_bytes: usize,
    /// Available paths that fail before selection.
    #[arg(long, default_value_t = 0)]
    pub f_path: usize,
    /// Coded blocks lost per generation.
    #[arg(long, default_value_t = 0)]
    pub f_pack: usize,
    /// Accept more failures than the redundancy covers.
    #[arg(long)]
    pub allow_excess_loss: bool,
    #[arg(long)]
    pub voq_limit: Option<usize>,
    /// Redraw path availability for every frame.
    #[arg(long)]
    pub redraw_per_frame: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Random delay vectors per vector length.
    #[arg(long, default_value_t = 3)]
    vectors: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Paths(a) => {
            let topology = a.topology.or(a.topology_pos).unwrap_or_else(|| "nsfnet".into());
            let src = a.src.or(a.src_pos);
            let dst = a.dst.or(a.dst_pos);
            run::paths(&topology, src, dst, a.max_hops, &a.output)
        }
        Command::Analyze(a) => run::analyze(&a),
        Command::Simulate(a) => run::simulate(&a),
        Command::Validate(a) => run::validate(a.vectors, a.seed),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            run::exit_code_for(&e)
        }
    }
}
