use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "meshroof",
    version,
    about = "Runtime and NoC congestion model for 2D-mesh neuromorphic chips"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the time per step of one workload.
    Estimate(EstimateArgs),
    /// Run a built-in suite of workloads and placements.
    Sweep(SweepArgs),
    /// Per-link loads of one workload, as CSV or a router heatmap.
    Traffic(TrafficArgs),
    /// Closed form, formula and routed value of a placement's heaviest leftward load.
    Analytic(AnalyticArgs),
    /// Heaviest-link load and router area of placement patterns by pair count.
    ScalingTable(ScalingArgs),
    /// Fit an effective rate to a measured time-per-step series.
    Calibrate(CalibrateArgs),
    /// Write example input documents.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub workload: PathBuf,
    /// Pair placement applied to the workload's origin and destination cores.
    #[arg(long)]
    pub placement: Option<PathBuf>,
    #[arg(long)]
    pub calib: PathBuf,
    /// Mesh description; the 8x4 Loihi 2 mesh when omitted.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Also run the reference simulator.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Report id of the workload; the file stem by default.
    #[arg(long)]
    pub workload_id: Option<String>,
    /// Report id of the placement; the pattern label by default.
    #[arg(long)]
    pub placement_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// dense-linear, microbench, tiled-identity-placements or qubo.
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub calib: PathBuf,
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Suite parameters as key=value pairs.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub params: Vec<String>,
}

#[derive(Debug, Args)]
pub struct TrafficArgs {
    #[arg(long)]
    pub workload: PathBuf,
    #[arg(long)]
    pub placement: Option<PathBuf>,
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Print a router grid instead of the link CSV.
    #[arg(long)]
    pub heatmap: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternName {
    Rect,
    Square,
    Xshape,
    Identity,
    Permutation,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long, value_enum)]
    pub pattern: PatternName,
    #[arg(long)]
    pub n: usize,
    /// Columns of a rectangle.
    #[arg(long)]
    pub m: Option<usize>,
    /// Line sum of a permutation placement.
    #[arg(long)]
    pub a: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also route every pair and fail on any disagreement.
    #[arg(long)]
    pub compare_bruteforce: bool,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long, value_delimiter = ',', default_values = ["square", "xshape"])]
    pub patterns: Vec<String>,
    #[arg(long = "pairs", value_delimiter = ',', default_values_t = [16u64, 36, 64, 100, 144])]
    pub pairs: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMethod {
    /// Least squares line through every point.
    Fit,
    /// Time at the largest count divided by that count.
    LargestN,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// CSV with header `count,time_s`.
    #[arg(long)]
    pub series: PathBuf,
    /// dendop, synop, synmem or bandwidth.
    #[arg(long)]
    pub quantity: String,
    #[arg(long, value_enum, default_value_t = FitMethod::Fit)]
    pub method: FitMethod,
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// A built-in workload: dense-linear, tiled-identity, qubo-checking, qubo-switching,
    /// barrier, dendop, synop, synmem or link-bandwidth.
    Workload {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// A named placement pattern.
    Placement {
        #[arg(long, value_enum)]
        pattern: PatternName,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The synthetic calibration.
    Calib {
        #[arg(long)]
        toml: bool,
    },
    /// A mesh description.
    Mesh {
        #[arg(long, default_value_t = 8)]
        rows: u32,
        #[arg(long, default_value_t = 4)]
        cols: u32,
    },
}
