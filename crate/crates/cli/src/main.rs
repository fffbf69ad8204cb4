mod bench;
mod failure;
mod tools;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clickbench::harness::RunStrategy;
use clickbench_collect::DisplayMode;

use crate::failure::Failure;

#[derive(Parser)]
#[command(
    name = "clickbench",
    version,
    about = "Click simulation and robustness benchmarking for interactive segmentation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a segmenter over a dataset.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Build clickability maps from recorded clicks.
    #[command(subcommand)]
    Maps(MapsCommand),
    /// Compare click tables.
    #[command(subcommand)]
    Metrics(MetricsCommand),
    /// Turn benchmark results into plots.
    #[command(subcommand)]
    Report(ReportCommand),
    /// Run the click-collection service.
    #[command(subcommand)]
    Collect(CollectCommand),
    /// Check click tables and manifests.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Reference segmenters speaking the adapter protocol on stdin/stdout.
    #[command(subcommand, hide = true)]
    Adapter(AdapterCommand),
}

#[derive(Subcommand)]
enum BenchCommand {
    Run(BenchRunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct BenchRunArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// JSON file with EvalConfig keys plus `workers`, `adapter`, `segmenter`, `model`; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Shell command that starts an adapter process.
    #[arg(long, conflicts_with = "segmenter")]
    pub adapter: Option<String>,
    /// Built-in segmenter: oracle, empty or disk:<radius>.
    #[arg(long)]
    pub segmenter: Option<String>,
    #[arg(long)]
    pub strategy: Option<RunStrategy>,
    /// Number of clicking groups.
    #[arg(long)]
    pub groups: Option<usize>,
    /// Gaussian sigma of ground-truth clickability maps.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Click model for sampled clicks: prior, dt or uniform.
    #[arg(long)]
    pub model: Option<String>,
    /// Click CSV with first-round clicks, required by the real strategy.
    #[arg(long)]
    pub clicks: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Subcommand)]
enum MapsCommand {
    Build(MapsBuildArgs),
}

#[derive(Args, Debug)]
pub struct MapsBuildArgs {
    #[arg(long)]
    pub clicks: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = clickbench::clicks::DEFAULT_CM_SIGMA)]
    pub sigma: f64,
    #[arg(long, default_value_t = clickbench::clicks::DEFAULT_DIAG_FRACTION)]
    pub diag_fraction: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Subcommand)]
enum MetricsCommand {
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Normalize by object bounding boxes from this manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ReportCommand {
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// Output directory of `bench run`.
    pub report: PathBuf,
    /// Defaults to the report directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CollectCommand {
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Append-only click journal; replayed on start.
    #[arg(long)]
    journal: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    #[arg(long, default_value = "cutout")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum DatasetCommand {
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub clicks: PathBuf,
    /// Check first-round clicks against the masks of this manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AdapterCommand {
    /// Disks around positive clicks minus disks around negative ones.
    Disk {
        #[arg(long)]
        radius: f64,
    },
}

fn serve(args: ServeArgs) -> Result<(), Failure> {
    use std::sync::Arc;

    use clickbench::dataset::DatasetManifest;
    use clickbench_collect::{Store, StoreConfig, SystemClock};

    let manifest = DatasetManifest::load(&args.manifest)?;
    let mode: DisplayMode = args
        .mode
        .parse()
        .map_err(|e: clickbench_collect::CollectError| Failure::Usage(e.to_string()))?;
    let config = StoreConfig {
        default_mode: mode,
        seed: args.seed,
        ..StoreConfig::new(&args.journal)
    };
    let store = Store::open(&manifest, config, Arc::new(SystemClock))
        .map_err(|e| Failure::Format(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Other(e.to_string()))?;
    runtime
        .block_on(clickbench_collect::serve(Arc::new(store), args.addr))
        .map_err(|e| Failure::Other(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Bench(BenchCommand::Run(args)) => bench::run(args),
        Command::Maps(MapsCommand::Build(args)) => tools::maps_build(args),
        Command::Metrics(MetricsCommand::Compare(args)) => tools::compare(args),
        Command::Report(ReportCommand::Plot(args)) => tools::plot(args),
        Command::Collect(CollectCommand::Serve(args)) => serve(args),
        Command::Dataset(DatasetCommand::Validate(args)) => tools::validate(args),
        Command::Adapter(AdapterCommand::Disk { radius }) => tools::disk_adapter(radius),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("clickbench: {f}");
            ExitCode::from(f.code())
        }
    }
}
