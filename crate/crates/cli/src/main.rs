mod commands;
mod output;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use incomesim_core::metrics::Convention;

#[derive(Parser, Debug)]
#[command(
    name = "incomesim",
    version,
    about = "Cohort income model and Gini estimation"
)]
struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Predicted Gini series and model distributions.
    Simulate(SimulateArgs),
    /// Gini coefficients of binned income tables.
    Gini(GiniArgs),
    /// Pareto index from open-end means and log-log regression.
    FitPareto(FitArgs),
    /// Distances between income densities after GPI rescaling.
    Collapse(CollapseArgs),
    /// Year-by-year differences between two Gini series.
    Compare(CompareArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Directory holding economy.csv, ages.csv and pid_*.csv.
    #[arg(long, env = "INCOMESIM_DATA", default_value = "data")]
    data: PathBuf,
    #[arg(long)]
    economy: Option<PathBuf>,
    /// First year to process.
    #[arg(long)]
    from: Option<i32>,
    /// Last year to process.
    #[arg(long)]
    to: Option<i32>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl Common {
    fn economy_path(&self) -> PathBuf {
        self.economy
            .clone()
            .unwrap_or_else(|| self.data.join("economy.csv"))
    }

    fn in_range(&self, year: i32) -> bool {
        self.from.is_none_or(|f| year >= f) && self.to.is_none_or(|t| year <= t)
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    ages: Option<PathBuf>,
    /// Pareto index of the tail.
    #[arg(long, default_value_t = 1.35)]
    k: f64,
    /// Dissipation factor at 1960.
    #[arg(long)]
    alpha: Option<f64>,
    /// Extra-income factor of the Pareto zone.
    #[arg(long)]
    boost: Option<f64>,
    /// Also write fig17.svg; overlays empirical Gini from --pid when given.
    #[arg(long)]
    svg: bool,
    /// Income table for the empirical overlay.
    #[arg(long)]
    pid: Option<PathBuf>,
    /// Bin-mean correction for the empirical overlay.
    #[arg(long, default_value_t = incomesim_core::metrics::DEFAULT_CORRECTION, allow_hyphen_values = true)]
    correction: f64,
}

#[derive(Args, Debug)]
struct GiniArgs {
    #[command(flatten)]
    common: Common,
    /// Income table file (defaults to pid_fine.csv in the data directory).
    #[arg(long)]
    pid: Option<PathBuf>,
    /// Offset of the bin mean from the bin center, in bin widths.
    #[arg(long, default_value_t = incomesim_core::metrics::DEFAULT_CORRECTION, allow_hyphen_values = true)]
    correction: f64,
    /// Also report the base including people without income.
    #[arg(long)]
    all_population: bool,
    /// Pareto index for open-ended bins without a reported mean.
    #[arg(long)]
    tail_k: Option<f64>,
    /// Mean formula for the open-bin tail [default: consistent].
    #[arg(long)]
    convention: Option<Convention>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    pid: Option<PathBuf>,
    /// Lower income bound of the tail; defaults to 0.9 x GPI per person with income.
    #[arg(long)]
    min: Option<f64>,
    /// Estimator algebra [default: paper].
    #[arg(long)]
    convention: Option<Convention>,
    #[arg(long, default_value_t = incomesim_core::metrics::DEFAULT_CORRECTION, allow_hyphen_values = true)]
    correction: f64,
}

#[derive(Args, Debug)]
struct CollapseArgs {
    #[command(flatten)]
    common: Common,
    /// Tables to compare pairwise across years (defaults to pid_crude.csv).
    #[arg(long)]
    pid: Option<PathBuf>,
    /// Compare each year of --pid with the same year of this file instead.
    #[arg(long)]
    against: Option<PathBuf>,
    /// Skip the GPI rescaling of the income axis.
    #[arg(long)]
    raw: bool,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// CSV with `year` and `gini` columns.
    #[arg(long)]
    ours: PathBuf,
    /// CSV with `year` and `gini` columns.
    #[arg(long)]
    reference: PathBuf,
    /// Keep only rows with this population_base, when the column exists.
    #[arg(long)]
    base: Option<String>,
    /// Keep only rows with this method, when the column exists.
    #[arg(long)]
    method: Option<String>,
}

fn data_file(explicit: &Option<PathBuf>, common: &Common, name: &str) -> PathBuf {
    explicit
        .clone()
        .unwrap_or_else(|| Path::new(&common.data).join(name))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        anyhow::ensure!(jobs > 0, "--jobs must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Gini(a) => commands::gini(&a),
        Command::FitPareto(a) => commands::fit_pareto(&a),
        Command::Collapse(a) => commands::collapse(&a),
        Command::Compare(a) => commands::compare(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.to_string();
            eprintln!(
                "incomesim: {}",
                text.lines().next().unwrap_or("invalid arguments")
            );
            return ExitCode::FAILURE;
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("incomesim: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
