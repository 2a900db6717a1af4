//! `ising`: build, diagonalize, predict and compare from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ising_core::Error;

use config::{Corrections, Format, RunConfig};

/// Names the cache directory when neither a flag nor a config file does.
const CACHE_ENV: &str = "ISING_CACHE_DIR";
const DEFAULT_CACHE: &str = ".ising-cache";

#[derive(Parser, Debug)]
#[command(
    name = "ising",
    version,
    about = "Exact diagonalization and eigenfunction statistics of the Ising chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sector dimensions and invariant-state counts.
    BasisInfo(RunArgs),
    /// Diagonalize sectors into the cache.
    Diag(RunArgs),
    /// Model spectral density, moments and participation ratio on an energy grid.
    Predict(RunArgs),
    /// Compare predictions with measured moments and participation ratios.
    Compare(RunArgs),
    /// Windowed coefficient histograms of one basis state.
    CoeffHist(RunArgs),
    /// Mean spacing ratios, parity resolved where the sector allows.
    Spacing(RunArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct RunArgs {
    /// Run configuration (or a provenance file) to start from; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    spins: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Momentum sector, repeatable, or "all".
    #[arg(long, value_name = "K|all")]
    momentum: Vec<String>,
    /// Repeatable.
    #[arg(long, value_enum)]
    corrections: Vec<Corrections>,
    #[arg(long, conflicts_with = "window_width")]
    window_levels: Option<usize>,
    #[arg(long)]
    window_width: Option<f64>,
    #[arg(long)]
    bulk_fraction: Option<f64>,
    /// Energy grid points of predictions.
    #[arg(long)]
    grid: Option<usize>,
    /// Moment orders q, comma separated.
    #[arg(long, value_delimiter = ',')]
    orders: Vec<f64>,
    /// Basis index or spin string for coeff-hist.
    #[arg(long)]
    symbol: Option<String>,
    /// Seed of the surrogate ensembles.
    #[arg(long)]
    seed: Option<u64>,
    /// Defaults to $ISING_CACHE_DIR, then .ising-cache.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Output directory; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Sectors processed concurrently.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Size { .. }
                | Error::InvalidParameter(_)
                | Error::Momentum { .. }
                | Error::SiteMismatch { .. }
                | Error::ValidityRange { .. } => 2,
                Error::NotHermitian { .. }
                | Error::Convergence { .. }
                | Error::Infeasible(_)
                | Error::NotConverged { .. }
                | Error::EmptyOverlap => 3,
                _ => 1,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

fn parse_momenta(values: &[String], sites: usize) -> Result<Vec<usize>, CliError> {
    let mut momenta = Vec::new();
    for v in values {
        if v == "all" {
            momenta.extend(0..sites);
        } else {
            momenta.push(
                v.parse()
                    .map_err(|_| CliError::usage(format!("momentum {v:?} is not an integer or \"all\"")))?,
            );
        }
    }
    momenta.sort_unstable();
    momenta.dedup();
    Ok(momenta)
}

/// Defaults, then the config file, then flags.
fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => {
            let sites = args
                .spins
                .ok_or_else(|| CliError::usage("--spins is required without --config"))?;
            RunConfig {
                sites,
                lambda: 1.0,
                alpha: 1.0,
                momenta: (0..sites).collect(),
                corrections: vec![Corrections::GramCharlier],
                windowing: None,
                bulk_fraction: 0.6,
                grid: 201,
                orders: vec![1.5, 2.0, 3.0],
                symbol: None,
                seed: 0,
                cache_dir: std::env::var_os(CACHE_ENV).map_or_else(|| PathBuf::from(DEFAULT_CACHE), PathBuf::from),
                out: None,
                format: Format::Csv,
            }
        }
    };
    if let Some(sites) = args.spins {
        if sites != config.sites && args.momentum.is_empty() {
            config.momenta = (0..sites).collect();
        }
        config.sites = sites;
    }
    if let Some(v) = args.lambda {
        config.lambda = v;
    }
    if let Some(v) = args.alpha {
        config.alpha = v;
    }
    if !args.momentum.is_empty() {
        config.momenta = parse_momenta(&args.momentum, config.sites)?;
    }
    if !args.corrections.is_empty() {
        config.corrections = args.corrections.clone();
    }
    if let Some(m) = args.window_levels {
        config.windowing = Some(ising_core::empirics::WindowPolicy::FixedLevelCount(m));
    }
    if let Some(w) = args.window_width {
        config.windowing = Some(ising_core::empirics::WindowPolicy::FixedWidth(w));
    }
    if let Some(v) = args.bulk_fraction {
        config.bulk_fraction = v;
    }
    if let Some(v) = args.grid {
        config.grid = v;
    }
    if !args.orders.is_empty() {
        config.orders = args.orders.clone();
    }
    if args.symbol.is_some() {
        config.symbol = args.symbol.clone();
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = &args.cache_dir {
        config.cache_dir = v.clone();
    }
    if args.out.is_some() {
        config.out = args.out.clone();
    }
    if let Some(v) = args.format {
        config.format = v;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, args) = match &cli.command {
        Command::BasisInfo(a) => ("basis-info", a),
        Command::Diag(a) => ("diag", a),
        Command::Predict(a) => ("predict", a),
        Command::Compare(a) => ("compare", a),
        Command::CoeffHist(a) => ("coeff-hist", a),
        Command::Spacing(a) => ("spacing", a),
    };
    let config = resolve(args)?;
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::usage(format!("worker pool: {e}")))?;
    }
    match cli.command {
        Command::BasisInfo(_) => commands::basis_info(name, &config),
        Command::Diag(_) => commands::diag(name, &config),
        Command::Predict(_) => commands::predict(name, &config),
        Command::Compare(_) => commands::compare(name, &config),
        Command::CoeffHist(_) => commands::coeff_hist(name, &config),
        Command::Spacing(_) => commands::spacing(name, &config),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Core(Error::Io(e))) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
