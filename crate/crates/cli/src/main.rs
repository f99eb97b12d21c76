//! `whlattice`: cardinal and semi-cardinal interpolation from the command line.

mod cache;
mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::UsageError;

#[derive(Debug, Parser)]
#[command(name = "whlattice", version, about = "Cardinal and semi-cardinal interpolation on lattices")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; flags below override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Kernel descriptor, e.g. `gaussian:c=1,dim=1`, `bspline:n=4`, `box222`.
    #[arg(long, global = true)]
    pub kernel: Option<String>,
    /// Half-space: `coordinate:<axis>`, `lex` or `graded_lex`.
    #[arg(long, global = true)]
    pub halfspace: Option<String>,
    /// Symbol radius N.
    #[arg(short = 'N', long, global = true)]
    pub symbol_radius: Option<usize>,
    /// Torus grid size M.
    #[arg(short = 'M', long, global = true)]
    pub grid_size: Option<usize>,
    /// Relative tail mass dropped when truncating expansions for evaluation.
    #[arg(long, global = true)]
    pub eval_tail: Option<f64>,
    /// Output directory; without it the main artifact goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Factor cache directory (default: `$WHLATTICE_CACHE`, the config file, `~/.cache/whlattice`).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Recompute the factorization even if a cached one exists.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Include wall-clock timings in reports (makes them non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
    /// Also write coefficient profiles shaped for external plotting.
    #[arg(long, global = true)]
    pub emit_plot_data: bool,
    /// More logging on stderr; repeat for debug output.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtensionArg {
    Zero,
    Periodic,
}

#[derive(Debug, Args, Clone)]
pub struct SampleArgs {
    /// Lower end of the sample grid (per axis).
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    /// Grid step; defaults to 1/4, or 1 for kernels defined on the lattice only.
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symbol coefficients σ_k = φ(k) and the symbol minimum on the grid.
    Symbol,
    /// Wiener-Hopf factor γ on the half-space, with residual metadata.
    Factorize,
    /// Samples of the cardinal (default) or semi-cardinal Lagrange function.
    Lagrange {
        #[arg(long, conflicts_with = "semi")]
        cardinal: bool,
        #[arg(long)]
        semi: bool,
        /// Center j ∈ H, comma separated; required with --semi.
        #[arg(long, allow_hyphen_values = true)]
        j: Option<String>,
        #[command(flatten)]
        grid: SampleArgs,
    },
    /// Interpolant of lattice data (CSV `k_1,…,k_d,y`) sampled on a grid.
    Interpolate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        semi: bool,
        /// How cardinal data outside the given window is filled.
        #[arg(long, value_enum, default_value = "zero")]
        extension: ExtensionArg,
        #[command(flatten)]
        grid: SampleArgs,
    },
    /// Semi-cardinal to cardinal gap along an exhausting sequence.
    Converge {
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,5,10,20")]
        ns: Vec<usize>,
        #[command(flatten)]
        grid: SampleArgs,
    },
    /// Shell profiles of |a_k| and |γ_k| with decay fits.
    Decay,
    /// Residuals, delta conditions, oracle comparison and Lebesgue bound.
    Verify {
        /// Finite-section window radius (default 60 in 1D, 6 in 2D, 3 beyond).
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        buffer: Option<usize>,
    },
    /// Inspect or clear the factor cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CacheAction {
    List,
    Clear,
    Path,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use whlattice::Error as E;
    if e.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<E>() {
        Some(
            E::InvalidParameter(_)
            | E::DimensionMismatch { .. }
            | E::NotInHalfSpace(_)
            | E::Capability(_)
            | E::Parse(_)
            | E::WindowTooLarge { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
