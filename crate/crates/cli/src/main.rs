mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "zernlets",
    version,
    about = "Zernike wavelets and multiresolution analysis on the unit disk"
)]
struct Cli {
    /// Caps the number of worker threads.
    #[arg(long, global = true, env = "ZERNLETS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write regular points or wavelet parameter points as CSV.
    Points(PointsArgs),
    /// Least-squares fit of elevation samples onto V_N.
    Fit(FitArgs),
    /// Fit, wavelet analysis and reconstruction over the multiresolution ladder.
    Decompose(DecomposeArgs),
    /// Generate synthetic corneal-like elevation samples.
    Synth(SynthArgs),
    /// Run the invariant suites and emit a JSON report.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Fekete,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Norm {
    L2,
    Rms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Hierarchy {
    Independent,
    Projection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Normal,
    Astigmatism,
    Keratoconus,
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    /// Degree N of the regular point set.
    #[arg(short = 'N', long, default_value_t = 8)]
    pub degree: usize,
    /// Emit wavelet parameter points of `--level` instead.
    #[arg(long)]
    pub wavelet: bool,
    #[arg(long, requires = "wavelet")]
    pub level: Option<usize>,
    #[arg(long, value_enum, default_value_t = Strategy::Fekete)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with header `x,y,z` or `r,theta,z`.
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short = 'N', long, default_value_t = 8)]
    pub degree: usize,
    /// Divide radii by the largest sample radius.
    #[arg(long)]
    pub normalize: bool,
    /// Coefficient CSV `j,n,m,A,B`.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Residual summary JSON; defaults to the output path with a `.json`
    /// extension.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Norm::L2)]
    pub norm: Norm,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Must be a power of two.
    #[arg(short = 'N', long, default_value_t = 8)]
    pub degree: usize,
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_enum, default_value_t = Strategy::Fekete)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Decomposition CSV `level,slot,mu,omega,re,im`.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Reconstruction grid CSV `x,y,value`.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Map of the N fit minus the N/2 fit, as grid CSV.
    #[arg(long)]
    pub difference: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Hierarchy::Independent)]
    pub hierarchy: Hierarchy,
    /// Rings of the plotting grid.
    #[arg(long, default_value_t = 40)]
    pub grid_res: usize,
    /// Number of largest wavelet coefficients to list.
    #[arg(long, default_value_t = 5)]
    pub top: usize,
    #[arg(long, value_enum, default_value_t = Norm::L2)]
    pub norm: Norm,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = Kind::Normal)]
    pub kind: Kind,
    /// Standard deviation of Gaussian noise on z.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Radius of curvature of the spherical cap, in disk units.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Astigmatism axis theta0 in radians.
    #[arg(long)]
    pub axis: Option<f64>,
    #[arg(long)]
    pub bump_height: Option<f64>,
    #[arg(long)]
    pub bump_r: Option<f64>,
    #[arg(long)]
    pub bump_theta: Option<f64>,
    #[arg(long)]
    pub bump_width: Option<f64>,
    #[arg(long)]
    pub rings: Option<usize>,
    #[arg(long)]
    pub meridians: Option<usize>,
    /// Defaults to standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(
        short = 'N',
        long = "degree",
        alias = "max-degree",
        default_value_t = 8
    )]
    pub max_degree: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inject a coefficient corruption; every suite must then fail.
    #[arg(long, hide = true)]
    pub corrupt: bool,
    /// JSON report; defaults to standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Points(args) => commands::points(&args),
        Command::Fit(args) => commands::fit(&args),
        Command::Decompose(args) => commands::decompose(&args),
        Command::Synth(args) => commands::synth(&args),
        Command::Validate(args) => commands::validate(&args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
