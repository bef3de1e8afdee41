//! Command-line surface for the curveshape library.
//!
//! Exit codes are scriptable: 0 success, 2 usage, 3 I/O or malformed
//! file, 4 degenerate input geometry, 5 non-Frenet curve, 6 vanishing
//! curvature, 7 estimation failure, 8 numeric breakdown, 9 partial
//! failure (some matrix cells invalid).

mod commands;
mod envelope;
mod io;
mod svg;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Core(curveshape::Error),
    /// Outputs were written, but some entries are invalid.
    Partial(String),
}

impl CliError {
    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }

    pub fn partial(msg: impl Into<String>) -> Self {
        CliError::Partial(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        use curveshape::Error::*;
        match self {
            CliError::Io(_) => 3,
            CliError::Partial(_) => 9,
            CliError::Core(e) => match e {
                DegenerateCurve { .. }
                | ZeroSpeed { .. }
                | NonMonotoneWarp
                | GridTooCoarse { .. }
                | InvalidInput(_) => 4,
                NotFrenetCurve { .. } | PositivityViolated { .. } => 5,
                VanishingCurvature => 6,
                WindowTooSmall { .. } | SingularFit { .. } | RankDeficient => 7,
                LogBranch | AntipodalPoints => 8,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Partial(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<curveshape::Error> for CliError {
    fn from(e: curveshape::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Srvf,
    Theta,
    Src,
}

impl Method {
    pub fn to_core(self) -> curveshape::DistanceMethod {
        match self {
            Method::Srvf => curveshape::DistanceMethod::Srvf,
            Method::Theta => curveshape::DistanceMethod::Theta,
            Method::Src => curveshape::DistanceMethod::Src,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Srvf => "srvf",
            Method::Theta => "theta",
            Method::Src => "src",
        }
    }
}

/// Curvature-estimation knobs shared by several commands.
#[derive(Debug, Args)]
pub struct EstimationFlags {
    /// Local polynomial bandwidth (fraction of the parameter range)
    #[arg(long, default_value_t = 0.1)]
    pub bandwidth: f64,
    /// Local polynomial degree (default: ambient dimension + 1)
    #[arg(long)]
    pub degree: Option<usize>,
    /// Number of B-spline breakpoints for curvature smoothing
    #[arg(long, default_value_t = 20)]
    pub n_breaks: usize,
    /// B-spline order (degree + 1)
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Roughness penalty; omitted selects it by cross-validation
    #[arg(long)]
    pub lambda: Option<f64>,
}

impl EstimationFlags {
    pub fn to_config(&self) -> curveshape::EstimateConfig {
        curveshape::EstimateConfig {
            bandwidth: self.bandwidth,
            degree: self.degree,
            n_breaks: self.n_breaks,
            order: self.order,
            lambda: self.lambda,
        }
    }
}

/// Registration knobs shared by the distance-bearing commands.
#[derive(Debug, Args)]
pub struct RegistrationFlags {
    /// Uniform grid size for the dynamic-programming lattice
    #[arg(long, default_value_t = 256)]
    pub dp_grid: usize,
    /// Iteration cap for the alternating SRVF solver
    #[arg(long, default_value_t = 20)]
    pub max_iter: usize,
    /// Convergence tolerance on the registration cost
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

impl RegistrationFlags {
    pub fn to_config(&self) -> curveshape::RegistrationConfig {
        curveshape::RegistrationConfig {
            dp_grid: self.dp_grid,
            max_iter: self.max_iter,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthCommon {
    /// Number of samples
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    /// Standard deviation of Gaussian point noise
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    /// RNG seed for the noise
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output curve file
    #[arg(long)]
    pub output: PathBuf,
    /// Manifest path (default: output with .json extension)
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SynthFamily {
    /// Planar loop whose curvature is a single compact bump
    PeakLoop {
        /// Peak location in (0, 1)
        #[arg(long)]
        location: f64,
        /// Peak curvature value
        #[arg(long, default_value_t = 60.5)]
        amplitude: f64,
        /// Support width of the bump
        #[arg(long, default_value_t = 0.15)]
        width: f64,
        #[command(flatten)]
        common: SynthCommon,
    },
    /// Planar Archimedean-type spiral
    Spiral2d {
        /// Number of full turns
        #[arg(long)]
        spins: f64,
        /// Radial growth per unit angle
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[command(flatten)]
        common: SynthCommon,
    },
    /// Circular helix in 3D
    Helix3d {
        /// Helix radius
        #[arg(long)]
        radius: f64,
        /// Vertical advance per unit angle
        #[arg(long)]
        pitch: f64,
        /// Number of full turns
        #[arg(long)]
        spins: f64,
        #[command(flatten)]
        common: SynthCommon,
    },
    /// A family of peak loops with random peak locations, sorted by
    /// location, one file per curve
    PeakFamily {
        /// Number of curves
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 60.5)]
        amplitude: f64,
        #[arg(long, default_value_t = 0.15)]
        width: f64,
        #[arg(long, default_value_t = 512)]
        n: usize,
        /// RNG seed for the peak locations
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory receiving the curve files and manifest
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Input curve file
    pub input: PathBuf,
    #[command(flatten)]
    pub estimation: EstimationFlags,
    /// Number of output samples of the smoothed curvature profile
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Smoothed curvature CSV
    #[arg(long)]
    pub output: PathBuf,
    /// Raw midpoint-sample CSV (default: output with .raw.csv suffix)
    #[arg(long)]
    pub raw_output: Option<PathBuf>,
    /// Result envelope path (default: stdout)
    #[arg(long)]
    pub envelope: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    pub file0: PathBuf,
    pub file1: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    #[command(flatten)]
    pub registration: RegistrationFlags,
    #[command(flatten)]
    pub estimation: EstimationFlags,
    /// Result envelope path (default: stdout)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    pub file0: PathBuf,
    pub file1: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Number of snapshots including both endpoints (minimum 2)
    #[arg(long, default_value_t = 7)]
    pub taus: usize,
    /// Directory receiving snapshot and curvature files
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Optional SVG strip of the projected snapshots
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub registration: RegistrationFlags,
    #[command(flatten)]
    pub estimation: EstimationFlags,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Curve files; row order follows the argument order
    #[arg(required = true, num_args = 2..)]
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Parallel job count (default: CURVESHAPE_JOBS, then all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Distance matrix CSV
    #[arg(long)]
    pub output: PathBuf,
    /// Optional heatmap SVG
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub registration: RegistrationFlags,
    #[command(flatten)]
    pub estimation: EstimationFlags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic experiment curves
    Synth {
        #[command(subcommand)]
        family: SynthFamily,
    },
    /// Estimate Frenet curvatures from a sampled curve
    Estimate(EstimateArgs),
    /// Shape distance between two curves
    Distance(DistanceArgs),
    /// Geodesic snapshots between two curves
    Geodesic(GeodesicArgs),
    /// Pairwise distance matrix over a set of curves
    Matrix(MatrixArgs),
}

#[derive(Debug, Parser)]
#[command(
    name = "curveshape",
    version,
    about = "Elastic shape analysis of open curves in R^d"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth { family } => commands::synth(family),
        Command::Estimate(args) => commands::estimate(args),
        Command::Distance(args) => commands::distance(args),
        Command::Geodesic(args) => commands::geodesic(args),
        Command::Matrix(args) => commands::matrix(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
