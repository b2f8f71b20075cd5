//! `jigi` command-line front end.

mod commands;
mod plot;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "jigi",
    version,
    about = "Computational ghost imaging with joint image and edge recovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random binary speckle patterns (GIPT file).
    GenPatterns(GenPatternsArgs),
    /// Simulate bucket measurements of a PGM object (GIMS file).
    Measure(MeasureArgs),
    /// Reconstruct an image (and edge map) from patterns and measurements.
    Reconstruct(ReconstructArgs),
    /// Compare a candidate image against a reference.
    Metrics(MetricsArgs),
    /// Run reconstruct + metrics over a list of pattern counts.
    Sweep(SweepArgs),
    /// Write a synthetic test object.
    Phantom(PhantomArgs),
}

#[derive(Args)]
pub struct GenPatternsArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    /// Number of patterns.
    #[arg(long = "M", visible_alias = "count")]
    pub m: usize,
    #[arg(long, default_value_t = jigi::sensing::DEFAULT_DENSITY)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub patterns: PathBuf,
    /// Object as a binary PGM.
    #[arg(long)]
    pub object: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Cgi,
    Plir,
    Jigi,
}

#[derive(Args)]
pub struct ReconstructArgs {
    #[arg(long, value_enum, default_value_t = Method::Jigi)]
    pub method: Method,
    #[arg(long)]
    pub patterns: PathBuf,
    #[arg(long)]
    pub measurements: PathBuf,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub clamp: Option<bool>,
    #[arg(long)]
    pub rank_cutoff: Option<f64>,
    /// 16-bit PGM of the reconstruction, clipped to [0, 1].
    #[arg(long)]
    pub out_image: PathBuf,
    /// 16-bit PGM of the min-max normalized edge map.
    #[arg(long)]
    pub out_edge: Option<PathBuf>,
    /// Key/value run log.
    #[arg(long)]
    pub out_log: Option<PathBuf>,
    /// Record wall-clock time in the log (makes it run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Image,
    Edge,
}

#[derive(Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub candidate: PathBuf,
    /// `sobel` or a PGM whose nonzero pixels mark the edge region.
    #[arg(long, default_value = "sobel")]
    pub mask_source: String,
    #[arg(long, default_value_t = jigi::metrics::DEFAULT_EDGE_THRESHOLD)]
    pub threshold: f64,
    /// Compare the candidate with the reference image or with its edge map.
    #[arg(long, value_enum, default_value_t = Target::Image)]
    pub target: Target,
    #[arg(long, default_value_t = jigi::metrics::DEFAULT_MAX_VAL)]
    pub max_val: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// `aircraft`, `grayscale` or a PGM path; overrides the config.
    #[arg(long)]
    pub phantom: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhantomKind {
    Aircraft,
    Grayscale,
}

#[derive(Args)]
pub struct PhantomArgs {
    #[arg(long, value_enum, default_value_t = PhantomKind::Aircraft)]
    pub kind: PhantomKind,
    #[arg(long, default_value_t = 64)]
    pub size: usize,
    #[arg(long)]
    pub out: PathBuf,
}

fn exit_code(err: &jigi::Error) -> u8 {
    use jigi::Error::*;
    match err {
        Shape { .. } | Parameter(_) | Mask(_) | Config(_) => 2,
        Io(_) | Format { .. } => 3,
        DegenerateMatrix(_) | UndefinedSnr(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::GenPatterns(a) => commands::gen_patterns(&a),
        Command::Measure(a) => commands::measure(&a),
        Command::Reconstruct(a) => commands::reconstruct(&a),
        Command::Metrics(a) => commands::metrics(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Phantom(a) => commands::phantom(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
