//! `olb`: experiments with outer length billiards from the command line.

mod commands;
mod render;
mod table;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

/// Failure categories, one per exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or unwritable output (exit 1).
    Usage(String),
    /// The table cannot be built (exit 2).
    Table(String),
    /// The experiment itself failed numerically (exit 3).
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Table(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Table(m) => write!(f, "invalid table: {m}"),
            Failure::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "olb", version, about = "Outer length billiards around convex polygons")]
pub struct Cli {
    /// Print the report as JSON instead of `key: value` lines.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads; defaults to OLB_THREADS, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file supplying defaults for any numeric parameter.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Iterate the map and write the orbit as CSV and/or SVG.
    Orbit(OrbitArgs),
    /// Rasterize the singularity set (side extensions and their preimages).
    Singularity(SingularityArgs),
    /// Once-around orbits: annulus bound and steadiness census.
    OnceAround(OnceAroundArgs),
    /// Circle centers of a scaled table against its rotated dual curve.
    Centers(CentersArgs),
    /// Recover a triangle from the sides of its extouch triangle.
    Extouch(ExtouchArgs),
    /// Square pieces, escape constants and residual table.
    Escape(EscapeArgs),
    /// Sample the dual curve 2 / w(θ) of a table.
    DualCurve(DualCurveArgs),
    /// Box-counting dimension of a singularity raster or a point set.
    Dimension(DimensionArgs),
}

#[derive(Args, Debug, Default)]
pub struct TableArg {
    /// square, regular:N, segment, kite:A, random:N:SEED, or a JSON/TOML file with `vertices`.
    #[arg(long)]
    pub table: Option<String>,
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub table: TableArg,
    /// Starting point `x,y`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub seed: Option<Vec<f64>>,
    #[arg(long)]
    pub iters: Option<usize>,
    /// Stop once the orbit leaves this radius.
    #[arg(long)]
    pub stop_radius: Option<f64>,
    /// Output files (.csv, .svg, .json), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub out: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum RayChoice {
    /// The clockwise side extensions, where the map is undefined.
    Map,
    /// Both extensions of every side.
    All,
}

#[derive(Args, Debug)]
pub struct SingularityArgs {
    #[command(flatten)]
    pub table: TableArg,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Cells per side.
    #[arg(long)]
    pub res: Option<usize>,
    /// Window `xmin,ymin,xmax,ymax`; defaults to a square of 8 diameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,
    /// Ray thickening; defaults to half a cell diagonal.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pub rays: Option<RayChoice>,
    /// Output files (.pgm, .ppm, .csv, .json), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub out: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OnceAroundArgs {
    #[command(flatten)]
    pub table: TableArg,
    /// Starting radius; defaults to (4π + 11) d.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Number of equally spaced starting angles.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Cap on squared-map iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub out: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CentersArgs {
    #[command(flatten)]
    pub table: TableArg,
    /// Scales d (table rescaled to diameter d), comma separated.
    #[arg(long = "d-scale", value_delimiter = ',')]
    pub d_scale: Option<Vec<f64>>,
    #[arg(long)]
    pub starts: Option<usize>,
    /// Output files (.svg, .csv, .json), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub out: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExtouchArgs {
    /// Extouch side lengths `a,b,c`.
    #[arg(long, value_delimiter = ',')]
    pub sides: Vec<f64>,
    /// Output files (.svg, .json), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub out: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FrameChoice {
    /// March along +y, the unbounded direction of the piece T_124.
    Strip,
    /// March along +x.
    Standard,
}

#[derive(Args, Debug)]
pub struct EscapeArgs {
    /// Seed search window `amin,bmin,amax,bmax` in frame coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// `n_min,n_max`.
    #[arg(long, value_delimiter = ',')]
    pub n_range: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub frame: Option<FrameChoice>,
    /// Census sample count; 0 skips the census.
    #[arg(long)]
    pub census: Option<usize>,
    /// Output files (.csv residual table, .svg, .json), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub out: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DualCurveArgs {
    #[command(flatten)]
    pub table: TableArg,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub out: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub table: TableArg,
    /// CSV of `x,y` points (header optional) instead of a raster.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub res: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub out: Vec<PathBuf>,
}

/// Defaults read from `--config`; flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub table: Option<String>,
    pub seed: Option<[f64; 2]>,
    pub iters: Option<usize>,
    pub stop_radius: Option<f64>,
    pub depth: Option<usize>,
    pub res: Option<usize>,
    pub window: Option<[f64; 4]>,
    pub epsilon: Option<f64>,
    pub rays: Option<RayChoice>,
    pub radius: Option<f64>,
    pub starts: Option<usize>,
    pub d_scale: Option<Vec<f64>>,
    pub grid_step: Option<f64>,
    pub n_range: Option<[usize; 2]>,
    pub frame: Option<FrameChoice>,
    pub census: Option<usize>,
    pub samples: Option<usize>,
}

impl RunConfig {
    fn load(path: &std::path::Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
    }
}

fn threads(cli: &Cli) -> Result<Option<usize>, Failure> {
    if let Some(n) = cli.threads {
        return Ok(Some(n));
    }
    match std::env::var("OLB_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("OLB_THREADS must be a positive integer, got `{v}`"))),
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = threads(&cli)? {
        if n == 0 {
            return Err(Failure::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let report = commands::dispatch(&cli.command, &cfg)?;
    let text = if cli.json {
        serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
    } else {
        commands::plain(&report)
    };
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}
