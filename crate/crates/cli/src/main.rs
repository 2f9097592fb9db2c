//! `phaseforest`: generate instances, bound and solve them, unwrap phase images.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | every requested output was written |
//! | 1 | internal solver failure |
//! | 2 | usage error (bad flag, value or combination) |
//! | 3 | malformed input data |
//! | 4 | file system error |
//! | 5 | time limit reached before any solution was found |

/// `println!` that ignores a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

mod bench;
mod commands;
mod failure;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use failure::Failure;

#[derive(Parser)]
#[command(name = "phaseforest", version, about = "Balanced spanning forests for L0 phase unwrapping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random PUC instance or a synthetic wrapped image.
    Generate(GenerateArgs),
    /// Dual-ascent lower bound of an instance.
    Bound(BoundArgs),
    /// Solve an instance, or the residues of an image.
    Solve(SolveArgs),
    /// Full pipeline: residues, forest, branch cuts, integration, metrics.
    Unwrap(UnwrapArgs),
    /// N, L, T, I of a saved solution for an image.
    Metrics(MetricsArgs),
    /// PPM overlay of residues and (optionally) branch cuts.
    Render(RenderArgs),
    /// Compare methods over seeded PUC groups and emit a CSV table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Hils,
    Bc,
    Mcm,
    Goldstein,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Hils => "hils",
            Method::Bc => "bc",
            Method::Mcm => "mcm",
            Method::Goldstein => "goldstein",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Puc,
    Vortex,
    Ramp,
    Noisy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Random,
    MinRc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Incumbent {
    Hils,
    None,
}

#[derive(Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "hils")]
    pub method: Method,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent HILS runs; the best is kept.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Wall-clock limit in seconds per solver call.
    #[arg(long = "time-limit", default_value_t = 3600.0)]
    pub time_limit: f64,
    /// Upper bound source for branch-and-cut arc fixing.
    #[arg(long, visible_alias = "warm", value_enum, default_value = "hils")]
    pub incumbent: Incumbent,
}

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "puc")]
    pub kind: Kind,
    /// Residue count for PUC instances.
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub rows: usize,
    #[arg(long, default_value_t = 64)]
    pub cols: usize,
    /// Noise amplitude for `noisy` images, radians.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    /// Output file; defaults to a generated name inside `--out-dir`.
    #[arg(long, short, visible_alias = "out")]
    pub output: Option<PathBuf>,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
    /// Print the JSON report, or write it to FILE.
    #[arg(long, value_name = "FILE", num_args = 0..=1)]
    pub json: Option<Option<PathBuf>>,
}

#[derive(Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "random")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Follow the ascent with dual scaling (alpha 0.9, 10 trials unless overridden).
    #[arg(long)]
    pub scaling: bool,
    /// Dual scaling factor; implies `--scaling`.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dual scaling trials; implies `--scaling`.
    #[arg(long)]
    pub itds: Option<usize>,
    /// Report reduced-cost fixing against this upper bound.
    #[arg(long = "upper-bound")]
    pub upper_bound: Option<f64>,
    /// Print the JSON report, or write it to FILE.
    #[arg(long, value_name = "FILE", num_args = 0..=1)]
    pub json: Option<Option<PathBuf>>,
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long, conflicts_with = "image", required_unless_present = "image")]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub image: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also write `solution.json` (and `instance.msfbcp` for images) here.
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
    /// Print the JSON report, or write it to FILE.
    #[arg(long, value_name = "FILE", num_args = 0..=1)]
    pub json: Option<Option<PathBuf>>,
}

#[derive(Args)]
pub struct UnwrapArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
    /// Print the JSON report, or write it to FILE.
    #[arg(long, value_name = "FILE", num_args = 0..=1)]
    pub json: Option<Option<PathBuf>>,
}

#[derive(Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub image: PathBuf,
    /// Instance the solution refers to (as written by `solve` or `unwrap`).
    #[arg(long)]
    pub instance: PathBuf,
    /// `solution.json` from `solve` or `unwrap`.
    #[arg(long)]
    pub solution: PathBuf,
    /// Print the JSON report, or write it to FILE.
    #[arg(long, value_name = "FILE", num_args = 0..=1)]
    pub json: Option<Option<PathBuf>>,
}

#[derive(Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, requires = "solution")]
    pub instance: Option<PathBuf>,
    #[arg(long, requires = "instance")]
    pub solution: Option<PathBuf>,
    #[arg(long, short, default_value = "overlay.ppm")]
    pub output: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Residue counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    /// Instances per size, seeded `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 5)]
    pub instances: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Any of hils, bc, mcm, dual-random, dual-min-rc; comma separated.
    #[arg(long, value_delimiter = ',', default_value = "hils,bc")]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long = "time-limit", default_value_t = 3600.0)]
    pub time_limit: f64,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Worker threads for independent instances.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Bound(a) => commands::bound(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Unwrap(a) => commands::unwrap(&a),
        Command::Metrics(a) => commands::metrics(&a),
        Command::Render(a) => commands::render(&a),
        Command::Bench(a) => bench::bench(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { failure::USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
