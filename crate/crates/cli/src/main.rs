//! `bohr-lab`: command-line front end for `bohr-core`.
//!
//! Exit codes: 0 success, 2 budget exhausted (or search interrupted), 3 bad
//! input, 1 I/O failure.

mod checkpoint;
mod commands;
mod parse;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{flag}: {reason}\n  expected: {grammar}")]
    Flag {
        flag: &'static str,
        grammar: &'static str,
        reason: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("CONFIG_MISMATCH: checkpoint {} was written for config {found}, current config is {expected}", path.display())]
    ConfigMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("{code}: {source}", code = source.code())]
    Core {
        #[from]
        source: bohr_core::Error,
    },
    /// The result document was written; the search did not succeed.
    #[error("{0}")]
    Budget(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source } if source.is_budget_failure() => 2,
            CliError::Budget(_) => 2,
            CliError::Io { .. } => 1,
            _ => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bohr-lab", version, about = "Bohr recurrence and density experiments for multiplicative semigroups")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// JSON object whose keys mirror the command-line flags
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the JSON result here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write bulk samples as CSV
    #[arg(long, global = true, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Resumable state for witness and density runs
    #[arg(long, global = true, value_name = "FILE")]
    pub checkpoint: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Stop after this many shards (witness) or horizons (density)
    #[arg(long, global = true)]
    pub max_shards: Option<u64>,
    /// Wall-clock budget in seconds, summed across resumed runs
    #[arg(long, global = true)]
    pub wall_clock: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a certified recurrence witness (k, s) with ||P(ks) alpha|| <= eps
    Witness(WitnessArgs),
    /// Gap, discrepancy and Weyl-sum reports for {P(s) mod 1}
    Density(DensityArgs),
    /// Rational points in the orbit closure of a torus point
    RationalPoints(RationalArgs),
    /// Largest consecutive ratio s_{n+1}/s_n - 1 in a window
    Gaps(GapsArgs),
    /// Residues of semigroup elements modulo m
    Residues(ResiduesArgs),
    /// Minimum torus distance of s x over semigroup elements s <= N
    Escape(EscapeArgs),
    /// Ordered semigroup elements
    Enumerate(EnumerateArgs),
    /// Normalized small lifts of an orbit under (s, s^2, ..., s^d)
    Directions(DirectionsArgs),
    /// Grid occupancy of t -> (t u_1, ..., t^d u_d) mod 1
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Brute,
    Structured,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Torus point, e.g. "sqrt:2,sqrt:3" or "1/5"
    #[arg(long)]
    pub alpha: String,
    /// Integer coefficients c_1,...,c_r of P(n) = c_1 n + ... + c_r n^r
    #[arg(long, default_value = "1")]
    pub poly: String,
    /// factorials:N, lcm:N or explicit:k1,k2,...
    #[arg(long = "K", default_value = "factorials:12")]
    pub k: String,
    #[arg(long, default_value = "2,3")]
    pub gens: String,
    #[arg(long)]
    pub eps: String,
    /// Largest semigroup element s
    #[arg(long, default_value = "1e7")]
    pub horizon: String,
    /// Use only the first members of K
    #[arg(long)]
    pub max_k_index: Option<usize>,
    #[arg(long, value_enum, default_value = "structured")]
    pub strategy: StrategyArg,
    /// Do not fall back to brute force when the structured route fails
    #[arg(long)]
    pub no_fallback: bool,
    #[arg(long, default_value_t = 256)]
    pub shard_size: usize,
    #[arg(long, default_value = "1e4")]
    pub max_den: String,
    #[arg(long, default_value_t = 5)]
    pub evidence: usize,
    #[arg(long, default_value = "1e5")]
    pub max_samples: String,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Terms coef@degree, e.g. "sqrt:2@1,sqrt:3@2"
    #[arg(long)]
    pub poly: String,
    #[arg(long, default_value = "2,3", conflicts_with = "naturals")]
    pub gens: String,
    /// Use s = 1, 2, 3, ... instead of a semigroup
    #[arg(long)]
    pub naturals: bool,
    #[arg(long, default_value = "1e3,1e4,1e5,1e6")]
    pub horizons: String,
    /// Weyl sums for h = 1..=H
    #[arg(long, default_value_t = 8)]
    pub weyl: u32,
}

#[derive(Debug, Args)]
pub struct RationalArgs {
    #[arg(long)]
    pub base: String,
    /// Exponents l_1,...,l_d (default all 1)
    #[arg(long)]
    pub exps: Option<String>,
    #[arg(long, default_value = "2,3")]
    pub gens: String,
    #[arg(long, default_value = "1e6")]
    pub horizon: String,
    #[arg(long, default_value = "1e4")]
    pub max_den: String,
    #[arg(long, default_value_t = 5)]
    pub evidence: usize,
    #[arg(long, default_value = "1e5")]
    pub max_samples: String,
    /// Keep candidates whose denominators share factors with the generators
    #[arg(long)]
    pub all_candidates: bool,
    /// Also run the coordinate-slicing induction
    #[arg(long)]
    pub slice: bool,
    /// Report at most this many candidates
    #[arg(long, default_value_t = 20)]
    pub top: usize,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[arg(long, default_value = "2,3")]
    pub gens: String,
    #[arg(long, default_value = "1")]
    pub from: String,
    #[arg(long)]
    pub horizon: String,
}

#[derive(Debug, Args)]
pub struct ResiduesArgs {
    #[arg(long, default_value = "2,3")]
    pub gens: String,
    #[arg(long = "mod")]
    pub modulus: u64,
    /// Exponent bound for the brute-force cross-check
    #[arg(long, default_value_t = 20)]
    pub exp_horizon: u32,
}

#[derive(Debug, Args)]
pub struct EscapeArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value = "2,3")]
    pub gens: String,
    #[arg(long)]
    pub horizon: String,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long, default_value = "2,3")]
    pub gens: String,
    #[arg(long)]
    pub horizon: String,
}

#[derive(Debug, Args)]
pub struct DirectionsArgs {
    #[arg(long)]
    pub base: String,
    #[arg(long, default_value = "2,3")]
    pub gens: String,
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value = "1e6")]
    pub horizon: String,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Nonzero reals u_1,...,u_d
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    #[arg(long)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
}

const SUBCOMMANDS: [&str; 9] = [
    "witness",
    "density",
    "rational-points",
    "gaps",
    "residues",
    "escape",
    "enumerate",
    "directions",
    "curve",
];

/// Splice the flags stored in a `--config` file into the argument list.
/// Flags given on the command line come later and therefore win.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut iter = args.into_iter();
    let program = iter.next().unwrap_or_else(|| "bohr-lab".into());
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            config = Some(PathBuf::from(
                iter.next().ok_or_else(|| CliError::Usage("--config needs a file".into()))?,
            ));
        } else if let Some(path) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        let mut out = vec![program];
        out.extend(rest);
        return Ok(out);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let doc: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
    let mut command = None;
    let mut flags: Vec<OsString> = Vec::new();
    for (key, value) in doc {
        if key == "command" {
            command = value.as_str().map(str::to_string);
            continue;
        }
        let name = if key == "K" { key } else { key.replace('_', "-") };
        let text = match value {
            serde_json::Value::Bool(true) => {
                flags.push(format!("--{name}").into());
                continue;
            }
            serde_json::Value::Bool(false) | serde_json::Value::Null => continue,
            serde_json::Value::String(s) => s,
            serde_json::Value::Array(items) => items
                .iter()
                .map(|v| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string()))
                .collect::<Vec<_>>()
                .join(","),
            other => other.to_string(),
        };
        flags.push(format!("--{name}={text}").into());
    }
    let mut out = vec![program];
    match rest.first().map(|a| a.to_string_lossy().into_owned()) {
        Some(first) if SUBCOMMANDS.contains(&first.as_str()) => {
            out.push(rest.remove(0));
        }
        _ => out.push(
            command
                .ok_or_else(|| CliError::Usage(format!("--config {}: missing \"command\"", path.display())))?
                .into(),
        ),
    }
    out.extend(flags);
    out.extend(rest);
    Ok(out)
}

fn precision_cap() -> Result<u32, CliError> {
    match std::env::var("BOHR_LAB_PRECISION_CAP") {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&c| c >= 8)
            .ok_or_else(|| CliError::Usage(format!("BOHR_LAB_PRECISION_CAP={v:?} must be an integer >= 8"))),
        Err(_) => Ok(bohr_core::torus::DEFAULT_PRECISION_CAP),
    }
}

fn run() -> Result<(), CliError> {
    let args = expand_config(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            if code == 0 {
                return Ok(());
            }
            return Err(CliError::Usage(String::new()));
        }
    };
    if let Some(n) = cli.global.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let cap = precision_cap()?;
    commands::dispatch(&cli.global, &cli.command, cap)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let text = e.to_string();
            if !text.is_empty() {
                eprintln!("error: {text}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
