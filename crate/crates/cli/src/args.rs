use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multigrowth::tails::TailMode;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 1729;

#[derive(Debug, Parser)]
#[command(
    name = "multigrowth",
    version,
    about = "Growth of multiplicative games with wealth sharing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for data files, summary and manifest; without it only a summary is printed.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for replica-parallel simulation (fallback: MULTIGROWTH_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Exact shared growth rates r_N for N = 1..nmax.
    Rates(RatesArgs),
    /// Pooled Kelly staking: rate curves, optimal stakes and danger boundaries.
    Kelly(KellyArgs),
    /// Monte Carlo ensembles: synchronous, asynchronous, Kelly or survival census.
    Simulate(SimulateArgs),
    /// Growth rate against generosity, or the critical generosity per group size.
    Generosity(GenerosityArgs),
    /// Tail probabilities of single histories and the contribution decomposition.
    Tails(TailsArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, Args, Serialize, Deserialize)]
pub struct GameArgs {
    /// Win multiplier (decimal or num/den).
    #[arg(short = 'a', value_parser = parse_number, default_value = "2")]
    pub a: f64,
    /// Loss multiplier (decimal or num/den).
    #[arg(short = 'b', value_parser = parse_number, default_value = "1/3")]
    pub b: f64,
    /// Win probability (decimal or num/den).
    #[arg(short = 'p', value_parser = parse_number, default_value = "1/2")]
    pub p: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RatesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value_t = 20)]
    pub nmax: usize,
    /// Emit JSON (alone: JSON only).
    #[arg(long)]
    pub json: bool,
    /// Emit CSV (alone: CSV only).
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KellyArgs {
    #[arg(short = 'p', value_parser = parse_number, default_value = "0.55")]
    pub p: f64,
    /// Net odds: a win pays d per unit staked.
    #[arg(short = 'd', value_parser = parse_number, default_value = "1")]
    pub d: f64,
    /// Group sizes, e.g. `1,2,4` or `1,2,...,10`.
    #[arg(short = 'N', default_value = "1")]
    pub n: SizeList,
    /// Tabulate r_N(f) on start:stop:step (default 0:0.99:0.01).
    #[arg(long, num_args = 0..=1, default_missing_value = "0:0.99:0.01")]
    pub sweep_f: Option<Grid>,
    /// Bracket width of the danger boundary in ln(1 - f).
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    Sync,
    Async,
    Kelly,
    Census,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub mode: SimMode,
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,
    /// Kelly net odds (kelly mode).
    #[arg(short = 'd', value_parser = parse_number, default_value = "1")]
    pub d: f64,
    /// Kelly stake fraction (kelly mode).
    #[arg(short = 'f', value_parser = parse_number, default_value = "0.1")]
    pub f: f64,
    #[arg(short = 'N', default_value_t = 1)]
    pub n: usize,
    /// Generosity in [0, 1] (sync mode).
    #[arg(short = 'D', value_parser = parse_number, default_value = "1")]
    pub generosity: f64,
    #[arg(short = 'T', default_value_t = 1000)]
    pub horizon: usize,
    /// Replicas (default 32, or 1 for census).
    #[arg(short = 'R')]
    pub replicas: Option<usize>,
    #[arg(long, default_value_t = Seed::Fixed(DEFAULT_SEED))]
    pub seed: Seed,
    /// Initial population (census mode).
    #[arg(long, default_value_t = 1 << 20)]
    pub n0: u64,
    #[arg(long, default_value_t = 0)]
    pub burn_in: usize,
    /// Simulate every agent explicitly (async mode).
    #[arg(long)]
    pub agent_level: bool,
    /// Skip the growth-rate estimate.
    #[arg(long)]
    pub no_rate: bool,
    /// Also write every replica's path.
    #[arg(long)]
    pub per_replica: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenerosityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,
    #[arg(short = 'N', default_value = "3")]
    pub n: SizeList,
    #[arg(long, default_value = "0:1:0.05")]
    pub grid: Grid,
    /// Bisect for the least generosity with a positive rate instead of sweeping.
    #[arg(long)]
    pub find_crit: bool,
    /// Final bracket width in D.
    #[arg(long, default_value_t = 0.005)]
    pub tol: f64,
    #[arg(short = 'T', default_value_t = 1000)]
    pub horizon: usize,
    #[arg(short = 'R', default_value_t = 32)]
    pub replicas: usize,
    #[arg(long, default_value_t = Seed::Fixed(DEFAULT_SEED))]
    pub seed: Seed,
    #[arg(long, default_value_t = 0)]
    pub burn_in: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TailsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,
    #[arg(short = 't', default_value_t = 100)]
    pub t: u64,
    #[arg(long, default_value = "beat_one", value_parser = parse_mode)]
    pub mode: TailMode,
    /// Horizon of the contribution decomposition.
    #[arg(long)]
    pub decompose: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Accepts decimals and `num/den` fractions.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in {s:?}"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            num / den
        }
        None => s
            .trim()
            .parse()
            .map_err(|_| format!("not a number: {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn parse_mode(s: &str) -> Result<TailMode, String> {
    s.parse()
}

/// Comma-separated group sizes; `a,b,...,c` continues the step `b - a` up to `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SizeList(pub Vec<usize>);

impl FromStr for SizeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let mut out = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            if *part == "..." {
                let (Some(&last), Some(end)) = (out.last(), parts.get(i + 1)) else {
                    return Err(format!("ellipsis needs a value on both sides in {s:?}"));
                };
                let step = if out.len() >= 2 {
                    last - out[out.len() - 2]
                } else {
                    1
                };
                let end: usize = end.parse().map_err(|_| format!("bad size {end:?}"))?;
                if step == 0 || end < last {
                    return Err(format!("ellipsis does not progress in {s:?}"));
                }
                out.extend((last + step..end).step_by(step));
                continue;
            }
            let n: usize = part
                .parse()
                .map_err(|_| format!("bad group size {part:?}"))?;
            if n == 0 {
                return Err("group sizes must be positive".into());
            }
            out.push(n);
        }
        if out.is_empty() {
            return Err("empty group-size list".into());
        }
        Ok(Self(out))
    }
}

/// Inclusive `start:stop:step` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    /// Points computed as `start + (stop - start) * i / n`, so a grid such as
    /// `0:1:0.05` hits the decimal values as closely as f64 allows.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step).round() as usize;
        if n == 0 {
            return vec![self.start];
        }
        (0..=n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / n as f64)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("grid must be start:stop:step, got {s:?}"));
        };
        let grid = Self {
            start: parse_number(start)?,
            stop: parse_number(stop)?,
            step: parse_number(step)?,
        };
        if !(grid.step > 0.0) || grid.stop < grid.start {
            return Err(format!("grid {s:?} needs step > 0 and stop >= start"));
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl From<Grid> for String {
    fn from(g: Grid) -> Self {
        g.to_string()
    }
}

impl TryFrom<String> for Grid {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Seed {
    Fixed(u64),
    Random,
}

impl Seed {
    /// Draws the seed now if it was requested as `random`.
    pub fn resolve(self) -> u64 {
        match self {
            Self::Fixed(s) => s,
            Self::Random => rand::random(),
        }
    }
}

impl FromStr for Seed {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "random" {
            return Ok(Self::Random);
        }
        s.parse()
            .map(Self::Fixed)
            .map_err(|_| format!("seed must be an unsigned integer or `random`, got {s:?}"))
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(s) => write!(f, "{s}"),
            Self::Random => f.write_str("random"),
        }
    }
}

impl From<Seed> for String {
    fn from(s: Seed) -> Self {
        s.to_string()
    }
}

impl TryFrom<String> for Seed {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}
