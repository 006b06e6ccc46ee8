use multigrowth::GameParams;
use serde_json::Value;

use crate::args::{Command, GameArgs};
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

mod generosity;
mod kelly;
mod rates;
mod simulate;
mod tails;

pub const EXIT_EXTINCTION: i32 = 3;
pub const EXIT_UNRESOLVED: i32 = 4;

/// What a command produced besides its data files.
pub struct Outcome {
    /// Summary JSON file name, if one is wanted; the manifest is embedded in it.
    pub summary_file: Option<&'static str>,
    pub summary: Value,
    /// Printed to stdout.
    pub text: String,
    /// Nonzero when some requested result could not be produced.
    pub exit_code: i32,
}

pub fn run(command: &Command, out: &mut Outputs) -> CliResult<Outcome> {
    match command {
        Command::Rates(args) => rates::run(args, out),
        Command::Kelly(args) => kelly::run(args, out),
        Command::Simulate(args) => simulate::run(args, out),
        Command::Generosity(args) => generosity::run(args, out),
        Command::Tails(args) => tails::run(args, out),
        Command::Replay(_) => Err(CliError::Invalid(
            "a manifest cannot replay a replay".into(),
        )),
    }
}

impl GameArgs {
    pub fn params(&self) -> CliResult<GameParams> {
        Ok(GameParams::new(self.a, self.b, self.p)?)
    }
}

/// Rate that is `-inf` when a zero loss multiplier makes ruin certain.
fn rate_or_ruin(r: multigrowth::Result<f64>) -> CliResult<f64> {
    match r {
        Err(multigrowth::Error::CertainRuin) => Ok(f64::NEG_INFINITY),
        other => Ok(other?),
    }
}
