// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};
use output::{read_manifest_parameters, Outputs, RunManifest, MANIFEST_FILE};

const THREADS_ENV: &str = "MULTIGROWTH_THREADS";

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("multigrowth: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn thread_count(flag: Option<usize>) -> CliResult<usize> {
    let requested = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                CliError::Invalid(format!(
                    "{THREADS_ENV} must be a positive integer, got {v:?}"
                ))
            })?),
            Err(_) => None,
        },
    };
    match requested {
        Some(0) => Err(CliError::Invalid("thread count must be positive".into())),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Fixes every `--seed random` to a concrete value and returns the seed, if any.
fn resolve_seed(command: &mut Command) -> Option<u64> {
    let seed = match command {
        Command::Simulate(a) => &mut a.seed,
        Command::Generosity(a) => &mut a.seed,
        _ => return None,
    };
    let value = seed.resolve();
    *seed = args::Seed::Fixed(value);
    Some(value)
}

fn run(cli: Cli) -> CliResult<i32> {
    let started = Instant::now();
    let threads = thread_count(cli.threads)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Invalid(format!("cannot start {threads} worker threads: {e}")))?;

    let mut command = match cli.command {
        Command::Replay(r) => {
            let params = read_manifest_parameters(&r.manifest)?;
            serde_json::from_value(params).map_err(|source| CliError::Json {
                path: r.manifest.clone(),
                source,
            })?
        }
        other => other,
    };
    let master_seed = resolve_seed(&mut command);
    let parameters = serde_json::to_value(&command).expect("arguments serialize to JSON");

    let mut out = Outputs::new(cli.out)?;
    let outcome = commands::run(&command, &mut out)?;
    print!("{}", outcome.text);

    if out.enabled() {
        let mut outputs = out.files().to_vec();
        outputs.extend(outcome.summary_file.map(str::to_owned));
        outputs.push(MANIFEST_FILE.to_owned());
        let manifest = RunManifest {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command_line: std::env::args().collect(),
            parameters,
            master_seed,
            threads,
            duration_seconds: started.elapsed().as_secs_f64(),
            exit_code: outcome.exit_code,
            outputs,
        };
        if let Some(name) = outcome.summary_file {
            let mut summary = outcome.summary;
            if let Some(obj) = summary.as_object_mut() {
                obj.insert(
                    "manifest".into(),
                    serde_json::to_value(&manifest).expect("manifest serializes to JSON"),
                );
            }
            out.write_json(name, &summary)?;
        }
        out.write_json(MANIFEST_FILE, &manifest)?;
    }
    Ok(outcome.exit_code)
}
