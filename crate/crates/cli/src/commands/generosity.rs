use std::fmt::Write as _;

use multigrowth::analytics::shared_rate;
use multigrowth::engine::{critical_generosity, generosity_sweep};
use multigrowth::{EnsembleSpec, Error};
use serde_json::json;

use super::{rate_or_ruin, Outcome, EXIT_UNRESOLVED};
use crate::args::GenerosityArgs;
use crate::error::{CliError, CliResult};
use crate::output::{format_float, Cell, Outputs};

pub fn run(args: &GenerosityArgs, out: &mut Outputs) -> CliResult<Outcome> {
    let game = args.game.params()?;
    if args.burn_in >= args.horizon {
        return Err(CliError::Invalid(format!(
            "--burn-in {} must be shorter than -T {}",
            args.burn_in, args.horizon
        )));
    }
    let seed = args.seed.resolve();
    let spec = |n| EnsembleSpec::synchronous(n, args.horizon, args.replicas, seed);
    if args.find_crit {
        find_crit(args, &game, &spec, out)
    } else {
        sweep(args, &game, &spec, out)
    }
}

fn sweep(
    args: &GenerosityArgs,
    game: &multigrowth::GameParams,
    spec: &dyn Fn(usize) -> EnsembleSpec,
    out: &mut Outputs,
) -> CliResult<Outcome> {
    let grid = args.grid.points();
    if grid.iter().any(|d| !(0.0..=1.0).contains(d)) {
        return Err(CliError::Invalid(format!(
            "generosity grid {} leaves [0, 1]",
            args.grid
        )));
    }
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    let mut text = String::new();
    for &n in &args.n.0 {
        let points = generosity_sweep(game, &spec(n), &grid, args.burn_in)?;
        let full = rate_or_ruin(shared_rate(game, n))?;
        writeln!(
            text,
            "N = {n}: analytic rate at D = 1 is {}",
            format_float(full)
        )
        .unwrap();
        for pt in &points {
            rows.push(vec![
                Cell::from(n),
                Cell::from(pt.generosity),
                Cell::from(pt.estimate.rate),
                Cell::from(pt.estimate.std_error),
            ]);
            writeln!(
                text,
                "  D = {:<6} rate = {} +- {}",
                pt.generosity,
                format_float(pt.estimate.rate),
                format_float(pt.estimate.std_error)
            )
            .unwrap();
        }
        curves.push(json!({ "n": n, "analytic_full_sharing": full, "points": points }));
    }
    out.write_csv(
        "generosity_curve.csv",
        &["n", "generosity", "rate", "std_error"],
        &rows,
    )?;
    Ok(Outcome {
        summary_file: Some("generosity.json"),
        summary: json!({ "curves": curves }),
        text,
        exit_code: 0,
    })
}

fn find_crit(
    args: &GenerosityArgs,
    game: &multigrowth::GameParams,
    spec: &dyn Fn(usize) -> EnsembleSpec,
    out: &mut Outputs,
) -> CliResult<Outcome> {
    let mut rows = Vec::new();
    let mut results = Vec::new();
    let mut text = String::new();
    let mut exit_code = 0;
    for &n in &args.n.0 {
        match critical_generosity(game, &spec(n), args.tol, args.burn_in) {
            Ok(c) => {
                writeln!(
                    text,
                    "N = {n}: D_crit in [{}, {}], N * D_crit = {}",
                    format_float(c.lo),
                    format_float(c.hi),
                    format_float(n as f64 * c.midpoint())
                )
                .unwrap();
                rows.push(vec![
                    Cell::from(n),
                    Cell::from(c.lo),
                    Cell::from(c.hi),
                    Cell::from(c.midpoint()),
                    Cell::from(n as f64 * c.midpoint()),
                    Cell::from(c.rate_lo.rate),
                    Cell::from(c.rate_hi.rate),
                    Cell::from(c.separation_std_error),
                    Cell::from(c.evaluations),
                    Cell::from("ok"),
                ]);
                results.push(json!({ "n": n, "status": "ok", "result": c }));
            }
            Err(e @ (Error::NoRoot(_) | Error::BudgetExhausted { .. })) => {
                exit_code = EXIT_UNRESOLVED;
                let (status, lo, hi) = match &e {
                    Error::BudgetExhausted { lo, hi, .. } => ("unresolved", Some(*lo), Some(*hi)),
                    _ => ("no_root", None, None),
                };
                writeln!(text, "N = {n}: {e}").unwrap();
                rows.push(vec![
                    Cell::from(n),
                    Cell::from(lo),
                    Cell::from(hi),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::from(status),
                ]);
                results.push(json!({ "n": n, "status": status, "detail": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.write_csv(
        "critical_generosity.csv",
        &[
            "n",
            "d_crit_lo",
            "d_crit_hi",
            "d_crit",
            "n_times_d_crit",
            "rate_lo",
            "rate_hi",
            "separation_std_error",
            "evaluations",
            "status",
        ],
        &rows,
    )?;
    Ok(Outcome {
        summary_file: Some("critical_generosity.json"),
        summary: json!({ "tol": args.tol, "groups": results }),
        text,
        exit_code,
    })
}
