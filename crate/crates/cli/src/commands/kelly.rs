use std::fmt::Write as _;

use multigrowth::analytics::{
    kelly_optimal_fraction, kelly_rate, safe_fraction_boundary, DEFAULT_FRACTION_TOL, MIN_EPSILON,
};
use multigrowth::{Error, KellyParams};
use serde_json::json;

use super::Outcome;
use crate::args::KellyArgs;
use crate::error::{CliError, CliResult};
use crate::output::{format_float, Cell, Outputs};

pub fn run(args: &KellyArgs, out: &mut Outputs) -> CliResult<Outcome> {
    let base = KellyParams::new(args.p, args.d, 0.0)?;
    if !(args.tol > 0.0) {
        return Err(CliError::Invalid(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    let sizes = &args.n.0;

    if let Some(grid) = &args.sweep_f {
        if grid.stop >= 1.0 {
            return Err(CliError::Invalid(format!(
                "stake fractions must stay below 1, got --sweep-f {grid}"
            )));
        }
        let fractions = grid.points();
        let mut rows = Vec::with_capacity(sizes.len() * fractions.len());
        for &n in sizes {
            for &f in &fractions {
                let r = kelly_rate(&base.with_fraction(f)?, n)?;
                rows.push(vec![Cell::from(n), Cell::from(f), Cell::from(r)]);
            }
        }
        out.write_csv("kelly_sweep.csv", &["n", "f", "rate"], &rows)?;
    }

    let mut optimal_rows = Vec::new();
    let mut boundary_rows = Vec::new();
    let mut per_n = Vec::new();
    let mut text = String::new();
    for &n in sizes {
        let (f_star, r_max) = kelly_optimal_fraction(args.p, args.d, n, DEFAULT_FRACTION_TOL)?;
        optimal_rows.push(vec![Cell::from(n), Cell::from(f_star), Cell::from(r_max)]);
        write!(
            text,
            "N = {n:<3} f_star = {}  r_max = {}",
            format_float(f_star),
            format_float(r_max)
        )
        .unwrap();

        let (status, report) = match safe_fraction_boundary(args.p, args.d, n, args.tol) {
            Ok(report) => ("ok", Some(report)),
            Err(Error::NoSafeRegion(_)) => ("no_safe_region", None),
            Err(Error::NoRoot(_)) => ("below_resolution", None),
            Err(e) => return Err(e.into()),
        };
        match &report {
            Some(r) => writeln!(
                text,
                "  danger_measure = {}",
                format_float(r.danger_measure)
            ),
            None if status == "below_resolution" => {
                writeln!(text, "  danger_measure < {MIN_EPSILON:e}")
            }
            None => writeln!(text, "  no stake grows"),
        }
        .unwrap();
        boundary_rows.push(vec![
            Cell::from(n),
            Cell::from(report.map(|r| r.danger_boundary)),
            Cell::from(report.map(|r| r.epsilon)),
            Cell::from(report.map(|r| r.log10_epsilon)),
            Cell::from(report.map(|r| r.danger_measure)),
            Cell::from(status),
        ]);
        per_n.push(json!({
            "n": n,
            "f_star": f_star,
            "r_max": r_max,
            "boundary_status": status,
            "boundary": report,
        }));
    }
    out.write_csv(
        "kelly_optimal.csv",
        &["n", "f_star", "r_max"],
        &optimal_rows,
    )?;
    out.write_csv(
        "kelly_boundary.csv",
        &[
            "n",
            "danger_boundary",
            "epsilon",
            "log10_epsilon",
            "danger_measure",
            "status",
        ],
        &boundary_rows,
    )?;

    Ok(Outcome {
        summary_file: Some("kelly.json"),
        summary: json!({
            "p": args.p,
            "d": args.d,
            "min_epsilon": MIN_EPSILON,
            "groups": per_n,
        }),
        text,
        exit_code: 0,
    })
}
