use std::fmt::Write as _;

use multigrowth::analytics::{geometric_rate, n_critical, shared_rate, shared_rate_limit};
use serde_json::json;

use super::{rate_or_ruin, Outcome};
use crate::args::RatesArgs;
use crate::error::{CliError, CliResult};
use crate::output::{format_float, render_csv, Cell, Outputs};

const CSV_FILE: &str = "rates.csv";

pub fn run(args: &RatesArgs, out: &mut Outputs) -> CliResult<Outcome> {
    let game = args.game.params()?;
    if args.nmax == 0 {
        return Err(CliError::Invalid("--nmax must be at least 1".into()));
    }
    let rates = (1..=args.nmax)
        .map(|n| Ok((n, rate_or_ruin(shared_rate(&game, n))?)))
        .collect::<CliResult<Vec<_>>>()?;
    let ln_mg = rate_or_ruin(geometric_rate(&game))?;
    let ln_ma = shared_rate_limit(&game);
    let n_crit = n_critical(&game, args.nmax);

    let mut rows: Vec<Vec<Cell>> = rates
        .iter()
        .map(|&(n, r)| vec![Cell::from(n), Cell::from(r)])
        .collect();
    rows.push(vec![Cell::from("ln_mg"), Cell::from(ln_mg)]);
    rows.push(vec![Cell::from("ln_ma"), Cell::from(ln_ma)]);
    rows.push(vec![Cell::from("n_crit"), Cell::from(n_crit)]);
    let header = ["n", "rate"];

    let (want_json, want_csv) = match (args.json, args.csv) {
        (false, false) => (true, true),
        flags => flags,
    };
    if want_csv {
        out.write_csv(CSV_FILE, &header, &rows)?;
    }

    let summary = json!({
        "game": args.game,
        "rates": rates.iter().map(|&(n, r)| json!({ "n": n, "rate": r })).collect::<Vec<_>>(),
        "ln_mg": ln_mg,
        "ln_ma": ln_ma,
        "n_crit": n_crit,
    });

    let text = if !out.enabled() && args.csv && !args.json {
        let bytes = render_csv(&header, &rows).map_err(|source| CliError::Csv {
            path: "<stdout>".into(),
            source,
        })?;
        String::from_utf8_lossy(&bytes).into_owned()
    } else if !out.enabled() && args.json && !args.csv {
        format!(
            "{}\n",
            serde_json::to_string_pretty(&summary).expect("plain JSON values")
        )
    } else {
        let mut s = String::new();
        for &(n, r) in &rates {
            writeln!(s, "r_{n:<4} = {}", format_float(r)).unwrap();
        }
        writeln!(s, "ln M_g = {}", format_float(ln_mg)).unwrap();
        writeln!(s, "ln M_a = {}", format_float(ln_ma)).unwrap();
        match n_crit {
            Some(n) => writeln!(s, "N_crit = {n}").unwrap(),
            None => writeln!(s, "N_crit = none up to N = {}", args.nmax).unwrap(),
        }
        s
    };

    Ok(Outcome {
        summary_file: want_json.then_some("rates.json"),
        summary,
        text,
        exit_code: 0,
    })
}
