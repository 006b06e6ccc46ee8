use std::fmt::Write as _;

use multigrowth::tails::{contribution_decomposition, tail_report};
use serde_json::json;

use super::Outcome;
use crate::args::TailsArgs;
use crate::error::CliResult;
use crate::output::{format_float, Cell, Outputs};

pub fn run(args: &TailsArgs, out: &mut Outputs) -> CliResult<Outcome> {
    let game = args.game.params()?;
    let report = tail_report(&game, args.t, args.mode)?;
    let mut text = String::new();
    writeln!(text, "alpha = {}", format_float(report.alpha)).unwrap();
    writeln!(text, "prob_exact = {}", format_float(report.prob_exact)).unwrap();
    writeln!(
        text,
        "prob_gaussian = {}",
        format_float(report.prob_gaussian)
    )
    .unwrap();
    writeln!(
        text,
        "required_realizations = {}",
        format_float(report.required_realizations)
    )
    .unwrap();

    let decomposition = match args.decompose {
        Some(horizon) => {
            let dec = contribution_decomposition(&game, horizon)?;
            let rows: Vec<Vec<Cell>> = dec
                .rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::from(r.n),
                        Cell::from(r.log_value),
                        Cell::from(r.log_prob),
                        Cell::from(r.log_contribution),
                    ]
                })
                .collect();
            out.write_csv(
                "decomposition.csv",
                &["n", "log_value", "log_prob", "log_contribution"],
                &rows,
            )?;
            writeln!(text, "argmax_prob = {}", dec.argmax_prob).unwrap();
            writeln!(text, "argmax_contribution = {}", dec.argmax_contribution).unwrap();
            writeln!(
                text,
                "typical_contribution = {}",
                format_float(dec.typical_contribution)
            )
            .unwrap();
            Some(json!({
                "horizon": dec.horizon,
                "argmax_prob": dec.argmax_prob,
                "argmax_contribution": dec.argmax_contribution,
                "typical_contribution": dec.typical_contribution,
                "log_total_contribution": dec.log_total_contribution,
                "log_total_prob": dec.log_total_prob,
            }))
        }
        None => None,
    };

    Ok(Outcome {
        summary_file: Some("tail_report.json"),
        summary: json!({
            "game": args.game,
            "report": report,
            "decomposition": decomposition,
        }),
        text,
        exit_code: 0,
    })
}
