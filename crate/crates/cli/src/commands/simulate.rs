use std::fmt::Write as _;

use multigrowth::analytics::{async_rate, kelly_rate, shared_rate};
use multigrowth::engine::{
    estimate_growth_rate, extinction_time, simulate_async, simulate_async_agent_level,
    simulate_kelly, simulate_sync, survival_census, TrajectoryRecord,
};
use multigrowth::tails::census_extinction_cdf;
use multigrowth::{EnsembleSpec, Error, KellyParams};
use serde_json::json;

use super::{rate_or_ruin, Outcome, EXIT_EXTINCTION};
use crate::args::{SimMode, SimulateArgs};
use crate::error::{CliError, CliResult};
use crate::output::{format_float, Cell, Outputs};

const DEFAULT_REPLICAS: usize = 32;

/// Mean one-step change of `log2 N(t)` is read over `t in [1, CENSUS_WINDOW]`.
const CENSUS_WINDOW: usize = 10;

pub fn run(args: &SimulateArgs, out: &mut Outputs) -> CliResult<Outcome> {
    if args.mode == SimMode::Census {
        return census(args, out);
    }
    if args.burn_in >= args.horizon {
        return Err(CliError::Invalid(format!(
            "--burn-in {} must be shorter than -T {}",
            args.burn_in, args.horizon
        )));
    }
    let seed = args.seed.resolve();
    let replicas = args.replicas.unwrap_or(DEFAULT_REPLICAS);
    let game = args.game.params()?;
    let sync_spec = EnsembleSpec::synchronous(args.n, args.horizon, replicas, seed);

    let (traj, analytic) = match args.mode {
        SimMode::Sync => {
            let spec = sync_spec.with_generosity(args.generosity);
            let traj = simulate_sync(&game, &spec)?;
            // closed form only without partial sharing
            let analytic = if args.generosity == 1.0 || args.n == 1 {
                Some(rate_or_ruin(shared_rate(&game, args.n))?)
            } else {
                None
            };
            (traj, analytic)
        }
        SimMode::Async => {
            if args.generosity != 1.0 {
                return Err(CliError::Invalid(
                    "asynchronous updating always redistributes fully (-D 1)".into(),
                ));
            }
            let spec = EnsembleSpec::asynchronous(args.n, args.horizon, replicas, seed);
            let traj = if args.agent_level {
                simulate_async_agent_level(&game, &spec)?
            } else {
                simulate_async(&game, &spec)?
            };
            (traj, Some(async_rate(&game, args.n)?))
        }
        SimMode::Kelly => {
            let kp = KellyParams::new(args.game.p, args.d, args.f)?;
            let traj = simulate_kelly(&kp, &sync_spec)?;
            (traj, Some(kelly_rate(&kp, args.n)?))
        }
        SimMode::Census => unreachable!(),
    };

    write_trajectory(&traj, args.per_replica, out)?;

    let mut text = String::new();
    let mut exit_code = 0;
    let mut error = None;
    let estimate = if args.no_rate {
        None
    } else {
        match estimate_growth_rate(&traj, args.burn_in) {
            Ok(est) => Some(est),
            Err(e @ Error::Extinction { .. }) => {
                exit_code = EXIT_EXTINCTION;
                writeln!(text, "{e}").unwrap();
                error = Some(e.to_string());
                None
            }
            Err(e) => return Err(e.into()),
        }
    };
    if let Some(est) = &estimate {
        writeln!(
            text,
            "rate = {} +- {}",
            format_float(est.rate),
            format_float(est.std_error)
        )
        .unwrap();
    }
    if let Some(r) = analytic {
        writeln!(text, "analytic = {}", format_float(r)).unwrap();
    }
    writeln!(
        text,
        "extinct replicas = {}/{}",
        traj.extinct_replicas,
        traj.replicas()
    )
    .unwrap();

    let z_score = match (&estimate, analytic) {
        (Some(est), Some(r)) if est.std_error > 0.0 => Some((est.rate - r) / est.std_error),
        _ => None,
    };
    Ok(Outcome {
        summary_file: Some("summary.json"),
        summary: json!({
            "mode": args.mode,
            "n_players": args.n,
            "generosity": if args.mode == SimMode::Sync { args.generosity } else { 1.0 },
            "horizon": args.horizon,
            "replicas": replicas,
            "master_seed": seed,
            "burn_in": args.burn_in,
            "estimate": estimate,
            "analytic_rate": analytic,
            "z_score": z_score,
            "extinct_replicas": traj.extinct_replicas,
            "error": error,
        }),
        text,
        exit_code,
    })
}

fn write_trajectory(
    traj: &TrajectoryRecord,
    per_replica: bool,
    out: &mut Outputs,
) -> CliResult<()> {
    let ensemble = traj.ensemble_log_mean_wealth();
    let rows: Vec<Vec<Cell>> = (0..traj.times.len())
        .map(|i| {
            vec![
                Cell::from(traj.times[i]),
                Cell::from(traj.mean_log_wealth[i]),
                Cell::from(traj.std_log_wealth[i]),
                Cell::from(ensemble[i]),
                Cell::from(traj.survivors[i]),
            ]
        })
        .collect();
    out.write_csv(
        "trajectory.csv",
        &[
            "t",
            "mean_log_wealth",
            "std_log_wealth",
            "log_ensemble_mean_wealth",
            "survivors",
        ],
        &rows,
    )?;
    if per_replica {
        let rows: Vec<Vec<Cell>> = traj
            .replica_log_wealth
            .iter()
            .enumerate()
            .flat_map(|(r, path)| {
                path.iter()
                    .enumerate()
                    .map(move |(t, &l)| vec![Cell::from(r), Cell::from(t), Cell::from(l)])
            })
            .collect();
        out.write_csv("replicas.csv", &["replica", "t", "log_wealth"], &rows)?;
    }
    Ok(())
}

fn census(args: &SimulateArgs, out: &mut Outputs) -> CliResult<Outcome> {
    let seed = args.seed.resolve();
    let replicas = args.replicas.unwrap_or(1);
    let game = args.game.params()?;
    let spec = EnsembleSpec::synchronous(1, args.horizon, replicas, seed);
    let traces = survival_census(&game, args.n0, &spec)?;

    let mut rows = Vec::new();
    for (r, trace) in traces.iter().enumerate() {
        for rec in trace {
            rows.push(vec![
                Cell::from(r),
                Cell::from(rec.t),
                Cell::from(rec.survivors),
                Cell::from((rec.survivors as f64).log2()),
                Cell::from(rec.mean_wealth),
                Cell::from(rec.log_mean_wealth),
            ]);
        }
    }
    out.write_csv(
        "census.csv",
        &[
            "replica",
            "t",
            "survivors",
            "log2_survivors",
            "mean_wealth",
            "log_mean_wealth",
        ],
        &rows,
    )?;

    let extinction: Vec<Option<usize>> = traces.iter().map(|t| extinction_time(t)).collect();
    let window = CENSUS_WINDOW.min(args.horizon);
    let drops: Vec<Option<f64>> = traces
        .iter()
        .map(|trace| {
            let end = trace[window].survivors;
            (end > 0).then(|| ((end as f64).log2() - (args.n0 as f64).log2()) / window as f64)
        })
        .collect();
    let alive_at_end = extinction.iter().filter(|e| e.is_none()).count();

    let mut text = String::new();
    for (r, (e, d)) in extinction.iter().zip(&drops).enumerate() {
        let e = e.map_or_else(|| format!("> {}", args.horizon), |t| t.to_string());
        let d = d.map_or_else(|| "n/a".into(), format_float);
        writeln!(
            text,
            "replica {r}: extinct at t = {e}, log2 N(t) slope over [0, {window}] = {d}"
        )
        .unwrap();
    }
    Ok(Outcome {
        summary_file: Some("summary.json"),
        summary: json!({
            "mode": args.mode,
            "n0": args.n0,
            "horizon": args.horizon,
            "replicas": replicas,
            "master_seed": seed,
            "extinction_times": extinction,
            "log2_survivor_slope": drops,
            "log2_survivor_slope_window": window,
            "analytic_log2_survivor_slope": game.p().log2(),
            "analytic_extinct_by_horizon": census_extinction_cdf(&game, args.n0, args.horizon as u64),
            "alive_at_horizon": alive_at_end,
        }),
        text,
        exit_code: 0,
    })
}
