use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::record::TrajectoryRecord;
use crate::error::{invalid, Error, Result};
use crate::params::{EnsembleSpec, GameParams, UpdateMode};
use crate::seed::{stream_rng, SCHEDULER_STREAM};

/// Random streams of one asynchronous replica: the scheduler picks the
/// agent, the agent's own stream decides the outcome.
struct Streams {
    scheduler: ChaCha8Rng,
    agents: Vec<ChaCha8Rng>,
}

impl Streams {
    fn new(spec: &EnsembleSpec, replica: u64) -> Self {
        Self {
            scheduler: stream_rng(spec.master_seed, replica, SCHEDULER_STREAM),
            agents: (0..spec.n_players as u64)
                .map(|agent| stream_rng(spec.master_seed, replica, agent))
                .collect(),
        }
    }

    /// Returns `(agent, won)` for the next micro-step.
    fn next(&mut self, p: f64) -> (usize, bool) {
        let agent = self.scheduler.random_range(0..self.agents.len());
        (agent, self.agents[agent].random::<f64>() < p)
    }
}

fn check(game: &GameParams, spec: &EnsembleSpec) -> Result<()> {
    spec.validate()?;
    if spec.update_mode != UpdateMode::Asynchronous {
        return Err(invalid(
            "asynchronous simulation needs an asynchronous ensemble",
        ));
    }
    if spec.n_players == 1 && game.b() == 0.0 {
        return Err(Error::Domain(
            "a lone asynchronous player with b = 0 is ruined by its first loss".into(),
        ));
    }
    Ok(())
}

fn collect(runs: Vec<Vec<f64>>, n: usize) -> TrajectoryRecord {
    let alive: Vec<Vec<u64>> = runs
        .iter()
        .map(|path| {
            path.iter()
                .map(|&l| if l > f64::NEG_INFINITY { n as u64 } else { 0 })
                .collect()
        })
        .collect();
    TrajectoryRecord::from_replicas(runs, &alive)
}

/// Asynchronous updating with total redistribution, in aggregate form.
///
/// Time advances by `1/N` per micro-step; the pooled wealth is multiplied by
/// `(a + N - 1) / N` on a win and `(b + N - 1) / N` on a loss. The record
/// holds one entry per unit of time (N micro-steps).
pub fn simulate_async(game: &GameParams, spec: &EnsembleSpec) -> Result<TrajectoryRecord> {
    check(game, spec)?;
    let n = spec.n_players;
    let nf = n as f64;
    let ln_win = ((game.a() - 1.0) / nf).ln_1p();
    let ln_loss = (-(1.0 - game.b()) / nf).ln_1p();
    let runs: Vec<Vec<f64>> = (0..spec.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut streams = Streams::new(spec, r);
            let mut log_w = 0.0;
            let mut path = Vec::with_capacity(spec.horizon + 1);
            path.push(0.0);
            for _ in 0..spec.horizon {
                for _ in 0..n {
                    let (_, won) = streams.next(game.p());
                    log_w += if won { ln_win } else { ln_loss };
                }
                path.push(log_w);
            }
            path
        })
        .collect();
    Ok(collect(runs, n))
}

/// Agent-level asynchronous updating: one chosen agent plays with its full
/// share, then the group wealth is split equally again.
///
/// Consumes the same draws as [`simulate_async`], so the two agree path by
/// path up to rounding.
pub fn simulate_async_agent_level(
    game: &GameParams,
    spec: &EnsembleSpec,
) -> Result<TrajectoryRecord> {
    check(game, spec)?;
    let n = spec.n_players;
    let runs: Vec<Vec<f64>> = (0..spec.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut streams = Streams::new(spec, r);
            // wealth in units of exp(log_scale); equal shares of 1 after each split
            let mut wealth = vec![1.0; n];
            let mut log_scale = 0.0;
            let mut path = Vec::with_capacity(spec.horizon + 1);
            path.push(0.0);
            for _ in 0..spec.horizon {
                for _ in 0..n {
                    let (agent, won) = streams.next(game.p());
                    wealth[agent] *= if won { game.a() } else { game.b() };
                    let share = wealth.iter().sum::<f64>() / n as f64;
                    log_scale += share.ln();
                    wealth.fill(1.0);
                }
                path.push(log_scale);
            }
            path
        })
        .collect();
    Ok(collect(runs, n))
}
