use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::TrajectoryRecord;
use crate::error::{invalid, Result};
use crate::params::{EnsembleSpec, GameParams, KellyParams, UpdateMode};
use crate::seed::stream_rng;

/// Partial redistribution `W_i <- W_i + D (mean(W) - W_i)` inside a group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharingPolicy {
    pub generosity: f64,
    pub group_size: usize,
}

impl SharingPolicy {
    pub fn new(generosity: f64, group_size: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&generosity) {
            return Err(invalid(format!(
                "generosity D must lie in [0, 1], got {generosity}"
            )));
        }
        if group_size == 0 {
            return Err(invalid("group size must be positive"));
        }
        Ok(Self {
            generosity,
            group_size,
        })
    }

    pub fn from_spec(spec: &EnsembleSpec) -> Result<Self> {
        Self::new(spec.generosity, spec.n_players)
    }

    /// Applies the sharing map to linear wealth in place. The group mean is
    /// computed once, so the total is conserved up to rounding.
    pub fn apply(&self, wealth: &mut [f64]) {
        if self.generosity == 0.0 || wealth.len() < 2 {
            return;
        }
        let mean = wealth.iter().sum::<f64>() / wealth.len() as f64;
        for w in wealth.iter_mut() {
            *w += self.generosity * (mean - *w);
        }
    }
}

/// Outcome of one synchronous step for one replica.
struct GroupState {
    log_wealth: Vec<f64>,
    scratch: Vec<f64>,
}

impl GroupState {
    fn new(n: usize) -> Self {
        Self {
            log_wealth: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }

    /// Shares wealth held in log space and returns `ln` of the group mean.
    fn share(&mut self, policy: &SharingPolicy) -> f64 {
        let n = self.log_wealth.len();
        let max = self
            .log_wealth
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return max;
        }
        if n == 1 {
            return self.log_wealth[0];
        }
        for (w, &l) in self.scratch.iter_mut().zip(&self.log_wealth) {
            *w = (l - max).exp();
        }
        let group = max + (self.scratch.iter().sum::<f64>() / n as f64).ln();
        if policy.generosity > 0.0 {
            policy.apply(&mut self.scratch);
            for (l, &w) in self.log_wealth.iter_mut().zip(&self.scratch) {
                *l = max + w.ln();
            }
        }
        group
    }

    fn alive(&self) -> u64 {
        self.log_wealth
            .iter()
            .filter(|&&l| l > f64::NEG_INFINITY)
            .count() as u64
    }
}

fn run_replica(
    game: &GameParams,
    policy: &SharingPolicy,
    spec: &EnsembleSpec,
    replica: u64,
) -> (Vec<f64>, Vec<u64>) {
    let n = spec.n_players;
    let (ln_a, ln_b) = (game.a().ln(), game.b().ln());
    let p = game.p();
    let mut rngs: Vec<_> = (0..n as u64)
        .map(|agent| stream_rng(spec.master_seed, replica, agent))
        .collect();
    let mut state = GroupState::new(n);
    let mut path = Vec::with_capacity(spec.horizon + 1);
    let mut alive = Vec::with_capacity(spec.horizon + 1);
    path.push(0.0);
    alive.push(n as u64);
    for _ in 0..spec.horizon {
        for (l, rng) in state.log_wealth.iter_mut().zip(rngs.iter_mut()) {
            *l += if rng.random::<f64>() < p { ln_a } else { ln_b };
        }
        let group = state.share(policy);
        path.push(group);
        alive.push(state.alive());
        if group == f64::NEG_INFINITY {
            path.resize(spec.horizon + 1, f64::NEG_INFINITY);
            alive.resize(spec.horizon + 1, 0);
            break;
        }
    }
    (path, alive)
}

/// Simulates `spec.replicas` independent groups of `spec.n_players` agents.
///
/// Each step every agent multiplies its wealth by `a` (if its own uniform
/// draw is below `p`) or `b`, then the group applies the sharing map with
/// generosity `spec.generosity`. Agent `i` of replica `r` always reads the
/// stream `(master_seed, r, i)`.
pub fn simulate_sync(game: &GameParams, spec: &EnsembleSpec) -> Result<TrajectoryRecord> {
    spec.validate()?;
    if spec.update_mode != UpdateMode::Synchronous {
        return Err(invalid("simulate_sync needs a synchronous ensemble"));
    }
    let policy = SharingPolicy::from_spec(spec)?;
    let runs: Vec<(Vec<f64>, Vec<u64>)> = (0..spec.replicas as u64)
        .into_par_iter()
        .map(|r| run_replica(game, &policy, spec, r))
        .collect();
    let (paths, alive): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    Ok(TrajectoryRecord::from_replicas(paths, &alive))
}

/// Pooled Kelly staking: the converted game under full redistribution.
pub fn simulate_kelly(kp: &KellyParams, spec: &EnsembleSpec) -> Result<TrajectoryRecord> {
    simulate_sync(&kp.to_game(), &spec.with_generosity(1.0))
}
