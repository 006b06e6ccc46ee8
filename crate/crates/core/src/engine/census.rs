use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::params::{EnsembleSpec, GameParams};
use crate::seed::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub t: usize,
    /// Agents still holding positive wealth.
    pub survivors: u64,
    /// `W(t) = N(t) / N(0) * a^t`; zero once everyone is ruined.
    pub mean_wealth: f64,
    pub log_mean_wealth: f64,
}

/// Non-sharing players in a game with `b = 0`.
///
/// Every survivor is worth `a^t`, so the population is carried as a single
/// survivor count thinned by `Binomial(N(t), p)` each step; `n0 = 1e9` costs
/// the same as `n0 = 1`. Only `horizon`, `replicas` and `master_seed` of
/// `spec` are read. Returns one trace of `horizon + 1` records per replica.
pub fn survival_census(
    game: &GameParams,
    n0: u64,
    spec: &EnsembleSpec,
) -> Result<Vec<Vec<CensusRecord>>> {
    if game.b() != 0.0 {
        return Err(invalid(format!(
            "survival census needs total loss (b = 0), got b = {}",
            game.b()
        )));
    }
    if n0 == 0 {
        return Err(invalid("initial population must be positive"));
    }
    if spec.replicas == 0 || spec.horizon == 0 {
        return Err(invalid("census needs a positive horizon and replica count"));
    }
    let ln_a = game.a().ln();
    let ln_n0 = (n0 as f64).ln();
    let record = |t: usize, survivors: u64| {
        let log_mean_wealth = if survivors == 0 {
            f64::NEG_INFINITY
        } else {
            (survivors as f64).ln() - ln_n0 + t as f64 * ln_a
        };
        CensusRecord {
            t,
            survivors,
            mean_wealth: log_mean_wealth.exp(),
            log_mean_wealth,
        }
    };
    (0..spec.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(spec.master_seed, r, 0);
            let mut alive = n0;
            let mut trace = Vec::with_capacity(spec.horizon + 1);
            trace.push(record(0, alive));
            for t in 1..=spec.horizon {
                if alive > 0 {
                    let thin = Binomial::new(alive, game.p())
                        .map_err(|e| invalid(format!("binomial thinning: {e}")))?;
                    alive = thin.sample(&mut rng);
                }
                trace.push(record(t, alive));
            }
            Ok(trace)
        })
        .collect()
}

/// First step at which nobody survives.
pub fn extinction_time(trace: &[CensusRecord]) -> Option<usize> {
    trace.iter().find(|rec| rec.survivors == 0).map(|rec| rec.t)
}
