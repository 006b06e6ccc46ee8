use serde::{Deserialize, Serialize};

use super::estimate::{estimate_growth_rate, mean_and_std_error, replica_slopes};
use super::record::RateEstimate;
use super::sync::simulate_sync;
use crate::analytics::shared_rate;
use crate::error::{invalid, Error, Result};
use crate::params::{EnsembleSpec, GameParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerosityPoint {
    pub generosity: f64,
    pub estimate: RateEstimate,
}

/// Simulated rate at each generosity in `grid`, all from the same seeds.
pub fn generosity_sweep(
    game: &GameParams,
    spec: &EnsembleSpec,
    grid: &[f64],
    burn_in: usize,
) -> Result<Vec<GenerosityPoint>> {
    grid.iter()
        .map(|&d| {
            let traj = simulate_sync(game, &spec.with_generosity(d))?;
            Ok(GenerosityPoint {
                generosity: d,
                estimate: estimate_growth_rate(&traj, burn_in)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalGenerosity {
    pub n_players: usize,
    /// Largest probed generosity with a negative rate.
    pub lo: f64,
    /// Smallest probed generosity with a positive rate.
    pub hi: f64,
    pub rate_lo: RateEstimate,
    pub rate_hi: RateEstimate,
    /// Standard error of the paired difference `rate_hi - rate_lo`.
    pub separation_std_error: f64,
    pub evaluations: usize,
}

impl CriticalGenerosity {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

struct Probe {
    generosity: f64,
    estimate: RateEstimate,
    slopes: Vec<f64>,
}

fn probe(game: &GameParams, spec: &EnsembleSpec, d: f64, burn_in: usize) -> Result<Probe> {
    let traj = simulate_sync(game, &spec.with_generosity(d))?;
    Ok(Probe {
        generosity: d,
        estimate: estimate_growth_rate(&traj, burn_in)?,
        slopes: replica_slopes(&traj, burn_in)?,
    })
}

/// Least generosity at which a group of `spec.n_players` grows.
///
/// Bisects on `D` with every candidate simulated from the same seeds, so the
/// sampled rate-vs-`D` curve is smooth and the sign comparisons are paired.
/// The returned bracket is at most `tol` wide and its endpoint rates have
/// opposite signs separated by at least two paired standard errors;
/// otherwise [`Error::BudgetExhausted`].
pub fn critical_generosity(
    game: &GameParams,
    spec: &EnsembleSpec,
    tol: f64,
    burn_in: usize,
) -> Result<CriticalGenerosity> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let n = spec.n_players;
    let alone = shared_rate(game, 1)?;
    if alone >= 0.0 {
        return Err(Error::NoRoot(format!(
            "a lone player already grows (r_1 = {alone:.6}), no sharing is needed"
        )));
    }
    let pooled = shared_rate(game, n)?;
    if pooled <= 0.0 {
        return Err(Error::NoRoot(format!(
            "even full sharing decays for N = {n} (r_N = {pooled:.6})"
        )));
    }

    let mut lo = probe(game, spec, 0.0, burn_in)?;
    let mut hi = probe(game, spec, 1.0, burn_in)?;
    let mut evaluations = 2;
    let exhausted = |lo: &Probe, hi: &Probe, detail: String| Error::BudgetExhausted {
        lo: lo.generosity,
        hi: hi.generosity,
        detail,
    };
    if !(lo.estimate.rate < 0.0 && hi.estimate.rate > 0.0) {
        return Err(exhausted(
            &lo,
            &hi,
            format!(
                "endpoint rates {:.3e} (D = 0) and {:.3e} (D = 1) do not straddle zero",
                lo.estimate.rate, hi.estimate.rate
            ),
        ));
    }
    while hi.generosity - lo.generosity > tol {
        let mid = probe(game, spec, 0.5 * (lo.generosity + hi.generosity), burn_in)?;
        evaluations += 1;
        if mid.estimate.rate > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let diffs: Vec<f64> = hi
        .slopes
        .iter()
        .zip(&lo.slopes)
        .map(|(h, l)| h - l)
        .collect();
    let (gap, gap_se) = mean_and_std_error(&diffs);
    if !(gap >= 2.0 * gap_se) {
        return Err(exhausted(
            &lo,
            &hi,
            format!("rate gap {gap:.3e} is below two paired standard errors ({gap_se:.3e})"),
        ));
    }
    Ok(CriticalGenerosity {
        n_players: n,
        lo: lo.generosity,
        hi: hi.generosity,
        rate_lo: lo.estimate,
        rate_hi: hi.estimate,
        separation_std_error: gap_se,
        evaluations,
    })
}
