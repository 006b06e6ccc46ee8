use super::record::{RateEstimate, TrajectoryRecord};
use crate::error::{invalid, Error, Result};

/// Default number of initial steps excluded from a rate estimate.
pub const DEFAULT_BURN_IN: usize = 0;

/// Per-replica slopes `(l_r(T) - l_r(burn_in)) / (T - burn_in)`.
pub fn replica_slopes(traj: &TrajectoryRecord, burn_in: usize) -> Result<Vec<f64>> {
    let horizon = traj.horizon();
    if burn_in >= horizon {
        return Err(invalid(format!(
            "burn-in {burn_in} must be shorter than the horizon {horizon}"
        )));
    }
    if traj.extinct_replicas > 0 {
        return Err(Error::Extinction {
            replicas: traj.extinct_replicas,
        });
    }
    let span = (horizon - burn_in) as f64;
    Ok(traj
        .replica_log_wealth
        .iter()
        .map(|path| (path[horizon] - path[burn_in]) / span)
        .collect())
}

pub(crate) fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Growth rate of the ensemble-mean log wealth after `burn_in` steps.
///
/// The standard error comes from the spread of per-replica slopes and is
/// infinite for a single replica.
pub fn estimate_growth_rate(traj: &TrajectoryRecord, burn_in: usize) -> Result<RateEstimate> {
    let slopes = replica_slopes(traj, burn_in)?;
    let horizon = traj.horizon();
    let rate = (traj.mean_log_wealth[horizon] - traj.mean_log_wealth[burn_in])
        / (horizon - burn_in) as f64;
    let (_, std_error) = mean_and_std_error(&slopes);
    Ok(RateEstimate {
        rate,
        std_error,
        replicas_used: slopes.len(),
        horizon_used: horizon - burn_in,
    })
}
