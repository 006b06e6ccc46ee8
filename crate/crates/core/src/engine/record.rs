use serde::{Deserialize, Serialize};

use crate::math::logsumexp;

/// Per-step ensemble summary of a simulated run, plus each replica's path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<usize>,
    /// Replica average of `ln(W(t) / W(0))`, `W` being the group-mean wealth.
    pub mean_log_wealth: Vec<f64>,
    /// Replica-to-replica standard deviation of `ln(W(t) / W(0))`.
    pub std_log_wealth: Vec<f64>,
    pub per_replica_final: Vec<f64>,
    /// Agents (summed over replicas) holding positive wealth at each step.
    pub survivors: Vec<u64>,
    /// `ln(W(t) / W(0))` of every replica, indexed `[replica][t]`.
    pub replica_log_wealth: Vec<Vec<f64>>,
    /// Replicas whose whole group reached zero wealth.
    pub extinct_replicas: usize,
}

impl TrajectoryRecord {
    /// Reduces per-replica paths in replica-index order.
    ///
    /// All paths must have the same length; `survivors[r][t]` is the count of
    /// live agents in replica `r` at step `t`.
    pub fn from_replicas(paths: Vec<Vec<f64>>, survivors: &[Vec<u64>]) -> Self {
        assert!(!paths.is_empty(), "at least one replica is required");
        let len = paths[0].len();
        assert!(paths.iter().all(|p| p.len() == len));
        assert_eq!(paths.len(), survivors.len());
        let r = paths.len() as f64;

        let mut mean = vec![0.0; len];
        for path in &paths {
            for (m, &x) in mean.iter_mut().zip(path) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= r);

        let mut std = vec![0.0; len];
        if paths.len() > 1 {
            for path in &paths {
                for ((s, &x), &m) in std.iter_mut().zip(path).zip(&mean) {
                    *s += (x - m) * (x - m);
                }
            }
            std.iter_mut().for_each(|s| *s = (*s / (r - 1.0)).sqrt());
        }

        let mut alive = vec![0u64; len];
        for counts in survivors {
            for (a, &c) in alive.iter_mut().zip(counts) {
                *a += c;
            }
        }

        let per_replica_final: Vec<f64> = paths.iter().map(|p| p[len - 1]).collect();
        let extinct_replicas = per_replica_final
            .iter()
            .filter(|&&x| x == f64::NEG_INFINITY)
            .count();

        Self {
            times: (0..len).collect(),
            mean_log_wealth: mean,
            std_log_wealth: std,
            per_replica_final,
            survivors: alive,
            replica_log_wealth: paths,
            extinct_replicas,
        }
    }

    pub fn horizon(&self) -> usize {
        self.times.len() - 1
    }

    pub fn replicas(&self) -> usize {
        self.replica_log_wealth.len()
    }

    /// `ln` of the replica-averaged wealth at each step, i.e. the log of the
    /// plain ensemble mean rather than the mean of logs.
    pub fn ensemble_log_mean_wealth(&self) -> Vec<f64> {
        let r = (self.replicas() as f64).ln();
        let mut column = Vec::with_capacity(self.replicas());
        (0..self.times.len())
            .map(|t| {
                column.clear();
                column.extend(self.replica_log_wealth.iter().map(|p| p[t]));
                logsumexp(&column) - r
            })
            .collect()
    }
}

/// Empirical per-step growth rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub rate: f64,
    pub std_error: f64,
    pub replicas_used: usize,
    pub horizon_used: usize,
}
