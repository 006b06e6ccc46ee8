//! Why ensemble averages need exponentially many realizations.
//!
//! A history with `n` wins out of `t` ends at `a^n b^(t-n)`; it beats a target
//! exactly when `n > α t`. The probability of that tail, exact and in its
//! largest-integrand Gaussian form, sets the ensemble size `R ~ 1 / Prob`
//! needed before an empirical mean can track `M_a^t`.
//!
//! The Gaussian form omits the `1 / sqrt(2π t p q)` prefactor and the
//! integral over the tail, so it is an order-of-magnitude estimate: at
//! `(2, 1/3, 1/2)` and `t = 100` it gives 0.077 against an exact 0.0105.
//! Its exponent matches the exact tail's decay rate to within a few percent.
//!
//! For `b = 0` the synchronous pool of `N` is wiped out only when all `N`
//! lose together, probability `q^N` per step (`2^-N` at `p = 1/2`), so it
//! survives `t` steps with probability `(1 - q^N)^t`; see
//! [`collapse_log_survival`]. Non-sharers die out far sooner: all of `n0`
//! are gone by `t` with probability `(1 - p^t)^n0`
//! ([`census_extinction_cdf`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{ln_binomial_pmf, logsumexp};
use crate::params::GameParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    /// `W(t) / W(0) > 1`.
    BeatOne,
    /// `W(t) / W(0) > M_a^t`.
    BeatArithmetic,
}

impl std::str::FromStr for TailMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "beat_one" => Ok(Self::BeatOne),
            "beat_arithmetic" => Ok(Self::BeatArithmetic),
            other => Err(format!(
                "unknown tail mode {other:?} (expected beat_one or beat_arithmetic)"
            )),
        }
    }
}

/// Fraction of wins a history needs to beat the target.
pub fn alpha_threshold(game: &GameParams, mode: TailMode) -> Result<f64> {
    let (a, b) = (game.a(), game.b());
    if !(b > 0.0 && b < 1.0 && a > 1.0) {
        return Err(Error::Domain(format!(
            "tail thresholds need 0 < b < 1 < a, got a = {a}, b = {b}"
        )));
    }
    Ok(match mode {
        TailMode::BeatOne => 1.0 / (1.0 - a.ln() / b.ln()),
        TailMode::BeatArithmetic => (game.arithmetic_mean() / b).ln() / (a / b).ln(),
    })
}

/// First win count strictly above `α t`.
fn first_winning_count(alpha: f64, t: u64) -> u64 {
    (alpha * t as f64).floor() as u64 + 1
}

/// `ln P(K > α t)` for `K ~ Binomial(t, p)`, summed exactly in log space.
pub fn log_growth_probability_exact(game: &GameParams, t: u64, mode: TailMode) -> Result<f64> {
    let alpha = alpha_threshold(game, mode)?;
    if t == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let start = first_winning_count(alpha, t);
    if start > t {
        return Ok(f64::NEG_INFINITY);
    }
    let (ln_p, ln_q) = (game.p().ln(), game.q().ln());
    let terms: Vec<f64> = (start..=t)
        .map(|n| ln_binomial_pmf(t, n, ln_p, ln_q))
        .collect();
    Ok(logsumexp(&terms))
}

pub fn growth_probability_exact(game: &GameParams, t: u64, mode: TailMode) -> Result<f64> {
    Ok(log_growth_probability_exact(game, t, mode)?.exp())
}

/// `-t (α - p)^2 / (2 p q)`, the log of the largest-integrand estimate.
pub fn log_growth_probability_gaussian(game: &GameParams, t: u64, mode: TailMode) -> Result<f64> {
    let alpha = alpha_threshold(game, mode)?;
    if t == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let gap = alpha - game.p();
    Ok(-(t as f64) * gap * gap / (2.0 * game.p() * game.q()))
}

pub fn growth_probability_gaussian(game: &GameParams, t: u64, mode: TailMode) -> Result<f64> {
    Ok(log_growth_probability_gaussian(game, t, mode)?.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RequiredRealizations {
    /// May be `inf` once `ln_r` exceeds ~709.
    pub r: f64,
    pub ln_r: f64,
}

pub fn required_realizations(
    game: &GameParams,
    t: u64,
    mode: TailMode,
) -> Result<RequiredRealizations> {
    let ln_r = -log_growth_probability_gaussian(game, t, mode)?;
    Ok(RequiredRealizations {
        r: ln_r.exp(),
        ln_r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub mode: TailMode,
    pub alpha: f64,
    pub t: u64,
    pub prob_exact: f64,
    pub log_prob_exact: f64,
    pub prob_gaussian: f64,
    pub log_prob_gaussian: f64,
    pub required_realizations: f64,
    pub ln_required_realizations: f64,
}

pub fn tail_report(game: &GameParams, t: u64, mode: TailMode) -> Result<TailReport> {
    let alpha = alpha_threshold(game, mode)?;
    let log_prob_exact = log_growth_probability_exact(game, t, mode)?;
    let log_prob_gaussian = log_growth_probability_gaussian(game, t, mode)?;
    let required = required_realizations(game, t, mode)?;
    Ok(TailReport {
        mode,
        alpha,
        t,
        prob_exact: log_prob_exact.exp(),
        log_prob_exact,
        prob_gaussian: log_prob_gaussian.exp(),
        log_prob_gaussian,
        required_realizations: required.r,
        ln_required_realizations: required.ln_r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContributionRow {
    pub n: u64,
    /// `ln(a^n b^(T-n))`.
    pub log_value: f64,
    /// `ln(C(T, n) p^n q^(T-n))`.
    pub log_prob: f64,
    pub log_contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub horizon: u64,
    pub rows: Vec<ContributionRow>,
    /// Mode of the win count, `floor((T + 1) p)`.
    pub argmax_prob: u64,
    pub argmax_contribution: u64,
    /// Log value of the most probable history class.
    pub typical_contribution: f64,
    /// `ln sum_n exp(log_contribution)`, equal to `T ln M_a`.
    pub log_total_contribution: f64,
    pub log_total_prob: f64,
}

/// Splits `<W(T)>` by win count into value times probability.
pub fn contribution_decomposition(game: &GameParams, horizon: u64) -> Result<Decomposition> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let (ln_a, ln_b) = (game.a().ln(), game.b().ln());
    let (ln_p, ln_q) = (game.p().ln(), game.q().ln());
    let rows: Vec<ContributionRow> = (0..=horizon)
        .map(|n| {
            let losses = horizon - n;
            // skip the 0 * ln 0 term when b = 0
            let log_value = n as f64 * ln_a
                + if losses > 0 {
                    losses as f64 * ln_b
                } else {
                    0.0
                };
            let log_prob = ln_binomial_pmf(horizon, n, ln_p, ln_q);
            ContributionRow {
                n,
                log_value,
                log_prob,
                log_contribution: log_value + log_prob,
            }
        })
        .collect();
    let argmax_prob = (((horizon + 1) as f64) * game.p()).floor() as u64;
    let argmax_prob = argmax_prob.min(horizon);
    let argmax_contribution = rows
        .iter()
        .fold(None::<&ContributionRow>, |best, row| match best {
            Some(b) if b.log_contribution >= row.log_contribution => Some(b),
            _ => Some(row),
        })
        .map(|row| row.n)
        .unwrap_or(0);
    let contributions: Vec<f64> = rows.iter().map(|r| r.log_contribution).collect();
    let probs: Vec<f64> = rows.iter().map(|r| r.log_prob).collect();
    Ok(Decomposition {
        horizon,
        typical_contribution: rows[argmax_prob as usize].log_value,
        argmax_prob,
        argmax_contribution,
        log_total_contribution: logsumexp(&contributions),
        log_total_prob: logsumexp(&probs),
        rows,
    })
}

/// `ln` of the probability that a fully pooled synchronous group of `n`
/// with `b = 0` has not collapsed after `t` steps.
pub fn collapse_log_survival(game: &GameParams, n: u32, t: u64) -> f64 {
    let all_lose = game.q().powi(n as i32);
    t as f64 * (-all_lose).ln_1p()
}

/// Mean steps before a pooled `b = 0` group of `n` collapses: `q^-n`.
pub fn expected_collapse_time(game: &GameParams, n: u32) -> f64 {
    game.q().powi(-(n as i32))
}

/// Probability that all `n0` independent `b = 0` players are ruined by step `t`.
pub fn census_extinction_cdf(game: &GameParams, n0: u64, t: u64) -> f64 {
    let alive_one = game.p().powi(t as i32);
    (n0 as f64 * (-alive_one).ln_1p()).exp()
}
