//! Closed-form growth rates of the multiplicative game, with and without
//! sharing, plus the Kelly optimiser and its safe-stake boundary.
//!
//! All rates are per-step expectations of the log growth factor.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::math::binomial_expectation;
use crate::params::{GameParams, KellyParams};

/// Smallest `1 - f` the safe-boundary search will probe.
pub const MIN_EPSILON: f64 = 1e-300;

/// Default golden-section tolerance in `f`.
pub const DEFAULT_FRACTION_TOL: f64 = 1e-10;

/// One-step expected multiplier `M_a = p a + q b`.
pub fn arithmetic_mean(game: &GameParams) -> f64 {
    game.arithmetic_mean()
}

/// `ln M_g = p ln a + q ln b`, the typical growth of a lone player.
pub fn geometric_rate(game: &GameParams) -> Result<f64> {
    if game.b() == 0.0 {
        return Err(Error::CertainRuin);
    }
    Ok(game.p() * game.a().ln() + game.q() * game.b().ln())
}

/// Growth rate `r_N` of `n` players who pool and split their wealth after every step.
pub fn shared_rate(game: &GameParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("group size must be positive"));
    }
    if game.b() == 0.0 {
        // The all-lose term has positive weight and ln 0.
        return Err(Error::CertainRuin);
    }
    let (a, b) = (game.a(), game.b());
    let nf = n as f64;
    Ok(binomial_expectation(n as u64, game.p(), |k| {
        let k = k as f64;
        ((a * k + b * (nf - k)) / nf).ln()
    }))
}

/// `ln M_a`, the infinite-group limit of [`shared_rate`].
pub fn shared_rate_limit(game: &GameParams) -> f64 {
    game.arithmetic_mean().ln()
}

/// Smallest group size `N <= n_max` with `r_N > 0`.
pub fn n_critical(game: &GameParams, n_max: usize) -> Option<usize> {
    if shared_rate_limit(game) <= 0.0 {
        return None;
    }
    (1..=n_max).find(|&n| matches!(shared_rate(game, n), Ok(r) if r > 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeficitFit {
    /// Slope of `ln M_a - r_N` against `1 / (2N)`.
    pub d_hat: f64,
    /// Largest absolute residual divided by the largest deficit.
    pub max_relative_residual: f64,
}

/// Least-squares fit of `ln M_a - r_N = D / (2N)` (no intercept) over `ns`.
///
/// The residual is reported relative to the largest observed deficit.
pub fn rate_deficit_fit(game: &GameParams, ns: &[usize]) -> Result<DeficitFit> {
    if ns.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 group sizes, got {}",
            ns.len()
        )));
    }
    if ns.iter().any(|&n| n < 2) {
        return Err(invalid("deficit fit needs group sizes >= 2"));
    }
    let lo = *ns.iter().min().unwrap();
    let hi = *ns.iter().max().unwrap();
    if lo == hi {
        return Err(Error::DegenerateFit("all group sizes are identical".into()));
    }
    if hi < 10 * lo {
        return Err(Error::DegenerateFit(format!(
            "group sizes {lo}..{hi} do not span a decade"
        )));
    }
    let limit = shared_rate_limit(game);
    let mut points = Vec::with_capacity(ns.len());
    for &n in ns {
        points.push((1.0 / (2.0 * n as f64), limit - shared_rate(game, n)?));
    }
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let d_hat = sxy / sxx;
    let scale = points.iter().map(|(_, y)| y.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::DegenerateFit(
            "rate deficit is identically zero".into(),
        ));
    }
    let max_resid = points
        .iter()
        .map(|(x, y)| (y - d_hat * x).abs())
        .fold(0.0, f64::max);
    Ok(DeficitFit {
        d_hat,
        max_relative_residual: max_resid / scale,
    })
}

/// Delta-method diffusion constant `p q (a - b)^2 / M_a^2`: the large-`N`
/// limit of the slope fitted by [`rate_deficit_fit`].
pub fn deficit_diffusion(game: &GameParams) -> f64 {
    let spread = game.a() - game.b();
    let ma = game.arithmetic_mean();
    game.p() * game.q() * spread * spread / (ma * ma)
}

fn kelly_rate_raw(p: f64, d: f64, f: f64, n: usize) -> f64 {
    let nf = n as f64;
    binomial_expectation(n as u64, p, |k| {
        let k = k as f64;
        (f * (k * d - (nf - k)) / nf).ln_1p()
    })
}

/// `r_N` of the Kelly game staking `f`, evaluated from `ε = 1 - f` so that
/// stakes within `1e-300` of everything keep full precision.
fn kelly_rate_eps_raw(p: f64, d: f64, eps: f64, n: usize) -> f64 {
    let nf = n as f64;
    binomial_expectation(n as u64, p, |k| {
        if k == 0 {
            eps.ln()
        } else {
            let k = k as f64;
            ((k * (1.0 + d) + eps * (nf - k - k * d)) / nf).ln()
        }
    })
}

/// `r_N` of `n` players who each stake `kp.f()` and then pool their wealth.
pub fn kelly_rate(kp: &KellyParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("group size must be positive"));
    }
    Ok(kelly_rate_raw(kp.p(), kp.d(), kp.f(), n))
}

/// [`kelly_rate`] at stake `f = 1 - eps`.
pub fn kelly_rate_at_epsilon(p: f64, d: f64, eps: f64, n: usize) -> Result<f64> {
    KellyParams::new(p, d, 0.0)?;
    if n == 0 {
        return Err(invalid("group size must be positive"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!(
            "epsilon = 1 - f must lie in (0, 1], got {eps}"
        )));
    }
    Ok(kelly_rate_eps_raw(p, d, eps, n))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximiser of a concave function on `[lo, hi]`.
fn golden_max(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        // ties keep the left bracket so plateaus resolve to the smallest f
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Stake maximising `r_N` and the maximal rate.
///
/// `N = 1` uses the closed form `(p d - q) / d`; larger groups use a
/// golden-section search on the concave `r_N(f)`.
pub fn kelly_optimal_fraction(p: f64, d: f64, n: usize, tol: f64) -> Result<(f64, f64)> {
    KellyParams::new(p, d, 0.0)?;
    if n == 0 {
        return Err(invalid("group size must be positive"));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let q = 1.0 - p;
    let edge = p * d - q;
    if edge <= 0.0 {
        // r_N'(0) = p d - q for every N, and r_N is concave
        return Ok((0.0, 0.0));
    }
    let f_star = if n == 1 {
        edge / d
    } else {
        golden_max(0.0, 1.0, tol, |f| kelly_rate_raw(p, d, f, n))
    };
    Ok((f_star, kelly_rate_raw(p, d, f_star, n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafeRegionReport {
    pub n_players: usize,
    pub f_star: f64,
    pub r_max: f64,
    /// Stake above which `r_N < 0`; rounds to 1 once `epsilon` drops below `1e-16`.
    pub danger_boundary: f64,
    /// `1 - danger_boundary`, kept exactly.
    pub epsilon: f64,
    pub log10_epsilon: f64,
    /// Length of the dangerous stake interval `(danger_boundary, 1)`.
    pub danger_measure: f64,
    /// `1 - f` bracket: `r_N(1 - epsilon_hi) > 0 > r_N(1 - epsilon_lo)`.
    pub epsilon_lo: f64,
    pub epsilon_hi: f64,
}

/// Locates the stake beyond which pooled Kelly players shrink.
///
/// Bisects on `ln ε` between `ln(1 - f_star)` and `ln 1e-300`; `tol` is the
/// final bracket width in `ln ε`, i.e. the relative precision of `ε`.
pub fn safe_fraction_boundary(p: f64, d: f64, n: usize, tol: f64) -> Result<SafeRegionReport> {
    let (f_star, r_max) = kelly_optimal_fraction(p, d, n, DEFAULT_FRACTION_TOL)?;
    if !(r_max > 0.0) {
        return Err(Error::NoSafeRegion(format!(
            "maximal rate {r_max} is not positive for p = {p}, d = {d}, N = {n}"
        )));
    }
    let rate = |x: f64| kelly_rate_eps_raw(p, d, x.exp(), n);
    let mut hi = (1.0 - f_star).ln();
    let mut lo = MIN_EPSILON.ln();
    if rate(lo) > 0.0 {
        return Err(Error::NoRoot(format!(
            "r_N stays positive down to 1 - f = {MIN_EPSILON:e} (N = {n})"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if rate(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let epsilon = x.exp();
    Ok(SafeRegionReport {
        n_players: n,
        f_star,
        r_max,
        danger_boundary: 1.0 - epsilon,
        epsilon,
        log10_epsilon: x / std::f64::consts::LN_10,
        danger_measure: epsilon,
        epsilon_lo: lo.exp(),
        epsilon_hi: hi.exp(),
    })
}

/// Rate per unit time of `n` fully pooled players updated one at a time.
pub fn async_rate(game: &GameParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("group size must be positive"));
    }
    let nf = n as f64;
    let loss = -(1.0 - game.b()) / nf;
    if loss <= -1.0 {
        return Err(Error::Domain(
            "a single player with b = 0 loses everything on the first loss".into(),
        ));
    }
    let win = (game.a() - 1.0) / nf;
    Ok(nf * (game.p() * win.ln_1p() + game.q() * loss.ln_1p()))
}

/// `p a + q b - 1`, the infinite-group asynchronous rate.
pub fn async_rate_limit(game: &GameParams) -> f64 {
    game.arithmetic_mean() - 1.0
}
