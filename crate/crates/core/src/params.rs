//! Game and ensemble parameters.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// The two-outcome multiplicative game: wealth is multiplied by `a` with
/// probability `p` and by `b` otherwise.
///
/// `a == b` is admitted (the constant game, and the `f = 0` Kelly stake),
/// everything else requires `0 <= b < a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    a: f64,
    b: f64,
    p: f64,
}

impl GameParams {
    pub fn new(a: f64, b: f64, p: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(invalid(format!(
                "win multiplier a must be finite and > 0, got {a}"
            )));
        }
        if !(b.is_finite() && b >= 0.0) {
            return Err(invalid(format!(
                "loss multiplier b must be finite and >= 0, got {b}"
            )));
        }
        if b > a {
            return Err(invalid(format!(
                "loss multiplier b = {b} exceeds win multiplier a = {a}"
            )));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!(
                "win probability p must lie in (0, 1), got {p}"
            )));
        }
        Ok(Self { a, b, p })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// One-step expected multiplier `p a + q b`.
    pub fn arithmetic_mean(&self) -> f64 {
        self.p * self.a + self.q() * self.b
    }
}

/// Kelly staking game: stake a fraction `f` of wealth, win `f d` with
/// probability `p`, lose the stake otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KellyParams {
    p: f64,
    d: f64,
    f: f64,
}

impl KellyParams {
    pub fn new(p: f64, d: f64, f: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!(
                "win probability p must lie in (0, 1), got {p}"
            )));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(invalid(format!("payout d must be finite and > 0, got {d}")));
        }
        if !(0.0..1.0).contains(&f) {
            return Err(invalid(format!(
                "staked fraction f must lie in [0, 1), got {f}"
            )));
        }
        Ok(Self { p, d, f })
    }

    /// Recovers `(p, d, f)` from a game with `b < 1 < a`: `f = 1 - b`,
    /// `d = (a - 1) / (1 - b)`.
    pub fn from_game(game: &GameParams) -> Result<Self> {
        if !(game.b() < 1.0 && game.a() > 1.0) {
            return Err(invalid(format!(
                "game (a = {}, b = {}) is not a Kelly stake: need b < 1 < a",
                game.a(),
                game.b()
            )));
        }
        let f = 1.0 - game.b();
        Self::new(game.p(), (game.a() - 1.0) / f, f)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn with_fraction(&self, f: f64) -> Result<Self> {
        Self::new(self.p, self.d, f)
    }

    /// `a = 1 + f d`, `b = 1 - f`.
    pub fn to_game(&self) -> GameParams {
        GameParams {
            a: 1.0 + self.f * self.d,
            b: 1.0 - self.f,
            p: self.p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    Synchronous,
    Asynchronous,
}

/// Size, horizon and seeding of one simulated ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n_players: usize,
    pub horizon: usize,
    pub replicas: usize,
    pub master_seed: u64,
    pub generosity: f64,
    pub update_mode: UpdateMode,
}

impl EnsembleSpec {
    /// Synchronous ensemble with full redistribution (`D = 1`).
    pub fn synchronous(
        n_players: usize,
        horizon: usize,
        replicas: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            n_players,
            horizon,
            replicas,
            master_seed,
            generosity: 1.0,
            update_mode: UpdateMode::Synchronous,
        }
    }

    pub fn asynchronous(
        n_players: usize,
        horizon: usize,
        replicas: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            update_mode: UpdateMode::Asynchronous,
            ..Self::synchronous(n_players, horizon, replicas, master_seed)
        }
    }

    pub fn with_generosity(mut self, generosity: f64) -> Self {
        self.generosity = generosity;
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_players == 0 {
            return Err(invalid("group size must be positive"));
        }
        if self.horizon == 0 {
            return Err(invalid("horizon must be positive"));
        }
        if self.replicas == 0 {
            return Err(invalid("replica count must be positive"));
        }
        if !(0.0..=1.0).contains(&self.generosity) {
            return Err(invalid(format!(
                "generosity D must lie in [0, 1], got {}",
                self.generosity
            )));
        }
        if self.update_mode == UpdateMode::Asynchronous && self.generosity != 1.0 {
            return Err(invalid(
                "asynchronous updating requires full redistribution (D = 1)",
            ));
        }
        Ok(())
    }
}
