//! Growth rates of multiplicative games with wealth sharing.
//!
//! Players repeatedly multiply their wealth by `a` (probability `p`) or `b`.
//! A lone player grows at the geometric rate `p ln a + q ln b`; a group that
//! pools its wealth approaches `ln(p a + q b)`. This crate evaluates those
//! rates exactly ([`analytics`], [`tails`]) and checks them against a
//! deterministic parallel simulator ([`engine`]).

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod engine;
pub mod error;
pub mod math;
pub mod params;
pub mod seed;
pub mod tails;

pub use error::{Error, Result};
pub use params::{EnsembleSpec, GameParams, KellyParams, UpdateMode};
