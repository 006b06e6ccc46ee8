//! Monte Carlo simulation of the sharing games.
//!
//! Replicas run in parallel on the ambient rayon pool and are reduced in
//! replica-index order, so results do not depend on the thread count.

mod asynchronous;
mod census;
mod estimate;
mod generosity;
mod record;
mod sync;

pub use asynchronous::{simulate_async, simulate_async_agent_level};
pub use census::{extinction_time, survival_census, CensusRecord};
pub use estimate::{estimate_growth_rate, replica_slopes, DEFAULT_BURN_IN};
pub use generosity::{critical_generosity, generosity_sweep, CriticalGenerosity, GenerosityPoint};
pub use record::{RateEstimate, TrajectoryRecord};
pub use sync::{simulate_kelly, simulate_sync, SharingPolicy};
