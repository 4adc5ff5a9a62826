//! The discrete-time learning engine.
//!
//! Everything here is organized around one recursion: a state in an
//! observation space is nudged toward the observation of each newly played
//! joint action, and players pick those actions as (possibly slack)
//! best replies to forecasts derived from the state. The submodules cover
//! the moving parts: step-size and slack schedules, observation spaces,
//! algorithm presets (observation + forecast maps), tie-breaking, the run
//! loop itself, and centroid-specific equilibrium measures.

mod algorithm;
mod centroid;
mod run;
mod schedule;
mod selector;
mod space;
mod trace;

pub use algorithm::{FPTypeAlgorithm, ObservationKernel, SeparableObservation};
pub use centroid::{
    cne_gap, mce_gap, permutation_invariance_check, PermutationCheck, PERMUTATION_TOLERANCE,
};
pub use run::{
    marginals_from_state, observation_update, run, weakened_step, MetricsConfig, RunOptions,
    StepOutcome,
};
pub use schedule::{PerturbationSchedule, StepSizeSchedule};
pub use selector::ActionSelector;
pub use space::{ObservationSpace, SpaceViolation, BLOCK_SUM_TOLERANCE, ENTRY_TOLERANCE};
pub use trace::{MetricSnapshot, RunTrace, TraceRow};

use thiserror::Error;

use crate::game::GameError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("invalid schedule: {what}")]
    BadSchedule { what: String },
    #[error("custom schedule exhausted: iteration {n} requested, table has {len} entries")]
    ScheduleExhausted { n: usize, len: usize },
    #[error("state has wrong dimension: expected {expected}, got {got}")]
    StateDimension { expected: usize, got: usize },
    #[error("state left the observation space at iteration {iteration}: {detail}")]
    StateViolation { iteration: usize, detail: String },
    #[error("non-finite state component {component} at iteration {iteration}")]
    NumericAbort { iteration: usize, component: usize },
    #[error("algorithm requires an anonymous game: {reason}")]
    NotPermutationInvariant { reason: String },
    #[error("players must share one action count for centroid measures")]
    UnequalActionCounts,
}
