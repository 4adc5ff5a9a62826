//! Asynchronous implementations: agents revise on their own clocks.
//!
//! Two runtimes share one options type: a round-based one driven by
//! explicit activity masks, and a continuous-time one driven by per-agent
//! wake clocks (Poisson, adaptive, or scripted). The embedded-view tools
//! re-index a round-based trace by each agent's own activations, where the
//! usual synchronous analysis applies with quantified staleness.

mod activity;
mod continuous;
mod discrete;
mod embedded;
mod report;

pub use activity::DiscreteSchedule;
pub use continuous::{ct_async_run, CtEvent, CtTrace, TimingRule};
pub use discrete::{async_fp_run, AsyncOptions, AsyncRow, AsyncTrace};
pub use embedded::{check_embedded_identities, embedded_view, EmbeddedReport, EmbeddedView};
pub use report::{synchrony_report, SynchronyReport};

use thiserror::Error;

use crate::engine::EngineError;

#[derive(Debug, Error)]
pub enum AsyncError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("activity schedule is empty")]
    EmptySchedule,
    #[error("every agent must act in round 1; agent {agent} does not")]
    InactiveStart { agent: usize },
    #[error("activity mask row {n} has {got} entries, expected {expected}")]
    MaskWidth { n: usize, expected: usize, got: usize },
    #[error("schedule covers {schedule_agents} agents but the game has {players} players")]
    AgentCount { schedule_agents: usize, players: usize },
    #[error("invalid timing: {what}")]
    BadTiming { what: String },
    #[error("agent {agent}'s first wake must be at time 0, got {t}")]
    NonzeroFirstWake { agent: usize, t: f64 },
    #[error("agent {agent}'s wake times must increase: {prev} then {next}")]
    NonMonotoneWakes { agent: usize, prev: f64, next: f64 },
    #[error("agent {agent}'s budget ({budget}) must exceed the largest base wait ({max_wait}) to keep every clock live")]
    BudgetTooSmall { agent: usize, budget: f64, max_wait: f64 },
    #[error("continuous run needs a positive finite end time, got {t_end}")]
    BadEndTime { t_end: f64 },
}

impl From<crate::game::GameError> for AsyncError {
    fn from(e: crate::game::GameError) -> Self {
        AsyncError::Engine(EngineError::Game(e))
    }
}
