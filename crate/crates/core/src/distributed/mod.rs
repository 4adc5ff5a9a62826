//! Distributed implementations: agents learn from locally disseminated
//! estimates of the shared state instead of full joint-action feedback.

mod graph;
mod runtime;

pub use graph::{
    is_connected, metropolis_weights, ActivationModel, CommGraph, ConnectivityMonitor,
};
pub use runtime::{
    run_distributed, DisseminationProtocol, DistributedOptions, DistributedRow, DistributedTrace,
};

use thiserror::Error;

use crate::engine::EngineError;

#[derive(Debug, Error)]
pub enum DistributedError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("algorithm '{algorithm}' has no per-agent split of its observation map, which dissemination requires")]
    NotSeparable { algorithm: String },
    #[error("graph has {graph_nodes} nodes but the game has {players} players")]
    NodeCount { graph_nodes: usize, players: usize },
    #[error("invalid graph: {what}")]
    BadGraph { what: String },
    #[error("mixing weights are not doubly stochastic: row/column {row} sums to {sum}")]
    NotDoublyStochastic { row: usize, sum: f64 },
    #[error("smoothness bound violated at round {round}: agent {agent} fell {got} short, bound was {bound}")]
    BoundViolated { round: usize, agent: usize, got: f64, bound: f64 },
}

impl From<crate::game::GameError> for DistributedError {
    fn from(e: crate::game::GameError) -> Self {
        DistributedError::Engine(EngineError::Game(e))
    }
}
