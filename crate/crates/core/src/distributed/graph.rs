//! Communication graphs, edge activation models and mixing weights.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DistributedError;

/// How the edge set varies from round to round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActivationModel {
    /// Every edge is active every round.
    Static,
    /// Each edge independently fails with this probability each round.
    IidDrop { drop_probability: f64 },
    /// Exactly one uniformly chosen edge is active each round.
    Gossip,
    /// Cycles through explicit edge sets, holding each for `period` rounds.
    Switching { period: usize, topologies: Vec<Vec<(usize, usize)>> },
}

/// An undirected communication graph over the agents, plus the rule that
/// decides which edges are usable in a given round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommGraph {
    nodes: usize,
    /// Undirected edges with `i < j`, deduplicated.
    edges: Vec<(usize, usize)>,
    pub model: ActivationModel,
    /// Rounds over which the union of active edges must stay connected;
    /// monitored, not enforced.
    pub window: usize,
}

impl CommGraph {
    pub fn new(
        nodes: usize,
        edges: Vec<(usize, usize)>,
        model: ActivationModel,
    ) -> Result<Self, DistributedError> {
        if nodes < 2 {
            return Err(DistributedError::BadGraph {
                what: format!("need at least two nodes, got {nodes}"),
            });
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(DistributedError::BadGraph { what: format!("self-loop at node {a}") });
            }
            if a >= nodes || b >= nodes {
                return Err(DistributedError::BadGraph {
                    what: format!("edge ({a}, {b}) out of range for {nodes} nodes"),
                });
            }
            let e = (a.min(b), a.max(b));
            if !normalized.contains(&e) {
                normalized.push(e);
            }
        }
        if let ActivationModel::Switching { period, topologies } = &model {
            if *period == 0 {
                return Err(DistributedError::BadGraph {
                    what: "switching period must be positive".into(),
                });
            }
            if topologies.is_empty() {
                return Err(DistributedError::BadGraph {
                    what: "switching model needs at least one topology".into(),
                });
            }
            for (k, topo) in topologies.iter().enumerate() {
                for &(a, b) in topo {
                    let e = (a.min(b), a.max(b));
                    if !normalized.contains(&e) {
                        return Err(DistributedError::BadGraph {
                            what: format!(
                                "topology {k} uses edge ({a}, {b}) absent from the base graph"
                            ),
                        });
                    }
                }
            }
        }
        Ok(CommGraph { nodes, edges: normalized, model, window: 1 })
    }

    pub fn ring(nodes: usize) -> Result<Self, DistributedError> {
        let mut edges: Vec<(usize, usize)> = (0..nodes.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if nodes > 2 {
            edges.push((0, nodes - 1));
        }
        CommGraph::new(nodes, edges, ActivationModel::Static)
    }

    pub fn path(nodes: usize) -> Result<Self, DistributedError> {
        let edges = (0..nodes.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        CommGraph::new(nodes, edges, ActivationModel::Static)
    }

    pub fn complete(nodes: usize) -> Result<Self, DistributedError> {
        let mut edges = Vec::new();
        for i in 0..nodes {
            for j in (i + 1)..nodes {
                edges.push((i, j));
            }
        }
        CommGraph::new(nodes, edges, ActivationModel::Static)
    }

    pub fn with_model(mut self, model: ActivationModel) -> Result<Self, DistributedError> {
        // Revalidate switching topologies against the existing edge set.
        CommGraph::new(self.nodes, self.edges.clone(), model.clone())?;
        self.model = model;
        Ok(self)
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window.max(1);
        self
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges usable in `round` (1-based). Random models draw from `rng`.
    pub fn active_edges<R: Rng>(&self, round: usize, rng: &mut R) -> Vec<(usize, usize)> {
        debug_assert!(round >= 1);
        match &self.model {
            ActivationModel::Static => self.edges.clone(),
            ActivationModel::IidDrop { drop_probability } => self
                .edges
                .iter()
                .copied()
                .filter(|_| rng.random_range(0.0..1.0) >= *drop_probability)
                .collect(),
            ActivationModel::Gossip => {
                if self.edges.is_empty() {
                    Vec::new()
                } else {
                    vec![self.edges[rng.random_range(0..self.edges.len())]]
                }
            }
            ActivationModel::Switching { period, topologies } => {
                let slot = ((round - 1) / period) % topologies.len();
                topologies[slot]
                    .iter()
                    .map(|&(a, b)| (a.min(b), a.max(b)))
                    .collect()
            }
        }
    }
}

/// Degree-based mixing matrix on the active edges: off-diagonal weight
/// `1 / (1 + max(deg_i, deg_j))` per edge, diagonal absorbing the rest.
/// Symmetric and row-stochastic by construction; both are still verified
/// to `1e-9` before use.
pub fn metropolis_weights(
    nodes: usize,
    active: &[(usize, usize)],
) -> Result<Vec<Vec<f64>>, DistributedError> {
    let mut degree = vec![0usize; nodes];
    for &(a, b) in active {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut w = vec![vec![0.0; nodes]; nodes];
    for &(a, b) in active {
        let weight = 1.0 / (1.0 + degree[a].max(degree[b]) as f64);
        w[a][b] = weight;
        w[b][a] = weight;
    }
    for i in 0..nodes {
        let off: f64 = w[i].iter().sum();
        w[i][i] = 1.0 - off;
    }
    for (i, row) in w.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || row.iter().any(|v| *v < -1e-9) {
            return Err(DistributedError::NotDoublyStochastic { row: i, sum });
        }
        let col: f64 = w.iter().map(|r| r[i]).sum();
        if (col - 1.0).abs() > 1e-9 {
            return Err(DistributedError::NotDoublyStochastic { row: i, sum: col });
        }
    }
    Ok(w)
}

/// True when `edges` connect all `nodes`.
pub fn is_connected(nodes: usize, edges: &[(usize, usize)]) -> bool {
    if nodes == 0 {
        return true;
    }
    let mut adjacency = vec![Vec::new(); nodes];
    for &(a, b) in edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let mut seen = vec![false; nodes];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &u in &adjacency[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    count == nodes
}

/// Sliding check that the union of active edges over each `window`
/// consecutive rounds keeps the graph connected. Information cannot reach
/// every agent without that; violations are recorded, not fatal.
#[derive(Debug)]
pub struct ConnectivityMonitor {
    nodes: usize,
    window: usize,
    history: VecDeque<Vec<(usize, usize)>>,
    /// Last round of each violating window.
    pub violations: Vec<usize>,
}

impl ConnectivityMonitor {
    pub fn new(nodes: usize, window: usize) -> Self {
        ConnectivityMonitor {
            nodes,
            window: window.max(1),
            history: VecDeque::new(),
            violations: Vec::new(),
        }
    }

    /// Records the active edges of `round` and checks the window ending
    /// there once enough rounds have accumulated.
    pub fn record(&mut self, round: usize, active: &[(usize, usize)]) {
        self.history.push_back(active.to_vec());
        if self.history.len() > self.window {
            self.history.pop_front();
        }
        if self.history.len() == self.window {
            let union: Vec<(usize, usize)> =
                self.history.iter().flatten().copied().collect();
            if !is_connected(self.nodes, &union) {
                self.violations.push(round);
            }
        }
    }
}
