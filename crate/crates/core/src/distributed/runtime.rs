//! Learning with estimates disseminated over a communication graph.
//!
//! Each agent keeps its own estimate of the shared state and never sees the
//! full joint action: a round mixes neighboring estimates with
//! degree-based weights, then folds in fresh observations where available.
//! Writing agent `j`'s part of agent `i`'s mixed estimate as
//! `share_j(M^i)`, the update is
//!
//! ```text
//! M^i   = sum_j W_ij * zhat^j                  (mix over active edges)
//! ghat^i_j = contribution(j, sigma_j)  if i observed j this round
//!          = share_j(M^i)              otherwise
//! zhat^i <- (1 - gamma) * M^i + gamma * sum_j ghat^i_j
//! ```
//!
//! Both terms stay in the observation space, so estimates never need
//! re-projection. On a static complete graph every agent observes everyone,
//! the estimates coincide, and the update collapses to the centralized
//! recursion exactly. The alternative gossip protocol skips the global mix:
//! agents refresh only their own contribution each round and a single
//! random edge averages its two estimates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{
    observation_update, ActionSelector, FPTypeAlgorithm, PerturbationSchedule,
};
use crate::game::{
    action_values, qualifying_actions, Game, GameError, OpponentStrategy, TIE_TOLERANCE,
};

use super::{metropolis_weights, CommGraph, ConnectivityMonitor, DistributedError};

/// How estimates travel between agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisseminationProtocol {
    /// Metropolis mixing over all active edges every round, then a fresh
    /// observation injection.
    RunningConsensus,
    /// Own-contribution refresh plus pairwise averaging across the round's
    /// active edges (typically one, under the gossip activation model).
    AsyncGossip,
}

/// Options for a distributed run.
#[derive(Debug, Clone)]
pub struct DistributedOptions {
    /// Number of rounds; round 1 plays the initial actions.
    pub horizon: usize,
    pub perturbation: PerturbationSchedule,
    pub selector: ActionSelector,
    pub seed: u64,
    pub initial_actions: Option<Vec<usize>>,
    /// Verify each round that no agent's realized shortfall (against a
    /// best reply to the true state) exceeds the payoff-smoothness bound
    /// implied by its estimate error. Costs one extra evaluation per agent
    /// per round.
    pub check_bounds: bool,
}

impl Default for DistributedOptions {
    fn default() -> Self {
        DistributedOptions {
            horizon: 1000,
            perturbation: PerturbationSchedule::Zero,
            selector: ActionSelector::default(),
            seed: 0,
            initial_actions: None,
            check_bounds: false,
        }
    }
}

/// One round of a distributed run.
#[derive(Debug, Clone)]
pub struct DistributedRow {
    pub n: usize,
    pub actions: Vec<usize>,
    /// State of the centralized recursion fed with the same actions.
    pub true_state: Vec<f64>,
    /// Sup-norm distance of each agent's estimate from `true_state`.
    pub est_errors: Vec<f64>,
}

/// Complete record of a distributed run.
#[derive(Debug, Clone)]
pub struct DistributedTrace {
    pub algorithm: String,
    pub protocol: DisseminationProtocol,
    pub seed: u64,
    pub rows: Vec<DistributedRow>,
    pub final_estimates: Vec<Vec<f64>>,
    /// Largest estimate error over all agents and rounds.
    pub max_est_error: f64,
    /// Rounds whose trailing activation window was disconnected.
    pub connectivity_violations: Vec<usize>,
}

impl DistributedTrace {
    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    pub fn final_true_state(&self) -> &[f64] {
        &self.rows.last().expect("at least one round").true_state
    }

    /// Worst agent error per round.
    pub fn error_series(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.est_errors.iter().cloned().fold(0.0, f64::max))
            .collect()
    }
}

fn derived_seed(seed: u64, tag: u64) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for v in [seed, tag] {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Runs the dynamic with per-agent estimates over `graph`.
pub fn run_distributed(
    game: &Game,
    algo: &FPTypeAlgorithm,
    graph: &CommGraph,
    protocol: DisseminationProtocol,
    opts: &DistributedOptions,
) -> Result<DistributedTrace, DistributedError> {
    let n_agents = game.num_players();
    if graph.nodes() != n_agents {
        return Err(DistributedError::NodeCount {
            graph_nodes: graph.nodes(),
            players: n_agents,
        });
    }
    let separable = algo
        .separable()
        .ok_or_else(|| DistributedError::NotSeparable { algorithm: algo.name().to_string() })?;
    if opts.horizon < 1 {
        return Err(DistributedError::Engine(crate::engine::EngineError::BadSchedule {
            what: "horizon must be at least 1".into(),
        }));
    }
    algo.schedule.validate()?;
    opts.perturbation.validate()?;

    let sigma1 = match &opts.initial_actions {
        Some(actions) => {
            if actions.len() != n_agents {
                return Err(DistributedError::Engine(
                    GameError::OpponentArity { expected: n_agents, got: actions.len() }.into(),
                ));
            }
            for (i, &a) in actions.iter().enumerate() {
                if a >= game.action_count(i) {
                    return Err(DistributedError::Engine(
                        GameError::ActionIndex {
                            player: i,
                            action: a,
                            actions: game.action_count(i),
                        }
                        .into(),
                    ));
                }
            }
            actions.clone()
        }
        None => vec![0; n_agents],
    };

    let dim = algo.space().dimension();
    let uniform = algo.space().uniform_point();
    let mut activation_rng = ChaCha8Rng::seed_from_u64(derived_seed(opts.seed, u64::MAX));
    let mut agent_rngs: Vec<ChaCha8Rng> = (0..n_agents)
        .map(|i| ChaCha8Rng::seed_from_u64(derived_seed(opts.seed, i as u64)))
        .collect();
    let mut monitor = ConnectivityMonitor::new(n_agents, graph.window);

    // Round 1: play the seed actions and exchange them over the round's
    // active edges; unobserved agents enter as their share of the uniform
    // point, keeping the estimate in the space.
    let active = graph.active_edges(1, &mut activation_rng);
    monitor.record(1, &active);
    let mut actions = sigma1;
    let mut true_state = observe_actions(algo, game, &actions)?;
    let mut estimates: Vec<Vec<f64>> = (0..n_agents)
        .map(|i| {
            let mut z = vec![0.0; dim];
            for j in 0..n_agents {
                let piece = if i == j || active.contains(&key(i, j)) {
                    separable.contribution(j, actions[j])
                } else {
                    separable.share(j, &uniform)
                };
                add_into(&mut z, &piece);
            }
            z
        })
        .collect();

    let mut trace = DistributedTrace {
        algorithm: algo.name().to_string(),
        protocol,
        seed: opts.seed,
        rows: Vec::with_capacity(opts.horizon),
        final_estimates: Vec::new(),
        max_est_error: 0.0,
        connectivity_violations: Vec::new(),
    };
    push_row(&mut trace, 1, &actions, &true_state, &estimates);

    for n in 1..opts.horizon {
        let gamma = algo.schedule.gamma(n)?;
        let eps = opts.perturbation.epsilon(n)?;

        // Decisions: each agent best-responds to its own estimate.
        let mut next_actions = vec![0usize; n_agents];
        let mut shortfalls = vec![0.0; n_agents];
        for i in 0..n_agents {
            let forecast = algo.forecast(i, &estimates[i], game)?;
            let values = action_values(game, i, &forecast)?;
            let qualifying = qualifying_actions(&values, eps + TIE_TOLERANCE);
            let a = opts.selector.choose(&qualifying, Some(actions[i]), &mut agent_rngs[i]);
            next_actions[i] = a;
            if opts.check_bounds {
                let true_values =
                    action_values(game, i, &algo.forecast(i, &true_state, game)?)?;
                let best = true_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                shortfalls[i] = best - true_values[a];
            }
        }

        if opts.check_bounds {
            check_smoothness_bound(
                game, algo, &estimates, &true_state, &shortfalls, eps, n + 1,
            )?;
        }

        // Communication for the new round.
        let active = graph.active_edges(n + 1, &mut activation_rng);
        monitor.record(n + 1, &active);

        estimates = match protocol {
            DisseminationProtocol::RunningConsensus => {
                let w = metropolis_weights(n_agents, &active)?;
                (0..n_agents)
                    .map(|i| {
                        let mut mixed = vec![0.0; dim];
                        for (j, est) in estimates.iter().enumerate() {
                            if w[i][j] != 0.0 {
                                for (m, v) in mixed.iter_mut().zip(est) {
                                    *m += w[i][j] * v;
                                }
                            }
                        }
                        let mut fresh = vec![0.0; dim];
                        for j in 0..n_agents {
                            let piece = if i == j || active.contains(&key(i, j)) {
                                separable.contribution(j, next_actions[j])
                            } else {
                                separable.share(j, &mixed)
                            };
                            add_into(&mut fresh, &piece);
                        }
                        observation_update(&mixed, &fresh, gamma)
                    })
                    .collect()
            }
            DisseminationProtocol::AsyncGossip => {
                let mut next: Vec<Vec<f64>> = estimates
                    .iter()
                    .enumerate()
                    .map(|(i, est)| {
                        let mut fresh = separable.contribution(i, next_actions[i]);
                        for j in 0..n_agents {
                            if j != i {
                                add_into(&mut fresh, &separable.share(j, est));
                            }
                        }
                        observation_update(est, &fresh, gamma)
                    })
                    .collect();
                for &(a, b) in &active {
                    for k in 0..dim {
                        let avg = 0.5 * (next[a][k] + next[b][k]);
                        next[a][k] = avg;
                        next[b][k] = avg;
                    }
                }
                next
            }
        };

        let target = observe_actions(algo, game, &next_actions)?;
        true_state = observation_update(&true_state, &target, gamma);
        actions = next_actions;
        push_row(&mut trace, n + 1, &actions, &true_state, &estimates);
    }

    trace.final_estimates = estimates;
    trace.connectivity_violations = monitor.violations;
    Ok(trace)
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn add_into(acc: &mut [f64], piece: &[f64]) {
    for (a, p) in acc.iter_mut().zip(piece) {
        *a += p;
    }
}

fn observe_actions(
    algo: &FPTypeAlgorithm,
    game: &Game,
    actions: &[usize],
) -> Result<Vec<f64>, DistributedError> {
    Ok(algo.observe_pure(actions, game)?)
}

fn push_row(
    trace: &mut DistributedTrace,
    n: usize,
    actions: &[usize],
    true_state: &[f64],
    estimates: &[Vec<f64>],
) {
    let est_errors: Vec<f64> = estimates
        .iter()
        .map(|est| {
            est.iter()
                .zip(true_state)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        })
        .collect();
    for &e in &est_errors {
        trace.max_est_error = trace.max_est_error.max(e);
    }
    trace.rows.push(DistributedRow {
        n,
        actions: actions.to_vec(),
        true_state: true_state.to_vec(),
        est_errors,
    });
}

/// Payoff smoothness turns estimate error into a suboptimality guarantee:
/// an action within `eps` of optimal against the forecast from the
/// estimate is within `eps + 2 * max|u| * sum_j ||f(zhat)_j - f(z)_j||_1`
/// of optimal against the forecast from the true state.
fn check_smoothness_bound(
    game: &Game,
    algo: &FPTypeAlgorithm,
    estimates: &[Vec<f64>],
    true_state: &[f64],
    shortfalls: &[f64],
    eps: f64,
    round: usize,
) -> Result<(), DistributedError> {
    for (i, est) in estimates.iter().enumerate() {
        let est_forecast = forecast_blocks(algo, game, i, est)?;
        let true_forecast = forecast_blocks(algo, game, i, true_state)?;
        let l1_sum: f64 = est_forecast
            .iter()
            .zip(&true_forecast)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .sum();
        let bound = eps + 2.0 * game.max_abs_utility(i) * l1_sum + 1e-9;
        if shortfalls[i] > bound {
            return Err(DistributedError::BoundViolated {
                round,
                agent: i,
                got: shortfalls[i],
                bound,
            });
        }
    }
    Ok(())
}

fn forecast_blocks(
    algo: &FPTypeAlgorithm,
    game: &Game,
    player: usize,
    z: &[f64],
) -> Result<Vec<Vec<f64>>, DistributedError> {
    match algo.forecast(player, z, game)? {
        OpponentStrategy::Product(ps) => Ok(ps.into_iter().map(|p| p.weights().to_vec()).collect()),
        OpponentStrategy::Correlated(c) => Ok(vec![c.weights().to_vec()]),
    }
}
