//! Continuous-time asynchronous play driven by per-agent wake clocks.
//!
//! Every agent wakes at time 0 and plays its initial action; afterwards it
//! revises whenever its clock fires. Agents waking at exactly the same
//! instant all see the state as it was just before that instant (the left
//! limit) and are then applied in ascending agent order, so simultaneous
//! wakes cannot observe each other. Three clock rules are supported:
//!
//! - independent exponential waits (a Poisson clock of rate `lambda`);
//! - explicit wake-time tables;
//! - adaptive clocks: agent `i` checks every `base_waits[i]` seconds and
//!   actually wakes only once the smallest activation count in the system
//!   is within `budgets[i]` of its own, so fast agents throttle themselves
//!   instead of racing ahead. The smallest-count agent always passes its
//!   own check, which rules out deadlock, and activation counts stay
//!   within roughly twice the largest budget of one another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{
    action_values, qualifying_actions, Game, GameError, OpponentStrategy, SimplexVector,
    TIE_TOLERANCE,
};

use super::{AsyncError, AsyncOptions};

/// How each agent's wake times are generated.
#[derive(Debug, Clone)]
pub enum TimingRule {
    /// Independent exponential waits with rate `lambda` (mean `1/lambda`).
    Poisson { lambda: f64 },
    /// Agent `i` checks every `base_waits[i]` and wakes when the global
    /// minimum count has caught up to within `budgets[i]` of its own.
    Adaptive { base_waits: Vec<f64>, budgets: Vec<f64> },
    /// Explicit wake times per agent; each list starts at 0 and increases.
    Schedule { wake_times: Vec<Vec<f64>> },
}

/// One wake of one agent.
#[derive(Debug, Clone)]
pub struct CtEvent {
    pub t: f64,
    pub agent: usize,
    pub action: usize,
    /// The agent's activation count after this wake.
    pub count: usize,
}

/// Record of a continuous-time run.
#[derive(Debug, Clone)]
pub struct CtTrace {
    pub seed: u64,
    pub t_end: f64,
    pub events: Vec<CtEvent>,
    /// Final activation counts.
    pub counts: Vec<usize>,
    /// Final per-agent empiricals over chosen actions.
    pub empiricals: Vec<Vec<f64>>,
    /// Last action of each agent.
    pub final_actions: Vec<usize>,
    /// Largest spread `max_i N_i - min_i N_i` seen after any instant.
    pub max_count_gap: usize,
}

impl CtTrace {
    pub fn empirical_profile(&self) -> Vec<SimplexVector> {
        self.empiricals
            .iter()
            .map(|q| SimplexVector::new(q.clone()).expect("empiricals stay on the simplex"))
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

/// Runs continuous-time asynchronous play until `t_end`.
pub fn ct_async_run(
    game: &Game,
    rule: &TimingRule,
    t_end: f64,
    opts: &AsyncOptions,
) -> Result<CtTrace, AsyncError> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(AsyncError::BadEndTime { t_end });
    }
    let n_agents = game.num_players();
    opts.perturbation.validate()?;
    validate_rule(rule, n_agents)?;

    let mut actions = match &opts.initial_actions {
        Some(a) => {
            if a.len() != n_agents {
                return Err(AsyncError::Engine(
                    GameError::OpponentArity { expected: n_agents, got: a.len() }.into(),
                ));
            }
            for (i, &ai) in a.iter().enumerate() {
                if ai >= game.action_count(i) {
                    return Err(AsyncError::Engine(
                        GameError::ActionIndex {
                            player: i,
                            action: ai,
                            actions: game.action_count(i),
                        }
                        .into(),
                    ));
                }
            }
            a.clone()
        }
        None => vec![0; n_agents],
    };

    let mut clock_rngs: Vec<ChaCha8Rng> = (0..n_agents)
        .map(|i| ChaCha8Rng::seed_from_u64(derived_seed(opts.seed, i as u64)))
        .collect();
    let mut choice_rng = ChaCha8Rng::seed_from_u64(derived_seed(opts.seed, u64::MAX));

    let mut counts = vec![0usize; n_agents];
    let mut empiricals: Vec<Vec<f64>> =
        (0..n_agents).map(|i| vec![0.0; game.action_count(i)]).collect();
    // Everyone wakes at time zero.
    let mut next_time: Vec<Option<f64>> = vec![Some(0.0); n_agents];
    let mut schedule_pos = vec![1usize; n_agents];

    let mut trace = CtTrace {
        seed: opts.seed,
        t_end,
        events: Vec::new(),
        counts: Vec::new(),
        empiricals: Vec::new(),
        final_actions: Vec::new(),
        max_count_gap: 0,
    };

    loop {
        let t = match next_time
            .iter()
            .filter_map(|x| *x)
            .min_by(|a, b| a.partial_cmp(b).expect("wake times are finite"))
        {
            Some(t) if t <= t_end => t,
            _ => break,
        };
        let group: Vec<usize> =
            (0..n_agents).filter(|&i| next_time[i] == Some(t)).collect();

        // Left limits: simultaneous wakes see neither each other's choices
        // nor each other's count increments.
        let snapshot_counts = counts.clone();
        let snapshot_empiricals = empiricals.clone();
        let min_count = *snapshot_counts.iter().min().expect("at least one agent");

        for &i in &group {
            let waking = match rule {
                TimingRule::Adaptive { budgets, .. } => {
                    counts[i] == 0
                        || (min_count as f64) >= counts[i] as f64 - budgets[i]
                }
                _ => true,
            };
            if waking {
                if counts[i] > 0 {
                    let eps = opts.perturbation.epsilon(counts[i])?;
                    let opponents: Vec<SimplexVector> = (0..n_agents)
                        .filter(|&j| j != i)
                        .map(|j| {
                            SimplexVector::new(snapshot_empiricals[j].clone())
                                .map_err(Into::into)
                        })
                        .collect::<Result<_, AsyncError>>()?;
                    let values =
                        action_values(game, i, &OpponentStrategy::Product(opponents))?;
                    let qualifying = qualifying_actions(&values, eps + TIE_TOLERANCE);
                    actions[i] =
                        opts.selector.choose(&qualifying, Some(actions[i]), &mut choice_rng);
                }
                counts[i] += 1;
                let step = 1.0 / counts[i] as f64;
                for (k, q) in empiricals[i].iter_mut().enumerate() {
                    let target = if k == actions[i] { 1.0 } else { 0.0 };
                    *q += step * (target - *q);
                }
                trace.events.push(CtEvent { t, agent: i, action: actions[i], count: counts[i] });
            }
            next_time[i] = match rule {
                TimingRule::Poisson { lambda } => {
                    let u: f64 = clock_rngs[i].random_range(0.0..1.0);
                    Some(t - (1.0 - u).ln() / lambda)
                }
                TimingRule::Adaptive { base_waits, .. } => Some(t + base_waits[i]),
                TimingRule::Schedule { wake_times } => {
                    let pos = schedule_pos[i];
                    schedule_pos[i] += 1;
                    wake_times[i].get(pos).copied()
                }
            };
        }

        let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
        trace.max_count_gap = trace.max_count_gap.max(spread);
    }

    trace.counts = counts;
    trace.empiricals = empiricals;
    trace.final_actions = actions;
    Ok(trace)
}

fn validate_rule(rule: &TimingRule, n_agents: usize) -> Result<(), AsyncError> {
    match rule {
        TimingRule::Poisson { lambda } => {
            if !(*lambda > 0.0) || !lambda.is_finite() {
                return Err(AsyncError::BadTiming {
                    what: format!("Poisson rate must be positive and finite, got {lambda}"),
                });
            }
        }
        TimingRule::Adaptive { base_waits, budgets } => {
            if base_waits.len() != n_agents || budgets.len() != n_agents {
                return Err(AsyncError::BadTiming {
                    what: format!(
                        "need one base wait and one budget per agent ({n_agents}), got {} and {}",
                        base_waits.len(),
                        budgets.len()
                    ),
                });
            }
            if base_waits.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
                return Err(AsyncError::BadTiming {
                    what: "base waits must be positive and finite".into(),
                });
            }
            let max_wait = base_waits.iter().cloned().fold(0.0f64, f64::max);
            for (agent, &b) in budgets.iter().enumerate() {
                if !b.is_finite() || b <= max_wait {
                    return Err(AsyncError::BudgetTooSmall { agent, budget: b, max_wait });
                }
            }
        }
        TimingRule::Schedule { wake_times } => {
            if wake_times.len() != n_agents {
                return Err(AsyncError::BadTiming {
                    what: format!(
                        "need one wake list per agent ({n_agents}), got {}",
                        wake_times.len()
                    ),
                });
            }
            for (agent, list) in wake_times.iter().enumerate() {
                match list.first() {
                    None => {
                        return Err(AsyncError::BadTiming {
                            what: format!("agent {agent} has no wake times"),
                        })
                    }
                    Some(&t0) if t0 != 0.0 => {
                        return Err(AsyncError::NonzeroFirstWake { agent, t: t0 })
                    }
                    _ => {}
                }
                for w in list.windows(2) {
                    if !(w[1] > w[0]) || !w[1].is_finite() {
                        return Err(AsyncError::NonMonotoneWakes {
                            agent,
                            prev: w[0],
                            next: w[1],
                        });
                    }
                }
            }
        }
    }
    Ok(())
}
