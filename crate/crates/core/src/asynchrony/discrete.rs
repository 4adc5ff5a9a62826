//! Round-based asynchronous play: only scheduled agents revise actions.
//!
//! Each agent keeps an empirical distribution over its *own chosen*
//! actions, updated only in rounds where it acts (with weight `1/s` at its
//! `s`-th activation, so it is an exact running average of its choices).
//! Idle agents repeat their previous action. Active agents best-respond,
//! within the round's slack, to the opponents' empiricals as of the end of
//! the previous round.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{ActionSelector, PerturbationSchedule};
use crate::game::{
    action_values, qualifying_actions, Game, GameError, OpponentStrategy, SimplexVector,
    TIE_TOLERANCE,
};

use super::{AsyncError, DiscreteSchedule};

/// Options shared by the asynchronous runtimes.
#[derive(Debug, Clone)]
pub struct AsyncOptions {
    pub perturbation: PerturbationSchedule,
    pub selector: ActionSelector,
    pub seed: u64,
    pub initial_actions: Option<Vec<usize>>,
}

impl Default for AsyncOptions {
    fn default() -> Self {
        AsyncOptions {
            perturbation: PerturbationSchedule::Zero,
            selector: ActionSelector::default(),
            seed: 0,
            initial_actions: None,
        }
    }
}

/// One round of an asynchronous run.
#[derive(Debug, Clone)]
pub struct AsyncRow {
    pub n: usize,
    pub active: Vec<bool>,
    /// Joint action in effect this round (idle agents repeat).
    pub actions: Vec<usize>,
    /// Activation counts after this round.
    pub counts: Vec<usize>,
    /// Per-agent empiricals over their own choices, after this round.
    pub empiricals: Vec<Vec<f64>>,
    /// Slack allowed to this round's deciders.
    pub eps: f64,
}

/// Complete record of a round-based asynchronous run.
#[derive(Debug, Clone)]
pub struct AsyncTrace {
    pub seed: u64,
    pub rows: Vec<AsyncRow>,
}

impl AsyncTrace {
    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    /// The per-agent empiricals of row `n` as simplex vectors.
    pub fn empirical_profile(&self, n: usize) -> Vec<SimplexVector> {
        self.rows[n - 1]
            .empiricals
            .iter()
            .map(|q| SimplexVector::new(q.clone()).expect("empiricals stay on the simplex"))
            .collect()
    }

    pub fn final_profile(&self) -> Vec<SimplexVector> {
        self.empirical_profile(self.horizon())
    }
}

/// Runs asynchronous play under a fixed activity schedule.
pub fn async_fp_run(
    game: &Game,
    schedule: &DiscreteSchedule,
    opts: &AsyncOptions,
) -> Result<AsyncTrace, AsyncError> {
    let n_agents = game.num_players();
    if schedule.players() != n_agents {
        return Err(AsyncError::AgentCount {
            schedule_agents: schedule.players(),
            players: n_agents,
        });
    }
    opts.perturbation.validate()?;

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

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut counts = vec![1usize; n_agents];
    let mut empiricals: Vec<Vec<f64>> = (0..n_agents)
        .map(|i| {
            let mut q = vec![0.0; game.action_count(i)];
            q[actions[i]] = 1.0;
            q
        })
        .collect();

    let mut rows = Vec::with_capacity(schedule.horizon());
    rows.push(AsyncRow {
        n: 1,
        active: schedule.active(1).to_vec(),
        actions: actions.clone(),
        counts: counts.clone(),
        empiricals: empiricals.clone(),
        eps: 0.0,
    });

    for n in 2..=schedule.horizon() {
        let eps = opts.perturbation.epsilon(n - 1)?;
        let previous = empiricals.clone();
        for i in 0..n_agents {
            if !schedule.is_active(i, n) {
                continue;
            }
            let opponents: Vec<SimplexVector> = (0..n_agents)
                .filter(|&j| j != i)
                .map(|j| SimplexVector::new(previous[j].clone()).map_err(Into::into))
                .collect::<Result<_, AsyncError>>()?;
            let forecast = OpponentStrategy::Product(opponents);
            let values = action_values(game, i, &forecast)?;
            let qualifying = qualifying_actions(&values, eps + TIE_TOLERANCE);
            let a = opts.selector.choose(&qualifying, Some(actions[i]), &mut rng);
            actions[i] = a;
            counts[i] += 1;
            let step = 1.0 / counts[i] as f64;
            for (k, q) in empiricals[i].iter_mut().enumerate() {
                let target = if k == a { 1.0 } else { 0.0 };
                *q += step * (target - *q);
            }
        }
        rows.push(AsyncRow {
            n,
            active: schedule.active(n).to_vec(),
            actions: actions.clone(),
            counts: counts.clone(),
            empiricals: empiricals.clone(),
            eps,
        });
    }

    Ok(AsyncTrace { seed: opts.seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, FPTypeAlgorithm, MetricsConfig, RunOptions};
    use crate::game::presets;

    #[test]
    fn full_schedule_reproduces_the_synchronous_run() {
        let g = presets::matching_pennies();
        let schedule = DiscreteSchedule::full(2, 100).unwrap();
        let a = async_fp_run(&g, &schedule, &AsyncOptions::default()).unwrap();
        let algo = FPTypeAlgorithm::classical_fp(&g);
        let s = run(
            &g,
            &algo,
            &RunOptions { horizon: 100, metrics: MetricsConfig::none(), ..RunOptions::default() },
        )
        .unwrap();
        for (ar, sr) in a.rows.iter().zip(s.rows.iter()) {
            assert_eq!(ar.actions, sr.actions, "diverged at round {}", ar.n);
            // The synchronous state's blocks are the same running averages.
            let flat: Vec<f64> = ar.empiricals.concat();
            for (x, y) in flat.iter().zip(&sr.state) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn idle_agents_repeat_and_keep_their_empiricals() {
        let g = presets::matching_pennies();
        let schedule = DiscreteSchedule::alternating(2, 9).unwrap();
        let trace = async_fp_run(&g, &schedule, &AsyncOptions::default()).unwrap();
        for w in trace.rows.windows(2) {
            for i in 0..2 {
                if !w[1].active[i] {
                    assert_eq!(w[1].actions[i], w[0].actions[i]);
                    assert_eq!(w[1].empiricals[i], w[0].empiricals[i]);
                    assert_eq!(w[1].counts[i], w[0].counts[i]);
                }
            }
        }
        // Counts match the schedule.
        let last = trace.rows.last().unwrap();
        assert_eq!(last.counts, schedule.activity_counts());
    }

    #[test]
    fn empiricals_average_only_chosen_actions() {
        let g = presets::coordination2();
        let schedule = DiscreteSchedule::alternating(2, 7).unwrap();
        let trace = async_fp_run(&g, &schedule, &AsyncOptions::default()).unwrap();
        for agent in 0..2 {
            // Recompute the empirical from the agent's active-round choices.
            let mut chosen = Vec::new();
            for row in &trace.rows {
                if row.active[agent] {
                    chosen.push(row.actions[agent]);
                }
            }
            let mut avg = vec![0.0; 2];
            for &a in &chosen {
                avg[a] += 1.0 / chosen.len() as f64;
            }
            let last = trace.rows.last().unwrap();
            for (x, y) in avg.iter().zip(&last.empiricals[agent]) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn schedule_width_must_match_the_game() {
        let g = presets::congestion_3p();
        let schedule = DiscreteSchedule::full(2, 5).unwrap();
        let err = async_fp_run(&g, &schedule, &AsyncOptions::default()).unwrap_err();
        assert!(matches!(err, AsyncError::AgentCount { schedule_agents: 2, players: 3 }));
    }
}
