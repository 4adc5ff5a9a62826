//! The per-agent embedded view of an asynchronous run.
//!
//! Skipping an agent's idle rounds leaves its activation subsequence: the
//! rounds `tau_i(s)` where it acted, the actions it chose there, and its
//! empirical after each. On that subsequence the agent looks exactly like
//! a synchronous learner answering slightly stale opponent empiricals, and
//! the staleness is bounded by how far the agents' activation counts have
//! drifted apart. [`check_embedded_identities`] verifies all three facts
//! on a recorded trace:
//!
//! - every embedded choice is within the round's slack of a best reply to
//!   the opponents' empiricals it actually saw;
//! - an opponent's empirical seen mid-stream differs from its embedded
//!   value by at most `sqrt(2) |N_j - s| / min(N_j, s)` in L2, because
//!   both are running averages of the same choice sequence at different
//!   counts;
//! - consecutive embedded empiricals move by at most `sqrt(2) / (s + 1)`.

use crate::game::{action_values, Game, OpponentStrategy, SimplexVector, TIE_TOLERANCE};

use super::{AsyncError, AsyncTrace};

/// An agent's activation subsequence.
#[derive(Debug, Clone)]
pub struct EmbeddedView {
    pub agent: usize,
    /// `rounds[s - 1]` is the round of the agent's `s`-th activation.
    pub rounds: Vec<usize>,
    /// Action chosen at each activation.
    pub actions: Vec<usize>,
    /// The agent's empirical right after each activation.
    pub empiricals: Vec<Vec<f64>>,
}

pub fn embedded_view(trace: &AsyncTrace, agent: usize) -> EmbeddedView {
    let mut rounds = Vec::new();
    let mut actions = Vec::new();
    let mut empiricals = Vec::new();
    for row in &trace.rows {
        if row.active[agent] {
            rounds.push(row.n);
            actions.push(row.actions[agent]);
            empiricals.push(row.empiricals[agent].clone());
        }
    }
    EmbeddedView { agent, rounds, actions, empiricals }
}

/// Worst-case margins found by [`check_embedded_identities`]; all three
/// are `<= 0` (up to floating-point noise) on a correct trace.
#[derive(Debug, Clone)]
pub struct EmbeddedReport {
    /// Max over embedded choices of (shortfall - allowed slack).
    pub max_br_excess: f64,
    /// Max over (observer, opponent, step) of (L2 staleness - bound).
    pub max_staleness_excess: f64,
    /// Max over (agent, step) of (L2 empirical move - sqrt(2)/(s+1)).
    pub max_drift_excess: f64,
}

impl EmbeddedReport {
    pub fn ok(&self) -> bool {
        let tol = 1e-9;
        self.max_br_excess <= tol
            && self.max_staleness_excess <= tol
            && self.max_drift_excess <= tol
    }
}

pub fn check_embedded_identities(
    game: &Game,
    trace: &AsyncTrace,
) -> Result<EmbeddedReport, AsyncError> {
    let n_agents = game.num_players();
    let views: Vec<EmbeddedView> = (0..n_agents).map(|i| embedded_view(trace, i)).collect();
    let mut report = EmbeddedReport {
        max_br_excess: f64::NEG_INFINITY,
        max_staleness_excess: f64::NEG_INFINITY,
        max_drift_excess: f64::NEG_INFINITY,
    };

    for (i, view) in views.iter().enumerate() {
        // Best-reply identity: activation s >= 2 of agent i happened at
        // round m and answered the opponents' empiricals after round m - 1.
        for (s_idx, &m) in view.rounds.iter().enumerate().skip(1) {
            let before = &trace.rows[m - 2];
            let opponents: Vec<SimplexVector> = (0..n_agents)
                .filter(|&j| j != i)
                .map(|j| SimplexVector::new(before.empiricals[j].clone()).map_err(Into::into))
                .collect::<Result<_, AsyncError>>()?;
            let values = action_values(game, i, &OpponentStrategy::Product(opponents))?;
            let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let shortfall = best - values[view.actions[s_idx]];
            let allowed = trace.rows[m - 1].eps + TIE_TOLERANCE;
            report.max_br_excess = report.max_br_excess.max(shortfall - allowed);
        }

        // Staleness: the empirical of j that i sees at its s-th activation
        // versus j's own s-th embedded empirical.
        for (s_idx, &m) in view.rounds.iter().enumerate() {
            let s = s_idx + 1;
            let row = &trace.rows[m - 1];
            for (j, other) in views.iter().enumerate() {
                if j == i || other.empiricals.len() < s {
                    continue;
                }
                let seen = &row.empiricals[j];
                let embedded = &other.empiricals[s_idx];
                let lhs = l2_distance(seen, embedded);
                let nj = row.counts[j];
                let bound = if nj == s {
                    0.0
                } else {
                    std::f64::consts::SQRT_2 * (nj.abs_diff(s) as f64) / (nj.min(s) as f64)
                };
                report.max_staleness_excess = report.max_staleness_excess.max(lhs - bound);
            }
        }

        // Drift of the embedded empirical sequence.
        for (s_idx, pair) in view.empiricals.windows(2).enumerate() {
            let lhs = l2_distance(&pair[0], &pair[1]);
            let bound = std::f64::consts::SQRT_2 / (s_idx as f64 + 2.0);
            report.max_drift_excess = report.max_drift_excess.max(lhs - bound);
        }
    }
    Ok(report)
}

fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asynchrony::{async_fp_run, AsyncOptions, DiscreteSchedule};
    use crate::engine::PerturbationSchedule;
    use crate::game::presets;

    #[test]
    fn view_collects_only_active_rounds() {
        let g = presets::matching_pennies();
        let schedule = DiscreteSchedule::alternating(2, 8).unwrap();
        let trace = async_fp_run(&g, &schedule, &AsyncOptions::default()).unwrap();
        let v0 = embedded_view(&trace, 0);
        assert_eq!(v0.rounds, vec![1, 2, 4, 6, 8]);
        let v1 = embedded_view(&trace, 1);
        assert_eq!(v1.rounds, vec![1, 3, 5, 7]);
        assert_eq!(v0.actions.len(), v0.empiricals.len());
    }

    #[test]
    fn identities_hold_on_alternating_play() {
        let g = presets::matching_pennies();
        let schedule = DiscreteSchedule::alternating(2, 400).unwrap();
        let trace = async_fp_run(&g, &schedule, &AsyncOptions::default()).unwrap();
        let report = check_embedded_identities(&g, &trace).unwrap();
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn identities_hold_under_random_activity_and_slack() {
        let g = presets::congestion_3p();
        let schedule = DiscreteSchedule::bernoulli(3, 300, 0.6, 4).unwrap();
        let opts = AsyncOptions {
            perturbation: PerturbationSchedule::Power { c: 0.3, b: 0.6 },
            seed: 11,
            ..AsyncOptions::default()
        };
        let trace = async_fp_run(&g, &schedule, &opts).unwrap();
        let report = check_embedded_identities(&g, &trace).unwrap();
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn a_doctored_trace_fails_the_best_reply_check() {
        let g = presets::matching_pennies();
        let schedule = DiscreteSchedule::full(2, 30).unwrap();
        let mut trace = async_fp_run(&g, &schedule, &AsyncOptions::default()).unwrap();
        // Flip one recorded choice to something that was not optimal.
        let row = 20;
        let old = trace.rows[row].actions[0];
        trace.rows[row].actions[0] = 1 - old;
        let report = check_embedded_identities(&g, &trace).unwrap();
        assert!(report.max_br_excess > 1e-6, "{report:?}");
    }
}
