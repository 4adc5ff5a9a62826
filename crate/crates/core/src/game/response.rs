//! Expected utility, best-response sets, and equilibrium gap.

use super::{Game, GameError, JointMixedStrategy, OpponentStrategy, SimplexVector};

/// Payoff ties closer than this are treated as exact ties, so best-response
/// sets include every action within `TIE_TOLERANCE` of the maximum.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Expected utility of player `player` under the joint strategy `x`.
///
/// The sum runs over joint actions in lexicographic order.
pub fn expected_utility(
    game: &Game,
    player: usize,
    x: &JointMixedStrategy,
) -> Result<f64, GameError> {
    game.check_player(player)?;
    x.validate_for(game)?;
    let mut total = 0.0;
    for (k, joint) in game.joint_actions().enumerate() {
        let w = x.weight_of(game, &joint);
        if w != 0.0 {
            total += game.utility_by_index(player, k) * w;
        }
    }
    Ok(total)
}

/// Expected utility of each pure action of `player` against `x_minus`.
///
/// Entry `a` is the payoff of playing `a` for sure while the opponents play
/// `x_minus`. Opponent joint actions are enumerated in lexicographic order
/// over the remaining players (ascending player index).
pub fn action_values(
    game: &Game,
    player: usize,
    x_minus: &OpponentStrategy,
) -> Result<Vec<f64>, GameError> {
    game.check_player(player)?;
    let n = game.num_players();
    let other_players: Vec<usize> = (0..n).filter(|&j| j != player).collect();
    match x_minus {
        OpponentStrategy::Product(ps) => {
            if ps.len() != n - 1 {
                return Err(GameError::OpponentArity { expected: n - 1, got: ps.len() });
            }
            for (slot, p) in ps.iter().enumerate() {
                let j = other_players[slot];
                if p.len() != game.action_count(j) {
                    return Err(GameError::StrategyLength {
                        player: j,
                        expected: game.action_count(j),
                        got: p.len(),
                    });
                }
            }
        }
        OpponentStrategy::Correlated(w) => {
            let expected: usize = other_players.iter().map(|&j| game.action_count(j)).product();
            if w.len() != expected {
                return Err(GameError::CorrelatedLength { expected, got: w.len() });
            }
        }
    }

    let mut values = vec![0.0; game.action_count(player)];
    let mut joint = vec![0usize; n];
    // Mixed-radix counter over the opponents' actions, last one fastest.
    let mut counter = vec![0usize; other_players.len()];
    let mut flat = 0usize;
    loop {
        for (slot, &j) in other_players.iter().enumerate() {
            joint[j] = counter[slot];
        }
        let w = match x_minus {
            OpponentStrategy::Product(ps) => counter
                .iter()
                .zip(ps.iter())
                .map(|(&a, p)| p.get(a))
                .product::<f64>(),
            OpponentStrategy::Correlated(dist) => dist.get(flat),
        };
        if w != 0.0 {
            for (a, value) in values.iter_mut().enumerate() {
                joint[player] = a;
                *value += w * game.utility(player, &joint);
            }
        }
        // Advance the counter.
        flat += 1;
        let mut slot = other_players.len();
        loop {
            if slot == 0 {
                return Ok(values);
            }
            slot -= 1;
            counter[slot] += 1;
            if counter[slot] < game.action_count(other_players[slot]) {
                break;
            }
            counter[slot] = 0;
        }
    }
}

/// Indices of `values` within `slack` of the maximum, ascending.
pub fn qualifying_actions(values: &[f64], slack: f64) -> Vec<usize> {
    let best = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= best - slack)
        .map(|(a, _)| a)
        .collect()
}

/// Pure best responses of `player` to `x_minus`, ties included within
/// [`TIE_TOLERANCE`].
pub fn best_response_set(
    game: &Game,
    player: usize,
    x_minus: &OpponentStrategy,
) -> Result<Vec<usize>, GameError> {
    let values = action_values(game, player, x_minus)?;
    Ok(qualifying_actions(&values, TIE_TOLERANCE))
}

/// Pure actions within `eps` of the best payoff against `x_minus`.
///
/// With `eps = 0` this coincides with [`best_response_set`]; the tie
/// tolerance is always included in the slack so the exact best-response set
/// is a subset for every `eps >= 0`.
pub fn epsilon_best_response_set(
    game: &Game,
    player: usize,
    x_minus: &OpponentStrategy,
    eps: f64,
) -> Result<Vec<usize>, GameError> {
    if !(eps >= 0.0) {
        return Err(GameError::NegativeEpsilon { eps });
    }
    let values = action_values(game, player, x_minus)?;
    Ok(qualifying_actions(&values, eps + TIE_TOLERANCE))
}

/// Per-player unilateral improvement and its maximum over players.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    /// `per_player_regret[i]` = best pure payoff against the others minus
    /// the payoff of the own mixture. Non-negative up to rounding.
    pub per_player_regret: Vec<f64>,
    /// Maximum of the per-player regrets.
    pub nash_gap: f64,
    /// The payoff-maximizing pure actions per player (ties included).
    pub argmax_actions: Vec<Vec<usize>>,
}

/// Nash gap of a product-form profile: the largest unilateral improvement
/// any player can obtain by a pure deviation. Zero (up to tolerance) exactly
/// at Nash equilibria; pure deviations suffice because payoffs are linear in
/// the own mixture.
pub fn nash_gap(game: &Game, profile: &JointMixedStrategy) -> Result<EquilibriumReport, GameError> {
    let ps = match profile {
        JointMixedStrategy::Product(ps) => ps,
        JointMixedStrategy::Correlated(_) => return Err(GameError::ProductFormRequired),
    };
    profile.validate_for(game)?;
    let mut regrets = Vec::with_capacity(game.num_players());
    let mut argmax = Vec::with_capacity(game.num_players());
    for i in 0..game.num_players() {
        let x_minus = OpponentStrategy::from_profile(ps, i);
        let values = action_values(game, i, &x_minus)?;
        let best = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let own: f64 = values
            .iter()
            .zip(ps[i].weights().iter())
            .map(|(v, w)| v * w)
            .sum();
        regrets.push(best - own);
        argmax.push(qualifying_actions(&values, TIE_TOLERANCE));
    }
    let gap = regrets.iter().fold(f64::NEG_INFINITY, |m, &r| m.max(r));
    Ok(EquilibriumReport { per_player_regret: regrets, nash_gap: gap, argmax_actions: argmax })
}

/// Convenience wrapper around [`nash_gap`] for a slice of per-player
/// mixtures.
pub fn nash_gap_of_profile(
    game: &Game,
    profile: &[SimplexVector],
) -> Result<EquilibriumReport, GameError> {
    nash_gap(game, &JointMixedStrategy::Product(profile.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::presets;

    fn mp() -> Game {
        presets::matching_pennies()
    }

    #[test]
    fn matching_pennies_uniform_value_is_zero() {
        let g = mp();
        let x = JointMixedStrategy::Product(vec![
            SimplexVector::uniform(2),
            SimplexVector::uniform(2),
        ]);
        assert!(expected_utility(&g, 0, &x).unwrap().abs() < 1e-15);
        assert!(expected_utility(&g, 1, &x).unwrap().abs() < 1e-15);
    }

    #[test]
    fn matching_pennies_pure_mismatch() {
        let g = mp();
        let x = JointMixedStrategy::pure(&[0, 1], g.action_counts());
        assert_eq!(expected_utility(&g, 0, &x).unwrap(), -1.0);
        assert_eq!(expected_utility(&g, 1, &x).unwrap(), 1.0);
    }

    #[test]
    fn matching_pennies_against_skewed_opponent() {
        // Player 1 plays H for sure, player 2 plays (0.9, 0.1):
        // U_1 = 0.9 * 1 + 0.1 * (-1) = 0.8.
        let g = mp();
        let x = JointMixedStrategy::Product(vec![
            SimplexVector::pure(2, 0),
            SimplexVector::new(vec![0.9, 0.1]).unwrap(),
        ]);
        assert!((expected_utility(&g, 0, &x).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn action_values_match_hand_sums() {
        let g = mp();
        let x2 = OpponentStrategy::Product(vec![SimplexVector::new(vec![0.9, 0.1]).unwrap()]);
        let v = action_values(&g, 0, &x2).unwrap();
        assert!((v[0] - 0.8).abs() < 1e-12);
        assert!((v[1] + 0.8).abs() < 1e-12);
    }

    #[test]
    fn best_response_skewed_and_tied() {
        let g = mp();
        let skewed = OpponentStrategy::Product(vec![SimplexVector::new(vec![0.9, 0.1]).unwrap()]);
        assert_eq!(best_response_set(&g, 0, &skewed).unwrap(), vec![0]);
        let tied = OpponentStrategy::Product(vec![SimplexVector::uniform(2)]);
        assert_eq!(best_response_set(&g, 0, &tied).unwrap(), vec![0, 1]);
    }

    #[test]
    fn epsilon_relaxation_widens_the_set() {
        // Payoff spread against (0.9, 0.1) is 0.8 - (-0.8) = 1.6.
        let g = mp();
        let skewed = OpponentStrategy::Product(vec![SimplexVector::new(vec![0.9, 0.1]).unwrap()]);
        assert_eq!(epsilon_best_response_set(&g, 0, &skewed, 2.0).unwrap(), vec![0, 1]);
        assert_eq!(epsilon_best_response_set(&g, 0, &skewed, 1.0).unwrap(), vec![0]);
        assert_eq!(epsilon_best_response_set(&g, 0, &skewed, 0.0).unwrap(), vec![0]);
    }

    #[test]
    fn negative_epsilon_rejected() {
        let g = mp();
        let u = OpponentStrategy::Product(vec![SimplexVector::uniform(2)]);
        assert!(matches!(
            epsilon_best_response_set(&g, 0, &u, -1e-9),
            Err(GameError::NegativeEpsilon { .. })
        ));
    }

    #[test]
    fn nash_gap_zero_at_mixed_equilibrium() {
        let g = mp();
        let x = JointMixedStrategy::Product(vec![
            SimplexVector::uniform(2),
            SimplexVector::uniform(2),
        ]);
        let report = nash_gap(&g, &x).unwrap();
        assert!(report.nash_gap.abs() < 1e-12);
        assert!(report.per_player_regret.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn nash_gap_of_miscoordination_is_one() {
        // Coordination payoffs are 1 on the diagonal; at (A, B) each player
        // gains exactly 1 by deviating to the other's action.
        let g = presets::coordination2();
        let x = JointMixedStrategy::pure(&[0, 1], g.action_counts());
        let report = nash_gap(&g, &x).unwrap();
        assert_eq!(report.per_player_regret, vec![1.0, 1.0]);
        assert_eq!(report.nash_gap, 1.0);
    }

    #[test]
    fn nash_gap_requires_product_form() {
        let g = mp();
        let x = JointMixedStrategy::Correlated(SimplexVector::uniform(4));
        assert!(matches!(nash_gap(&g, &x), Err(GameError::ProductFormRequired)));
    }

    #[test]
    fn correlated_opponent_view_three_players() {
        // 3-player game; player 0 faces a correlated distribution over the
        // other two. Hand-check one entry: all mass on (y_1=1, y_2=0).
        let counts = vec![2usize, 2, 2];
        let mut table = vec![0.0; 8];
        // u_0(y) = joint index, purely to track which entries are read.
        for (k, u) in table.iter_mut().enumerate() {
            *u = k as f64;
        }
        let g = Game::new(counts, vec![table, vec![0.0; 8], vec![0.0; 8]]).unwrap();
        let x_minus = OpponentStrategy::Correlated(SimplexVector::pure(4, 2)); // (1, 0)
        let v = action_values(&g, 0, &x_minus).unwrap();
        // Joint (a, 1, 0) has index a*4 + 1*2 + 0.
        assert_eq!(v, vec![2.0, 6.0]);
    }
}
