//! Joint strategy representations.
//!
//! A joint strategy is either a product of independent per-player mixtures
//! or a single correlated distribution over joint actions. Opponent views
//! (`x_{-i}`) use the same two forms with player `i`'s axis removed.

use super::{Game, GameError, SimplexVector};

/// A joint mixed strategy over all players.
#[derive(Debug, Clone, PartialEq)]
pub enum JointMixedStrategy {
    /// Independent mixtures, one per player in player order.
    Product(Vec<SimplexVector>),
    /// One distribution over joint actions, lexicographic order.
    Correlated(SimplexVector),
}

impl JointMixedStrategy {
    /// The pure joint strategy playing `actions`.
    pub fn pure(actions: &[usize], action_counts: &[usize]) -> Self {
        debug_assert_eq!(actions.len(), action_counts.len());
        JointMixedStrategy::Product(
            actions
                .iter()
                .zip(action_counts.iter())
                .map(|(&a, &c)| SimplexVector::pure(c, a))
                .collect(),
        )
    }

    /// Probability assigned to the joint action `joint`.
    pub fn weight_of(&self, game: &Game, joint: &[usize]) -> f64 {
        match self {
            JointMixedStrategy::Product(ps) => joint
                .iter()
                .zip(ps.iter())
                .map(|(&a, p)| p.get(a))
                .product(),
            JointMixedStrategy::Correlated(w) => w.get(game.joint_index(joint)),
        }
    }

    pub fn validate_for(&self, game: &Game) -> Result<(), GameError> {
        match self {
            JointMixedStrategy::Product(ps) => {
                if ps.len() != game.num_players() {
                    return Err(GameError::OpponentArity {
                        expected: game.num_players(),
                        got: ps.len(),
                    });
                }
                for (i, p) in ps.iter().enumerate() {
                    if p.len() != game.action_count(i) {
                        return Err(GameError::StrategyLength {
                            player: i,
                            expected: game.action_count(i),
                            got: p.len(),
                        });
                    }
                }
            }
            JointMixedStrategy::Correlated(w) => {
                if w.len() != game.num_joint_actions() {
                    return Err(GameError::CorrelatedLength {
                        expected: game.num_joint_actions(),
                        got: w.len(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Marginal distribution of player `i`'s action.
    pub fn marginal(&self, game: &Game, player: usize) -> SimplexVector {
        match self {
            JointMixedStrategy::Product(ps) => ps[player].clone(),
            JointMixedStrategy::Correlated(w) => {
                let mut out = vec![0.0; game.action_count(player)];
                for (k, &mass) in w.weights().iter().enumerate() {
                    let joint = game.joint_action(k);
                    out[joint[player]] += mass;
                }
                SimplexVector::new(out).expect("marginal of a distribution is a distribution")
            }
        }
    }
}

/// The opponents' side of a joint strategy, from player `i`'s seat.
#[derive(Debug, Clone, PartialEq)]
pub enum OpponentStrategy {
    /// Independent mixtures for each opponent, ascending player index
    /// (player `i` skipped).
    Product(Vec<SimplexVector>),
    /// One distribution over opponent joint actions, lexicographic in the
    /// remaining players' ascending order.
    Correlated(SimplexVector),
}

impl OpponentStrategy {
    /// Restriction of a full product profile to everyone but `player`.
    pub fn from_profile(profile: &[SimplexVector], player: usize) -> Self {
        OpponentStrategy::Product(
            profile
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != player)
                .map(|(_, p)| p.clone())
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::presets;

    #[test]
    fn pure_profile_weights() {
        let g = presets::matching_pennies();
        let x = JointMixedStrategy::pure(&[1, 0], g.action_counts());
        assert_eq!(x.weight_of(&g, &[1, 0]), 1.0);
        assert_eq!(x.weight_of(&g, &[0, 0]), 0.0);
    }

    #[test]
    fn product_weight_multiplies() {
        let g = presets::matching_pennies();
        let x = JointMixedStrategy::Product(vec![
            SimplexVector::new(vec![0.25, 0.75]).unwrap(),
            SimplexVector::new(vec![0.5, 0.5]).unwrap(),
        ]);
        assert!((x.weight_of(&g, &[1, 0]) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn correlated_marginals() {
        let g = presets::matching_pennies();
        // All mass on matching outcomes HH and TT.
        let x = JointMixedStrategy::Correlated(
            SimplexVector::new(vec![0.5, 0.0, 0.0, 0.5]).unwrap(),
        );
        let m0 = x.marginal(&g, 0);
        let m1 = x.marginal(&g, 1);
        assert_eq!(m0.weights(), &[0.5, 0.5]);
        assert_eq!(m1.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn validation_names_offending_player() {
        let g = presets::matching_pennies();
        let bad = JointMixedStrategy::Product(vec![
            SimplexVector::uniform(2),
            SimplexVector::uniform(3),
        ]);
        match bad.validate_for(&g).unwrap_err() {
            GameError::StrategyLength { player, expected, got } => {
                assert_eq!((player, expected, got), (1, 2, 3));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
