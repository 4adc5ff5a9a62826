//! Anonymity checks and centroid-consensus equilibrium gaps.
//!
//! The centroid algorithm presets treat players as interchangeable: the
//! state tracks only the average of the players' empirical marginals, so
//! they are only meaningful on games where relabeling the players leaves
//! every payoff unchanged. [`permutation_invariance_check`] decides that
//! property exactly; [`cne_gap`] and [`mce_gap`] measure how far a centroid
//! (or a profile judged against its centroid) is from equilibrium.

use crate::game::{action_values, Game, OpponentStrategy, SimplexVector};

use super::EngineError;

/// Absolute tolerance when comparing payoffs across player relabelings.
pub const PERMUTATION_TOLERANCE: f64 = 1e-9;

/// Outcome of the player-relabeling invariance check.
#[derive(Debug, Clone)]
pub struct PermutationCheck {
    pub holds: bool,
    /// First violation found, as a human-readable description.
    pub reason: Option<String>,
}

/// Checks that relabeling players leaves the game unchanged:
/// `u_i(y) = u_{pi(i)}(pi . y)` for every permutation `pi`, where `pi . y`
/// routes player `i`'s action to seat `pi(i)`.
///
/// Only transpositions are tested: the permutations under which a game is
/// invariant form a group, and transpositions generate all of them, so the
/// check is exact. For up to four players every transposition is tried;
/// beyond that, adjacent swaps plus the outermost swap (still a generating
/// set) keep the cost linear in the player count.
pub fn permutation_invariance_check(game: &Game) -> PermutationCheck {
    let n = game.num_players();
    if game.common_action_count().is_none() {
        return PermutationCheck {
            holds: false,
            reason: Some("players have different action counts".into()),
        };
    }

    let swaps: Vec<(usize, usize)> = if n <= 4 {
        let mut all = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                all.push((i, j));
            }
        }
        all
    } else {
        let mut gens: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        gens.push((0, n - 1));
        gens
    };

    let mut swapped = vec![0usize; n];
    for &(p, q) in &swaps {
        for joint in game.joint_actions() {
            swapped.copy_from_slice(&joint);
            swapped.swap(p, q);
            for i in 0..n {
                let seat = if i == p {
                    q
                } else if i == q {
                    p
                } else {
                    i
                };
                let before = game.utility(i, &joint);
                let after = game.utility(seat, &swapped);
                if (before - after).abs() > PERMUTATION_TOLERANCE {
                    return PermutationCheck {
                        holds: false,
                        reason: Some(format!(
                            "swapping players {p} and {q} changes player {i}'s payoff at \
                             {joint:?}: {before} vs {after}"
                        )),
                    };
                }
            }
        }
    }
    PermutationCheck { holds: true, reason: None }
}

/// Largest one-shot gain any player gets by deviating from the centroid
/// when every seat plays `centroid`: zero exactly at a symmetric
/// equilibrium in the shared mixed strategy.
pub fn cne_gap(game: &Game, centroid: &SimplexVector) -> Result<f64, EngineError> {
    let marginals = vec![centroid.clone(); game.num_players()];
    mce_gap(game, &marginals)
}

/// Equilibrium gap of a profile judged against its own centroid: each
/// player keeps their own marginal but forecasts every opponent at the
/// average of all marginals. Zero means no player can gain by a pure
/// deviation under that forecast.
pub fn mce_gap(game: &Game, marginals: &[SimplexVector]) -> Result<f64, EngineError> {
    let actions = game
        .common_action_count()
        .ok_or(EngineError::UnequalActionCounts)?;
    if marginals.len() != game.num_players() {
        return Err(EngineError::StateDimension {
            expected: game.num_players(),
            got: marginals.len(),
        });
    }
    for m in marginals {
        if m.len() != actions {
            return Err(EngineError::StateDimension { expected: actions, got: m.len() });
        }
    }

    let scale = 1.0 / game.num_players() as f64;
    let mut avg = vec![0.0; actions];
    for m in marginals {
        for (a, w) in avg.iter_mut().zip(m.weights()) {
            *a += scale * w;
        }
    }
    let centroid = SimplexVector::new(avg)?;

    let mut worst: f64 = 0.0;
    for (i, own) in marginals.iter().enumerate() {
        let forecast =
            OpponentStrategy::Product(vec![centroid.clone(); game.num_players() - 1]);
        let values = action_values(game, i, &forecast)?;
        let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let got: f64 = own.weights().iter().zip(&values).map(|(w, v)| w * v).sum();
        worst = worst.max(best - got);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::presets;

    #[test]
    fn symmetric_games_pass_the_relabeling_check() {
        for name in ["coordination2", "shapley3", "congestion_3p"] {
            let g = presets::by_name(name).unwrap();
            let check = permutation_invariance_check(&g);
            assert!(check.holds, "{name} should be invariant: {:?}", check.reason);
        }
    }

    #[test]
    fn zero_sum_matching_game_fails_the_relabeling_check() {
        let check = permutation_invariance_check(&presets::matching_pennies());
        assert!(!check.holds);
        assert!(check.reason.unwrap().contains("swapping players"));
    }

    #[test]
    fn centroid_gap_is_zero_at_the_symmetric_mixed_point_of_matching_game() {
        // Uniform play makes both actions worth 0 to everyone.
        let g = presets::matching_pennies();
        let q = SimplexVector::uniform(2);
        assert!(cne_gap(&g, &q).unwrap().abs() < 1e-12);
    }

    #[test]
    fn centroid_gap_detects_exploitable_pure_centroid() {
        // Everyone at heads: the mismatching player would gain 2 by switching.
        let g = presets::matching_pennies();
        let q = SimplexVector::pure(2, 0);
        assert!((cne_gap(&g, &q).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn congestion_pileup_has_unit_gap() {
        // All three on the fast resource: load 3 costs 3, switching costs 2.
        let g = presets::congestion_3p();
        let q = SimplexVector::pure(2, 0);
        assert!((cne_gap(&g, &q).unwrap() - 1.0).abs() < 1e-12);
        let marginals = vec![q; 3];
        assert!((mce_gap(&g, &marginals).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profile_gap_rejects_wrong_arity() {
        let g = presets::congestion_3p();
        let q = SimplexVector::uniform(2);
        assert!(matches!(
            mce_gap(&g, &[q.clone(), q]),
            Err(EngineError::StateDimension { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn unequal_action_counts_are_rejected() {
        let g = crate::game::Game::new(vec![2, 3], vec![vec![0.0; 6], vec![0.0; 6]]).unwrap();
        let check = permutation_invariance_check(&g);
        assert!(!check.holds);
        assert!(matches!(
            mce_gap(&g, &[SimplexVector::uniform(2), SimplexVector::uniform(3)]),
            Err(EngineError::UnequalActionCounts)
        ));
    }
}
