//! Built-in example games.

use super::Game;

pub const NAMES: [&str; 4] = ["matching_pennies", "coordination2", "shapley3", "congestion_3p"];

/// Look up a built-in game by name.
pub fn by_name(name: &str) -> Option<Game> {
    match name {
        "matching_pennies" => Some(matching_pennies()),
        "coordination2" => Some(coordination2()),
        "shapley3" => Some(shapley3()),
        "congestion_3p" => Some(congestion_3p()),
        _ => None,
    }
}

/// Zero-sum 2x2: player 1 wins on a match, player 2 on a mismatch.
/// Action 0 is Heads. Unique equilibrium: both mix 50/50.
pub fn matching_pennies() -> Game {
    let u1 = vec![1.0, -1.0, -1.0, 1.0];
    let u2 = u1.iter().map(|u| -u).collect();
    Game::new(vec![2, 2], vec![u1, u2]).expect("static table")
}

/// Two-player pure coordination: both earn 1 when actions match, 0
/// otherwise. Equilibria: both pure matches and the uniform mix.
pub fn coordination2() -> Game {
    let u = vec![1.0, 0.0, 0.0, 1.0];
    Game::new(vec![2, 2], vec![u.clone(), u]).expect("static table")
}

/// The classic 3x3 cycling game: player 1 earns 1 when their action is one
/// step above player 2's (mod 3), player 2 earns 1 when one step above
/// player 1's. Best-response play chases itself in a six-step cycle and
/// empirical frequencies famously fail to converge.
pub fn shapley3() -> Game {
    let mut u1 = vec![0.0; 9];
    let mut u2 = vec![0.0; 9];
    for i in 0..3usize {
        for j in 0..3usize {
            if i == (j + 1) % 3 {
                u1[i * 3 + j] = 1.0;
            }
            if j == (i + 1) % 3 {
                u2[i * 3 + j] = 1.0;
            }
        }
    }
    Game::new(vec![3, 3], vec![u1, u2]).expect("static table")
}

/// Three identical commuters choose between two roads. Road 0 delays k
/// drivers by k each; road 1 is twice as slow. Utilities are negated
/// delays, so this is an exact-potential congestion game, symmetric under
/// any relabeling of the players.
pub fn congestion_3p() -> Game {
    congestion_game(3, &[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]])
}

/// Anonymous congestion game: `delays[r][k-1]` is the delay on resource `r`
/// when `k` players use it. Every player picks one resource and receives
/// the negated delay of their own pick.
///
/// # Panics
/// If there are fewer than 2 players, no resources, or a delay table
/// shorter than the player count.
pub fn congestion_game(players: usize, delays: &[Vec<f64>]) -> Game {
    assert!(players >= 2, "congestion game needs at least two players");
    assert!(!delays.is_empty(), "congestion game needs at least one resource");
    for (r, d) in delays.iter().enumerate() {
        assert!(
            d.len() >= players,
            "delay table for resource {r} covers {} players, need {players}",
            d.len()
        );
    }
    let resources = delays.len();
    let counts = vec![resources; players];
    let table_len = resources.pow(players as u32);
    let mut tables = vec![vec![0.0; table_len]; players];
    let probe = Game::new(counts.clone(), vec![vec![0.0; table_len]; players]).expect("shape");
    for k in 0..table_len {
        let joint = probe.joint_action(k);
        for i in 0..players {
            let r = joint[i];
            let load = joint.iter().filter(|&&y| y == r).count();
            tables[i][k] = -delays[r][load - 1];
        }
    }
    Game::new(counts, tables).expect("static table")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_covers_all_names() {
        for name in NAMES {
            assert!(by_name(name).is_some(), "missing preset {name}");
        }
        assert!(by_name("unknown").is_none());
    }

    #[test]
    fn matching_pennies_is_zero_sum() {
        let g = matching_pennies();
        for k in 0..4 {
            assert_eq!(g.utility_by_index(0, k) + g.utility_by_index(1, k), 0.0);
        }
        assert_eq!(g.utility(0, &[0, 0]), 1.0);
        assert_eq!(g.utility(0, &[0, 1]), -1.0);
    }

    #[test]
    fn shapley_win_pattern() {
        let g = shapley3();
        // Player 1 wins (1, 0), (2, 1), (0, 2); player 2 wins (0, 1), (1, 2), (2, 0).
        assert_eq!(g.utility(0, &[1, 0]), 1.0);
        assert_eq!(g.utility(0, &[0, 2]), 1.0);
        assert_eq!(g.utility(0, &[0, 1]), 0.0);
        assert_eq!(g.utility(1, &[0, 1]), 1.0);
        assert_eq!(g.utility(1, &[2, 0]), 1.0);
        assert_eq!(g.utility(1, &[1, 0]), 0.0);
        // No outcome rewards both players.
        for k in 0..9 {
            assert!(g.utility_by_index(0, k) * g.utility_by_index(1, k) == 0.0);
        }
    }

    #[test]
    fn congestion_delays_count_own_road_users() {
        let g = congestion_3p();
        // All three on road 0: delay 3 each.
        assert_eq!(g.utility(0, &[0, 0, 0]), -3.0);
        // Alone on road 1 while the others share road 0.
        assert_eq!(g.utility(2, &[0, 0, 1]), -2.0);
        assert_eq!(g.utility(0, &[0, 0, 1]), -2.0);
        // Two on road 1: delay 4 each.
        assert_eq!(g.utility(1, &[0, 1, 1]), -4.0);
    }

    #[test]
    fn congestion_players_are_interchangeable() {
        let g = congestion_3p();
        // Utilities depend only on own road and how many share it.
        assert_eq!(g.utility(0, &[1, 0, 0]), g.utility(1, &[0, 1, 0]));
        assert_eq!(g.utility(0, &[1, 0, 1]), g.utility(2, &[1, 0, 1]));
    }
}
