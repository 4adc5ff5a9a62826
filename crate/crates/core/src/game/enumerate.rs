//! Support-enumeration equilibrium oracle for small 2-player games.

use super::{nash_gap, Game, GameError, JointMixedStrategy, SimplexVector};

/// Gap below which a candidate profile counts as an exact equilibrium.
pub const ORACLE_GAP_TOLERANCE: f64 = 1e-8;

/// Pivot magnitude below which an indifference system is treated as
/// singular and its support pair skipped.
const SINGULAR_TOLERANCE: f64 = 1e-10;

/// Sup-norm distance under which two profiles are considered the same
/// equilibrium.
const DEDUP_TOLERANCE: f64 = 1e-6;

/// Enumerate all Nash equilibria of a 2-player game with at most 4 actions
/// per player, by solving exact indifference systems on every pair of
/// equal-size supports and keeping solutions that verify as equilibria.
///
/// Every returned profile has `nash_gap <= 1e-8`. Results are deduplicated
/// and sorted, so the output is deterministic.
pub fn enumerate_ne_2xm(game: &Game) -> Result<Vec<Vec<SimplexVector>>, GameError> {
    if game.num_players() != 2 || game.action_counts().iter().any(|&c| c > 4) {
        return Err(GameError::OracleOutOfRange {
            players: game.num_players(),
            action_counts: game.action_counts().to_vec(),
        });
    }
    let m = game.action_count(0);
    let k = game.action_count(1);
    let u1 = |a: usize, b: usize| game.utility(0, &[a, b]);
    let u2 = |a: usize, b: usize| game.utility(1, &[a, b]);

    let mut found: Vec<Vec<SimplexVector>> = Vec::new();
    for s1 in subsets(m) {
        for s2 in subsets(k).into_iter().filter(|s2| s2.len() == s1.len()) {
            // Opponent mixture p2 on s2 making player 1 indifferent on s1,
            // and p1 on s1 doing the same for player 2 on s2.
            let p2 = solve_indifference(&s1, &s2, k, |own, opp| u1(own, opp));
            let p1 = solve_indifference(&s2, &s1, m, |own, opp| u2(opp, own));
            let (Some(p1), Some(p2)) = (p1, p2) else { continue };
            let (Ok(p1), Ok(p2)) = (SimplexVector::new(p1), SimplexVector::new(p2)) else {
                continue;
            };
            let profile = vec![p1, p2];
            let report = nash_gap(game, &JointMixedStrategy::Product(profile.clone()))?;
            if report.nash_gap > ORACLE_GAP_TOLERANCE {
                continue;
            }
            let duplicate = found.iter().any(|q| {
                q[0].sup_distance(&profile[0]) < DEDUP_TOLERANCE
                    && q[1].sup_distance(&profile[1]) < DEDUP_TOLERANCE
            });
            if !duplicate {
                found.push(profile);
            }
        }
    }
    found.sort_by(|a, b| {
        let flat = |p: &[SimplexVector]| -> Vec<f64> {
            p.iter().flat_map(|v| v.weights().iter().copied()).collect()
        };
        flat(a).partial_cmp(&flat(b)).expect("finite weights")
    });
    Ok(found)
}

/// Non-empty subsets of `0..n`, each sorted ascending.
fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..1 << n)
        .map(|mask| (0..n).filter(|a| mask & (1 << a) != 0).collect())
        .collect()
}

/// Solve for the opponent mixture (over `opp_support`, embedded into a
/// length-`opp_len` vector) that makes every action in `own_support` earn
/// the same payoff, where `value(own, opp)` is the deciding player's
/// utility. Returns `None` for singular systems.
fn solve_indifference(
    own_support: &[usize],
    opp_support: &[usize],
    opp_len: usize,
    value: impl Fn(usize, usize) -> f64,
) -> Option<Vec<f64>> {
    let n = opp_support.len();
    // Rows: n-1 indifference equations plus normalization; n unknowns.
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for (row, &alt) in own_support.iter().skip(1).enumerate() {
        for (col, &s) in opp_support.iter().enumerate() {
            a[row][col] = value(own_support[0], s) - value(alt, s);
        }
    }
    a[n - 1] = vec![1.0; n];
    b[n - 1] = 1.0;
    let x = solve_linear(&mut a, &mut b)?;
    let mut full = vec![0.0; opp_len];
    for (col, &s) in opp_support.iter().enumerate() {
        full[s] = x[col];
    }
    Some(full)
}

/// Gaussian elimination with partial pivoting on a small square system.
fn solve_linear(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() < SINGULAR_TOLERANCE {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for col in row + 1..n {
            acc -= a[row][col] * x[col];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}
