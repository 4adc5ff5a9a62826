//! Constructive exact-potential test.

use std::collections::VecDeque;

use super::Game;

/// Agreement tolerance between utility differences and potential
/// differences along unilateral deviations.
pub const POTENTIAL_TOLERANCE: f64 = 1e-9;

/// Decide whether the game admits an exact potential: a single table whose
/// change under any one player's deviation equals that player's utility
/// change. Returns the witness table (anchored to 0 at the first joint
/// action) when it exists.
///
/// The candidate is built by propagating utility differences outward from
/// the first joint action; a second pass checks every unilateral edge, so a
/// `true` answer is certified rather than sampled.
pub fn is_exact_potential(game: &Game) -> (bool, Option<Vec<f64>>) {
    let len = game.num_joint_actions();
    let mut phi = vec![f64::NAN; len];
    phi[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    let mut joint = Vec::new();
    while let Some(k) = queue.pop_front() {
        joint.clear();
        joint.extend(game.joint_action(k));
        let base = phi[k];
        for i in 0..game.num_players() {
            let original = joint[i];
            for a in 0..game.action_count(i) {
                if a == original {
                    continue;
                }
                joint[i] = a;
                let k2 = game.joint_index(&joint);
                if phi[k2].is_nan() {
                    let delta = game.utility_by_index(i, k2) - game.utility_by_index(i, k);
                    phi[k2] = base + delta;
                    queue.push_back(k2);
                }
            }
            joint[i] = original;
        }
    }
    // Every joint action is reachable by unilateral moves, so the table is
    // fully assigned; now verify every edge against it.
    for k in 0..len {
        joint.clear();
        joint.extend(game.joint_action(k));
        for i in 0..game.num_players() {
            let original = joint[i];
            for a in original + 1..game.action_count(i) {
                joint[i] = a;
                let k2 = game.joint_index(&joint);
                let du = game.utility_by_index(i, k2) - game.utility_by_index(i, k);
                let dphi = phi[k2] - phi[k];
                if (du - dphi).abs() > POTENTIAL_TOLERANCE {
                    return (false, None);
                }
            }
            joint[i] = original;
        }
    }
    (true, Some(phi))
}
