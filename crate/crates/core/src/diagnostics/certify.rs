//! Empirical robustness certificates for slack-tolerant best responses.
//!
//! The weakened dynamic lets players pick any action within `eps` of
//! optimal. Its behavior stays close to the exact dynamic when every such
//! "almost best" action is an *exact* best response at some nearby state.
//! [`certify_eps_delta`] measures that notion directly: over a set of
//! sampled states it reports the smallest `delta` such that every action
//! within `eps` of optimal at a sample is exactly optimal somewhere within
//! sup-norm distance `delta` of it.
//!
//! Witness states are found three ways, in order of preference: the sample
//! itself (distance zero), an exact tie-line projection in the 2x2
//! marginal case (player values are linear in the single opposing block,
//! so the feasible region is an interval), and otherwise a randomized
//! direction search over an increasing radius grid. Actions that never
//! become exact best responses within the largest radius are flagged and
//! reported as infinite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{EngineError, FPTypeAlgorithm, ObservationSpace};
use crate::game::{action_values, qualifying_actions, Game, TIE_TOLERANCE};

/// Search controls for [`certify_eps_delta`].
#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Radii tried in ascending order; the largest bounds the search.
    pub radii: Vec<f64>,
    /// Random directions per radius.
    pub directions: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            radii: vec![0.0, 1e-4, 1e-3, 1e-2, 1e-1, 0.5],
            directions: 32,
            seed: 0,
        }
    }
}

/// One `(player, action)` pair that qualified under `eps` at a sample,
/// with the nearby state at which it is exactly optimal.
#[derive(Debug, Clone)]
pub struct WitnessPair {
    pub player: usize,
    pub action: usize,
    /// Sup-norm distance from the sample to the witness; infinite when no
    /// witness exists within the largest radius.
    pub delta: f64,
    pub witness: Option<Vec<f64>>,
}

/// All qualifying pairs of one sampled state.
#[derive(Debug, Clone)]
pub struct SampleCertificate {
    pub state: Vec<f64>,
    /// Largest pair distance at this sample.
    pub delta: f64,
    pub pairs: Vec<WitnessPair>,
}

/// Aggregate over all samples: the empirical `delta` certified for `eps`.
#[derive(Debug, Clone)]
pub struct DeltaCertificate {
    pub eps: f64,
    /// Smallest `delta` covering every sample: the maximum sample delta.
    pub delta_min: f64,
    /// True when some qualifying action is never exactly optimal within
    /// the largest search radius (e.g. a dominated action let in by a
    /// large `eps`).
    pub flagged_infinite: bool,
    pub worst_sample: usize,
    pub samples: Vec<SampleCertificate>,
}

/// Deterministic lattice over the observation space: every block receives
/// all weight vectors on the `levels`-point simplex grid (multiples of
/// `1/(levels-1)`), and blocks are crossed. Grows fast; meant for small
/// spaces.
pub fn grid_samples(space: &ObservationSpace, levels: usize) -> Vec<Vec<f64>> {
    assert!(levels >= 2, "a grid needs at least two levels");
    let blocks = space.blocks();
    let per_block: Vec<Vec<Vec<f64>>> = blocks
        .iter()
        .map(|b| simplex_lattice(b.len(), levels))
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; blocks.len()];
    loop {
        let mut point = vec![0.0; space.dimension()];
        for (bi, block) in blocks.iter().enumerate() {
            point[block.clone()].copy_from_slice(&per_block[bi][choice[bi]]);
        }
        out.push(point);
        // Odometer over block choices.
        let mut slot = blocks.len();
        loop {
            if slot == 0 {
                return out;
            }
            slot -= 1;
            choice[slot] += 1;
            if choice[slot] < per_block[slot].len() {
                break;
            }
            choice[slot] = 0;
        }
    }
}

/// All points of the `levels`-point lattice on the `(parts-1)`-simplex.
fn simplex_lattice(parts: usize, levels: usize) -> Vec<Vec<f64>> {
    let total = levels - 1;
    let mut out = Vec::new();
    let mut cur = vec![0usize; parts];
    fill_compositions(total, 0, &mut cur, &mut out);
    out.iter()
        .map(|c| c.iter().map(|&k| k as f64 / total as f64).collect())
        .collect()
}

fn fill_compositions(left: usize, slot: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if slot == cur.len() - 1 {
        cur[slot] = left;
        out.push(cur.clone());
        return;
    }
    for k in 0..=left {
        cur[slot] = k;
        fill_compositions(left - k, slot + 1, cur, out);
    }
}

/// Certifies `eps -> delta` over `samples`. Each sample must lie in the
/// algorithm's observation space.
pub fn certify_eps_delta(
    game: &Game,
    algo: &FPTypeAlgorithm,
    samples: &[Vec<f64>],
    eps: f64,
    opts: &CertifyOptions,
) -> Result<DeltaCertificate, EngineError> {
    let space = algo.space();
    let mut radii = opts.radii.clone();
    radii.sort_by(|a, b| a.partial_cmp(b).expect("radii must be finite"));
    let mut certs = Vec::with_capacity(samples.len());
    let mut flagged = false;
    let mut worst = 0usize;
    let mut worst_delta = f64::NEG_INFINITY;

    for (si, z) in samples.iter().enumerate() {
        if let Err(v) = space.contains(z) {
            return Err(EngineError::StateViolation {
                iteration: si,
                detail: format!("sample {si}, block {}: {}", v.block, v.detail),
            });
        }
        let mut pairs = Vec::new();
        let mut sample_delta: f64 = 0.0;
        for player in 0..game.num_players() {
            let forecast = algo.forecast(player, z, game)?;
            let values = action_values(game, player, &forecast)?;
            let exact = qualifying_actions(&values, TIE_TOLERANCE);
            for action in qualifying_actions(&values, eps + TIE_TOLERANCE) {
                let pair = if exact.contains(&action) {
                    WitnessPair { player, action, delta: 0.0, witness: Some(z.clone()) }
                } else {
                    find_witness(game, algo, z, player, action, &radii, opts, si)?
                };
                if pair.delta.is_infinite() {
                    flagged = true;
                }
                sample_delta = sample_delta.max(pair.delta);
                pairs.push(pair);
            }
        }
        if sample_delta > worst_delta {
            worst_delta = sample_delta;
            worst = si;
        }
        certs.push(SampleCertificate { state: z.clone(), delta: sample_delta, pairs });
    }

    Ok(DeltaCertificate {
        eps,
        delta_min: if certs.is_empty() { 0.0 } else { worst_delta },
        flagged_infinite: flagged,
        worst_sample: worst,
        samples: certs,
    })
}

fn find_witness(
    game: &Game,
    algo: &FPTypeAlgorithm,
    z: &[f64],
    player: usize,
    action: usize,
    radii: &[f64],
    opts: &CertifyOptions,
    sample_idx: usize,
) -> Result<WitnessPair, EngineError> {
    if let Some(pair) = two_by_two_projection(game, algo, z, player, action)? {
        return Ok(pair);
    }

    // The direction stream depends only on (seed, sample, player, action),
    // never on eps, so shrinking eps can only drop pairs: the certified
    // delta is monotone in eps by construction.
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for v in [opts.seed, sample_idx as u64, player as u64, action as u64] {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(h);
    let space = algo.space();
    let blocks = space.blocks();

    for &radius in radii {
        for _ in 0..opts.directions {
            let mut candidate = z.to_vec();
            for block in &blocks {
                perturb_block(&mut candidate[block.clone()], radius, &mut rng);
            }
            let dist = sup_distance(z, &candidate);
            if dist > radius + 1e-12 {
                continue;
            }
            let forecast = algo.forecast(player, &candidate, game)?;
            let values = action_values(game, player, &forecast)?;
            if qualifying_actions(&values, TIE_TOLERANCE).contains(&action) {
                return Ok(WitnessPair { player, action, delta: radius, witness: Some(candidate) });
            }
        }
    }
    Ok(WitnessPair { player, action, delta: f64::INFINITY, witness: None })
}

/// Exact feasibility interval for 2-player games where both marginal
/// blocks have two actions: the player's two values are linear in the
/// opposing block, so "this action is optimal" is a half-line in its first
/// weight and the closest feasible point is a clamp.
fn two_by_two_projection(
    game: &Game,
    algo: &FPTypeAlgorithm,
    z: &[f64],
    player: usize,
    action: usize,
) -> Result<Option<WitnessPair>, EngineError> {
    let space = algo.space();
    let blocks = space.blocks();
    let two_by_two = game.num_players() == 2
        && game.action_counts() == [2, 2]
        && matches!(space, ObservationSpace::MarginalProfile { .. });
    if !two_by_two {
        return Ok(None);
    }
    let opp_block = blocks[1 - player].clone();
    let other = 1 - action;

    // diff(t) = value(action) - value(other) when the opposing block is
    // (t, 1-t); linear, so two endpoint evaluations determine it.
    let at = |t: f64| -> Result<f64, EngineError> {
        let mut state = z.to_vec();
        state[opp_block.start] = t;
        state[opp_block.start + 1] = 1.0 - t;
        let values = action_values(game, player, &algo.forecast(player, &state, game)?)?;
        Ok(values[action] - values[other])
    };
    let d0 = at(0.0)?;
    let d1 = at(1.0)?;

    let t_now = z[opp_block.start];
    let slope = d1 - d0;
    let feasible: Option<(f64, f64)> = if slope.abs() <= TIE_TOLERANCE {
        if d0 >= -TIE_TOLERANCE {
            Some((0.0, 1.0))
        } else {
            None
        }
    } else {
        // d0 + slope * t >= 0.
        let root = -d0 / slope;
        if slope > 0.0 {
            if root <= 1.0 {
                Some((root.max(0.0), 1.0))
            } else {
                None
            }
        } else if root >= 0.0 {
            Some((0.0, root.min(1.0)))
        } else {
            None
        }
    };

    Ok(Some(match feasible {
        None => WitnessPair { player, action, delta: f64::INFINITY, witness: None },
        Some((lo, hi)) => {
            let t_star = t_now.clamp(lo, hi);
            let mut witness = z.to_vec();
            witness[opp_block.start] = t_star;
            witness[opp_block.start + 1] = 1.0 - t_star;
            WitnessPair { player, action, delta: (t_now - t_star).abs(), witness: Some(witness) }
        }
    }))
}

/// In-place sum-preserving perturbation of one simplex block with sup norm
/// at most `radius`, followed by a projection back onto the block.
fn perturb_block<R: Rng>(block: &mut [f64], radius: f64, rng: &mut R) {
    if block.len() < 2 || radius == 0.0 {
        return;
    }
    let mut d: Vec<f64> = (0..block.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    for v in d.iter_mut() {
        *v -= mean;
    }
    let peak = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return;
    }
    for (b, v) in block.iter_mut().zip(&d) {
        *b = (*b + radius * v / peak).max(0.0);
    }
    let sum: f64 = block.iter().sum();
    if sum > 0.0 {
        for b in block.iter_mut() {
            *b /= sum;
        }
    }
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
