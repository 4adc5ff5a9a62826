//! Activity schedules: which agents act in which round.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AsyncError;

/// A fixed table of per-round activity masks. Round 1 must activate every
/// agent so that initial actions and empiricals exist.
#[derive(Debug, Clone)]
pub struct DiscreteSchedule {
    /// `masks[n - 1][i]` says whether agent `i` acts in round `n`.
    masks: Vec<Vec<bool>>,
}

impl DiscreteSchedule {
    pub fn from_masks(masks: Vec<Vec<bool>>) -> Result<Self, AsyncError> {
        let first = masks.first().ok_or(AsyncError::EmptySchedule)?;
        let width = first.len();
        if width == 0 {
            return Err(AsyncError::EmptySchedule);
        }
        if let Some(agent) = first.iter().position(|a| !a) {
            return Err(AsyncError::InactiveStart { agent });
        }
        for (n, row) in masks.iter().enumerate() {
            if row.len() != width {
                return Err(AsyncError::MaskWidth { n: n + 1, expected: width, got: row.len() });
            }
        }
        Ok(DiscreteSchedule { masks })
    }

    /// Everyone acts every round: the synchronous special case.
    pub fn full(players: usize, horizon: usize) -> Result<Self, AsyncError> {
        DiscreteSchedule::from_masks(vec![vec![true; players]; horizon])
    }

    /// Round 1 activates everyone; afterwards exactly one agent acts,
    /// cycling in index order.
    pub fn alternating(players: usize, horizon: usize) -> Result<Self, AsyncError> {
        let mut masks = vec![vec![true; players]];
        for n in 2..=horizon {
            let mut row = vec![false; players];
            row[(n - 2) % players] = true;
            masks.push(row);
        }
        DiscreteSchedule::from_masks(masks)
    }

    /// Agent `i` acts every `periods[i]` rounds (and in round 1).
    pub fn periodic(periods: &[usize], horizon: usize) -> Result<Self, AsyncError> {
        if periods.iter().any(|&p| p == 0) {
            return Err(AsyncError::BadTiming { what: "periods must be positive".into() });
        }
        let masks = (1..=horizon)
            .map(|n| periods.iter().map(|&p| n == 1 || (n - 1) % p == 0).collect())
            .collect();
        DiscreteSchedule::from_masks(masks)
    }

    /// After the mandatory full first round, each agent acts independently
    /// with probability `p` per round.
    pub fn bernoulli(
        players: usize,
        horizon: usize,
        p: f64,
        seed: u64,
    ) -> Result<Self, AsyncError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(AsyncError::BadTiming {
                what: format!("activity probability must lie in [0, 1], got {p}"),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut masks = vec![vec![true; players]];
        for _ in 2..=horizon {
            masks.push((0..players).map(|_| rng.random_range(0.0..1.0) < p).collect());
        }
        DiscreteSchedule::from_masks(masks)
    }

    pub fn players(&self) -> usize {
        self.masks[0].len()
    }

    pub fn horizon(&self) -> usize {
        self.masks.len()
    }

    /// Mask of round `n` (1-based).
    pub fn active(&self, n: usize) -> &[bool] {
        &self.masks[n - 1]
    }

    pub fn is_active(&self, agent: usize, n: usize) -> bool {
        self.masks[n - 1][agent]
    }

    /// `counts[i]` after the last round: how often agent `i` acted.
    pub fn activity_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.players()];
        for row in &self.masks {
            for (c, &a) in counts.iter_mut().zip(row) {
                *c += a as usize;
            }
        }
        counts
    }
}
