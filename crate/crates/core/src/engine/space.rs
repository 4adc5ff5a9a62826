//! Observation-state spaces.
//!
//! The observation state of a run lives in a product of probability
//! simplices, flattened into one `Vec<f64>`. Three shapes cover the
//! algorithm presets: one simplex block per player (marginal profiles), a
//! single simplex over joint actions, and a single simplex over a shared
//! action set (the centroid of the players' marginals).

use std::ops::Range;

use serde::{Deserialize, Serialize};

/// Block sums may drift from 1 by at most this much before a state is
/// rejected as corrupted.
pub const BLOCK_SUM_TOLERANCE: f64 = 1e-7;

/// Entries may undershoot zero by at most this much (floating-point drift).
pub const ENTRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ObservationSpace {
    /// One simplex block per player, player order; block `i` has the size
    /// of player `i`'s action set.
    MarginalProfile { action_counts: Vec<usize> },
    /// A single simplex over all joint actions (lexicographic order).
    Joint { action_counts: Vec<usize> },
    /// A single simplex over a shared action set.
    Centroid { actions: usize },
}

/// A state found outside its space, with enough context to debug it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceViolation {
    pub block: usize,
    pub detail: String,
}

impl ObservationSpace {
    pub fn dimension(&self) -> usize {
        match self {
            ObservationSpace::MarginalProfile { action_counts } => action_counts.iter().sum(),
            ObservationSpace::Joint { action_counts } => action_counts.iter().product(),
            ObservationSpace::Centroid { actions } => *actions,
        }
    }

    /// Index ranges of the simplex blocks inside the flattened state.
    pub fn blocks(&self) -> Vec<Range<usize>> {
        match self {
            ObservationSpace::MarginalProfile { action_counts } => {
                let mut out = Vec::with_capacity(action_counts.len());
                let mut start = 0;
                for &c in action_counts {
                    out.push(start..start + c);
                    start += c;
                }
                out
            }
            _ => vec![0..self.dimension()],
        }
    }

    /// The product of uniform distributions, one per block.
    pub fn uniform_point(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        for block in self.blocks() {
            let w = 1.0 / block.len() as f64;
            out[block].fill(w);
        }
        out
    }

    /// Check that `point` lies in the space up to floating-point drift.
    pub fn contains(&self, point: &[f64]) -> Result<(), SpaceViolation> {
        if point.len() != self.dimension() {
            return Err(SpaceViolation {
                block: 0,
                detail: format!("dimension {} but space needs {}", point.len(), self.dimension()),
            });
        }
        for (b, block) in self.blocks().into_iter().enumerate() {
            let mut sum = 0.0;
            for (i, &w) in point[block.clone()].iter().enumerate() {
                if !w.is_finite() {
                    return Err(SpaceViolation {
                        block: b,
                        detail: format!("entry {} of block {b} is {w}", block.start + i),
                    });
                }
                if w < -ENTRY_TOLERANCE {
                    return Err(SpaceViolation {
                        block: b,
                        detail: format!("entry {} of block {b} is negative ({w})", block.start + i),
                    });
                }
                sum += w;
            }
            if (sum - 1.0).abs() > BLOCK_SUM_TOLERANCE {
                return Err(SpaceViolation {
                    block: b,
                    detail: format!("block {b} sums to {sum}"),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_profile_blocks() {
        let s = ObservationSpace::MarginalProfile { action_counts: vec![2, 3, 2] };
        assert_eq!(s.dimension(), 7);
        assert_eq!(s.blocks(), vec![0..2, 2..5, 5..7]);
        assert!(s.contains(&s.uniform_point()).is_ok());
    }

    #[test]
    fn joint_space_dimension_is_table_size() {
        let s = ObservationSpace::Joint { action_counts: vec![2, 3, 2] };
        assert_eq!(s.dimension(), 12);
        assert!(s.contains(&s.uniform_point()).is_ok());
    }

    #[test]
    fn rejects_bad_block_sum() {
        let s = ObservationSpace::MarginalProfile { action_counts: vec![2, 2] };
        let err = s.contains(&[0.5, 0.5, 0.7, 0.7]).unwrap_err();
        assert_eq!(err.block, 1);
    }

    #[test]
    fn rejects_negative_entry_and_nan() {
        let s = ObservationSpace::Centroid { actions: 2 };
        assert!(s.contains(&[1.1, -0.1]).is_err());
        assert!(s.contains(&[f64::NAN, 1.0]).is_err());
        assert!(s.contains(&[0.5, 0.5]).is_ok());
    }
}
