//! Probability vectors over finite action sets.

use serde::{Deserialize, Serialize};

use super::GameError;

/// Absolute tolerance on the total mass accepted by constructors. Inputs
/// whose mass deviates from 1 by more than this are rejected rather than
/// silently rescaled.
pub const MASS_TOLERANCE: f64 = 1e-6;

/// Most negative entry a constructor will absorb (clamping it to zero).
/// Anything below this is treated as a genuinely negative weight.
pub const NEGATIVE_SLACK: f64 = 1e-9;

/// A point in the probability simplex: non-negative weights summing to one.
///
/// Constructors renormalize small floating-point drift (mass within
/// [`MASS_TOLERANCE`] of 1, entries no more negative than
/// [`NEGATIVE_SLACK`]) and reject anything further off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, GameError> {
        if weights.is_empty() {
            return Err(GameError::EmptySimplex);
        }
        let mut weights = weights;
        for (i, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() {
                return Err(GameError::NonFiniteWeight { index: i });
            }
            if *w < -NEGATIVE_SLACK {
                return Err(GameError::NegativeWeight { index: i, value: *w });
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(GameError::MassMismatch { sum });
        }
        for w in weights.iter_mut() {
            *w /= sum;
        }
        Ok(SimplexVector(weights))
    }

    /// The uniform distribution over `len` outcomes.
    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "simplex over an empty outcome set");
        SimplexVector(vec![1.0 / len as f64; len])
    }

    /// The degenerate distribution putting all mass on `index`.
    pub fn pure(len: usize, index: usize) -> Self {
        assert!(index < len, "pure index {index} out of range for {len} outcomes");
        let mut w = vec![0.0; len];
        w[index] = 1.0;
        SimplexVector(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Largest absolute componentwise difference to `other`.
    pub fn sup_distance(&self, other: &SimplexVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl AsRef<[f64]> for SimplexVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
