//! Tie-breaking among qualifying actions.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// How a player picks one action out of a (near-)best-response set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSelector {
    /// Lowest qualifying index; fully deterministic.
    FirstIndex,
    /// Uniform draw over the qualifying set.
    Uniform,
    /// Keep the previous action while it still qualifies, otherwise fall
    /// back to the lowest index. The default: it avoids chattering between
    /// tied actions.
    Sticky,
}

impl Default for ActionSelector {
    fn default() -> Self {
        ActionSelector::Sticky
    }
}

impl ActionSelector {
    /// Pick one member of `qualifying` (non-empty, ascending).
    pub fn choose<R: Rng>(
        &self,
        qualifying: &[usize],
        previous: Option<usize>,
        rng: &mut R,
    ) -> usize {
        debug_assert!(!qualifying.is_empty());
        match self {
            ActionSelector::FirstIndex => qualifying[0],
            ActionSelector::Uniform => qualifying[rng.random_range(0..qualifying.len())],
            ActionSelector::Sticky => match previous {
                Some(prev) if qualifying.contains(&prev) => prev,
                _ => qualifying[0],
            },
        }
    }
}
