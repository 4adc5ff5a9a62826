//! Finite normal-form games with dense utility tables.
//!
//! A game holds one utility table per player, indexed by joint action in
//! lexicographic order: player 1's action index is the most significant
//! digit, the last player's index varies fastest. All summations over joint
//! actions throughout the crate run in this order, which keeps results
//! reproducible bit-for-bit.

mod enumerate;
mod potential;
pub mod presets;
mod response;
mod simplex;
mod strategy;

pub use enumerate::enumerate_ne_2xm;
pub use potential::is_exact_potential;
pub use response::{
    action_values, best_response_set, epsilon_best_response_set, expected_utility, nash_gap,
    nash_gap_of_profile, qualifying_actions, EquilibriumReport, TIE_TOLERANCE,
};
pub use simplex::{SimplexVector, MASS_TOLERANCE, NEGATIVE_SLACK};
pub use strategy::{JointMixedStrategy, OpponentStrategy};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("a game needs at least two players, got {players}")]
    PlayerCount { players: usize },
    #[error("player {player} has an empty action set")]
    EmptyActionSet { player: usize },
    #[error("utility table for player {player} has {got} entries, expected {expected}")]
    TableSize { player: usize, expected: usize, got: usize },
    #[error("expected {expected} utility tables (one per player), got {got}")]
    TableCount { expected: usize, got: usize },
    #[error("utility table for player {player} has a non-finite entry at joint index {index}")]
    NonFiniteUtility { player: usize, index: usize },
    #[error("strategy for player {player} has {got} weights, expected {expected}")]
    StrategyLength { player: usize, expected: usize, got: usize },
    #[error("correlated strategy has {got} weights, expected {expected}")]
    CorrelatedLength { expected: usize, got: usize },
    #[error("opponent strategy covers {got} players, expected {expected}")]
    OpponentArity { expected: usize, got: usize },
    #[error("player index {player} out of range for {players} players")]
    PlayerIndex { player: usize, players: usize },
    #[error("action index {action} out of range for player {player} ({actions} actions)")]
    ActionIndex { player: usize, action: usize, actions: usize },
    #[error("epsilon must be non-negative, got {eps}")]
    NegativeEpsilon { eps: f64 },
    #[error("this operation needs a product-form strategy profile")]
    ProductFormRequired,
    #[error("equilibrium oracle out of range: supports 2-player games with at most 4 actions per player, got {players} players with action counts {action_counts:?}")]
    OracleOutOfRange { players: usize, action_counts: Vec<usize> },
    #[error("cannot build a simplex vector over an empty outcome set")]
    EmptySimplex,
    #[error("weight {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, too far from 1 to renormalize")]
    MassMismatch { sum: f64 },
    #[error("failed to parse game file: {0}")]
    Parse(String),
    #[error("failed to read game file: {0}")]
    Io(String),
}

/// A finite normal-form game.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    action_counts: Vec<usize>,
    /// `utilities[i][k]` is player `i`'s payoff at the joint action with
    /// lexicographic index `k`.
    utilities: Vec<Vec<f64>>,
    /// `strides[i]` is the index step of one unit of player `i`'s action.
    strides: Vec<usize>,
}

impl Game {
    pub fn new(action_counts: Vec<usize>, utilities: Vec<Vec<f64>>) -> Result<Self, GameError> {
        let players = action_counts.len();
        if players < 2 {
            return Err(GameError::PlayerCount { players });
        }
        for (i, &c) in action_counts.iter().enumerate() {
            if c == 0 {
                return Err(GameError::EmptyActionSet { player: i });
            }
        }
        if utilities.len() != players {
            return Err(GameError::TableCount { expected: players, got: utilities.len() });
        }
        let table_len: usize = action_counts.iter().product();
        for (i, table) in utilities.iter().enumerate() {
            if table.len() != table_len {
                return Err(GameError::TableSize {
                    player: i,
                    expected: table_len,
                    got: table.len(),
                });
            }
            if let Some(bad) = table.iter().position(|u| !u.is_finite()) {
                return Err(GameError::NonFiniteUtility { player: i, index: bad });
            }
        }
        let mut strides = vec![1usize; players];
        for i in (0..players.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * action_counts[i + 1];
        }
        Ok(Game { action_counts, utilities, strides })
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn action_count(&self, player: usize) -> usize {
        self.action_counts[player]
    }

    pub fn num_joint_actions(&self) -> usize {
        self.utilities[0].len()
    }

    /// Lexicographic index of a joint action.
    pub fn joint_index(&self, joint: &[usize]) -> usize {
        debug_assert_eq!(joint.len(), self.num_players());
        joint
            .iter()
            .zip(self.strides.iter())
            .map(|(&a, &s)| a * s)
            .sum()
    }

    /// Inverse of [`Game::joint_index`].
    pub fn joint_action(&self, index: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.num_players());
        let mut rest = index;
        for &s in &self.strides {
            out.push(rest / s);
            rest %= s;
        }
        out
    }

    pub fn utility(&self, player: usize, joint: &[usize]) -> f64 {
        self.utilities[player][self.joint_index(joint)]
    }

    pub fn utility_by_index(&self, player: usize, joint_index: usize) -> f64 {
        self.utilities[player][joint_index]
    }

    pub fn utility_table(&self, player: usize) -> &[f64] {
        &self.utilities[player]
    }

    /// Iterate joint actions in lexicographic order.
    pub fn joint_actions(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.num_joint_actions()).map(|k| self.joint_action(k))
    }

    pub fn max_abs_utility(&self, player: usize) -> f64 {
        self.utilities[player].iter().fold(0.0, |m, u| m.max(u.abs()))
    }

    /// Width of player `i`'s payoff range (max minus min over the table).
    pub fn utility_range(&self, player: usize) -> f64 {
        let t = &self.utilities[player];
        let max = t.iter().fold(f64::NEG_INFINITY, |m, &u| m.max(u));
        let min = t.iter().fold(f64::INFINITY, |m, &u| m.min(u));
        max - min
    }

    /// True when every player has the same number of actions (a shared
    /// action set, up to labeling).
    pub fn common_action_count(&self) -> Option<usize> {
        let first = self.action_counts[0];
        self.action_counts.iter().all(|&c| c == first).then_some(first)
    }

    pub fn check_player(&self, player: usize) -> Result<(), GameError> {
        if player >= self.num_players() {
            return Err(GameError::PlayerIndex { player, players: self.num_players() });
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self, GameError> {
        let file: GameFile =
            serde_json::from_str(text).map_err(|e| GameError::Parse(e.to_string()))?;
        file.into_game()
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, GameError> {
        let text = std::fs::read_to_string(path).map_err(|e| GameError::Io(e.to_string()))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        let file = GameFile {
            players: self.num_players(),
            actions: self.action_counts.clone(),
            utilities: self.utilities.clone(),
        };
        serde_json::to_string_pretty(&file).expect("game serialization cannot fail")
    }
}

/// On-disk JSON shape of a game.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    players: usize,
    actions: Vec<usize>,
    utilities: Vec<Vec<f64>>,
}

impl GameFile {
    fn into_game(self) -> Result<Game, GameError> {
        if self.actions.len() != self.players {
            return Err(GameError::Parse(format!(
                "\"actions\" lists {} players but \"players\" is {}",
                self.actions.len(),
                self.players
            )));
        }
        Game::new(self.actions, self.utilities)
    }
}
