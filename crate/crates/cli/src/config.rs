//! Experiment configuration: JSON shape, semantic validation, canonical
//! fingerprint, and game loading.
//!
//! A config names a game (built-in or file), an algorithm, schedules, and
//! a runtime. Unknown keys are rejected everywhere. [`fingerprint`] hashes
//! the canonical serialization (sorted keys, no whitespace), so key order
//! and omitted-vs-explicit defaults never change the fingerprint.

use std::fs;
use std::path::Path;

use fp_lab_core::distributed::DisseminationProtocol;
use fp_lab_core::engine::{ActionSelector, PerturbationSchedule, StepSizeSchedule};
use fp_lab_core::game::{presets as game_presets, Game};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const ALGORITHMS: [&str; 4] = ["fp", "jsfp", "ecfp_centroid", "ecfp_profile"];
pub const METRICS: [&str; 3] = ["nash_gap", "cne_gap", "mce_gap"];

/// One experiment: game, algorithm, schedules, runtime, outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Built-in game name or path to a game JSON file.
    pub game: String,
    /// "fp", "jsfp", "ecfp_centroid", or "ecfp_profile".
    #[serde(default = "default_algorithm")]
    pub algorithm: String,
    /// Trace length in rounds (row 1 plays the initial actions). Ignored
    /// by continuous-time runtimes, which use `runtime.t_end`.
    #[serde(default = "default_horizon")]
    pub horizon: i64,
    /// Per-round slack for action choices.
    #[serde(default = "default_epsilon")]
    pub epsilon: PerturbationSchedule,
    /// Averaging step size.
    #[serde(default = "default_gamma")]
    pub gamma: StepSizeSchedule,
    /// Tie-breaking over qualifying actions.
    #[serde(default)]
    pub selector: ActionSelector,
    #[serde(default)]
    pub seed: u64,
    /// Which equilibrium distances to record: any of "nash_gap",
    /// "cne_gap", "mce_gap".
    #[serde(default = "default_metrics")]
    pub metrics: Vec<String>,
    /// Record metrics every `stride` rounds (plus first and last).
    #[serde(default = "default_stride")]
    pub stride: i64,
    /// Joint action for round 1; all zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_actions: Option<Vec<i64>>,
    #[serde(default)]
    pub runtime: RuntimeConfig,
    /// When present, `run` and `certify` perform the slack-to-distance
    /// sweep instead of simulating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifyConfig>,
}

fn default_algorithm() -> String {
    "fp".to_string()
}
fn default_horizon() -> i64 {
    1_000
}
fn default_epsilon() -> PerturbationSchedule {
    PerturbationSchedule::Zero
}
fn default_gamma() -> StepSizeSchedule {
    StepSizeSchedule::Harmonic
}
fn default_metrics() -> Vec<String> {
    vec!["nash_gap".to_string()]
}
fn default_stride() -> i64 {
    100
}

/// Where and how the recursion executes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuntimeConfig {
    /// Single synchronous process holding the true state.
    Central,
    /// Per-agent state estimates exchanged over a communication graph.
    Distributed(DistributedRuntime),
    /// Synchronous rounds with an explicit per-round activity mask.
    AsyncDiscrete(AsyncDiscreteRuntime),
    /// Event-driven wall-clock simulation with per-agent clocks.
    AsyncContinuous(AsyncContinuousRuntime),
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        RuntimeConfig::Central
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributedRuntime {
    pub graph: GraphConfig,
    #[serde(default = "default_protocol")]
    pub protocol: DisseminationProtocol,
}

fn default_protocol() -> DisseminationProtocol {
    DisseminationProtocol::RunningConsensus
}

/// Mirrors the library's graph model: undirected edges plus an activation
/// model choosing which edges carry messages each round.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub nodes: i64,
    pub edges: Vec<(i64, i64)>,
    /// "static", "iid_drop", "gossip", or "switching".
    #[serde(default = "default_graph_model")]
    pub model: String,
    /// Drop probability; required by (and only valid for) "iid_drop".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Rounds per topology slot; required by (and only valid for)
    /// "switching".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<i64>,
    /// Edge subsets cycled by "switching".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topologies: Option<Vec<Vec<(i64, i64)>>>,
    /// Rounds over which joint connectivity is monitored (default 1 for
    /// static graphs, 20 otherwise).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
}

fn default_graph_model() -> String {
    "static".to_string()
}

pub const GRAPH_MODELS: [&str; 4] = ["static", "iid_drop", "gossip", "switching"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsyncDiscreteRuntime {
    /// "round_robin", "bernoulli", "periodic", or "mask".
    pub rule: String,
    /// Activation probability; required by "bernoulli".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Per-agent periods; required by "periodic".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<Vec<i64>>,
    /// Explicit per-round masks; required by "mask". Overrides `horizon`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masks: Option<Vec<Vec<bool>>>,
}

pub const DISCRETE_RULES: [&str; 4] = ["round_robin", "bernoulli", "periodic", "mask"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsyncContinuousRuntime {
    /// "poisson" or "adaptive".
    pub rule: String,
    /// Wall-clock end time.
    pub t_end: f64,
    /// Wake rate; required by "poisson".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Per-agent base check intervals; required by "adaptive".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<Vec<f64>>,
    /// Per-agent catch-up budgets; required by "adaptive".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<Vec<f64>>,
}

pub const CONTINUOUS_RULES: [&str; 2] = ["poisson", "adaptive"];

/// Controls for the slack-to-distance sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    /// Slack levels, swept in the order given.
    pub eps: Vec<f64>,
    /// Lattice density: each simplex block receives every weight vector
    /// with entries that are multiples of `1/(grid_levels - 1)` (15 gives
    /// 15 points per 2-entry block, 225 grid states for a 2x2 game).
    #[serde(default = "default_grid_levels")]
    pub grid_levels: i64,
    /// Random directions tried per search radius.
    #[serde(default = "default_directions")]
    pub directions: i64,
    /// Ascending search radii; library default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
}

fn default_grid_levels() -> i64 {
    15
}
fn default_directions() -> i64 {
    32
}

impl ExperimentConfig {
    /// Semantic checks beyond JSON shape; errors name the offending field.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.game.is_empty() {
            return Err(CliError::config("game", "must name a built-in game or a file"));
        }
        if !ALGORITHMS.contains(&self.algorithm.as_str()) {
            return Err(CliError::config(
                "algorithm",
                format!("unknown algorithm `{}`, expected one of {:?}", self.algorithm, ALGORITHMS),
            ));
        }
        if self.horizon < 1 {
            return Err(CliError::config(
                "horizon",
                format!("must be a positive integer, got {}", self.horizon),
            ));
        }
        self.epsilon
            .validate()
            .map_err(|e| CliError::config("epsilon", e.to_string()))?;
        self.gamma.validate().map_err(|e| CliError::config("gamma", e.to_string()))?;
        if self.stride < 1 {
            return Err(CliError::config(
                "stride",
                format!("must be a positive integer, got {}", self.stride),
            ));
        }
        for m in &self.metrics {
            if !METRICS.contains(&m.as_str()) {
                return Err(CliError::config(
                    "metrics",
                    format!("unknown metric `{m}`, expected any of {METRICS:?}"),
                ));
            }
        }
        if let Some(init) = &self.initial_actions {
            if let Some(bad) = init.iter().find(|a| **a < 0) {
                return Err(CliError::config(
                    "initial_actions",
                    format!("action indices must be non-negative, got {bad}"),
                ));
            }
        }
        self.validate_runtime()?;
        if let Some(c) = &self.certify {
            c.validate()?;
        }
        Ok(())
    }

    fn validate_runtime(&self) -> Result<(), CliError> {
        match &self.runtime {
            RuntimeConfig::Central => Ok(()),
            RuntimeConfig::Distributed(d) => d.graph.validate(),
            RuntimeConfig::AsyncDiscrete(a) => {
                self.reject_centroid_metrics()?;
                a.validate()
            }
            RuntimeConfig::AsyncContinuous(a) => {
                self.reject_centroid_metrics()?;
                a.validate()
            }
        }
    }

    fn reject_centroid_metrics(&self) -> Result<(), CliError> {
        if self.metrics.iter().any(|m| m == "cne_gap" || m == "mce_gap") {
            return Err(CliError::config(
                "metrics",
                "asynchronous runtimes report nash_gap only",
            ));
        }
        Ok(())
    }
}

impl GraphConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.nodes < 1 {
            return Err(CliError::config(
                "graph.nodes",
                format!("must be a positive integer, got {}", self.nodes),
            ));
        }
        if let Some((a, b)) = self.edges.iter().find(|(a, b)| *a < 0 || *b < 0) {
            return Err(CliError::config(
                "graph.edges",
                format!("node indices must be non-negative, got [{a}, {b}]"),
            ));
        }
        if !GRAPH_MODELS.contains(&self.model.as_str()) {
            return Err(CliError::config(
                "graph.model",
                format!("unknown model `{}`, expected one of {GRAPH_MODELS:?}", self.model),
            ));
        }
        match self.model.as_str() {
            "iid_drop" => match self.rho {
                None => {
                    return Err(CliError::config("graph.rho", "iid_drop needs a drop probability"))
                }
                Some(r) if !(0.0..1.0).contains(&r) => {
                    return Err(CliError::config(
                        "graph.rho",
                        format!("must lie in [0, 1), got {r}"),
                    ));
                }
                _ => {}
            },
            "switching" => {
                match self.period {
                    None => {
                        return Err(CliError::config(
                            "graph.period",
                            "switching needs a rounds-per-slot period",
                        ))
                    }
                    Some(p) if p < 1 => {
                        return Err(CliError::config(
                            "graph.period",
                            format!("must be a positive integer, got {p}"),
                        ));
                    }
                    _ => {}
                }
                match &self.topologies {
                    None => {
                        return Err(CliError::config(
                            "graph.topologies",
                            "switching needs a list of edge subsets",
                        ))
                    }
                    Some(t) if t.is_empty() => {
                        return Err(CliError::config(
                            "graph.topologies",
                            "needs at least one edge subset",
                        ));
                    }
                    _ => {}
                }
            }
            _ => {}
        }
        if self.model != "iid_drop" && self.rho.is_some() {
            return Err(CliError::config("graph.rho", "only meaningful for the iid_drop model"));
        }
        if self.model != "switching" && (self.period.is_some() || self.topologies.is_some()) {
            return Err(CliError::config(
                "graph.period",
                "period/topologies are only meaningful for the switching model",
            ));
        }
        if let Some(w) = self.window {
            if w < 1 {
                return Err(CliError::config(
                    "graph.window",
                    format!("must be a positive integer, got {w}"),
                ));
            }
        }
        Ok(())
    }
}

impl AsyncDiscreteRuntime {
    fn validate(&self) -> Result<(), CliError> {
        if !DISCRETE_RULES.contains(&self.rule.as_str()) {
            return Err(CliError::config(
                "runtime.rule",
                format!("unknown rule `{}`, expected one of {DISCRETE_RULES:?}", self.rule),
            ));
        }
        match self.rule.as_str() {
            "bernoulli" => match self.p {
                None => {
                    return Err(CliError::config(
                        "runtime.p",
                        "bernoulli needs an activation probability",
                    ))
                }
                Some(p) if !(p > 0.0 && p <= 1.0) => {
                    return Err(CliError::config(
                        "runtime.p",
                        format!("must lie in (0, 1], got {p}"),
                    ));
                }
                _ => {}
            },
            "periodic" => match &self.periods {
                None => {
                    return Err(CliError::config(
                        "runtime.periods",
                        "periodic needs per-agent periods",
                    ))
                }
                Some(ps) => {
                    if let Some(bad) = ps.iter().find(|p| **p < 1) {
                        return Err(CliError::config(
                            "runtime.periods",
                            format!("periods must be positive integers, got {bad}"),
                        ));
                    }
                }
            },
            "mask" => match &self.masks {
                None => {
                    return Err(CliError::config(
                        "runtime.masks",
                        "mask needs explicit per-round activity rows",
                    ))
                }
                Some(m) if m.is_empty() => {
                    return Err(CliError::config("runtime.masks", "needs at least one round"));
                }
                _ => {}
            },
            _ => {}
        }
        if self.rule != "bernoulli" && self.p.is_some() {
            return Err(CliError::config("runtime.p", "only meaningful for the bernoulli rule"));
        }
        if self.rule != "periodic" && self.periods.is_some() {
            return Err(CliError::config(
                "runtime.periods",
                "only meaningful for the periodic rule",
            ));
        }
        if self.rule != "mask" && self.masks.is_some() {
            return Err(CliError::config("runtime.masks", "only meaningful for the mask rule"));
        }
        Ok(())
    }
}

impl AsyncContinuousRuntime {
    fn validate(&self) -> Result<(), CliError> {
        if !CONTINUOUS_RULES.contains(&self.rule.as_str()) {
            return Err(CliError::config(
                "runtime.rule",
                format!("unknown rule `{}`, expected one of {CONTINUOUS_RULES:?}", self.rule),
            ));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(CliError::config(
                "runtime.t_end",
                format!("must be a positive finite time, got {}", self.t_end),
            ));
        }
        match self.rule.as_str() {
            "poisson" => match self.lambda {
                None => {
                    return Err(CliError::config("runtime.lambda", "poisson needs a wake rate"))
                }
                Some(l) if !(l > 0.0) || !l.is_finite() => {
                    return Err(CliError::config(
                        "runtime.lambda",
                        format!("must be a positive finite rate, got {l}"),
                    ));
                }
                _ => {}
            },
            "adaptive" => {
                let w0 = self.w0.as_ref().ok_or_else(|| {
                    CliError::config("runtime.w0", "adaptive needs per-agent base waits")
                })?;
                let budget = self.budget.as_ref().ok_or_else(|| {
                    CliError::config("runtime.budget", "adaptive needs per-agent budgets")
                })?;
                if let Some(bad) = w0.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
                    return Err(CliError::config(
                        "runtime.w0",
                        format!("waits must be positive and finite, got {bad}"),
                    ));
                }
                if let Some(bad) = budget.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
                    return Err(CliError::config(
                        "runtime.budget",
                        format!("budgets must be positive and finite, got {bad}"),
                    ));
                }
            }
            _ => {}
        }
        if self.rule != "poisson" && self.lambda.is_some() {
            return Err(CliError::config(
                "runtime.lambda",
                "only meaningful for the poisson rule",
            ));
        }
        if self.rule != "adaptive" && (self.w0.is_some() || self.budget.is_some()) {
            return Err(CliError::config(
                "runtime.w0",
                "w0/budget are only meaningful for the adaptive rule",
            ));
        }
        Ok(())
    }
}

impl CertifyConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.eps.is_empty() {
            return Err(CliError::config("certify.eps", "needs at least one slack level"));
        }
        if let Some(bad) = self.eps.iter().find(|e| !(**e >= 0.0) || !e.is_finite()) {
            return Err(CliError::config(
                "certify.eps",
                format!("slack levels must be non-negative and finite, got {bad}"),
            ));
        }
        if self.grid_levels < 2 {
            return Err(CliError::config(
                "certify.grid_levels",
                format!("a lattice needs at least two levels, got {}", self.grid_levels),
            ));
        }
        if self.directions < 1 {
            return Err(CliError::config(
                "certify.directions",
                format!("must be a positive integer, got {}", self.directions),
            ));
        }
        if let Some(radii) = &self.radii {
            if radii.is_empty() {
                return Err(CliError::config("certify.radii", "needs at least one radius"));
            }
            if let Some(bad) = radii.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
                return Err(CliError::config(
                    "certify.radii",
                    format!("radii must be non-negative and finite, got {bad}"),
                ));
            }
        }
        Ok(())
    }
}

/// Parses and validates a config from JSON text.
pub fn from_json_str(text: &str) -> Result<ExperimentConfig, CliError> {
    let cfg: ExperimentConfig = serde_json::from_str(text)
        .map_err(|e| CliError::config("config", e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Resolves `source` as a built-in preset name first, then as a file path.
/// Returns the run name (preset name or file stem) with the config.
pub fn load(source: &str) -> Result<(String, ExperimentConfig), CliError> {
    if let Some(cfg) = crate::presets::find(source) {
        return Ok((source.to_string(), cfg));
    }
    let path = Path::new(source);
    if !path.is_file() {
        return Err(CliError::config(
            "config",
            format!("`{source}` is neither a built-in preset nor a config file"),
        ));
    }
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config("config", format!("cannot read `{source}`: {e}")))?;
    let cfg = from_json_str(&text)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".to_string());
    Ok((name, cfg))
}

/// First 16 hex digits of the SHA-256 of the canonical serialization.
/// serde_json maps are sorted, so key order in the source file is
/// irrelevant; defaults are materialized before hashing.
pub fn fingerprint(cfg: &ExperimentConfig) -> String {
    let value = serde_json::to_value(cfg).expect("config is plain data");
    let digest = Sha256::digest(value.to_string().as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    players: i64,
    actions: Vec<i64>,
    utilities: Vec<Vec<f64>>,
}

/// Resolves a game reference: built-in name first, then a JSON file of
/// the form `{"players": N, "actions": [..], "utilities": [[..], ..]}`
/// with each table flattened in lexicographic joint-action order (player
/// 1 most significant).
pub fn load_game(reference: &str) -> Result<Game, CliError> {
    if let Some(game) = game_presets::by_name(reference) {
        return Ok(game);
    }
    let path = Path::new(reference);
    if !path.is_file() {
        return Err(CliError::config(
            "game",
            format!(
                "`{reference}` is neither a built-in game ({:?}) nor a file",
                game_presets::NAMES
            ),
        ));
    }
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config("game", format!("cannot read `{reference}`: {e}")))?;
    let file: GameFile = serde_json::from_str(&text)
        .map_err(|e| CliError::config("game", format!("`{reference}`: {e}")))?;
    if file.players < 2 {
        return Err(CliError::config(
            "game",
            format!("`players` must be at least 2, got {}", file.players),
        ));
    }
    if file.actions.len() != file.players as usize {
        return Err(CliError::config(
            "game",
            format!(
                "`actions` lists {} entries for {} players",
                file.actions.len(),
                file.players
            ),
        ));
    }
    if let Some(bad) = file.actions.iter().find(|a| **a < 1) {
        return Err(CliError::config(
            "game",
            format!("action counts must be positive, got {bad}"),
        ));
    }
    if file.utilities.len() != file.players as usize {
        return Err(CliError::config(
            "game",
            format!(
                "`utilities` lists {} tables for {} players",
                file.utilities.len(),
                file.players
            ),
        ));
    }
    let counts: Vec<usize> = file.actions.iter().map(|a| *a as usize).collect();
    Game::new(counts, file.utilities).map_err(|e| CliError::config("game", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{"game": "matching_pennies"}"#
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = from_json_str(minimal()).unwrap();
        assert_eq!(cfg.algorithm, "fp");
        assert_eq!(cfg.horizon, 1_000);
        assert_eq!(cfg.epsilon, PerturbationSchedule::Zero);
        assert_eq!(cfg.gamma, StepSizeSchedule::Harmonic);
        assert_eq!(cfg.selector, ActionSelector::Sticky);
        assert_eq!(cfg.metrics, vec!["nash_gap"]);
        assert!(matches!(cfg.runtime, RuntimeConfig::Central));
    }

    #[test]
    fn negative_horizon_names_the_field() {
        let err = from_json_str(r#"{"game": "matching_pennies", "horizon": -5}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("horizon"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_top_level_key_is_rejected() {
        let err =
            from_json_str(r#"{"game": "matching_pennies", "horizons": 10}"#).unwrap_err();
        assert!(err.to_string().contains("horizons"), "{err}");
    }

    #[test]
    fn unknown_runtime_key_is_rejected() {
        let err = from_json_str(
            r#"{"game": "matching_pennies",
                "runtime": {"kind": "async_continuous", "rule": "poisson",
                            "t_end": 10.0, "lambda": 1.0, "lambada": 2.0}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("lambada"), "{err}");
    }

    #[test]
    fn runtime_blocks_parse_and_cross_validate() {
        let ok = from_json_str(
            r#"{"game": "congestion_3p",
                "runtime": {"kind": "distributed",
                            "graph": {"nodes": 3, "edges": [[0,1],[1,2],[0,2]]}}}"#,
        )
        .unwrap();
        assert!(matches!(ok.runtime, RuntimeConfig::Distributed(_)));

        let err = from_json_str(
            r#"{"game": "congestion_3p",
                "runtime": {"kind": "distributed",
                            "graph": {"nodes": 3, "edges": [[0,1]], "model": "iid_drop"}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("graph.rho"), "{err}");

        let err = from_json_str(
            r#"{"game": "matching_pennies",
                "runtime": {"kind": "async_discrete", "rule": "bernoulli"}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("runtime.p"), "{err}");

        let err = from_json_str(
            r#"{"game": "matching_pennies", "metrics": ["cne_gap"],
                "runtime": {"kind": "async_continuous", "rule": "poisson",
                            "t_end": 10.0, "lambda": 1.0}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("metrics"), "{err}");
    }

    #[test]
    fn fingerprint_ignores_key_order_and_materialized_defaults() {
        let a = from_json_str(r#"{"game": "matching_pennies", "horizon": 50, "seed": 3}"#)
            .unwrap();
        let b = from_json_str(
            r#"{"seed": 3, "horizon": 50, "game": "matching_pennies",
                "algorithm": "fp", "stride": 100}"#,
        )
        .unwrap();
        assert_eq!(fingerprint(&a), fingerprint(&b));
        let c = from_json_str(r#"{"game": "matching_pennies", "horizon": 51, "seed": 3}"#)
            .unwrap();
        assert_ne!(fingerprint(&a), fingerprint(&c));
        assert_eq!(fingerprint(&a).len(), 16);
    }

    #[test]
    fn game_files_load_and_misshapen_ones_name_the_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.json");
        std::fs::write(
            &path,
            r#"{"players": 2, "actions": [2, 2],
                "utilities": [[1, -1, -1, 1], [-1, 1, 1, -1]]}"#,
        )
        .unwrap();
        let game = load_game(path.to_str().unwrap()).unwrap();
        assert_eq!(game.num_players(), 2);
        assert_eq!(game.utility(0, &[0, 0]), 1.0);

        let bad = dir.path().join("bad.json");
        std::fs::write(
            &bad,
            r#"{"players": 3, "actions": [2, 2], "utilities": [[0], [0], [0]]}"#,
        )
        .unwrap();
        let err = load_game(bad.to_str().unwrap()).unwrap_err();
        assert!(err.to_string().contains("actions"), "{err}");
    }

    #[test]
    fn certify_block_validates() {
        let err = from_json_str(
            r#"{"game": "matching_pennies", "certify": {"eps": []}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("certify.eps"), "{err}");
        let ok = from_json_str(
            r#"{"game": "matching_pennies", "certify": {"eps": [0.5, 0.0]}}"#,
        )
        .unwrap();
        let c = ok.certify.unwrap();
        assert_eq!(c.grid_levels, 15);
        assert_eq!(c.directions, 32);
    }
}
