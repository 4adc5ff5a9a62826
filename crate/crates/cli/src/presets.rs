//! Built-in experiment presets: ready-to-run configs for the standard
//! demonstrations. Each preset is stored as the same JSON a user would
//! write, so it exercises the parser and validator on every lookup.

use serde_json::json;

use crate::config::ExperimentConfig;

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> serde_json::Value,
}

/// Stable list, alphabetical by name.
pub fn all() -> &'static [Preset] {
    &PRESETS
}

/// Look up a preset's config by name.
pub fn find(name: &str) -> Option<ExperimentConfig> {
    let preset = PRESETS.iter().find(|p| p.name == name)?;
    let value = (preset.build)();
    let cfg: ExperimentConfig =
        serde_json::from_value(value).expect("preset configs are well-formed");
    cfg.validate().expect("preset configs validate");
    Some(cfg)
}

static PRESETS: [Preset; 14] = [
    Preset {
        name: "adaptive_clocks",
        summary: "Heterogeneous clock rates with catch-up budgets on the congestion game; counts stay within the budget band.",
        build: || {
            json!({
                "game": "congestion_3p",
                "runtime": {
                    "kind": "async_continuous", "rule": "adaptive", "t_end": 1000.0,
                    "w0": [1.0, 0.5, 0.25], "budget": [1.5, 1.5, 1.5]
                }
            })
        },
    },
    Preset {
        name: "alternating_async",
        summary: "Agents take single-agent turns on the coordination game and still equilibrate from stale views.",
        build: || {
            json!({
                "game": "coordination2",
                "horizon": 20_000,
                "runtime": {"kind": "async_discrete", "rule": "round_robin"}
            })
        },
    },
    Preset {
        name: "congestion_potential",
        summary: "Three-commuter congestion game (exact potential); play settles into a pure split of the roads.",
        build: || {
            json!({"game": "congestion_3p", "horizon": 10_000})
        },
    },
    Preset {
        name: "coordination_potential",
        summary: "Pure coordination; play locks onto one equilibrium and the Nash gap collapses.",
        build: || {
            json!({"game": "coordination2", "horizon": 10_000})
        },
    },
    Preset {
        name: "ecfp_cne",
        summary: "Centroid-tracking play on the congestion game; the consensus-equilibrium gaps vanish.",
        build: || {
            json!({
                "game": "congestion_3p",
                "algorithm": "ecfp_centroid",
                "horizon": 10_000,
                "metrics": ["cne_gap", "mce_gap"]
            })
        },
    },
    Preset {
        name: "ecfp_profile_mce",
        summary: "Profile-space variant of centroid tracking; same play, per-player empirical blocks.",
        build: || {
            json!({
                "game": "congestion_3p",
                "algorithm": "ecfp_profile",
                "horizon": 10_000,
                "metrics": ["cne_gap", "mce_gap"]
            })
        },
    },
    Preset {
        name: "jsfp_congestion",
        summary: "Joint-strategy variant on the congestion game: one shared empirical over joint actions.",
        build: || {
            json!({"game": "congestion_3p", "algorithm": "jsfp", "horizon": 10_000})
        },
    },
    Preset {
        name: "mp_certify",
        summary: "Slack-to-distance certification sweep on matching pennies over a 225-point state lattice.",
        build: || {
            json!({
                "game": "matching_pennies",
                "certify": {"eps": [0.5, 0.1, 0.02, 0.0], "grid_levels": 15}
            })
        },
    },
    Preset {
        name: "mp_fp_baseline",
        summary: "Classical play on matching pennies; empirical mixtures settle at the 50/50 point.",
        build: || {
            json!({"game": "matching_pennies", "horizon": 100_000, "stride": 1_000})
        },
    },
    Preset {
        name: "mp_weakened_eps",
        summary: "Matching pennies with slack 1/sqrt(n) and uniform tie-breaking; the mixed point survives perturbed choice.",
        build: || {
            json!({
                "game": "matching_pennies",
                "horizon": 20_000,
                "epsilon": {"kind": "power", "c": 1.0, "b": 0.5},
                "selector": "uniform",
                "stride": 200
            })
        },
    },
    Preset {
        name: "poisson_async",
        summary: "Unit-rate Poisson clocks on matching pennies; counts stay near-synchronous, empiricals near the mixed point.",
        build: || {
            json!({
                "game": "matching_pennies",
                "runtime": {
                    "kind": "async_continuous", "rule": "poisson",
                    "lambda": 1.0, "t_end": 2000.0
                }
            })
        },
    },
    Preset {
        name: "ring_consensus",
        summary: "Distributed run on a triangle with Metropolis mixing; every agent tracks the global state.",
        build: || {
            json!({
                "game": "congestion_3p",
                "horizon": 10_000,
                "runtime": {
                    "kind": "distributed",
                    "graph": {"nodes": 3, "edges": [[0, 1], [1, 2], [0, 2]]}
                }
            })
        },
    },
    Preset {
        name: "ring_gossip",
        summary: "Distributed run where one random ring edge averages estimates each round.",
        build: || {
            json!({
                "game": "congestion_3p",
                "horizon": 10_000,
                "runtime": {
                    "kind": "distributed",
                    "protocol": "async_gossip",
                    "graph": {
                        "nodes": 3, "edges": [[0, 1], [1, 2], [0, 2]],
                        "model": "gossip", "window": 12
                    }
                }
            })
        },
    },
    Preset {
        name: "shapley_cycling",
        summary: "The 3x3 cycling game from an asymmetric start; empirical frequencies orbit forever instead of converging.",
        build: || {
            json!({
                "game": "shapley3",
                "horizon": 30_000,
                "initial_actions": [0, 1]
            })
        },
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_sorted_unique_and_large_enough() {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(names, sorted, "presets must be sorted and unique");
        assert!(names.len() >= 8);
        for required in ["mp_fp_baseline", "shapley_cycling", "ecfp_cne"] {
            assert!(names.contains(&required), "missing {required}");
        }
    }

    #[test]
    fn every_preset_parses_and_validates() {
        for p in PRESETS.iter() {
            let cfg = find(p.name).unwrap_or_else(|| panic!("preset {} missing", p.name));
            assert!(!p.summary.is_empty());
            assert!(!cfg.game.is_empty());
        }
    }

    #[test]
    fn unknown_name_is_none() {
        assert!(find("no_such_preset").is_none());
    }
}
