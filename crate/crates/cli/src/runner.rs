//! Experiment execution: builds the game and algorithm from a validated
//! config, dispatches on the runtime kind, and writes one trace CSV plus
//! one summary JSON per run (atomically, so rereads never see partial
//! files).
//!
//! CSV columns per runtime:
//! - central: `n, action_i.., z_j.., eps, realized_subopt_max, nash_gap,
//!   cne_gap, mce_gap` (metric cells empty off-stride or when not
//!   configured);
//! - distributed: `n, action_i.., z_j.., est_error_i.., max_est_error`
//!   (`z` is the reference state fed with the same actions);
//! - async_discrete: `n, active_i.., action_i.., count_i.., n_min, eps`;
//! - async_continuous: one row per wake event: `tick_index, wall_time,
//!   agent, action, count, n_min`;
//! - certify: one row per slack level: `eps, delta_min,
//!   worst_sample_index, samples_flagged_infinite`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use fp_lab_core::asynchrony::{
    async_fp_run, ct_async_run, synchrony_report, AsyncError, AsyncOptions, AsyncTrace, CtTrace,
    DiscreteSchedule, TimingRule,
};
use fp_lab_core::diagnostics::{certify_eps_delta, grid_samples, CertifyOptions};
use fp_lab_core::distributed::{
    run_distributed, ActivationModel, CommGraph, DistributedTrace,
    DistributedOptions,
};
use fp_lab_core::engine::{
    cne_gap, marginals_from_state, mce_gap, run, FPTypeAlgorithm, MetricsConfig, RunOptions,
    RunTrace,
};
use fp_lab_core::game::{nash_gap_of_profile, Game, SimplexVector};
use serde_json::{json, Map, Value};

use crate::config::{
    self, AsyncContinuousRuntime, AsyncDiscreteRuntime, CertifyConfig, DistributedRuntime,
    ExperimentConfig, GraphConfig, RuntimeConfig,
};
use crate::error::CliError;
use crate::output::{cell_f64, numbered, write_atomic, Csv};

pub struct Artifacts {
    pub trace_csv: PathBuf,
    pub summary_json: PathBuf,
    pub summary: Value,
}

struct Outcome {
    kind: &'static str,
    csv: Vec<u8>,
    extra: Map<String, Value>,
}

/// Runs `cfg` under `name` and writes `<name>.trace.csv` and
/// `<name>.summary.json` into `out_dir`. A `certify` block takes
/// precedence over the runtime.
pub fn execute(name: &str, cfg: &ExperimentConfig, out_dir: &Path) -> Result<Artifacts, CliError> {
    let game = config::load_game(&cfg.game)?;
    check_initial_actions(cfg, &game)?;
    check_pairing(cfg)?;
    let algo = build_algorithm(&game, &cfg.algorithm)?.with_schedule(cfg.gamma.clone());
    let fingerprint = config::fingerprint(cfg);

    let started = Instant::now();
    let outcome = if let Some(c) = &cfg.certify {
        run_certify(&game, &algo, cfg, c)?
    } else {
        match &cfg.runtime {
            RuntimeConfig::Central => run_central(&game, &algo, cfg)?,
            RuntimeConfig::Distributed(d) => run_over_graph(&game, &algo, cfg, d)?,
            RuntimeConfig::AsyncDiscrete(a) => run_discrete(&game, cfg, a)?,
            RuntimeConfig::AsyncContinuous(a) => run_continuous(&game, cfg, a)?,
        }
    };
    let wall_clock_ms = started.elapsed().as_millis() as u64;

    let csv_name = format!("{name}.trace.csv");
    let trace_csv = out_dir.join(&csv_name);
    let summary_json = out_dir.join(format!("{name}.summary.json"));

    let mut summary = Map::new();
    summary.insert("schema_version".into(), json!(1));
    summary.insert("name".into(), json!(name));
    summary.insert("kind".into(), json!(outcome.kind));
    summary.insert("config_fingerprint".into(), json!(fingerprint));
    summary.insert("seed".into(), json!(cfg.seed));
    summary.insert("game".into(), json!(cfg.game));
    summary.insert("algorithm".into(), json!(cfg.algorithm));
    summary.insert("wall_clock_ms".into(), json!(wall_clock_ms));
    summary.insert("artifacts".into(), json!({ "trace_csv": csv_name }));
    for (k, v) in outcome.extra {
        summary.insert(k, v);
    }
    let summary = Value::Object(summary);

    write_atomic(&trace_csv, &outcome.csv)?;
    let mut text = serde_json::to_string_pretty(&summary).expect("summary is plain data");
    text.push('\n');
    write_atomic(&summary_json, text.as_bytes())?;
    Ok(Artifacts { trace_csv, summary_json, summary })
}

fn build_algorithm(game: &Game, name: &str) -> Result<FPTypeAlgorithm, CliError> {
    Ok(match name {
        "fp" => FPTypeAlgorithm::classical_fp(game),
        "jsfp" => FPTypeAlgorithm::jsfp(game),
        "ecfp_centroid" => FPTypeAlgorithm::ecfp_centroid(game)?,
        "ecfp_profile" => FPTypeAlgorithm::ecfp_profile(game)?,
        other => unreachable!("algorithm `{other}` passed validation"),
    })
}

fn check_initial_actions(cfg: &ExperimentConfig, game: &Game) -> Result<(), CliError> {
    let Some(init) = &cfg.initial_actions else { return Ok(()) };
    if init.len() != game.num_players() {
        return Err(CliError::config(
            "initial_actions",
            format!("lists {} actions for {} players", init.len(), game.num_players()),
        ));
    }
    for (i, a) in init.iter().enumerate() {
        let count = game.action_counts()[i] as i64;
        if *a >= count {
            return Err(CliError::config(
                "initial_actions",
                format!("player {} has {count} actions, got index {a}", i + 1),
            ));
        }
    }
    Ok(())
}

/// Pairings the runtimes cannot execute, caught before any work.
fn check_pairing(cfg: &ExperimentConfig) -> Result<(), CliError> {
    match &cfg.runtime {
        RuntimeConfig::AsyncDiscrete(_) | RuntimeConfig::AsyncContinuous(_)
            if cfg.certify.is_none() && cfg.algorithm != "fp" =>
        {
            Err(CliError::config(
                "algorithm",
                "asynchronous runtimes implement classical fp only",
            ))
        }
        RuntimeConfig::Distributed(_) if cfg.certify.is_none() && cfg.algorithm == "jsfp" => {
            Err(CliError::config(
                "algorithm",
                "jsfp has no per-agent observation shares, so it cannot run distributed",
            ))
        }
        _ => Ok(()),
    }
}

fn initial_actions(cfg: &ExperimentConfig) -> Option<Vec<usize>> {
    cfg.initial_actions.as_ref().map(|v| v.iter().map(|a| *a as usize).collect())
}

fn wants(cfg: &ExperimentConfig, metric: &str) -> bool {
    cfg.metrics.iter().any(|m| m == metric)
}

fn metrics_config(cfg: &ExperimentConfig) -> MetricsConfig {
    MetricsConfig {
        nash_gap: wants(cfg, "nash_gap"),
        cne_gap: wants(cfg, "cne_gap"),
        mce_gap: wants(cfg, "mce_gap"),
        stride: cfg.stride as usize,
    }
}

// ---------------------------------------------------------------- central

fn run_central(
    game: &Game,
    algo: &FPTypeAlgorithm,
    cfg: &ExperimentConfig,
) -> Result<Outcome, CliError> {
    let opts = RunOptions {
        horizon: cfg.horizon as usize,
        perturbation: cfg.epsilon.clone(),
        selector: cfg.selector,
        seed: cfg.seed,
        metrics: metrics_config(cfg),
        initial_actions: initial_actions(cfg),
        validate_states: true,
    };
    let trace = run(game, algo, &opts)?;

    let mut extra = Map::new();
    extra.insert("horizon".into(), json!(cfg.horizon));
    extra.insert("rows".into(), json!(trace.rows.len()));
    extra.insert("trace_fingerprint".into(), json!(format!("{:016x}", trace.fingerprint)));
    let last = trace.final_row();
    let mut metrics = Map::new();
    for (key, value) in [
        ("nash_gap", last.metrics.nash_gap),
        ("cne_gap", last.metrics.cne_gap),
        ("mce_gap", last.metrics.mce_gap),
    ] {
        if let Some(v) = value {
            metrics.insert(key.into(), json!(v));
        }
    }
    extra.insert("final_metrics".into(), Value::Object(metrics));
    Ok(Outcome { kind: "central", csv: central_csv(&trace, game.num_players()), extra })
}

fn central_csv(trace: &RunTrace, players: usize) -> Vec<u8> {
    let dim = trace.rows[0].state.len();
    let mut header = vec!["n".to_string()];
    header.extend(numbered("action", players));
    header.extend(numbered("z", dim));
    for fixed in ["eps", "realized_subopt_max", "nash_gap", "cne_gap", "mce_gap"] {
        header.push(fixed.to_string());
    }
    let mut csv = Csv::new(&header);
    for row in &trace.rows {
        let mut cells = Vec::with_capacity(header.len());
        cells.push(row.n.to_string());
        cells.extend(row.actions.iter().map(|a| a.to_string()));
        cells.extend(row.state.iter().map(|z| cell_f64(*z)));
        cells.push(cell_f64(row.eps));
        cells.push(cell_f64(row.realized_subopt.iter().cloned().fold(0.0, f64::max)));
        for metric in [row.metrics.nash_gap, row.metrics.cne_gap, row.metrics.mce_gap] {
            cells.push(metric.map(cell_f64).unwrap_or_default());
        }
        csv.row(cells);
    }
    csv.into_bytes()
}

// ------------------------------------------------------------ distributed

fn run_over_graph(
    game: &Game,
    algo: &FPTypeAlgorithm,
    cfg: &ExperimentConfig,
    dist: &DistributedRuntime,
) -> Result<Outcome, CliError> {
    let graph = build_graph(&dist.graph)?;
    let opts = DistributedOptions {
        horizon: cfg.horizon as usize,
        perturbation: cfg.epsilon.clone(),
        selector: cfg.selector,
        seed: cfg.seed,
        initial_actions: initial_actions(cfg),
        check_bounds: false,
    };
    let trace = run_distributed(game, algo, &graph, dist.protocol, &opts)?;

    let marginals = marginals_from_state(algo.space(), game, trace.final_true_state())?;
    let mut extra = Map::new();
    extra.insert("horizon".into(), json!(cfg.horizon));
    extra.insert("rows".into(), json!(trace.rows.len()));
    extra.insert(
        "final_metrics".into(),
        final_metrics_from_marginals(game, &marginals, cfg)?,
    );
    extra.insert(
        "distributed".into(),
        json!({
            "protocol": dist.protocol,
            "max_est_error": trace.max_est_error,
            "connectivity_violations": trace.connectivity_violations.len(),
        }),
    );
    Ok(Outcome { kind: "distributed", csv: distributed_csv(&trace, game.num_players()), extra })
}

fn build_graph(g: &GraphConfig) -> Result<CommGraph, CliError> {
    let to_edges = |pairs: &[(i64, i64)]| -> Vec<(usize, usize)> {
        pairs.iter().map(|(a, b)| (*a as usize, *b as usize)).collect()
    };
    let model = match g.model.as_str() {
        "static" => ActivationModel::Static,
        "iid_drop" => ActivationModel::IidDrop {
            drop_probability: g.rho.expect("validated"),
        },
        "gossip" => ActivationModel::Gossip,
        "switching" => ActivationModel::Switching {
            period: g.period.expect("validated") as usize,
            topologies: g
                .topologies
                .as_ref()
                .expect("validated")
                .iter()
                .map(|t| to_edges(t))
                .collect(),
        },
        other => unreachable!("graph model `{other}` passed validation"),
    };
    let window =
        g.window.map(|w| w as usize).unwrap_or(if g.model == "static" { 1 } else { 20 });
    let graph = CommGraph::new(g.nodes as usize, to_edges(&g.edges), model)
        .map_err(|e| CliError::config("graph", e.to_string()))?;
    Ok(graph.with_window(window))
}

fn distributed_csv(trace: &DistributedTrace, players: usize) -> Vec<u8> {
    let dim = trace.rows[0].true_state.len();
    let mut header = vec!["n".to_string()];
    header.extend(numbered("action", players));
    header.extend(numbered("z", dim));
    header.extend(numbered("est_error", players));
    header.push("max_est_error".to_string());
    let mut csv = Csv::new(&header);
    for row in &trace.rows {
        let mut cells = Vec::with_capacity(header.len());
        cells.push(row.n.to_string());
        cells.extend(row.actions.iter().map(|a| a.to_string()));
        cells.extend(row.true_state.iter().map(|z| cell_f64(*z)));
        cells.extend(row.est_errors.iter().map(|e| cell_f64(*e)));
        cells.push(cell_f64(row.est_errors.iter().cloned().fold(0.0, f64::max)));
        csv.row(cells);
    }
    csv.into_bytes()
}

fn final_metrics_from_marginals(
    game: &Game,
    marginals: &[SimplexVector],
    cfg: &ExperimentConfig,
) -> Result<Value, CliError> {
    let mut obj = Map::new();
    if wants(cfg, "nash_gap") {
        obj.insert("nash_gap".into(), json!(nash_gap_of_profile(game, marginals)?.nash_gap));
    }
    if wants(cfg, "cne_gap") {
        obj.insert("cne_gap".into(), json!(cne_gap(game, &average_simplex(marginals)?)?));
    }
    if wants(cfg, "mce_gap") {
        obj.insert("mce_gap".into(), json!(mce_gap(game, marginals)?));
    }
    Ok(Value::Object(obj))
}

fn average_simplex(marginals: &[SimplexVector]) -> Result<SimplexVector, CliError> {
    let len = marginals[0].len();
    if marginals.iter().any(|m| m.len() != len) {
        return Err(CliError::runtime(
            "cne_gap needs every player to share one action count".to_string(),
        ));
    }
    let mut avg = vec![0.0; len];
    for m in marginals {
        for (a, w) in avg.iter_mut().zip(m.weights()) {
            *a += w / marginals.len() as f64;
        }
    }
    Ok(SimplexVector::new(avg)?)
}

// --------------------------------------------------------- async discrete

/// Seed tag for activity randomness, kept apart from the play stream.
fn derived_seed(seed: u64, tag: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for chunk in seed.to_le_bytes().iter().chain(tag.as_bytes()) {
        h ^= u64::from(*chunk);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn run_discrete(
    game: &Game,
    cfg: &ExperimentConfig,
    rt: &AsyncDiscreteRuntime,
) -> Result<Outcome, CliError> {
    let players = game.num_players();
    let horizon = cfg.horizon as usize;
    let as_config_error = |e: AsyncError| CliError::config("runtime", e.to_string());
    let schedule = match rt.rule.as_str() {
        "round_robin" => DiscreteSchedule::alternating(players, horizon).map_err(as_config_error)?,
        "bernoulli" => DiscreteSchedule::bernoulli(
            players,
            horizon,
            rt.p.expect("validated"),
            derived_seed(cfg.seed, "activity"),
        )
        .map_err(as_config_error)?,
        "periodic" => {
            let periods: Vec<usize> =
                rt.periods.as_ref().expect("validated").iter().map(|p| *p as usize).collect();
            if periods.len() != players {
                return Err(CliError::config(
                    "runtime.periods",
                    format!("lists {} periods for {players} players", periods.len()),
                ));
            }
            DiscreteSchedule::periodic(&periods, horizon).map_err(as_config_error)?
        }
        "mask" => DiscreteSchedule::from_masks(rt.masks.clone().expect("validated"))
            .map_err(|e| CliError::config("runtime.masks", e.to_string()))?,
        other => unreachable!("discrete rule `{other}` passed validation"),
    };
    let opts = AsyncOptions {
        perturbation: cfg.epsilon.clone(),
        selector: cfg.selector,
        seed: cfg.seed,
        initial_actions: initial_actions(cfg),
    };
    let trace = async_fp_run(game, &schedule, &opts)?;

    let mut extra = Map::new();
    extra.insert("horizon".into(), json!(trace.rows.len()));
    extra.insert("rows".into(), json!(trace.rows.len()));
    let mut metrics = Map::new();
    if wants(cfg, "nash_gap") {
        metrics.insert(
            "nash_gap".into(),
            json!(nash_gap_of_profile(game, &trace.final_profile())?.nash_gap),
        );
    }
    extra.insert("final_metrics".into(), Value::Object(metrics));
    let counts = &trace.rows.last().expect("at least one round").counts;
    extra.insert("asynchrony".into(), json!({ "counts": counts }));
    Ok(Outcome { kind: "async_discrete", csv: discrete_csv(&trace, players), extra })
}

fn discrete_csv(trace: &AsyncTrace, players: usize) -> Vec<u8> {
    let mut header = vec!["n".to_string()];
    header.extend(numbered("active", players));
    header.extend(numbered("action", players));
    header.extend(numbered("count", players));
    header.push("n_min".to_string());
    header.push("eps".to_string());
    let mut csv = Csv::new(&header);
    for row in &trace.rows {
        let mut cells = Vec::with_capacity(header.len());
        cells.push(row.n.to_string());
        cells.extend(row.active.iter().map(|a| if *a { "1" } else { "0" }.to_string()));
        cells.extend(row.actions.iter().map(|a| a.to_string()));
        cells.extend(row.counts.iter().map(|c| c.to_string()));
        cells.push(row.counts.iter().min().expect("players > 0").to_string());
        cells.push(cell_f64(row.eps));
        csv.row(cells);
    }
    csv.into_bytes()
}

// ------------------------------------------------------- async continuous

fn run_continuous(
    game: &Game,
    cfg: &ExperimentConfig,
    rt: &AsyncContinuousRuntime,
) -> Result<Outcome, CliError> {
    let players = game.num_players();
    let rule = match rt.rule.as_str() {
        "poisson" => TimingRule::Poisson { lambda: rt.lambda.expect("validated") },
        "adaptive" => {
            let w0 = rt.w0.clone().expect("validated");
            let budget = rt.budget.clone().expect("validated");
            if w0.len() != players || budget.len() != players {
                return Err(CliError::config(
                    "runtime.w0",
                    format!(
                        "w0 lists {} waits and budget {} entries for {players} players",
                        w0.len(),
                        budget.len()
                    ),
                ));
            }
            TimingRule::Adaptive { base_waits: w0, budgets: budget }
        }
        other => unreachable!("continuous rule `{other}` passed validation"),
    };
    let opts = AsyncOptions {
        perturbation: cfg.epsilon.clone(),
        selector: cfg.selector,
        seed: cfg.seed,
        initial_actions: initial_actions(cfg),
    };
    let trace = ct_async_run(game, &rule, rt.t_end, &opts).map_err(|e| match e {
        // Rejected before any event fires: the timing parameters are the
        // problem, so report a config error.
        AsyncError::BadTiming { .. }
        | AsyncError::BudgetTooSmall { .. }
        | AsyncError::BadEndTime { .. }
        | AsyncError::NonzeroFirstWake { .. }
        | AsyncError::NonMonotoneWakes { .. } => CliError::config("runtime", e.to_string()),
        other => CliError::from(other),
    })?;

    let report = synchrony_report(&trace);
    let mut extra = Map::new();
    extra.insert("t_end".into(), json!(rt.t_end));
    extra.insert("events".into(), json!(trace.events.len()));
    let mut metrics = Map::new();
    if wants(cfg, "nash_gap") {
        metrics.insert(
            "nash_gap".into(),
            json!(nash_gap_of_profile(game, &trace.empirical_profile())?.nash_gap),
        );
    }
    extra.insert("final_metrics".into(), Value::Object(metrics));
    extra.insert(
        "asynchrony".into(),
        json!({
            "counts": report.counts,
            "ratios": report.ratios,
            "near_synchronous": report.near_synchronous,
            "idle_agents": report.idle_agents,
            "max_count_gap": report.max_count_gap,
        }),
    );
    Ok(Outcome { kind: "async_continuous", csv: continuous_csv(&trace, players), extra })
}

fn continuous_csv(trace: &CtTrace, players: usize) -> Vec<u8> {
    let header: Vec<String> = ["tick_index", "wall_time", "agent", "action", "count", "n_min"]
        .map(String::from)
        .to_vec();
    let mut csv = Csv::new(&header);
    let mut counts = vec![0usize; players];
    for (i, event) in trace.events.iter().enumerate() {
        counts[event.agent] = event.count;
        let n_min = *counts.iter().min().expect("players > 0");
        csv.row(vec![
            (i + 1).to_string(),
            cell_f64(event.t),
            event.agent.to_string(),
            event.action.to_string(),
            event.count.to_string(),
            n_min.to_string(),
        ]);
    }
    csv.into_bytes()
}

// ----------------------------------------------------------- certify

fn run_certify(
    game: &Game,
    algo: &FPTypeAlgorithm,
    cfg: &ExperimentConfig,
    certify: &CertifyConfig,
) -> Result<Outcome, CliError> {
    let samples = grid_samples(algo.space(), certify.grid_levels as usize);
    let mut opts = CertifyOptions::default();
    opts.directions = certify.directions as usize;
    opts.seed = cfg.seed;
    if let Some(radii) = &certify.radii {
        opts.radii = radii.clone();
    }

    let header: Vec<String> =
        ["eps", "delta_min", "worst_sample_index", "samples_flagged_infinite"]
            .map(String::from)
            .to_vec();
    let mut csv = Csv::new(&header);
    let mut eps_levels = Vec::new();
    let mut delta_min = Vec::new();
    let mut flagged_counts = Vec::new();
    for &eps in &certify.eps {
        let cert = certify_eps_delta(game, algo, &samples, eps, &opts)?;
        let flagged = cert.samples.iter().filter(|s| s.delta.is_infinite()).count();
        csv.row(vec![
            cell_f64(eps),
            cell_f64(cert.delta_min),
            cert.worst_sample.to_string(),
            flagged.to_string(),
        ]);
        eps_levels.push(json!(eps));
        // Infinite deltas have no JSON number; they appear as null here
        // and as `inf` in the CSV.
        delta_min.push(
            serde_json::Number::from_f64(cert.delta_min).map(Value::Number).unwrap_or(Value::Null),
        );
        flagged_counts.push(json!(flagged));
    }

    let mut extra = Map::new();
    extra.insert(
        "certify".into(),
        json!({
            "eps": eps_levels,
            "delta_min": delta_min,
            "flagged_infinite": flagged_counts,
            "samples": samples.len(),
            "grid_levels": certify.grid_levels,
        }),
    );
    Ok(Outcome { kind: "certify", csv: csv.into_bytes(), extra })
}
