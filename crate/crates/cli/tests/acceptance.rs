//! Acceptance suite: one test per shipped guarantee, each printing a
//! single PASS line with the measured evidence. Run with
//! `cargo test --test acceptance -- --nocapture` to see every line.
//!
//! Tolerances are pinned here, next to the checks they gate, so the
//! guarantees cannot drift silently.

use std::process::Command;
use std::time::{Duration, Instant};

use fp_lab_core::asynchrony::{
    async_fp_run, check_embedded_identities, ct_async_run, synchrony_report, AsyncOptions,
    DiscreteSchedule, TimingRule,
};
use fp_lab_core::diagnostics::{certify_eps_delta, grid_samples, CertifyOptions};
use fp_lab_core::distributed::{
    run_distributed, ActivationModel, CommGraph, DisseminationProtocol, DistributedOptions,
};
use fp_lab_core::engine::{
    marginals_from_state, run, ActionSelector, FPTypeAlgorithm, MetricsConfig,
    PerturbationSchedule, RunOptions, RunTrace,
};
use fp_lab_core::game::{
    enumerate_ne_2xm, is_exact_potential, nash_gap_of_profile, presets, Game, SimplexVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Empirical marginals must land this close (sup norm) to the target point.
const MARGINAL_TOL: f64 = 0.05;
/// Equilibrium gaps considered "converged".
const GAP_TOL: f64 = 1e-2;
/// Cycling runs must keep at least this much equilibrium gap late in the run.
const CYCLE_FLOOR: f64 = 0.05;
/// Distributed estimates must track the true state this closely at the end.
const EST_ERROR_TOL: f64 = 0.05;
/// Distributed final gap may exceed the centralized one by at most this factor…
const GAP_RATIO: f64 = 2.0;
/// …unless both gaps are already below this floor, where the ratio of two
/// near-zero noises stops being meaningful.
const GAP_CONVERGED_FLOOR: f64 = 1e-3;
/// Poisson clocks must keep every count within 5% of the fastest agent.
const SYNC_RATIO_FLOOR: f64 = 0.95;
/// Adaptive clocks must keep wake counts at most this far apart.
const COUNT_GAP_MAX: usize = 3;
/// Profiles accepted as exact equilibria by the oracle cross-check.
const NE_GAP_TOL: f64 = 1e-8;
/// Grid-detected equilibria must sit this close to an enumerated one.
const NE_MATCH_TOL: f64 = 1e-4;
/// Wall-clock budget for the baseline run.
const RUNTIME_BUDGET: Duration = Duration::from_secs(5);

fn opts(horizon: usize, seed: u64) -> RunOptions {
    RunOptions {
        horizon,
        seed,
        selector: ActionSelector::Uniform,
        metrics: MetricsConfig::none(),
        ..RunOptions::default()
    }
}

fn final_marginals(game: &Game, algo: &FPTypeAlgorithm, trace: &RunTrace) -> Vec<SimplexVector> {
    marginals_from_state(algo.space(), game, trace.final_state()).unwrap()
}

fn final_gap(game: &Game, algo: &FPTypeAlgorithm, trace: &RunTrace) -> f64 {
    nash_gap_of_profile(game, &final_marginals(game, algo, trace)).unwrap().nash_gap
}

fn max_distance_to_uniform(marginals: &[SimplexVector]) -> f64 {
    marginals
        .iter()
        .map(|m| m.sup_distance(&SimplexVector::uniform(m.len())))
        .fold(0.0, f64::max)
}

#[test]
fn criterion_01_baseline_reaches_the_mixed_point_quickly() {
    let g = presets::matching_pennies();
    let algo = FPTypeAlgorithm::classical_fp(&g);
    let started = Instant::now();
    let trace = run(&g, &algo, &opts(100_000, 0)).unwrap();
    let elapsed = started.elapsed();
    let dist = max_distance_to_uniform(&final_marginals(&g, &algo, &trace));
    assert!(
        dist <= MARGINAL_TOL,
        "criterion 01 FAIL: marginal distance {dist} exceeds {MARGINAL_TOL}"
    );
    assert!(
        elapsed <= RUNTIME_BUDGET,
        "criterion 01 FAIL: {elapsed:?} exceeds the {RUNTIME_BUDGET:?} budget"
    );
    println!(
        "criterion 01 (baseline play reaches the mixed point): PASS — \
         distance {dist:.5} after 100000 rounds in {} ms",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_02_vanishing_slack_converges_across_seeds() {
    let g = presets::matching_pennies();
    let algo = FPTypeAlgorithm::classical_fp(&g);
    let mut worst = 0.0f64;
    for seed in 0..5 {
        let o = RunOptions {
            perturbation: PerturbationSchedule::Power { c: 1.0, b: 0.5 },
            ..opts(100_000, seed)
        };
        let trace = run(&g, &algo, &o).unwrap();
        let dist = max_distance_to_uniform(&final_marginals(&g, &algo, &trace));
        assert!(
            dist <= MARGINAL_TOL,
            "criterion 02 FAIL: seed {seed} ended {dist} from uniform"
        );
        worst = worst.max(dist);
    }
    println!(
        "criterion 02 (vanishing decision slack stays convergent): PASS — \
         worst distance {worst:.5} over 5 seeds"
    );
}

#[test]
fn criterion_03_potential_games_equilibrate() {
    let cases = [("coordination", presets::coordination2()), ("congestion", presets::congestion_3p())];
    let mut gaps = Vec::new();
    for (label, g) in &cases {
        let (is_potential, _) = is_exact_potential(g);
        assert!(is_potential, "criterion 03 FAIL: {label} game lost its potential");
        let algo = FPTypeAlgorithm::classical_fp(g);
        let trace = run(g, &algo, &opts(10_000, 1)).unwrap();
        let gap = final_gap(g, &algo, &trace);
        assert!(gap <= GAP_TOL, "criterion 03 FAIL: {label} gap {gap} exceeds {GAP_TOL}");
        gaps.push(format!("{label} {gap:.2e}"));
    }
    println!(
        "criterion 03 (exact potential games equilibrate): PASS — final gaps {}",
        gaps.join(", ")
    );
}

#[test]
fn criterion_04_cycling_game_stays_away_from_equilibrium() {
    let g = presets::shapley3();
    let algo = FPTypeAlgorithm::classical_fp(&g);
    let o = RunOptions {
        metrics: MetricsConfig { nash_gap: true, stride: 100, ..MetricsConfig::none() },
        initial_actions: Some(vec![0, 1]),
        ..opts(100_000, 0)
    };
    let trace = run(&g, &algo, &o).unwrap();
    let late_min = trace
        .rows
        .iter()
        .filter(|r| r.n >= 90_000)
        .filter_map(|r| r.metrics.nash_gap)
        .fold(f64::INFINITY, f64::min);
    assert!(
        late_min.is_finite(),
        "criterion 04 FAIL: no gap snapshots in the final decile"
    );
    assert!(
        late_min >= CYCLE_FLOOR,
        "criterion 04 FAIL: late gap fell to {late_min}, below the {CYCLE_FLOOR} floor"
    );
    println!(
        "criterion 04 (asymmetric start keeps the cycling game off equilibrium): PASS — \
         smallest final-decile gap {late_min:.4}"
    );
}

#[test]
fn criterion_05_centroid_variant_closes_both_consensus_gaps() {
    let g = presets::congestion_3p();
    let algo = FPTypeAlgorithm::ecfp_centroid(&g).unwrap();
    let o = RunOptions {
        metrics: MetricsConfig {
            nash_gap: false,
            cne_gap: true,
            mce_gap: true,
            stride: 100,
        },
        ..opts(10_000, 2)
    };
    let trace = run(&g, &algo, &o).unwrap();
    let last = trace.final_row();
    let cne = last.metrics.cne_gap.expect("final row carries metrics");
    let mce = last.metrics.mce_gap.expect("final row carries metrics");
    assert!(cne <= GAP_TOL, "criterion 05 FAIL: consensus gap {cne}");
    assert!(mce <= GAP_TOL, "criterion 05 FAIL: mixed-centroid gap {mce}");
    println!(
        "criterion 05 (centroid variant closes consensus gaps): PASS — \
         cne {cne:.2e}, mce {mce:.2e} after 10000 rounds"
    );
}

/// Distributed runs may not do meaningfully worse than the centralized
/// baseline: within `GAP_RATIO`, or both already converged past the floor.
fn gap_comparable(dist_gap: f64, central_gap: f64) -> bool {
    dist_gap <= GAP_RATIO * central_gap
        || (dist_gap <= GAP_CONVERGED_FLOOR && central_gap <= GAP_CONVERGED_FLOOR)
}

#[test]
fn criterion_06_ring_dissemination_tracks_the_centralized_run() {
    let g = presets::congestion_game(4, &[vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 4.0, 6.0, 8.0]]);
    let algo = FPTypeAlgorithm::classical_fp(&g);
    let central_gap_at = |horizon: usize| {
        let o = RunOptions { horizon, seed: 0, ..RunOptions::default() };
        let trace = run(&g, &algo, &o).unwrap();
        final_gap(&g, &algo, &trace)
    };
    let mut evidence = Vec::new();
    let scenarios: [(&str, ActivationModel, usize, usize); 2] = [
        ("static", ActivationModel::Static, 1, 10_000),
        ("lossy", ActivationModel::IidDrop { drop_probability: 0.3 }, 30, 30_000),
    ];
    for (label, model, window, horizon) in scenarios {
        let graph =
            CommGraph::ring(4).unwrap().with_model(model).unwrap().with_window(window);
        let opts = DistributedOptions { horizon, seed: 0, ..DistributedOptions::default() };
        let trace =
            run_distributed(&g, &algo, &graph, DisseminationProtocol::RunningConsensus, &opts)
                .unwrap();
        let final_err = *trace.error_series().last().unwrap();
        assert!(
            final_err <= EST_ERROR_TOL,
            "criterion 06 FAIL: {label} ring left estimate error {final_err}"
        );
        assert!(
            trace.connectivity_violations.is_empty(),
            "criterion 06 FAIL: {label} ring lost connectivity over its window"
        );
        let marginals =
            marginals_from_state(algo.space(), &g, trace.final_true_state()).unwrap();
        let dist_gap = nash_gap_of_profile(&g, &marginals).unwrap().nash_gap;
        let central_gap = central_gap_at(horizon);
        assert!(
            gap_comparable(dist_gap, central_gap),
            "criterion 06 FAIL: {label} gap {dist_gap} vs centralized {central_gap}"
        );
        evidence.push(format!(
            "{label}: est err {final_err:.1e}, gap {dist_gap:.1e} vs central {central_gap:.1e}"
        ));
    }
    println!(
        "criterion 06 (ring dissemination tracks the centralized run): PASS — {}",
        evidence.join("; ")
    );
}

#[test]
fn criterion_07_alternating_activity_equilibrates_with_clean_embeddings() {
    let g = presets::coordination2();
    let schedule = DiscreteSchedule::alternating(2, 20_000).unwrap();
    let trace = async_fp_run(&g, &schedule, &AsyncOptions::default()).unwrap();
    let gap = nash_gap_of_profile(&g, &trace.final_profile()).unwrap().nash_gap;
    assert!(gap <= GAP_TOL, "criterion 07 FAIL: gap {gap} after alternating play");
    let report = check_embedded_identities(&g, &trace).unwrap();
    assert!(
        report.ok(),
        "criterion 07 FAIL: embedded-process identities violated: {report:?}"
    );
    println!(
        "criterion 07 (alternating activity equilibrates, embeddings consistent): PASS — \
         gap {gap:.2e} over 20000 rounds"
    );
}

#[test]
fn criterion_08_poisson_clocks_stay_near_synchronous_and_converge() {
    let g = presets::matching_pennies();
    let mut worst_ratio = 1.0f64;
    let mut worst_dist = 0.0f64;
    for seed in 0..5 {
        let o = AsyncOptions { seed, ..AsyncOptions::default() };
        let ct = ct_async_run(&g, &TimingRule::Poisson { lambda: 1.0 }, 10_000.0, &o).unwrap();
        let report = synchrony_report(&ct);
        let min_ratio = report.ratios.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(
            min_ratio >= SYNC_RATIO_FLOOR && report.near_synchronous,
            "criterion 08 FAIL: seed {seed} ratio {min_ratio} under {SYNC_RATIO_FLOOR}"
        );
        let dist = max_distance_to_uniform(&ct.empirical_profile());
        assert!(
            dist <= MARGINAL_TOL,
            "criterion 08 FAIL: seed {seed} ended {dist} from the mixed point"
        );
        worst_ratio = worst_ratio.min(min_ratio);
        worst_dist = worst_dist.max(dist);
    }
    println!(
        "criterion 08 (independent exponential clocks stay near-synchronous): PASS — \
         min rate ratio {worst_ratio:.3}, worst distance {worst_dist:.4} over 5 seeds"
    );
}

#[test]
fn criterion_09_adaptive_clocks_bound_count_gaps_and_converge() {
    let g3 = presets::congestion_3p();
    let rule3 = TimingRule::Adaptive {
        base_waits: vec![1.0, 0.5, 0.25],
        budgets: vec![1.5, 1.5, 1.5],
    };
    let ct3 = ct_async_run(&g3, &rule3, 1_000.0, &AsyncOptions::default()).unwrap();
    assert!(
        ct3.max_count_gap <= COUNT_GAP_MAX,
        "criterion 09 FAIL: heterogeneous rates opened a count gap of {}",
        ct3.max_count_gap
    );
    let g2 = presets::coordination2();
    let rule2 = TimingRule::Adaptive { base_waits: vec![1.0, 0.5], budgets: vec![1.5, 1.5] };
    let ct2 = ct_async_run(&g2, &rule2, 1_000.0, &AsyncOptions::default()).unwrap();
    let gap = nash_gap_of_profile(&g2, &ct2.empirical_profile()).unwrap().nash_gap;
    assert!(gap <= GAP_TOL, "criterion 09 FAIL: coordination gap {gap} under adaptive clocks");
    println!(
        "criterion 09 (adaptive clocks bound count gaps): PASS — \
         max count gap {} with waits 4x apart, coordination gap {gap:.2e}",
        ct3.max_count_gap
    );
}

#[test]
fn criterion_10_slack_certificates_shrink_monotonically_to_zero() {
    let g = presets::matching_pennies();
    let algo = FPTypeAlgorithm::classical_fp(&g);
    let samples = grid_samples(algo.space(), 15);
    assert!(
        samples.len() >= 200,
        "criterion 10 FAIL: lattice too sparse ({} samples)",
        samples.len()
    );
    let eps_grid = [0.5, 0.1, 0.02, 0.0];
    let mut deltas = Vec::new();
    for &eps in &eps_grid {
        let cert =
            certify_eps_delta(&g, &algo, &samples, eps, &CertifyOptions::default()).unwrap();
        assert!(
            !cert.flagged_infinite,
            "criterion 10 FAIL: eps {eps} admitted an unwitnessable action"
        );
        for (i, s) in cert.samples.iter().enumerate() {
            assert!(
                s.delta.is_finite(),
                "criterion 10 FAIL: sample {i} has no finite witness at eps {eps}"
            );
        }
        deltas.push(cert.delta_min);
    }
    for pair in deltas.windows(2) {
        assert!(
            pair[0] >= pair[1],
            "criterion 10 FAIL: certified distances {deltas:?} not monotone in eps"
        );
    }
    assert_eq!(
        *deltas.last().unwrap(),
        0.0,
        "criterion 10 FAIL: zero slack must certify zero distance, got {deltas:?}"
    );
    println!(
        "criterion 10 (slack certificates shrink to zero): PASS — \
         {} samples, eps {eps_grid:?} -> delta {deltas:?}",
        samples.len()
    );
}

#[test]
fn criterion_11_closed_form_equilibria_match_the_gap_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut random_game = |counts: Vec<usize>| {
        let joints: usize = counts.iter().product();
        let utilities: Vec<Vec<f64>> = (0..counts.len())
            .map(|_| (0..joints).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect();
        Game::new(counts, utilities).unwrap()
    };

    // Lattice over one player's simplex: `levels` steps per coordinate.
    fn lattice(len: usize, levels: usize) -> Vec<SimplexVector> {
        let mut out = Vec::new();
        if len == 2 {
            for i in 0..=levels {
                let p = i as f64 / levels as f64;
                out.push(SimplexVector::new(vec![p, 1.0 - p]).unwrap());
            }
        } else {
            for a in 0..=levels {
                for b in 0..=(levels - a) {
                    let c = levels - a - b;
                    out.push(
                        SimplexVector::new(vec![
                            a as f64 / levels as f64,
                            b as f64 / levels as f64,
                            c as f64 / levels as f64,
                        ])
                        .unwrap(),
                    );
                }
            }
        }
        out
    }

    let mut checked_profiles = 0usize;
    let mut grid_hits = 0usize;
    for &m in &[2usize, 3] {
        for _ in 0..10 {
            let g = random_game(vec![2, m]);
            let equilibria = enumerate_ne_2xm(&g).unwrap();
            assert!(
                !equilibria.is_empty(),
                "criterion 11 FAIL: enumeration found no equilibrium in a finite game"
            );
            for ne in &equilibria {
                let gap = nash_gap_of_profile(&g, ne).unwrap().nash_gap;
                assert!(
                    gap <= NE_GAP_TOL,
                    "criterion 11 FAIL: enumerated profile has gap {gap}"
                );
                checked_profiles += 1;
            }
            let rows = lattice(2, 50);
            let cols = lattice(m, if m == 2 { 50 } else { 25 });
            for p in &rows {
                for q in &cols {
                    let profile = vec![p.clone(), q.clone()];
                    let gap = nash_gap_of_profile(&g, &profile).unwrap().nash_gap;
                    if gap > NE_GAP_TOL {
                        continue;
                    }
                    grid_hits += 1;
                    let matched = equilibria.iter().any(|ne| {
                        ne.iter()
                            .zip(&profile)
                            .map(|(a, b)| a.sup_distance(b))
                            .fold(0.0, f64::max)
                            <= NE_MATCH_TOL
                    });
                    assert!(
                        matched,
                        "criterion 11 FAIL: grid equilibrium {profile:?} (gap {gap:.1e}) \
                         missing from the enumeration"
                    );
                }
            }
        }
    }
    println!(
        "criterion 11 (closed-form equilibria match the gap oracle): PASS — \
         {checked_profiles} enumerated profiles verified, {grid_hits} grid equilibria all matched"
    );
}

#[test]
fn criterion_12_every_preset_replays_byte_identically() {
    let bin = env!("CARGO_BIN_EXE_fp-lab");
    let list = Command::new(bin).env_remove("FP_LAB_OUT").arg("presets").output().unwrap();
    assert!(list.status.success(), "criterion 12 FAIL: preset listing failed");
    let names: Vec<String> = String::from_utf8_lossy(&list.stdout)
        .lines()
        .filter_map(|l| l.split_whitespace().next().map(str::to_owned))
        .collect();
    assert!(names.len() >= 8, "criterion 12 FAIL: catalog shrank to {names:?}");
    let scratch = tempfile::tempdir().unwrap();
    for name in &names {
        let mut traces = Vec::new();
        for attempt in ["a", "b"] {
            let out_dir = scratch.path().join(format!("{name}-{attempt}"));
            let out = Command::new(bin)
                .env_remove("FP_LAB_OUT")
                .args(["run", "--quiet", "--config", name, "--out-dir"])
                .arg(&out_dir)
                .output()
                .unwrap();
            assert!(
                out.status.success(),
                "criterion 12 FAIL: preset {name} errored: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            traces.push(
                std::fs::read(out_dir.join(format!("{name}.trace.csv"))).unwrap(),
            );
        }
        assert_eq!(
            traces[0], traces[1],
            "criterion 12 FAIL: preset {name} produced diverging traces under one seed"
        );
    }
    println!(
        "criterion 12 (every preset replays byte-identically): PASS — \
         {} presets re-run and compared",
        names.len()
    );
}
