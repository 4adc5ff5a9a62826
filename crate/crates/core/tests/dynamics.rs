//! Cross-module behavior of the synchronous engine at moderate horizons.

use fp_lab_core::engine::{
    cne_gap, mce_gap, run, ActionSelector, FPTypeAlgorithm, MetricsConfig,
    PerturbationSchedule, RunOptions, StepSizeSchedule,
};
use fp_lab_core::game::{
    is_exact_potential, nash_gap_of_profile, presets, SimplexVector,
};

fn base(horizon: usize, seed: u64) -> RunOptions {
    RunOptions {
        horizon,
        seed,
        selector: ActionSelector::Uniform,
        metrics: MetricsConfig::none(),
        ..RunOptions::default()
    }
}

fn final_marginals(
    game: &fp_lab_core::game::Game,
    algo: &FPTypeAlgorithm,
    trace: &fp_lab_core::engine::RunTrace,
) -> Vec<SimplexVector> {
    fp_lab_core::engine::marginals_from_state(algo.space(), game, trace.final_state()).unwrap()
}

#[test]
fn matching_game_empiricals_approach_the_mixed_point() {
    let g = presets::matching_pennies();
    let algo = FPTypeAlgorithm::classical_fp(&g);
    let trace = run(&g, &algo, &base(20_000, 0)).unwrap();
    for m in final_marginals(&g, &algo, &trace) {
        assert!(m.sup_distance(&SimplexVector::uniform(2)) < 0.05);
    }
}

#[test]
fn coordination_play_locks_onto_an_equilibrium() {
    let g = presets::coordination2();
    let algo = FPTypeAlgorithm::classical_fp(&g);
    let trace = run(&g, &algo, &base(5_000, 1)).unwrap();
    let gap = nash_gap_of_profile(&g, &final_marginals(&g, &algo, &trace))
        .unwrap()
        .nash_gap;
    assert!(gap <= 1e-2, "gap {gap}");
}

#[test]
fn congestion_game_is_potential_and_converges() {
    let g = presets::congestion_3p();
    let (is_potential, phi) = is_exact_potential(&g);
    assert!(is_potential);
    assert!(phi.is_some());
    let algo = FPTypeAlgorithm::classical_fp(&g);
    let trace = run(&g, &algo, &base(5_000, 2)).unwrap();
    let gap = nash_gap_of_profile(&g, &final_marginals(&g, &algo, &trace))
        .unwrap()
        .nash_gap;
    assert!(gap <= 1e-2, "gap {gap}");
}

#[test]
fn centroid_variants_agree_action_for_action_at_scale() {
    let g = presets::congestion_3p();
    for seed in [0, 1, 2] {
        let c = run(&g, &FPTypeAlgorithm::ecfp_centroid(&g).unwrap(), &base(2_000, seed)).unwrap();
        let p = run(&g, &FPTypeAlgorithm::ecfp_profile(&g).unwrap(), &base(2_000, seed)).unwrap();
        for (a, b) in c.rows.iter().zip(p.rows.iter()) {
            assert_eq!(a.actions, b.actions, "seed {seed}, n = {}", a.n);
        }
    }
}

#[test]
fn centroid_run_drives_both_centroid_gaps_down() {
    let g = presets::congestion_3p();
    let algo = FPTypeAlgorithm::ecfp_centroid(&g).unwrap();
    let trace = run(&g, &algo, &base(5_000, 3)).unwrap();
    let centroid = SimplexVector::new(trace.final_state().to_vec()).unwrap();
    assert!(cne_gap(&g, &centroid).unwrap() <= 1e-2);
    let marginals = final_marginals(&g, &algo, &trace);
    assert!(mce_gap(&g, &marginals).unwrap() <= 1e-2);
}

#[test]
fn joint_state_is_exactly_the_empirical_joint_distribution() {
    let g = presets::congestion_3p();
    let algo = FPTypeAlgorithm::jsfp(&g);
    let trace = run(&g, &algo, &base(500, 4)).unwrap();
    let mut counts = vec![0.0f64; g.num_joint_actions()];
    for (k, row) in trace.rows.iter().enumerate() {
        counts[g.joint_index(&row.actions)] += 1.0;
        let n = (k + 1) as f64;
        for (c, s) in counts.iter().zip(&row.state) {
            assert!((c / n - s).abs() < 1e-9, "joint empirical drifted at n = {}", k + 1);
        }
    }
}

#[test]
fn vanishing_slack_still_finds_the_mixed_point() {
    let g = presets::matching_pennies();
    let algo = FPTypeAlgorithm::classical_fp(&g);
    for seed in [0, 7] {
        let opts = RunOptions {
            perturbation: PerturbationSchedule::Power { c: 1.0, b: 0.5 },
            ..base(20_000, seed)
        };
        let trace = run(&g, &algo, &opts).unwrap();
        for m in final_marginals(&g, &algo, &trace) {
            assert!(m.sup_distance(&SimplexVector::uniform(2)) < 0.05, "seed {seed}");
        }
    }
}

#[test]
fn slower_schedules_also_average_correctly() {
    // Power step sizes keep the state inside the space and the dynamic
    // still settles in the coordination game.
    let g = presets::coordination2();
    let algo = FPTypeAlgorithm::classical_fp(&g)
        .with_schedule(StepSizeSchedule::Power { a: 0.7 });
    let trace = run(&g, &algo, &base(3_000, 5)).unwrap();
    let gap = nash_gap_of_profile(&g, &final_marginals(&g, &algo, &trace))
        .unwrap()
        .nash_gap;
    assert!(gap <= 1e-2, "gap {gap}");
}

#[test]
fn traces_are_bitwise_reproducible_across_runs() {
    let g = presets::shapley3();
    let algo = FPTypeAlgorithm::classical_fp(&g);
    let a = run(&g, &algo, &base(3_000, 9)).unwrap();
    let b = run(&g, &algo, &base(3_000, 9)).unwrap();
    assert_eq!(a.fingerprint, b.fingerprint);
    for (x, y) in a.rows.iter().zip(b.rows.iter()) {
        assert_eq!(x.actions, y.actions);
        assert_eq!(x.state, y.state);
    }
}
