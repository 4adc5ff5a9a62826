//! The synchronous discrete-time run loop.
//!
//! Starting from a seed joint action, each iteration lets every player pick
//! an action within `eps_n` of their best reply to the forecast derived
//! from the current state, then folds the observation of the chosen joint
//! action into the state with weight `gamma(n)`:
//!
//! ```text
//! z(n+1) = z(n) + gamma(n) * (g(sigma(n+1)) - z(n))
//! ```
//!
//! With the harmonic schedule the state is exactly the running average of
//! the observations, so the loop reproduces the textbook discrete dynamic;
//! other schedules and nonzero slack give its perturbed variants.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::game::{
    action_values, nash_gap_of_profile, qualifying_actions, Game, GameError, SimplexVector,
    TIE_TOLERANCE,
};

use super::{
    cne_gap, mce_gap, ActionSelector, EngineError, FPTypeAlgorithm, MetricSnapshot,
    ObservationSpace, PerturbationSchedule, RunTrace, TraceRow,
};

/// Convex step toward `target`: `z + gamma * (target - z)`.
pub fn observation_update(z: &[f64], target: &[f64], gamma: f64) -> Vec<f64> {
    debug_assert_eq!(z.len(), target.len());
    z.iter().zip(target).map(|(zi, ti)| zi + gamma * (ti - zi)).collect()
}

/// Result of one iteration: the joint action chosen, the updated state and
/// each player's shortfall against an exact best reply.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub actions: Vec<usize>,
    pub state: Vec<f64>,
    pub realized_subopt: Vec<f64>,
}

/// One iteration of the dynamic: every player answers the forecast from
/// `z` with an action at most `eps` below their best value (ties resolved
/// by `selector`, informed by `previous` actions), then the state moves
/// toward the observation of the chosen joint action by `gamma`.
pub fn weakened_step<R: Rng>(
    game: &Game,
    algo: &FPTypeAlgorithm,
    z: &[f64],
    gamma: f64,
    eps: f64,
    selector: &ActionSelector,
    previous: Option<&[usize]>,
    rng: &mut R,
) -> Result<StepOutcome, EngineError> {
    if !(eps >= 0.0) {
        return Err(EngineError::Game(GameError::NegativeEpsilon { eps }));
    }
    let n_players = game.num_players();
    let mut actions = Vec::with_capacity(n_players);
    let mut realized_subopt = Vec::with_capacity(n_players);
    for i in 0..n_players {
        let forecast = algo.forecast(i, z, game)?;
        let values = action_values(game, i, &forecast)?;
        let qualifying = qualifying_actions(&values, eps + TIE_TOLERANCE);
        let prev = previous.map(|p| p[i]);
        let a = selector.choose(&qualifying, prev, rng);
        let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        actions.push(a);
        realized_subopt.push((best - values[a]).max(0.0));
    }
    let target = algo.observe_pure(&actions, game)?;
    let state = observation_update(z, &target, gamma);
    Ok(StepOutcome { actions, state, realized_subopt })
}

/// Which equilibrium distances to compute along a run, and how often.
/// Distances are evaluated at the first row, the last row, and every
/// `stride`-th iteration in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub nash_gap: bool,
    pub cne_gap: bool,
    pub mce_gap: bool,
    pub stride: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { nash_gap: true, cne_gap: false, mce_gap: false, stride: 100 }
    }
}

impl MetricsConfig {
    pub fn none() -> Self {
        MetricsConfig { nash_gap: false, cne_gap: false, mce_gap: false, stride: 100 }
    }

    fn wants_any(&self) -> bool {
        self.nash_gap || self.cne_gap || self.mce_gap
    }

    fn due(&self, n: usize, horizon: usize) -> bool {
        self.wants_any() && (n == 1 || n == horizon || n % self.stride == 0)
    }
}

/// Everything a run needs besides the game and the algorithm.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Number of rows in the trace; the seed action is row 1, so `horizon`
    /// iterations perform `horizon - 1` state updates.
    pub horizon: usize,
    pub perturbation: PerturbationSchedule,
    pub selector: ActionSelector,
    pub seed: u64,
    pub metrics: MetricsConfig,
    /// Joint action for row 1; all-zeros when absent.
    pub initial_actions: Option<Vec<usize>>,
    /// Re-check after every update that the state still lies in the
    /// observation space (cheap; catches kernel bugs early).
    pub validate_states: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            horizon: 1000,
            perturbation: PerturbationSchedule::Zero,
            selector: ActionSelector::default(),
            seed: 0,
            metrics: MetricsConfig::default(),
            initial_actions: None,
            validate_states: true,
        }
    }
}

/// Runs the dynamic for `opts.horizon` iterations and records every one.
pub fn run(game: &Game, algo: &FPTypeAlgorithm, opts: &RunOptions) -> Result<RunTrace, EngineError> {
    if opts.horizon < 1 {
        return Err(EngineError::BadSchedule { what: "horizon must be at least 1".into() });
    }
    if opts.metrics.stride < 1 {
        return Err(EngineError::BadSchedule { what: "metrics stride must be at least 1".into() });
    }
    algo.schedule.validate()?;
    opts.perturbation.validate()?;
    if (opts.metrics.cne_gap || opts.metrics.mce_gap) && game.common_action_count().is_none() {
        return Err(EngineError::UnequalActionCounts);
    }

    let sigma1 = match &opts.initial_actions {
        Some(actions) => {
            if actions.len() != game.num_players() {
                return Err(GameError::OpponentArity {
                    expected: game.num_players(),
                    got: actions.len(),
                }
                .into());
            }
            for (i, &a) in actions.iter().enumerate() {
                if a >= game.action_count(i) {
                    return Err(GameError::ActionIndex {
                        player: i,
                        action: a,
                        actions: game.action_count(i),
                    }
                    .into());
                }
            }
            actions.clone()
        }
        None => vec![0; game.num_players()],
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n_players = game.num_players();
    let mut state = algo.observe_pure(&sigma1, game)?;

    let mut trace = RunTrace {
        algorithm: algo.name().to_string(),
        seed: opts.seed,
        rows: Vec::with_capacity(opts.horizon),
        gammas: Vec::with_capacity(opts.horizon.saturating_sub(1)),
        fingerprint: 0,
    };
    let metrics = if opts.metrics.due(1, opts.horizon) {
        compute_metrics(game, algo.space(), &state, &opts.metrics)?
    } else {
        MetricSnapshot::default()
    };
    trace.rows.push(TraceRow {
        n: 1,
        actions: sigma1,
        state: state.clone(),
        eps: 0.0,
        realized_subopt: vec![0.0; n_players],
        metrics,
    });

    for n in 1..opts.horizon {
        let gamma = algo.schedule.gamma(n)?;
        let eps = opts.perturbation.epsilon(n)?;
        let previous = trace.rows[n - 1].actions.clone();
        let step = weakened_step(
            game,
            algo,
            &state,
            gamma,
            eps,
            &opts.selector,
            Some(&previous),
            &mut rng,
        )?;
        if let Some(component) = step.state.iter().position(|v| !v.is_finite()) {
            return Err(EngineError::NumericAbort { iteration: n + 1, component });
        }
        if opts.validate_states {
            if let Err(v) = algo.space().contains(&step.state) {
                return Err(EngineError::StateViolation {
                    iteration: n + 1,
                    detail: format!("block {}: {}", v.block, v.detail),
                });
            }
        }
        state = step.state;
        let metrics = if opts.metrics.due(n + 1, opts.horizon) {
            compute_metrics(game, algo.space(), &state, &opts.metrics)?
        } else {
            MetricSnapshot::default()
        };
        trace.rows.push(TraceRow {
            n: n + 1,
            actions: step.actions,
            state: state.clone(),
            eps,
            realized_subopt: step.realized_subopt,
            metrics,
        });
        trace.gammas.push(gamma);
    }

    trace.fingerprint = trace.compute_fingerprint();
    Ok(trace)
}

/// Per-player mixed strategies implied by a state: the blocks of a profile
/// state, the axis marginals of a joint distribution, or copies of a
/// centroid.
pub fn marginals_from_state(
    space: &ObservationSpace,
    game: &Game,
    z: &[f64],
) -> Result<Vec<SimplexVector>, EngineError> {
    if z.len() != space.dimension() {
        return Err(EngineError::StateDimension { expected: space.dimension(), got: z.len() });
    }
    match space {
        ObservationSpace::MarginalProfile { .. } => space
            .blocks()
            .into_iter()
            .map(|b| SimplexVector::new(z[b].to_vec()).map_err(EngineError::from))
            .collect(),
        ObservationSpace::Joint { .. } => {
            let mut per_player: Vec<Vec<f64>> =
                (0..game.num_players()).map(|i| vec![0.0; game.action_count(i)]).collect();
            for (k, &mass) in z.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for (i, &a) in game.joint_action(k).iter().enumerate() {
                    per_player[i][a] += mass;
                }
            }
            per_player
                .into_iter()
                .map(|w| SimplexVector::new(w).map_err(EngineError::from))
                .collect()
        }
        ObservationSpace::Centroid { .. } => {
            let centroid = SimplexVector::new(z.to_vec())?;
            Ok(vec![centroid; game.num_players()])
        }
    }
}

fn compute_metrics(
    game: &Game,
    space: &ObservationSpace,
    z: &[f64],
    cfg: &MetricsConfig,
) -> Result<MetricSnapshot, EngineError> {
    let marginals = marginals_from_state(space, game, z)?;
    let mut snap = MetricSnapshot::default();
    if cfg.nash_gap {
        snap.nash_gap = Some(nash_gap_of_profile(game, &marginals)?.nash_gap);
    }
    if cfg.cne_gap {
        let centroid = centroid_of(&marginals)?;
        snap.cne_gap = Some(cne_gap(game, &centroid)?);
    }
    if cfg.mce_gap {
        snap.mce_gap = Some(mce_gap(game, &marginals)?);
    }
    Ok(snap)
}

fn centroid_of(marginals: &[SimplexVector]) -> Result<SimplexVector, EngineError> {
    let len = marginals[0].len();
    let scale = 1.0 / marginals.len() as f64;
    let mut avg = vec![0.0; len];
    for m in marginals {
        for (a, w) in avg.iter_mut().zip(m.weights()) {
            *a += scale * w;
        }
    }
    Ok(SimplexVector::new(avg)?)
}
