//! Algorithm presets: observation map, forecast maps, step-size schedule.
//!
//! An algorithm of this family is a triple: a step-size schedule, an
//! observation map `g` taking the joint strategy just played into the
//! observation space, and one forecast map per player turning the current
//! observation state into a belief about the opponents. The four presets
//! differ only in those maps:
//!
//! | preset             | state                      | forecast for player i            |
//! |--------------------|----------------------------|----------------------------------|
//! | classical          | per-player marginals       | opponents' blocks                |
//! | joint-strategy     | distribution over joints   | conditional with own axis summed |
//! | centroid           | average of all marginals   | every opponent plays the average |
//! | centroid (profile) | per-player marginals       | every opponent plays the average |

use std::sync::Arc;

use crate::game::{Game, JointMixedStrategy, OpponentStrategy, SimplexVector};

use super::{
    permutation_invariance_check, EngineError, ObservationSpace, StepSizeSchedule,
};

/// The observation and forecast maps of one algorithm.
pub trait ObservationKernel: Send + Sync {
    fn name(&self) -> &'static str;

    fn space(&self) -> &ObservationSpace;

    /// The observation map `g`: image of a joint strategy in the space.
    fn observe(&self, x: &JointMixedStrategy, game: &Game) -> Result<Vec<f64>, EngineError>;

    /// The forecast map of `player`: belief about the opponents derived
    /// from the state `z`.
    fn forecast(&self, player: usize, z: &[f64], game: &Game)
        -> Result<OpponentStrategy, EngineError>;

    /// Per-agent additive decomposition of the observation map, when one
    /// exists. Required by the distributed runtime, where each agent can
    /// only announce its own action.
    fn separable(&self) -> Option<&dyn SeparableObservation> {
        None
    }
}

/// Additive split of the observation map across agents:
/// `g(joint pure action) = sum_i contribution(i, action_i)`, and
/// `sum_i share(i, z) = z` splits any state into per-agent parts.
pub trait SeparableObservation: Send + Sync {
    fn contribution(&self, agent: usize, action: usize) -> Vec<f64>;
    fn share(&self, agent: usize, z: &[f64]) -> Vec<f64>;
}

/// A runnable algorithm: kernel plus step-size schedule.
#[derive(Clone)]
pub struct FPTypeAlgorithm {
    pub schedule: StepSizeSchedule,
    kernel: Arc<dyn ObservationKernel>,
}

impl std::fmt::Debug for FPTypeAlgorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FPTypeAlgorithm")
            .field("name", &self.kernel.name())
            .field("schedule", &self.schedule)
            .finish()
    }
}

impl FPTypeAlgorithm {
    /// Classical fictitious play: the state is the profile of per-player
    /// empirical marginals, each player best-responds to the opponents'
    /// blocks. Step size 1/(n+1) keeps the state an exact running average.
    pub fn classical_fp(game: &Game) -> Self {
        FPTypeAlgorithm {
            schedule: StepSizeSchedule::Harmonic,
            kernel: Arc::new(ClassicalKernel::new(game)),
        }
    }

    /// Joint-strategy variant: the state is the empirical distribution of
    /// joint actions; each player's forecast sums out their own axis,
    /// keeping the opponents' correlation.
    pub fn jsfp(game: &Game) -> Self {
        FPTypeAlgorithm {
            schedule: StepSizeSchedule::Harmonic,
            kernel: Arc::new(JsfpKernel::new(game)),
        }
    }

    /// Centroid variant: the state is the average of all players' marginals
    /// over a shared action set, and everyone forecasts every opponent to
    /// play that average. Requires an anonymous game (players
    /// interchangeable); rejected otherwise.
    pub fn ecfp_centroid(game: &Game) -> Result<Self, EngineError> {
        require_anonymous(game)?;
        Ok(FPTypeAlgorithm {
            schedule: StepSizeSchedule::Harmonic,
            kernel: Arc::new(EcfpCentroidKernel::new(game)),
        })
    }

    /// Profile-space centroid variant: the state keeps per-player
    /// marginals, but forecasts average them first. Action-for-action
    /// equivalent to [`FPTypeAlgorithm::ecfp_centroid`] under the same
    /// seed; kept separate because the stored state differs.
    pub fn ecfp_profile(game: &Game) -> Result<Self, EngineError> {
        require_anonymous(game)?;
        Ok(FPTypeAlgorithm {
            schedule: StepSizeSchedule::Harmonic,
            kernel: Arc::new(EcfpProfileKernel::new(game)),
        })
    }

    /// User-supplied maps; no structural checks beyond the space shape.
    pub fn custom(schedule: StepSizeSchedule, kernel: Arc<dyn ObservationKernel>) -> Self {
        FPTypeAlgorithm { schedule, kernel }
    }

    pub fn with_schedule(mut self, schedule: StepSizeSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn name(&self) -> &'static str {
        self.kernel.name()
    }

    pub fn space(&self) -> &ObservationSpace {
        self.kernel.space()
    }

    pub fn observe(&self, x: &JointMixedStrategy, game: &Game) -> Result<Vec<f64>, EngineError> {
        self.kernel.observe(x, game)
    }

    /// Observation of a pure joint action.
    pub fn observe_pure(&self, actions: &[usize], game: &Game) -> Result<Vec<f64>, EngineError> {
        self.observe(&JointMixedStrategy::pure(actions, game.action_counts()), game)
    }

    pub fn forecast(
        &self,
        player: usize,
        z: &[f64],
        game: &Game,
    ) -> Result<OpponentStrategy, EngineError> {
        self.kernel.forecast(player, z, game)
    }

    pub fn separable(&self) -> Option<&dyn SeparableObservation> {
        self.kernel.separable()
    }
}

fn require_anonymous(game: &Game) -> Result<(), EngineError> {
    let check = permutation_invariance_check(game);
    if !check.holds {
        return Err(EngineError::NotPermutationInvariant {
            reason: check.reason.unwrap_or_else(|| "permutation check failed".into()),
        });
    }
    Ok(())
}

fn check_dimension(space: &ObservationSpace, z: &[f64]) -> Result<(), EngineError> {
    if z.len() != space.dimension() {
        return Err(EngineError::StateDimension { expected: space.dimension(), got: z.len() });
    }
    Ok(())
}

// --- classical -----------------------------------------------------------

struct ClassicalKernel {
    space: ObservationSpace,
}

impl ClassicalKernel {
    fn new(game: &Game) -> Self {
        ClassicalKernel {
            space: ObservationSpace::MarginalProfile {
                action_counts: game.action_counts().to_vec(),
            },
        }
    }
}

impl ObservationKernel for ClassicalKernel {
    fn name(&self) -> &'static str {
        "fp"
    }

    fn space(&self) -> &ObservationSpace {
        &self.space
    }

    fn observe(&self, x: &JointMixedStrategy, game: &Game) -> Result<Vec<f64>, EngineError> {
        x.validate_for(game)?;
        let mut out = Vec::with_capacity(self.space.dimension());
        for i in 0..game.num_players() {
            out.extend_from_slice(x.marginal(game, i).weights());
        }
        Ok(out)
    }

    fn forecast(
        &self,
        player: usize,
        z: &[f64],
        game: &Game,
    ) -> Result<OpponentStrategy, EngineError> {
        check_dimension(&self.space, z)?;
        game.check_player(player)?;
        let blocks = self.space.blocks();
        let mut out = Vec::with_capacity(game.num_players() - 1);
        for (j, block) in blocks.into_iter().enumerate() {
            if j != player {
                out.push(SimplexVector::new(z[block].to_vec())?);
            }
        }
        Ok(OpponentStrategy::Product(out))
    }

    fn separable(&self) -> Option<&dyn SeparableObservation> {
        Some(self)
    }
}

impl SeparableObservation for ClassicalKernel {
    fn contribution(&self, agent: usize, action: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.space.dimension()];
        let block = &self.space.blocks()[agent];
        out[block.start + action] = 1.0;
        out
    }

    fn share(&self, agent: usize, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; z.len()];
        let block = self.space.blocks()[agent].clone();
        out[block.clone()].copy_from_slice(&z[block]);
        out
    }
}

// --- joint-strategy -------------------------------------------------------

struct JsfpKernel {
    space: ObservationSpace,
}

impl JsfpKernel {
    fn new(game: &Game) -> Self {
        JsfpKernel {
            space: ObservationSpace::Joint { action_counts: game.action_counts().to_vec() },
        }
    }
}

impl ObservationKernel for JsfpKernel {
    fn name(&self) -> &'static str {
        "jsfp"
    }

    fn space(&self) -> &ObservationSpace {
        &self.space
    }

    fn observe(&self, x: &JointMixedStrategy, game: &Game) -> Result<Vec<f64>, EngineError> {
        x.validate_for(game)?;
        let mut out = Vec::with_capacity(game.num_joint_actions());
        for joint in game.joint_actions() {
            out.push(x.weight_of(game, &joint));
        }
        Ok(out)
    }

    fn forecast(
        &self,
        player: usize,
        z: &[f64],
        game: &Game,
    ) -> Result<OpponentStrategy, EngineError> {
        check_dimension(&self.space, z)?;
        game.check_player(player)?;
        // Sum out the player's own axis; remaining players keep their
        // lexicographic order.
        let others: Vec<usize> =
            (0..game.num_players()).filter(|&j| j != player).collect();
        let others_len: usize = others.iter().map(|&j| game.action_count(j)).product();
        let mut strides = vec![1usize; others.len()];
        for s in (0..others.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * game.action_count(others[s + 1]);
        }
        let mut out = vec![0.0; others_len];
        for (k, &mass) in z.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let joint = game.joint_action(k);
            let flat: usize = others
                .iter()
                .zip(strides.iter())
                .map(|(&j, &s)| joint[j] * s)
                .sum();
            out[flat] += mass;
        }
        Ok(OpponentStrategy::Correlated(SimplexVector::new(out)?))
    }
}

// --- centroid -------------------------------------------------------------

struct EcfpCentroidKernel {
    space: ObservationSpace,
    num_players: usize,
}

impl EcfpCentroidKernel {
    fn new(game: &Game) -> Self {
        let actions = game
            .common_action_count()
            .expect("anonymity check guarantees a common action count");
        EcfpCentroidKernel {
            space: ObservationSpace::Centroid { actions },
            num_players: game.num_players(),
        }
    }
}

impl ObservationKernel for EcfpCentroidKernel {
    fn name(&self) -> &'static str {
        "ecfp_centroid"
    }

    fn space(&self) -> &ObservationSpace {
        &self.space
    }

    fn observe(&self, x: &JointMixedStrategy, game: &Game) -> Result<Vec<f64>, EngineError> {
        x.validate_for(game)?;
        let mut out = vec![0.0; self.space.dimension()];
        let scale = 1.0 / game.num_players() as f64;
        for i in 0..game.num_players() {
            for (a, w) in x.marginal(game, i).weights().iter().enumerate() {
                out[a] += scale * w;
            }
        }
        Ok(out)
    }

    fn forecast(
        &self,
        player: usize,
        z: &[f64],
        game: &Game,
    ) -> Result<OpponentStrategy, EngineError> {
        check_dimension(&self.space, z)?;
        game.check_player(player)?;
        let belief = SimplexVector::new(z.to_vec())?;
        Ok(OpponentStrategy::Product(vec![belief; game.num_players() - 1]))
    }

    fn separable(&self) -> Option<&dyn SeparableObservation> {
        Some(self)
    }
}

impl SeparableObservation for EcfpCentroidKernel {
    fn contribution(&self, _agent: usize, action: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.space.dimension()];
        out[action] = 1.0 / self.num_players as f64;
        out
    }

    fn share(&self, _agent: usize, z: &[f64]) -> Vec<f64> {
        let scale = 1.0 / self.num_players as f64;
        z.iter().map(|w| w * scale).collect()
    }
}

// --- centroid, profile space ----------------------------------------------

struct EcfpProfileKernel {
    space: ObservationSpace,
    actions: usize,
}

impl EcfpProfileKernel {
    fn new(game: &Game) -> Self {
        let actions = game
            .common_action_count()
            .expect("anonymity check guarantees a common action count");
        EcfpProfileKernel {
            space: ObservationSpace::MarginalProfile {
                action_counts: game.action_counts().to_vec(),
            },
            actions,
        }
    }

    fn centroid(&self, z: &[f64], num_players: usize) -> Result<SimplexVector, EngineError> {
        let mut avg = vec![0.0; self.actions];
        let scale = 1.0 / num_players as f64;
        for block in self.space.blocks() {
            for (a, &w) in z[block].iter().enumerate() {
                avg[a] += scale * w;
            }
        }
        Ok(SimplexVector::new(avg)?)
    }
}

impl ObservationKernel for EcfpProfileKernel {
    fn name(&self) -> &'static str {
        "ecfp_profile"
    }

    fn space(&self) -> &ObservationSpace {
        &self.space
    }

    fn observe(&self, x: &JointMixedStrategy, game: &Game) -> Result<Vec<f64>, EngineError> {
        x.validate_for(game)?;
        let mut out = Vec::with_capacity(self.space.dimension());
        for i in 0..game.num_players() {
            out.extend_from_slice(x.marginal(game, i).weights());
        }
        Ok(out)
    }

    fn forecast(
        &self,
        player: usize,
        z: &[f64],
        game: &Game,
    ) -> Result<OpponentStrategy, EngineError> {
        check_dimension(&self.space, z)?;
        game.check_player(player)?;
        let belief = self.centroid(z, game.num_players())?;
        Ok(OpponentStrategy::Product(vec![belief; game.num_players() - 1]))
    }

    fn separable(&self) -> Option<&dyn SeparableObservation> {
        Some(self)
    }
}

impl SeparableObservation for EcfpProfileKernel {
    fn contribution(&self, agent: usize, action: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.space.dimension()];
        let block = &self.space.blocks()[agent];
        out[block.start + action] = 1.0;
        out
    }

    fn share(&self, agent: usize, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; z.len()];
        let block = self.space.blocks()[agent].clone();
        out[block.clone()].copy_from_slice(&z[block]);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::presets;

    #[test]
    fn classical_observe_pure_gives_indicator_blocks() {
        let g = presets::matching_pennies();
        let algo = FPTypeAlgorithm::classical_fp(&g);
        let z = algo.observe_pure(&[1, 0], &g).unwrap();
        assert_eq!(z, vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn classical_forecast_returns_opponent_blocks() {
        let g = presets::matching_pennies();
        let algo = FPTypeAlgorithm::classical_fp(&g);
        let z = vec![0.3, 0.7, 0.9, 0.1];
        match algo.forecast(0, &z, &g).unwrap() {
            OpponentStrategy::Product(ps) => {
                assert_eq!(ps.len(), 1);
                assert_eq!(ps[0].weights(), &[0.9, 0.1]);
            }
            _ => panic!("classical forecast must be product form"),
        }
    }

    #[test]
    fn jsfp_observe_is_identity_on_correlated_input() {
        let g = presets::matching_pennies();
        let algo = FPTypeAlgorithm::jsfp(&g);
        let w = vec![0.1, 0.2, 0.3, 0.4];
        let x = JointMixedStrategy::Correlated(SimplexVector::new(w.clone()).unwrap());
        assert_eq!(algo.observe(&x, &g).unwrap(), w);
    }

    #[test]
    fn jsfp_forecast_of_product_state_recovers_marginal() {
        let g = presets::matching_pennies();
        let algo = FPTypeAlgorithm::jsfp(&g);
        // State = product (0.3, 0.7) x (0.9, 0.1), flattened joint weights.
        let p1 = [0.3, 0.7];
        let p2 = [0.9, 0.1];
        let mut z = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                z.push(p1[a] * p2[b]);
            }
        }
        match algo.forecast(0, &z, &g).unwrap() {
            OpponentStrategy::Correlated(w) => {
                assert!((w.get(0) - 0.9).abs() < 1e-12);
                assert!((w.get(1) - 0.1).abs() < 1e-12);
            }
            _ => panic!("joint-strategy forecast must be correlated"),
        }
    }

    #[test]
    fn centroid_observe_averages_marginals() {
        let g = presets::congestion_3p();
        let algo = FPTypeAlgorithm::ecfp_centroid(&g).unwrap();
        let z = algo.observe_pure(&[0, 0, 1], &g).unwrap();
        let third = 1.0 / 3.0;
        assert!((z[0] - 2.0 * third).abs() < 1e-12);
        assert!((z[1] - third).abs() < 1e-12);
    }

    #[test]
    fn centroid_forecast_copies_the_average_per_opponent() {
        let g = presets::congestion_3p();
        let algo = FPTypeAlgorithm::ecfp_centroid(&g).unwrap();
        let z = vec![0.25, 0.75];
        match algo.forecast(1, &z, &g).unwrap() {
            OpponentStrategy::Product(ps) => {
                assert_eq!(ps.len(), 2);
                for p in ps {
                    assert_eq!(p.weights(), &[0.25, 0.75]);
                }
            }
            _ => panic!("centroid forecast must be product form"),
        }
    }

    #[test]
    fn profile_variant_forecast_averages_blocks() {
        let g = presets::congestion_3p();
        let algo = FPTypeAlgorithm::ecfp_profile(&g).unwrap();
        let z = vec![1.0, 0.0, 0.5, 0.5, 0.0, 1.0];
        match algo.forecast(0, &z, &g).unwrap() {
            OpponentStrategy::Product(ps) => {
                for p in ps {
                    assert!((p.get(0) - 0.5).abs() < 1e-12);
                    assert!((p.get(1) - 0.5).abs() < 1e-12);
                }
            }
            _ => panic!("profile-centroid forecast must be product form"),
        }
    }

    #[test]
    fn centroid_presets_reject_non_anonymous_games() {
        let g = presets::matching_pennies();
        assert!(matches!(
            FPTypeAlgorithm::ecfp_centroid(&g),
            Err(EngineError::NotPermutationInvariant { .. })
        ));
        assert!(FPTypeAlgorithm::ecfp_profile(&g).is_err());
    }

    #[test]
    fn separability_matches_observe_on_pure_actions() {
        let g = presets::congestion_3p();
        for algo in [
            FPTypeAlgorithm::classical_fp(&g),
            FPTypeAlgorithm::ecfp_centroid(&g).unwrap(),
        ] {
            let sep = algo.separable().expect("preset is separable");
            let actions = [0usize, 1, 0];
            let mut sum = vec![0.0; algo.space().dimension()];
            for (i, &a) in actions.iter().enumerate() {
                for (s, c) in sum.iter_mut().zip(sep.contribution(i, a)) {
                    *s += c;
                }
            }
            let direct = algo.observe_pure(&actions, &g).unwrap();
            for (a, b) in sum.iter().zip(direct.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
            // Shares partition any state.
            let z = algo.space().uniform_point();
            let mut reassembled = vec![0.0; z.len()];
            for i in 0..g.num_players() {
                for (r, s) in reassembled.iter_mut().zip(sep.share(i, &z)) {
                    *r += s;
                }
            }
            for (a, b) in reassembled.iter().zip(z.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jsfp_has_no_separable_form() {
        let g = presets::matching_pennies();
        assert!(FPTypeAlgorithm::jsfp(&g).separable().is_none());
    }
}
