//! Core library of the fp-lab simulator.
//!
//! Learning processes of the fictitious-play family share one skeleton: an
//! observation state `z` is averaged over time while every player picks a
//! (near-)best response to a forecast derived from `z`. This crate provides
//! that skeleton and the pieces around it:
//!
//! - [`game`]: finite normal-form games, mixed strategies, best-response
//!   sets, equilibrium gaps, and a small exact equilibrium oracle;
//! - [`engine`]: step-size and perturbation schedules, observation spaces,
//!   the algorithm presets (classical fictitious play, joint-strategy
//!   fictitious play, and the two empirical-centroid variants), and the
//!   deterministic run loop with trace capture;
//! - [`diagnostics`]: piecewise-linear interpolation of runs onto
//!   continuous time and empirical certification that relaxed
//!   best-response sets embed into perturbed exact ones;
//! - [`distributed`]: multi-agent runs where each agent tracks the
//!   observation state through a communication graph instead of seeing it
//!   directly;
//! - [`asynchrony`]: runs where players revise at their own (possibly
//!   random or adaptively throttled) instants.
//!
//! Every stochastic component draws from a caller-seeded ChaCha stream, so
//! identical configurations replay identical traces.

pub mod asynchrony;
pub mod diagnostics;
pub mod distributed;
pub mod engine;
pub mod game;
