//! Piecewise-linear embedding of a run onto its natural time axis.
//!
//! Each update with step size `gamma(n)` advances the clock by `gamma(n)`,
//! so the state sequence becomes a continuous path: knot `k` sits at
//! `tau_k = gamma(1) + ... + gamma(k)` and carries the state after update
//! `k`. Comparing runs through this embedding removes the distortion of
//! shrinking step sizes; it is the standard bridge between the discrete
//! recursion and its limiting differential inclusion.

use crate::engine::RunTrace;

/// A run's states joined linearly between knot times.
#[derive(Debug, Clone)]
pub struct InterpolatedPath {
    /// `times[k]` is the clock reading of knot `k`; `times[0] = 0`.
    times: Vec<f64>,
    /// `states[k]` is the state at `times[k]`.
    states: Vec<Vec<f64>>,
}

impl InterpolatedPath {
    /// Builds the path from a recorded run using its stored step sizes.
    pub fn from_trace(trace: &RunTrace) -> Self {
        let mut times = Vec::with_capacity(trace.rows.len());
        let mut states = Vec::with_capacity(trace.rows.len());
        times.push(0.0);
        states.push(trace.rows[0].state.clone());
        let mut t = 0.0;
        for (k, gamma) in trace.gammas.iter().enumerate() {
            t += gamma;
            times.push(t);
            states.push(trace.rows[k + 1].state.clone());
        }
        InterpolatedPath { times, states }
    }

    pub fn knot_times(&self) -> &[f64] {
        &self.times
    }

    pub fn total_time(&self) -> f64 {
        *self.times.last().expect("a path has at least one knot")
    }

    pub fn dimension(&self) -> usize {
        self.states[0].len()
    }

    /// State at clock time `t`, linearly interpolated; clamped to the ends
    /// outside the recorded range.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        if t <= self.times[0] {
            return self.states[0].clone();
        }
        let last = self.times.len() - 1;
        if t >= self.times[last] {
            return self.states[last].clone();
        }
        // First knot strictly past t; its predecessor starts the segment.
        let hi = self.times.partition_point(|&tau| tau <= t);
        let lo = hi - 1;
        let span = self.times[hi] - self.times[lo];
        let w = if span > 0.0 { (t - self.times[lo]) / span } else { 0.0 };
        self.states[lo]
            .iter()
            .zip(&self.states[hi])
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }
}
