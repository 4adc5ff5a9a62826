//! Run records: one row per iteration plus the step sizes that produced it.

use serde::{Deserialize, Serialize};

/// Equilibrium distances computed at sampled iterations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSnapshot {
    /// Largest unilateral improvement over the marginals implied by the
    /// current state.
    pub nash_gap: Option<f64>,
    /// Deviation gain when every seat plays the state's centroid.
    pub cne_gap: Option<f64>,
    /// Deviation gain of each marginal against the centroid forecast.
    pub mce_gap: Option<f64>,
}

impl MetricSnapshot {
    pub fn is_empty(&self) -> bool {
        self.nash_gap.is_none() && self.cne_gap.is_none() && self.mce_gap.is_none()
    }
}

/// One iteration of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRow {
    /// Iteration number, starting at 1. Row 1 is the seed action; every
    /// later row is the outcome of one update.
    pub n: usize,
    /// Joint action played at this iteration.
    pub actions: Vec<usize>,
    /// State after folding this iteration's observation in.
    pub state: Vec<f64>,
    /// Slack the players were allowed when choosing `actions` (0 in row 1,
    /// where no choice was made).
    pub eps: f64,
    /// Per-player shortfall of the chosen action against the best reply to
    /// the forecast it answered; bounded by `eps` up to tie tolerance.
    pub realized_subopt: Vec<f64>,
    pub metrics: MetricSnapshot,
}

/// Complete record of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunTrace {
    /// Preset name of the algorithm that produced the trace.
    pub algorithm: String,
    pub seed: u64,
    pub rows: Vec<TraceRow>,
    /// Step size used by update `n` (taking row `n` to row `n + 1`);
    /// length is one less than the number of rows. Kept so the trace can
    /// be re-interpolated onto its natural time axis.
    pub gammas: Vec<f64>,
    /// Order-sensitive hash of actions, states and slacks; two runs agree
    /// on it exactly when they agree on every recorded value.
    pub fingerprint: u64,
}

impl RunTrace {
    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    pub fn final_row(&self) -> &TraceRow {
        self.rows.last().expect("a trace has at least one row")
    }

    pub fn final_state(&self) -> &[f64] {
        &self.final_row().state
    }

    /// FNV-1a over every recorded value, in row order.
    pub fn compute_fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write(self.algorithm.as_bytes());
        h.write_u64(self.seed);
        h.write_u64(self.rows.len() as u64);
        for row in &self.rows {
            h.write_u64(row.n as u64);
            for &a in &row.actions {
                h.write_u64(a as u64);
            }
            for &s in &row.state {
                h.write_u64(s.to_bits());
            }
            h.write_u64(row.eps.to_bits());
            for &s in &row.realized_subopt {
                h.write_u64(s.to_bits());
            }
        }
        for &g in &self.gammas {
            h.write_u64(g.to_bits());
        }
        h.finish()
    }
}

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    fn finish(&self) -> u64 {
        self.0
    }
}
