//! Summary of how evenly the agents' clocks fired.

use super::CtTrace;

/// Activation-count statistics of a continuous-time run.
#[derive(Debug, Clone)]
pub struct SynchronyReport {
    pub counts: Vec<usize>,
    /// Each count divided by the largest count.
    pub ratios: Vec<f64>,
    /// True when even the slowest agent reached at least 95% of the
    /// fastest agent's count: the run was effectively synchronous in rate.
    pub near_synchronous: bool,
    /// Agents that never woke after time zero.
    pub idle_agents: Vec<usize>,
    /// Largest count spread observed at any instant.
    pub max_count_gap: usize,
}

pub fn synchrony_report(trace: &CtTrace) -> SynchronyReport {
    let max = trace.counts.iter().copied().max().unwrap_or(0).max(1);
    let ratios: Vec<f64> = trace.counts.iter().map(|&c| c as f64 / max as f64).collect();
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    SynchronyReport {
        counts: trace.counts.clone(),
        near_synchronous: min_ratio >= 0.95,
        idle_agents: trace
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c <= 1)
            .map(|(i, _)| i)
            .collect(),
        ratios,
        max_count_gap: trace.max_count_gap,
    }
}
