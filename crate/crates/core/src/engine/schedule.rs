//! Step-size and perturbation schedules.

use serde::{Deserialize, Serialize};

use super::EngineError;

/// Averaging weight `gamma(n)` applied at iteration `n >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSizeSchedule {
    /// `gamma(n) = 1/(n+1)`: the state stays the running average of the
    /// observations.
    Harmonic,
    /// `gamma(n) = n^{-a}` with `a` in (0, 1].
    Power { a: f64 },
    /// Explicit per-iteration table, entries in (0, 1].
    Custom { values: Vec<f64> },
}

impl StepSizeSchedule {
    pub fn validate(&self) -> Result<(), EngineError> {
        match self {
            StepSizeSchedule::Harmonic => Ok(()),
            StepSizeSchedule::Power { a } => {
                if !(*a > 0.0 && *a <= 1.0) {
                    return Err(EngineError::BadSchedule {
                        what: format!("step-size exponent must lie in (0, 1], got {a}"),
                    });
                }
                Ok(())
            }
            StepSizeSchedule::Custom { values } => {
                if values.is_empty() {
                    return Err(EngineError::BadSchedule {
                        what: "custom step-size table is empty".into(),
                    });
                }
                if let Some(i) = values.iter().position(|g| !(*g > 0.0 && *g <= 1.0)) {
                    return Err(EngineError::BadSchedule {
                        what: format!(
                            "custom step size at iteration {} is {}, outside (0, 1]",
                            i + 1,
                            values[i]
                        ),
                    });
                }
                Ok(())
            }
        }
    }

    /// Weight for iteration `n` (1-based).
    pub fn gamma(&self, n: usize) -> Result<f64, EngineError> {
        debug_assert!(n >= 1);
        match self {
            StepSizeSchedule::Harmonic => Ok(1.0 / (n as f64 + 1.0)),
            StepSizeSchedule::Power { a } => Ok((n as f64).powf(-a)),
            StepSizeSchedule::Custom { values } => values
                .get(n - 1)
                .copied()
                .ok_or(EngineError::ScheduleExhausted { n, len: values.len() }),
        }
    }
}

/// Per-iteration slack `eps_n` allowed when players pick their actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSchedule {
    /// Exact best responses throughout.
    Zero,
    /// `eps_n = c * n^{-b}` with `c >= 0`, `b > 0`: vanishing slack.
    Power { c: f64, b: f64 },
    /// Explicit non-negative table.
    Custom { values: Vec<f64> },
}

impl PerturbationSchedule {
    pub fn validate(&self) -> Result<(), EngineError> {
        match self {
            PerturbationSchedule::Zero => Ok(()),
            PerturbationSchedule::Power { c, b } => {
                if !(*c >= 0.0) {
                    return Err(EngineError::BadSchedule {
                        what: format!("perturbation scale must be non-negative, got {c}"),
                    });
                }
                if !(*b > 0.0) {
                    return Err(EngineError::BadSchedule {
                        what: format!("perturbation decay must be positive, got {b}"),
                    });
                }
                Ok(())
            }
            PerturbationSchedule::Custom { values } => {
                if let Some(i) = values.iter().position(|e| !(*e >= 0.0)) {
                    return Err(EngineError::BadSchedule {
                        what: format!(
                            "perturbation at iteration {} is {}, must be non-negative",
                            i + 1,
                            values[i]
                        ),
                    });
                }
                Ok(())
            }
        }
    }

    /// Slack for the action choice made at iteration `n` (1-based).
    pub fn epsilon(&self, n: usize) -> Result<f64, EngineError> {
        debug_assert!(n >= 1);
        match self {
            PerturbationSchedule::Zero => Ok(0.0),
            PerturbationSchedule::Power { c, b } => Ok(c * (n as f64).powf(-b)),
            PerturbationSchedule::Custom { values } => values
                .get(n - 1)
                .copied()
                .ok_or(EngineError::ScheduleExhausted { n, len: values.len() }),
        }
    }
}
