//! Step-size rules.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Largest edge accepted by the AdaBoost line-search rule before the
/// logarithm blows up.
pub const EDGE_CLAMP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum StepSchedule {
    /// The same step every iteration.
    Constant { step: f64 },
    /// `α = (1/L)·√(2D̄/N)` for an a-priori horizon of `N` steps.
    Horizon {
        lipschitz: f64,
        diameter: f64,
        steps: usize,
    },
    /// `αᵢ = (1/L)·√(2D̄/(i+1))`.
    Dynamic { lipschitz: f64, diameter: f64 },
    /// `αₖ = (f(xᵏ) − f*)/‖gᵏ‖₂²`; needs the optimal value.
    Polyak { optimum: Option<f64> },
    /// The original AdaBoost step `½ ln((1 + r)/(1 − r))`, `r` the current
    /// edge. Carries no complexity guarantee.
    EdgeLineSearch,
    /// Explicit steps, one per iteration.
    Sequence { steps: Vec<f64> },
}

/// What a schedule may look at when choosing `αₖ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepContext {
    pub iteration: usize,
    /// `f(xᵏ)`.
    pub primal_value: f64,
    /// `‖gᵏ‖₂²`.
    pub subgradient_sq_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSize {
    pub value: f64,
    /// The line-search rule hit an edge of 1 and had to clamp it; the run
    /// should stop after this step.
    pub saturated: bool,
}

impl StepSchedule {
    pub fn name(&self) -> &'static str {
        match self {
            StepSchedule::Constant { .. } => "constant",
            StepSchedule::Horizon { .. } => "horizon",
            StepSchedule::Dynamic { .. } => "dynamic",
            StepSchedule::Polyak { .. } => "polyak",
            StepSchedule::EdgeLineSearch => "edge_line_search",
            StepSchedule::Sequence { .. } => "sequence",
        }
    }

    /// Rejects schedules whose parameters are missing or out of range.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value: v })
            }
        };
        match self {
            StepSchedule::Constant { step } => {
                if *step >= 0.0 && step.is_finite() {
                    Ok(())
                } else {
                    Err(Error::NegativeStep(*step))
                }
            }
            StepSchedule::Horizon {
                lipschitz,
                diameter,
                steps,
            } => {
                positive("lipschitz", *lipschitz)?;
                positive("diameter", *diameter)?;
                if *steps == 0 {
                    return Err(Error::InvalidParameter {
                        name: "steps",
                        value: 0.0,
                    });
                }
                Ok(())
            }
            StepSchedule::Dynamic {
                lipschitz,
                diameter,
            } => {
                positive("lipschitz", *lipschitz)?;
                positive("diameter", *diameter)
            }
            StepSchedule::Polyak { optimum } => match optimum {
                Some(v) if v.is_finite() => Ok(()),
                Some(v) => Err(Error::InvalidParameter {
                    name: "optimum",
                    value: *v,
                }),
                None => Err(Error::MissingParameter {
                    schedule: "polyak",
                    parameter: "optimum",
                }),
            },
            StepSchedule::EdgeLineSearch => Ok(()),
            StepSchedule::Sequence { steps } => match steps.iter().find(|s| !(**s >= 0.0)) {
                Some(s) => Err(Error::NegativeStep(*s)),
                None => Ok(()),
            },
        }
    }

    pub fn step(&self, ctx: StepContext) -> Result<StepSize> {
        let plain = |value: f64| {
            Ok(StepSize {
                value,
                saturated: false,
            })
        };
        match self {
            StepSchedule::Constant { step } => plain(*step),
            StepSchedule::Horizon {
                lipschitz,
                diameter,
                steps,
            } => plain(math::sqrt(2.0 * diameter / *steps as f64) / lipschitz),
            StepSchedule::Dynamic {
                lipschitz,
                diameter,
            } => plain(math::sqrt(2.0 * diameter / (ctx.iteration + 1) as f64) / lipschitz),
            StepSchedule::Polyak { optimum } => {
                let optimum = optimum.ok_or(Error::MissingParameter {
                    schedule: "polyak",
                    parameter: "optimum",
                })?;
                if ctx.subgradient_sq_norm == 0.0 {
                    return plain(0.0);
                }
                plain(((ctx.primal_value - optimum) / ctx.subgradient_sq_norm).max(0.0))
            }
            StepSchedule::EdgeLineSearch => {
                let saturated = ctx.primal_value >= EDGE_CLAMP;
                let r = ctx.primal_value.clamp(0.0, EDGE_CLAMP);
                Ok(StepSize {
                    value: 0.5 * math::ln((1.0 + r) / (1.0 - r)),
                    saturated,
                })
            }
            StepSchedule::Sequence { steps } => steps
                .get(ctx.iteration)
                .copied()
                .map(|v| StepSize {
                    value: v,
                    saturated: false,
                })
                .ok_or(Error::ScheduleExhausted(steps.len())),
        }
    }
}
