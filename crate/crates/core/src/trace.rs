//! Per-iteration run records.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Algorithm {
    MirrorDescent,
    AdaBoost,
    Stagewise,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MirrorDescent => "mirror_descent",
            Algorithm::AdaBoost => "adaboost",
            Algorithm::Stagewise => "stagewise",
        }
    }
}

/// One iteration `k`: the point `xᵏ`, the response chosen there, the step
/// taken from it, and the dual average after the step.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceRecord {
    pub iteration: usize,
    /// Column `jₖ` picked by the dual response / weak learner.
    pub index: usize,
    /// Sign attached to `e_{jₖ}`; always `1` for simplex duals.
    pub sign: f64,
    /// `αₖ` (or `εₖ`).
    pub step: f64,
    /// `f(xᵏ)`.
    pub primal: f64,
    /// `p(λᵏ⁺¹)`; absent when the primal domain is unbounded or no positive
    /// step has been taken yet.
    pub dual: Option<f64>,
    /// `‖∇L(λ̂ᵏ)‖∞`, computed from the un-normalized coefficients (AdaBoost).
    pub gradient_norm: Option<f64>,
    /// `‖βᵏ‖₁` (stagewise).
    pub coef_l1: Option<f64>,
    /// `‖βᵏ‖₀` (stagewise).
    pub coef_l0: Option<usize>,
    /// `xᵏ` itself. Runners always fill it; writers may drop it.
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Vec::is_empty")
    )]
    pub iterate: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Termination {
    /// Ran the requested number of iterations.
    Completed,
    /// AdaBoost line search met an edge of 1 at this iteration; its step was
    /// clamped and the run stopped.
    EdgeSaturated { iteration: usize },
    /// The objective hit exactly zero (no correlated predictor left).
    Optimal { iteration: usize },
}

/// Receives records as a run produces them.
pub trait TraceSink {
    fn push(&mut self, record: TraceRecord);
}

impl TraceSink for Vec<TraceRecord> {
    fn push(&mut self, record: TraceRecord) {
        Vec::push(self, record);
    }
}

/// A finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub algorithm: Algorithm,
    pub records: Vec<TraceRecord>,
    pub termination: Termination,
    /// The iterate after the last step.
    pub final_iterate: Vec<f64>,
    /// Model coefficients after the last step: `Σ αᵢ λ̃ⁱ` for the generic
    /// engine, `λ̂` for AdaBoost, `β` for stagewise.
    pub coefficients: Vec<f64>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `min_{i ≤ k} f(xⁱ)` for every `k`.
    pub fn best_primal(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.records
            .iter()
            .map(|r| {
                best = best.min(r.primal);
                best
            })
            .collect()
    }

    pub fn steps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.step).collect()
    }
}
