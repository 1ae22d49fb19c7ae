//! Complexity bounds and the certificate checker.
//!
//! The bound functions are plain closed-form expressions. [`check`] walks a
//! trace and, for every record and every bound that applies to the run's
//! schedule and constants, compares the observed gap with the bound's
//! right-hand side.
//!
//! Conventions for record `k` (0-based): the prefix sums run over
//! `α₀..αₖ`, the primal minimum over `f(x⁰)..f(xᵏ)`, and the dual value is
//! the one stored in the record, `p(λᵏ⁺¹)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::schedule::StepSchedule;
use crate::trace::{Algorithm, TraceRecord};
use crate::CERTIFICATE_TOLERANCE;

/// `(D + ½ L² Σαᵢ²) / Σαᵢ`.
///
/// With `D = D̄ ≥ max_x D(x, x⁰)` this bounds the duality gap
/// `min_i f(xⁱ) − p(λᵏ⁺¹)`; with `D ≥ D(x, x⁰)` for a specific `x` it bounds
/// `min_i f(xⁱ) − f(x)`.
pub fn md_gap_bound(diameter: f64, lipschitz: f64, steps: &[f64]) -> Result<f64> {
    let sum: f64 = steps.iter().sum();
    let sq_sum: f64 = steps.iter().map(|a| a * a).sum();
    gap_bound_from_sums(diameter, lipschitz, sum, sq_sum)
}

pub fn gap_bound_from_sums(
    diameter: f64,
    lipschitz: f64,
    step_sum: f64,
    step_sq_sum: f64,
) -> Result<f64> {
    if !(step_sum > 0.0) {
        return Err(Error::ZeroStepSum);
    }
    Ok((diameter + 0.5 * lipschitz * lipschitz * step_sq_sum) / step_sum)
}

/// `L·√(2D̄/N)`: the gap bound after `N` equal steps `(1/L)·√(2D̄/N)`.
pub fn constant_bound(diameter: f64, lipschitz: f64, steps: usize) -> f64 {
    lipschitz * math::sqrt(2.0 * diameter / steps as f64)
}

/// `L·√(D̄/2)·(2 + ln(k+1)) / (2(√(k+2) − 1))`: the gap bound at iteration
/// `k` under the dynamic rule `αᵢ = (1/L)·√(2D̄/(i+1))`.
pub fn dynamic_bound(diameter: f64, lipschitz: f64, k: usize) -> f64 {
    let k = k as f64;
    lipschitz * math::sqrt(0.5 * diameter) * (2.0 + math::ln(k + 1.0))
        / (2.0 * (math::sqrt(k + 2.0) - 1.0))
}

/// `L·‖x⁰ − x*‖₂ / √(k+1)`, the subgradient method with Polyak steps.
pub fn polyak_bound(lipschitz: f64, distance: f64, k: usize) -> f64 {
    lipschitz * distance / math::sqrt(k as f64 + 1.0)
}

/// FS-ε with constant shrinkage:
/// `min_{i≤k} ‖Xᵀrⁱ‖∞ ≤ ‖Xβ_LS‖₂² / (2ε(k+1)) + ε‖X‖²_{1,2} / 2`.
pub fn stagewise_constant_bound(fitted_norm: f64, design_norm: f64, epsilon: f64, k: usize) -> f64 {
    fitted_norm * fitted_norm / (2.0 * epsilon * (k as f64 + 1.0))
        + 0.5 * epsilon * design_norm * design_norm
}

/// FS-ε with the tuned shrinkage (and with line search):
/// `‖X‖_{1,2}·‖Xβ_LS‖₂ / √(k+1)`.
pub fn stagewise_optimal_bound(fitted_norm: f64, design_norm: f64, k: usize) -> f64 {
    design_norm * fitted_norm / math::sqrt(k as f64 + 1.0)
}

/// Which inequality a certificate record checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundKind {
    /// `p(λᵏ⁺¹) − min_i f(xⁱ) ≤ 0`.
    WeakDuality,
    /// Duality gap against the general step-sum bound.
    DualityGap,
    /// Primal optimality gap `min_i f(xⁱ) − f*` against the general
    /// step-sum bound with `D(x*, x⁰)`.
    OptimalityGap,
    /// Gap at the horizon of a constant schedule against `L·√(2D̄/N)`.
    ConstantStep,
    /// Gap against the closed form for the dynamic rule.
    DynamicStep,
    /// Optimality gap under Polyak steps against `L‖x⁰ − x*‖/√(k+1)`.
    PolyakStep,
    /// `‖βᵏ‖₁ ≤ Σ_{i<k} εᵢ`.
    CoefficientL1,
    /// `‖βᵏ‖₀ ≤ k`.
    CoefficientSupport,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::WeakDuality => "weak_duality",
            BoundKind::DualityGap => "duality_gap",
            BoundKind::OptimalityGap => "optimality_gap",
            BoundKind::ConstantStep => "constant_step",
            BoundKind::DynamicStep => "dynamic_step",
            BoundKind::PolyakStep => "polyak_step",
            BoundKind::CoefficientL1 => "coefficient_l1",
            BoundKind::CoefficientSupport => "coefficient_support",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CertificateStatus {
    Pass,
    Fail,
    NotEvaluable,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateRecord {
    pub iteration: usize,
    pub kind: BoundKind,
    /// Left-hand side; absent when it is undefined (no dual point yet).
    pub observed: Option<f64>,
    /// Right-hand side; absent when the bound is undefined at this prefix.
    pub bound: Option<f64>,
    /// `bound − observed`, kept even when negative.
    pub slack: Option<f64>,
    pub status: CertificateStatus,
}

impl CertificateRecord {
    fn evaluate(iteration: usize, kind: BoundKind, observed: f64, bound: f64) -> Self {
        let status = if observed <= bound + CERTIFICATE_TOLERANCE {
            CertificateStatus::Pass
        } else {
            CertificateStatus::Fail
        };
        Self {
            iteration,
            kind,
            observed: Some(observed),
            bound: Some(bound),
            slack: Some(bound - observed),
            status,
        }
    }

    fn not_evaluable(iteration: usize, kind: BoundKind, observed: Option<f64>) -> Self {
        Self {
            iteration,
            kind,
            observed,
            bound: None,
            slack: None,
            status: CertificateStatus::NotEvaluable,
        }
    }
}

/// Everything about a run that the bounds need besides the trace itself.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProblemConstants {
    pub algorithm: Algorithm,
    /// `L_f` in the prox function's norm.
    pub lipschitz: f64,
    /// `D̄ ≥ max_x D(x, x⁰)`, for compact primal domains.
    pub diameter: Option<f64>,
    /// `f*`, when known.
    pub optimum: Option<f64>,
    /// An upper bound on `D(x*, x⁰)`.
    pub optimum_divergence: Option<f64>,
    /// `‖x⁰ − x*‖₂`.
    pub optimum_distance: Option<f64>,
    pub schedule: StepSchedule,
}

/// Counts per status.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CertificateSummary {
    pub passed: usize,
    pub failed: usize,
    pub not_evaluable: usize,
}

impl CertificateSummary {
    pub fn total(&self) -> usize {
        self.passed + self.failed + self.not_evaluable
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub fn summarize(records: &[CertificateRecord]) -> CertificateSummary {
    let mut s = CertificateSummary::default();
    for r in records {
        match r.status {
            CertificateStatus::Pass => s.passed += 1,
            CertificateStatus::Fail => s.failed += 1,
            CertificateStatus::NotEvaluable => s.not_evaluable += 1,
        }
    }
    s
}

/// Evaluates every applicable certificate on every record.
///
/// For AdaBoost traces the primal series is the recorded gradient norm
/// `‖∇L(λ̂ⁱ)‖∞` rather than the edge, so the certificates are stated for
/// the loss directly.
pub fn check(records: &[TraceRecord], constants: &ProblemConstants) -> Vec<CertificateRecord> {
    let mut out = Vec::new();
    let l = constants.lipschitz;
    let mut best = f64::INFINITY;
    let mut step_sum = 0.0;
    let mut step_sq_sum = 0.0;

    for (k, rec) in records.iter().enumerate() {
        let value = match constants.algorithm {
            Algorithm::AdaBoost => rec.gradient_norm.unwrap_or(rec.primal),
            _ => rec.primal,
        };
        // ‖βᵏ‖₁ is measured before step k, against steps 0..k-1.
        if let Some(l1) = rec.coef_l1 {
            out.push(CertificateRecord::evaluate(
                k,
                BoundKind::CoefficientL1,
                l1,
                step_sum,
            ));
        }
        if let Some(l0) = rec.coef_l0 {
            out.push(CertificateRecord::evaluate(
                k,
                BoundKind::CoefficientSupport,
                l0 as f64,
                k as f64,
            ));
        }

        best = best.min(value);
        step_sum += rec.step;
        step_sq_sum += rec.step * rec.step;

        let duality_gap = match (constants.diameter, rec.dual) {
            (Some(_), Some(p)) => Some(best - p),
            _ => None,
        };
        let optimality_gap = constants.optimum.map(|f| best - f);

        if let Some(p) = rec.dual {
            out.push(CertificateRecord::evaluate(
                k,
                BoundKind::WeakDuality,
                p - best,
                0.0,
            ));
        }

        if let Some(d) = constants.diameter {
            match (
                duality_gap,
                gap_bound_from_sums(d, l, step_sum, step_sq_sum),
            ) {
                (Some(gap), Ok(bound)) => out.push(CertificateRecord::evaluate(
                    k,
                    BoundKind::DualityGap,
                    gap,
                    bound,
                )),
                _ => out.push(CertificateRecord::not_evaluable(
                    k,
                    BoundKind::DualityGap,
                    duality_gap,
                )),
            }
        }

        if let (Some(gap), Some(div)) = (optimality_gap, constants.optimum_divergence) {
            match gap_bound_from_sums(div, l, step_sum, step_sq_sum) {
                Ok(bound) => out.push(CertificateRecord::evaluate(
                    k,
                    BoundKind::OptimalityGap,
                    gap,
                    bound,
                )),
                Err(_) => out.push(CertificateRecord::not_evaluable(
                    k,
                    BoundKind::OptimalityGap,
                    Some(gap),
                )),
            }
        }

        // Closed forms tied to the schedule, stated with the schedule's own
        // parameters. They prefer the duality gap when the run has one.
        let gap = duality_gap.or(optimality_gap);
        match (&constants.schedule, gap) {
            (
                StepSchedule::Horizon {
                    lipschitz,
                    diameter,
                    steps,
                },
                Some(gap),
            ) if k + 1 == *steps => out.push(CertificateRecord::evaluate(
                k,
                BoundKind::ConstantStep,
                gap,
                constant_bound(*diameter, *lipschitz, *steps),
            )),
            (
                StepSchedule::Dynamic {
                    lipschitz,
                    diameter,
                },
                Some(gap),
            ) => out.push(CertificateRecord::evaluate(
                k,
                BoundKind::DynamicStep,
                gap,
                dynamic_bound(*diameter, *lipschitz, k),
            )),
            (StepSchedule::Polyak { optimum: Some(f) }, _) => {
                if let Some(dist) = constants.optimum_distance {
                    out.push(CertificateRecord::evaluate(
                        k,
                        BoundKind::PolyakStep,
                        best - f,
                        polyak_bound(l, dist, k),
                    ))
                }
            }
            _ => {}
        }
    }
    out
}
