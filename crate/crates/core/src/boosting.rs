//! AdaBoost with an exact weak learner, written in its classical form.
//!
//! The feature matrix is `A_ij = y_i·h_j(x_i)`. With `w ∈ Δm` a distribution
//! over examples and `λ ∈ Δn` a normalized combination of base classifiers:
//!
//! * edge `f(w) = max_j wᵀA_j` (primal, minimized),
//! * margin `p(λ) = min_i (Aλ)_i` (dual, maximized),
//! * log-exponential loss `L(λ̂) = ln( (1/m) Σ_i exp(−(Aλ̂)_i) )`.
//!
//! The set of base classifiers is kept closed under negation, which makes
//! `f(w) = ‖Aᵀw‖∞` and the maximum margin nonnegative.
//!
//! Nothing in this module calls into [`crate::md`]; the two are kept as
//! separate code paths so that they can be checked against each other.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{argmax, check_len, dot, norm_inf, Matrix};
use crate::math;
use crate::md::{DualDomain, MinmaxProblem, PrimalDomain};
use crate::schedule::{StepContext, StepSchedule};
use crate::trace::{Algorithm, Termination, Trace, TraceRecord, TraceSink};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    features: Matrix,
    original_columns: usize,
}

fn column_key(col: impl Iterator<Item = f64>) -> Vec<u64> {
    // `+ 0.0` maps −0 to +0 so that negating a zero entry keeps the key.
    col.map(|v| (v + 0.0).to_bits()).collect()
}

impl TrainingSet {
    /// Wraps a feature matrix `A`, appending `−A_j` for every column whose
    /// negation is not already present.
    pub fn from_feature_matrix(a: Matrix) -> Result<Self> {
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let v = a.get(i, j);
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        let original_columns = a.cols();
        let mut present: BTreeSet<Vec<u64>> = (0..a.cols())
            .map(|j| column_key((0..a.rows()).map(|i| a.get(i, j))))
            .collect();
        let mut extra: Vec<Vec<f64>> = Vec::new();
        for j in 0..a.cols() {
            let neg: Vec<f64> = (0..a.rows()).map(|i| -a.get(i, j)).collect();
            if present.insert(column_key(neg.iter().copied())) {
                extra.push(neg);
            }
        }
        let features = if extra.is_empty() {
            a
        } else {
            a.with_columns(&extra)?
        };
        Ok(Self {
            features,
            original_columns,
        })
    }

    /// Builds `A_ij = y_i·h_j(x_i)` from labels and base-classifier outputs
    /// (`predictions[i][j] = h_j(x_i)`), both in `[−1, 1]`.
    pub fn from_predictions(labels: &[f64], predictions: &Matrix) -> Result<Self> {
        check_len(predictions.rows(), labels.len())?;
        if let Some(i) = labels.iter().position(|y| !(-1.0..=1.0).contains(y)) {
            return Err(Error::EntryOutOfRange {
                row: i,
                col: 0,
                value: labels[i],
            });
        }
        let data = (0..predictions.rows())
            .flat_map(|i| predictions.row(i).iter().map(move |h| labels[i] * h))
            .collect();
        Self::from_feature_matrix(Matrix::new(predictions.rows(), predictions.cols(), data)?)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.features
    }

    /// Number of examples.
    pub fn m(&self) -> usize {
        self.features.rows()
    }

    /// Number of base classifiers after negation closure.
    pub fn n(&self) -> usize {
        self.features.cols()
    }

    /// Columns supplied by the caller; the rest were added as negations.
    pub fn original_columns(&self) -> usize {
        self.original_columns
    }

    /// `L_f = ‖A‖_{1,∞} = max |A_ij|`, at most 1.
    pub fn lipschitz(&self) -> f64 {
        self.features.max_abs()
    }

    /// `ln m`, the entropy diameter of Δm seen from the uniform point.
    pub fn diameter(&self) -> f64 {
        math::ln(self.m() as f64)
    }

    /// Constant step `√(2 ln m / k) / L` for a fixed horizon of `k` steps.
    pub fn constant_schedule(&self, steps: usize) -> StepSchedule {
        StepSchedule::Horizon {
            lipschitz: self.lipschitz(),
            diameter: self.diameter(),
            steps,
        }
    }

    /// Dynamic step `√(2 ln m / (i+1)) / L`.
    pub fn dynamic_schedule(&self) -> StepSchedule {
        StepSchedule::Dynamic {
            lipschitz: self.lipschitz(),
            diameter: self.diameter(),
        }
    }

    /// The edge-minimization problem over Δm with dual Δn.
    pub fn as_minmax(&self) -> MinmaxProblem {
        MinmaxProblem::new(
            self.features.clone(),
            PrimalDomain::Simplex,
            DualDomain::Simplex,
        )
    }

    /// `Aᵀw`, the edge of every base classifier under `w`.
    pub fn edges(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.features.tr_mul_vec(w)
    }

    /// Exact weak learner: lowest index maximizing `wᵀA_j`.
    pub fn weak_learner(&self, w: &[f64]) -> Result<usize> {
        Ok(argmax(&self.edges(w)?).expect("non-empty matrix"))
    }

    /// `f(w) = max_j wᵀA_j`.
    pub fn edge(&self, w: &[f64]) -> Result<f64> {
        let e = self.edges(w)?;
        Ok(e.into_iter().fold(f64::NEG_INFINITY, f64::max))
    }

    /// `‖Aᵀw‖∞`, equal to [`TrainingSet::edge`] under negation closure.
    pub fn edge_linf(&self, w: &[f64]) -> Result<f64> {
        Ok(norm_inf(&self.edges(w)?))
    }

    /// `p(λ) = min_i (Aλ)_i`.
    pub fn margin(&self, lambda: &[f64]) -> Result<f64> {
        Ok(self
            .features
            .mul_vec(lambda)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    /// Log-exponential loss at un-normalized coefficients `λ̂`, with its
    /// gradient `−Aᵀŵ`, `ŵ_i ∝ exp(−(Aλ̂)_i)`.
    pub fn log_exp_loss(&self, coefficients: &[f64]) -> Result<LossEvaluation> {
        if let Some(pos) = coefficients.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let z: Vec<f64> = self
            .features
            .mul_vec(coefficients)?
            .into_iter()
            .map(|v| -v)
            .collect();
        let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = z.iter().map(|v| math::exp(v - top)).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let value = top + math::ln(total) - math::ln(self.m() as f64);
        let gradient = self
            .features
            .tr_mul_vec(&weights)?
            .into_iter()
            .map(|v| -v)
            .collect();
        Ok(LossEvaluation {
            value,
            gradient,
            weights,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossEvaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// `ŵ`, the distribution induced by the coefficients.
    pub weights: Vec<f64>,
}

impl LossEvaluation {
    pub fn gradient_norm(&self) -> f64 {
        norm_inf(&self.gradient)
    }
}

/// AdaBoost bookkeeping after `k` iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostState {
    /// `wᵏ`.
    pub weights: Vec<f64>,
    /// `λ̂ᵏ = Σ_{i<k} αᵢ e_{jᵢ}`.
    pub coefficients: Vec<f64>,
    pub steps: Vec<f64>,
    pub chosen: Vec<usize>,
}

impl BoostState {
    pub fn new(ts: &TrainingSet) -> Self {
        Self {
            weights: vec![1.0 / ts.m() as f64; ts.m()],
            coefficients: vec![0.0; ts.n()],
            steps: Vec::new(),
            chosen: Vec::new(),
        }
    }

    pub fn iteration(&self) -> usize {
        self.steps.len()
    }

    pub fn step_sum(&self) -> f64 {
        self.steps.iter().sum()
    }

    /// `λᵏ = λ̂ᵏ / ‖λ̂ᵏ‖₁`, the coefficients of `H̄ₖ`.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        let total = self.step_sum();
        (total > 0.0).then(|| self.coefficients.iter().map(|c| c / total).collect())
    }

    /// One AdaBoost iteration with step `alpha`; returns the chosen column.
    pub fn step(&mut self, ts: &TrainingSet, alpha: f64) -> Result<usize> {
        let j = ts.weak_learner(&self.weights)?;
        self.apply(ts, j, alpha)?;
        Ok(j)
    }

    /// `w_i ← w_i·exp(−α A_ij)`, renormalize, and add `α` to `λ̂_j`.
    pub fn apply(&mut self, ts: &TrainingSet, j: usize, alpha: f64) -> Result<()> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::NegativeStep(alpha));
        }
        if j >= ts.n() {
            return Err(Error::DimensionMismatch {
                expected: ts.n(),
                found: j + 1,
            });
        }
        check_len(ts.m(), self.weights.len())?;
        if alpha > 0.0 {
            for (i, w) in self.weights.iter_mut().enumerate() {
                *w *= math::exp(-alpha * ts.matrix().get(i, j));
            }
            let total: f64 = self.weights.iter().sum();
            for w in &mut self.weights {
                *w /= total;
            }
        }
        self.coefficients[j] += alpha;
        self.steps.push(alpha);
        self.chosen.push(j);
        Ok(())
    }
}

pub fn run_adaboost_with_sink<S: TraceSink>(
    ts: &TrainingSet,
    schedule: &StepSchedule,
    iterations: usize,
    sink: &mut S,
) -> Result<(BoostState, Termination)> {
    if iterations == 0 {
        return Err(Error::NoIterations);
    }
    schedule.validate()?;
    let mut state = BoostState::new(ts);
    for k in 0..iterations {
        let j = ts.weak_learner(&state.weights)?;
        let column = ts.matrix().column(j);
        let edge = dot(&state.weights, &column);
        let gradient_norm = ts.log_exp_loss(&state.coefficients)?.gradient_norm();
        let step = schedule.step(StepContext {
            iteration: k,
            primal_value: edge,
            subgradient_sq_norm: dot(&column, &column),
        })?;
        let weights = state.weights.clone();
        state.apply(ts, j, step.value)?;
        let dual = match state.normalized() {
            Some(lambda) => Some(ts.margin(&lambda)?),
            None => None,
        };
        sink.push(TraceRecord {
            iteration: k,
            index: j,
            sign: 1.0,
            step: step.value,
            primal: edge,
            dual,
            gradient_norm: Some(gradient_norm),
            coef_l1: None,
            coef_l0: None,
            iterate: weights,
        });
        if step.saturated {
            return Ok((state, Termination::EdgeSaturated { iteration: k }));
        }
    }
    Ok((state, Termination::Completed))
}

/// Runs AdaBoost for `iterations` steps from the uniform distribution.
pub fn run_adaboost(ts: &TrainingSet, schedule: &StepSchedule, iterations: usize) -> Result<Trace> {
    let mut records = Vec::with_capacity(iterations);
    let (state, termination) = run_adaboost_with_sink(ts, schedule, iterations, &mut records)?;
    Ok(Trace {
        algorithm: Algorithm::AdaBoost,
        records,
        termination,
        final_iterate: state.weights,
        coefficients: state.coefficients,
    })
}
