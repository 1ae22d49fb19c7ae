//! Mirror Descent for `min_{x∈P} f(x)`, `f(x) = max_{λ∈Q} xᵀAλ`.
//!
//! The payoff is bilinear, so the inner maximization is attained at a
//! (signed) vertex of Q and the subgradient is the matching column of `A`.
//! Each iteration computes that response at `xᵏ`, picks `αₖ`, takes the prox
//! step and folds `αₖ λ̃ᵏ` into the running dual average.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{argmax, argmax_abs, check_len, sgn, Matrix};
use crate::math;
use crate::prox::ProxFunction;
use crate::schedule::{StepContext, StepSchedule};
use crate::trace::{Algorithm, Termination, Trace, TraceRecord, TraceSink};

/// Feasible set of the primal variable `x ∈ ℝᵐ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimalDomain {
    /// The unit simplex Δm.
    Simplex,
    /// `x⁰ + range(A)`. Unbounded, so the dual function is not defined.
    Affine,
}

/// Feasible set of the dual variable `λ ∈ ℝⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualDomain {
    /// Δn: the response is `e_j` for the largest entry of `Aᵀx`.
    Simplex,
    /// The ℓ1 ball: the response is `±e_j` for the entry of `Aᵀx` with the
    /// largest magnitude.
    L1Ball,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinmaxProblem {
    payoff: Matrix,
    primal: PrimalDomain,
    dual: DualDomain,
}

/// Maximizer of `φ(x, ·)` together with the induced subgradient.
#[derive(Debug, Clone, PartialEq)]
pub struct DualResponse {
    /// `j*`, lowest index among the maximizers.
    pub index: usize,
    /// `λ̃ = sign · e_{j*}`.
    pub sign: f64,
    /// `f(x) = φ(x, λ̃)`.
    pub value: f64,
    /// `g = Aλ̃`.
    pub subgradient: Vec<f64>,
}

impl MinmaxProblem {
    pub fn new(payoff: Matrix, primal: PrimalDomain, dual: DualDomain) -> Self {
        Self {
            payoff,
            primal,
            dual,
        }
    }

    pub fn payoff(&self) -> &Matrix {
        &self.payoff
    }

    pub fn primal_domain(&self) -> PrimalDomain {
        self.primal
    }

    pub fn dual_domain(&self) -> DualDomain {
        self.dual
    }

    pub fn primal_dim(&self) -> usize {
        self.payoff.rows()
    }

    pub fn dual_dim(&self) -> usize {
        self.payoff.cols()
    }

    /// Lipschitz constant of `f` w.r.t. the prox function's norm:
    /// `max_{λ∈Q} ‖Aλ‖_*`, attained at a vertex, so the largest dual norm of
    /// a column.
    pub fn lipschitz(&self, prox: ProxFunction) -> f64 {
        (0..self.dual_dim())
            .map(|j| prox.dual_norm(&self.payoff.column(j)))
            .fold(0.0, f64::max)
    }

    pub fn dual_response(&self, x: &[f64]) -> Result<DualResponse> {
        let scores = self.payoff.tr_mul_vec(x)?;
        let (index, sign) = match self.dual {
            DualDomain::Simplex => (argmax(&scores).expect("non-empty matrix"), 1.0),
            DualDomain::L1Ball => {
                let j = argmax_abs(&scores).expect("non-empty matrix");
                (j, sgn(scores[j]))
            }
        };
        let value = sign * scores[index];
        let subgradient = self
            .payoff
            .column(index)
            .into_iter()
            .map(|a| sign * a)
            .collect();
        Ok(DualResponse {
            index,
            sign,
            value: if sign == 0.0 { 0.0 } else { value },
            subgradient,
        })
    }

    /// `f(x)`.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        Ok(self.dual_response(x)?.value)
    }

    /// `p(λ) = min_{x∈P} xᵀAλ`; only defined for the simplex, where it is
    /// `min_i (Aλ)ᵢ`.
    pub fn dual_value(&self, lambda: &[f64]) -> Result<Option<f64>> {
        match self.primal {
            PrimalDomain::Simplex => {
                let a_lambda = self.payoff.mul_vec(lambda)?;
                Ok(Some(a_lambda.into_iter().fold(f64::INFINITY, f64::min)))
            }
            PrimalDomain::Affine => Ok(None),
        }
    }

    fn check_prox(&self, prox: ProxFunction) -> Result<()> {
        match (prox, self.primal) {
            (ProxFunction::Entropy, PrimalDomain::Simplex)
            | (ProxFunction::Euclidean, PrimalDomain::Affine) => Ok(()),
            (p, d) => Err(Error::IncompatibleProx {
                prox: p.name(),
                domain: match d {
                    PrimalDomain::Simplex => "simplex",
                    PrimalDomain::Affine => "affine",
                },
            }),
        }
    }

    fn check_start(&self, x0: &[f64]) -> Result<()> {
        check_len(self.primal_dim(), x0.len())?;
        if let Some(pos) = x0.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        if self.primal == PrimalDomain::Simplex {
            if let Some(pos) = x0.iter().position(|&v| !(v > 0.0)) {
                return Err(Error::NotInterior(pos));
            }
            let total: f64 = x0.iter().sum();
            if math::abs(total - 1.0) > 1e-9 {
                return Err(Error::NotOnSimplex);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MirrorDescentState {
    pub iteration: usize,
    /// `xᵏ`.
    pub iterate: Vec<f64>,
    /// `Σ_{i<k} αᵢ λ̃ⁱ`.
    pub dual_sum: Vec<f64>,
    /// `Σ_{i<k} αᵢ`.
    pub step_sum: f64,
    /// `Σ_{i<k} αᵢ²`.
    pub step_sq_sum: f64,
    /// Smallest objective value observed so far and where.
    pub best: Option<(f64, usize)>,
}

impl MirrorDescentState {
    pub fn new(x0: Vec<f64>, dual_dim: usize) -> Self {
        Self {
            iteration: 0,
            iterate: x0,
            dual_sum: vec![0.0; dual_dim],
            step_sum: 0.0,
            step_sq_sum: 0.0,
            best: None,
        }
    }

    /// `λᵏ = Σ αᵢ λ̃ⁱ / Σ αᵢ`, or `None` before the first positive step.
    pub fn dual_average(&self) -> Option<Vec<f64>> {
        if self.step_sum > 0.0 {
            Some(self.dual_sum.iter().map(|v| v / self.step_sum).collect())
        } else {
            None
        }
    }

    /// Records `f(xᵏ)` in the best-so-far tracker.
    pub fn observe(&mut self, value: f64) {
        match self.best {
            Some((b, _)) if value >= b => {}
            _ => self.best = Some((value, self.iteration)),
        }
    }

    /// `xᵏ⁺¹ = argmin_x { α gᵀx + D(x, xᵏ) }` plus the dual bookkeeping.
    pub fn step(&mut self, response: &DualResponse, alpha: f64, prox: ProxFunction) -> Result<()> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::NegativeStep(alpha));
        }
        if response.index >= self.dual_sum.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dual_sum.len(),
                found: response.index + 1,
            });
        }
        self.iterate = prox.prox_solve(&response.subgradient, &self.iterate, alpha)?;
        self.dual_sum[response.index] += alpha * response.sign;
        self.step_sum += alpha;
        self.step_sq_sum += alpha * alpha;
        self.iteration += 1;
        Ok(())
    }
}

/// Runs `iterations` Mirror Descent steps from `x0`, pushing one record per
/// iteration into `sink`. Returns the final state and how the run ended.
pub fn run_with_sink<S: TraceSink>(
    problem: &MinmaxProblem,
    schedule: &StepSchedule,
    prox: ProxFunction,
    x0: Vec<f64>,
    iterations: usize,
    sink: &mut S,
) -> Result<(MirrorDescentState, Termination)> {
    if iterations == 0 {
        return Err(Error::NoIterations);
    }
    schedule.validate()?;
    problem.check_prox(prox)?;
    problem.check_start(&x0)?;

    let mut state = MirrorDescentState::new(x0, problem.dual_dim());
    for k in 0..iterations {
        let response = problem.dual_response(&state.iterate)?;
        state.observe(response.value);
        let step = schedule.step(StepContext {
            iteration: k,
            primal_value: response.value,
            subgradient_sq_norm: response.subgradient.iter().map(|g| g * g).sum(),
        })?;
        let iterate = state.iterate.clone();
        state.step(&response, step.value, prox)?;
        let dual = match state.dual_average() {
            Some(lambda) => problem.dual_value(&lambda)?,
            None => None,
        };
        sink.push(TraceRecord {
            iteration: k,
            index: response.index,
            sign: response.sign,
            step: step.value,
            primal: response.value,
            dual,
            gradient_norm: None,
            coef_l1: None,
            coef_l0: None,
            iterate,
        });
        if step.saturated {
            return Ok((state, Termination::EdgeSaturated { iteration: k }));
        }
    }
    Ok((state, Termination::Completed))
}

/// [`run_with_sink`] collecting into a [`Trace`].
pub fn run(
    problem: &MinmaxProblem,
    schedule: &StepSchedule,
    prox: ProxFunction,
    x0: Vec<f64>,
    iterations: usize,
) -> Result<Trace> {
    let mut records = Vec::with_capacity(iterations);
    let (state, termination) =
        run_with_sink(problem, schedule, prox, x0, iterations, &mut records)?;
    Ok(Trace {
        algorithm: Algorithm::MirrorDescent,
        records,
        termination,
        final_iterate: state.iterate,
        coefficients: state.dual_sum,
    })
}
