//! Incremental forward stagewise regression (FS-ε).
//!
//! Each iteration finds the predictor most correlated with the current
//! residual and moves its coefficient by `ε` in the direction of the
//! correlation. Read on the residual space `{y − Xβ}`, this is subgradient
//! descent on `f(r) = ‖Xᵀr‖∞` started at `r⁰ = y`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{
    argmax_abs, check_len, least_squares, norm1, norm2, sgn, LeastSquaresFit, Matrix,
};
use crate::math;
use crate::md::{DualDomain, MinmaxProblem, PrimalDomain};
use crate::schedule::StepSchedule;
use crate::trace::{Algorithm, Termination, Trace, TraceRecord, TraceSink};

/// Coefficients with magnitude at or below this count as zero in `‖β‖₀`.
pub const SUPPORT_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionProblem {
    design: Matrix,
    response: Vec<f64>,
    column_sq_norms: Vec<f64>,
}

impl RegressionProblem {
    pub fn new(design: Matrix, response: Vec<f64>) -> Result<Self> {
        check_len(design.rows(), response.len())?;
        if let Some(pos) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let column_sq_norms: Vec<f64> = (0..design.cols())
            .map(|j| {
                (0..design.rows())
                    .map(|i| design.get(i, j) * design.get(i, j))
                    .sum()
            })
            .collect();
        if let Some(j) = column_sq_norms.iter().position(|&s| s == 0.0) {
            return Err(Error::ZeroColumn(j));
        }
        Ok(Self {
            design,
            response,
            column_sq_norms,
        })
    }

    pub fn design(&self) -> &Matrix {
        &self.design
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.design.rows()
    }

    /// Number of predictors.
    pub fn p(&self) -> usize {
        self.design.cols()
    }

    pub fn column_sq_norms(&self) -> &[f64] {
        &self.column_sq_norms
    }

    /// `‖X‖_{1,2} = max_j ‖X_j‖₂`, the Lipschitz constant of `f` w.r.t. ℓ2.
    pub fn operator_norm(&self) -> f64 {
        math::sqrt(self.column_sq_norms.iter().copied().fold(0.0, f64::max))
    }

    /// `Xᵀr`.
    pub fn correlations(&self, residual: &[f64]) -> Result<Vec<f64>> {
        self.design.tr_mul_vec(residual)
    }

    /// `f(r) = ‖Xᵀr‖∞`, the largest absolute correlation between the residual
    /// and a predictor; equivalently the ℓ∞ norm of the least-squares gradient.
    pub fn correlation_objective(&self, residual: &[f64]) -> Result<f64> {
        Ok(crate::linalg::norm_inf(&self.correlations(residual)?))
    }

    /// `‖Xβ_LS‖₂` via a pivoted QR solve. When `X` has full row rank the
    /// fit is exact and `‖y‖₂` is returned directly.
    pub fn least_squares(&self) -> Result<LeastSquaresFit> {
        let mut fit = least_squares(&self.design, &self.response)?;
        if fit.rank == self.n() {
            fit.fitted_norm = norm2(&self.response);
            fit.residual_norm = 0.0;
        }
        Ok(fit)
    }

    pub fn least_squares_norm(&self) -> Result<f64> {
        Ok(self.least_squares()?.fitted_norm)
    }

    /// The residual-space problem: primal `r ∈ y + range(X)`, dual the ℓ1
    /// ball, `φ(r, β) = rᵀXβ`.
    pub fn as_minmax(&self) -> MinmaxProblem {
        MinmaxProblem::new(
            self.design.clone(),
            PrimalDomain::Affine,
            DualDomain::L1Ball,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShrinkageSchedule {
    Constant(f64),
    /// `ε = ‖Xβ_LS‖₂ / (‖X‖_{1,2}·√k)` for a horizon of `k` steps. Without
    /// a supplied norm the bound `‖Xβ_LS‖₂ ≤ ‖y‖₂` is used instead.
    Optimal {
        fitted_norm: Option<f64>,
        steps: usize,
    },
    /// `εₖ = |(rᵏ)ᵀX_j| / ‖X_j‖₂²`, the exact line search on the
    /// least-squares loss along the chosen coordinate.
    LineSearch,
}

impl ShrinkageSchedule {
    /// The reference `‖Xβ_LS‖₂` value (or its upper bound) this schedule
    /// was tuned with.
    pub fn fitted_norm(&self, rp: &RegressionProblem) -> Option<f64> {
        match self {
            ShrinkageSchedule::Optimal { fitted_norm, .. } => {
                Some(fitted_norm.unwrap_or_else(|| norm2(rp.response())))
            }
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ShrinkageSchedule::Constant(e) if !(e >= 0.0) || !e.is_finite() => {
                Err(Error::NegativeStep(e))
            }
            ShrinkageSchedule::Optimal { steps: 0, .. } => Err(Error::InvalidParameter {
                name: "steps",
                value: 0.0,
            }),
            ShrinkageSchedule::Optimal {
                fitted_norm: Some(d),
                ..
            } if !(d >= 0.0) || !d.is_finite() => Err(Error::InvalidParameter {
                name: "fitted_norm",
                value: d,
            }),
            _ => Ok(()),
        }
    }

    /// The same rule expressed for the generic engine.
    pub fn to_step_schedule(&self, rp: &RegressionProblem) -> StepSchedule {
        match *self {
            ShrinkageSchedule::Constant(step) => StepSchedule::Constant { step },
            ShrinkageSchedule::Optimal { steps, .. } => {
                let d = self.fitted_norm(rp).unwrap_or(0.0);
                StepSchedule::Horizon {
                    lipschitz: rp.operator_norm(),
                    diameter: 0.5 * d * d,
                    steps,
                }
            }
            ShrinkageSchedule::LineSearch => StepSchedule::Polyak { optimum: Some(0.0) },
        }
    }

    fn epsilon(&self, rp: &RegressionProblem, j: usize, correlation: f64) -> f64 {
        match *self {
            ShrinkageSchedule::Constant(e) => e,
            ShrinkageSchedule::Optimal { steps, .. } => {
                let d = self.fitted_norm(rp).unwrap_or(0.0);
                d / (rp.operator_norm() * math::sqrt(steps as f64))
            }
            ShrinkageSchedule::LineSearch => math::abs(correlation) / rp.column_sq_norms[j],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StagewiseState {
    /// `rᵏ`.
    pub residual: Vec<f64>,
    /// `βᵏ`.
    pub coefficients: Vec<f64>,
    pub iteration: usize,
}

/// What one FS-ε step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageStep {
    pub index: usize,
    /// `(rᵏ)ᵀX_j` before the update.
    pub correlation: f64,
    pub epsilon: f64,
}

impl StagewiseState {
    pub fn new(rp: &RegressionProblem) -> Self {
        Self {
            residual: rp.response().to_vec(),
            coefficients: alloc::vec![0.0; rp.p()],
            iteration: 0,
        }
    }

    /// `(j, (rᵏ)ᵀX_j)` for the lowest-index maximizer of `|(rᵏ)ᵀX_j|`.
    pub fn select(&self, rp: &RegressionProblem) -> Result<(usize, f64)> {
        let c = rp.correlations(&self.residual)?;
        let j = argmax_abs(&c).expect("non-empty design");
        Ok((j, c[j]))
    }

    /// Moves `β_j` by `ε·sgn(c)` and the residual by `−ε·sgn(c)·X_j`.
    pub fn apply(
        &mut self,
        rp: &RegressionProblem,
        j: usize,
        correlation: f64,
        epsilon: f64,
    ) -> Result<()> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::NegativeStep(epsilon));
        }
        let s = sgn(correlation);
        let delta = epsilon * s;
        for (i, r) in self.residual.iter_mut().enumerate() {
            *r -= delta * rp.design().get(i, j);
        }
        self.coefficients[j] += delta;
        self.iteration += 1;
        Ok(())
    }

    /// One step of FS-ε with shrinkage `epsilon`.
    pub fn step(&mut self, rp: &RegressionProblem, epsilon: f64) -> Result<StageStep> {
        let (index, correlation) = self.select(rp)?;
        self.apply(rp, index, correlation, epsilon)?;
        Ok(StageStep {
            index,
            correlation,
            epsilon,
        })
    }

    pub fn coef_l1(&self) -> f64 {
        norm1(&self.coefficients)
    }

    pub fn coef_l0(&self) -> usize {
        self.coefficients
            .iter()
            .filter(|b| math::abs(**b) > SUPPORT_TOLERANCE)
            .count()
    }
}

pub fn run_fs_with_sink<S: TraceSink>(
    rp: &RegressionProblem,
    schedule: ShrinkageSchedule,
    iterations: usize,
    sink: &mut S,
) -> Result<(StagewiseState, Termination)> {
    if iterations == 0 {
        return Err(Error::NoIterations);
    }
    schedule.validate()?;
    let mut state = StagewiseState::new(rp);
    for k in 0..iterations {
        let (j, correlation) = state.select(rp)?;
        let objective = math::abs(correlation);
        let optimal = objective == 0.0;
        let epsilon = if optimal {
            0.0
        } else {
            schedule.epsilon(rp, j, correlation)
        };
        sink.push(TraceRecord {
            iteration: k,
            index: j,
            sign: sgn(correlation),
            step: epsilon,
            primal: objective,
            dual: None,
            gradient_norm: None,
            coef_l1: Some(state.coef_l1()),
            coef_l0: Some(state.coef_l0()),
            iterate: state.residual.clone(),
        });
        if optimal {
            return Ok((state, Termination::Optimal { iteration: k }));
        }
        state.apply(rp, j, correlation, epsilon)?;
    }
    Ok((state, Termination::Completed))
}

/// Runs FS-ε for `iterations` steps from `β = 0`. Stops early, with
/// [`Termination::Optimal`], if every correlation is exactly zero.
pub fn run_fs(
    rp: &RegressionProblem,
    schedule: ShrinkageSchedule,
    iterations: usize,
) -> Result<Trace> {
    let mut records = Vec::with_capacity(iterations);
    let (state, termination) = run_fs_with_sink(rp, schedule, iterations, &mut records)?;
    Ok(Trace {
        algorithm: Algorithm::Stagewise,
        records,
        termination,
        final_iterate: state.residual,
        coefficients: state.coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn identity(y: Vec<f64>) -> RegressionProblem {
        RegressionProblem::new(Matrix::identity(y.len()), y).unwrap()
    }

    #[test]
    fn rejects_zero_column() {
        let x = Matrix::from_rows(&[[1.0, 0.0], [2.0, 0.0]]).unwrap();
        assert_eq!(
            RegressionProblem::new(x, vec![1.0, 1.0]),
            Err(Error::ZeroColumn(1))
        );
    }

    #[test]
    fn correlation_objective_examples() {
        let rp = identity(vec![0.0, 0.0]);
        assert_eq!(rp.correlation_objective(&[3.0, -4.0]).unwrap(), 4.0);
        let x = Matrix::from_rows(&[[1.0], [1.0]]).unwrap();
        let rp = RegressionProblem::new(x, vec![0.0, 0.0]).unwrap();
        assert_eq!(rp.correlation_objective(&[1.0, -1.0]).unwrap(), 0.0);
    }

    #[test]
    fn zero_shrinkage_is_a_no_op() {
        let rp = identity(vec![1.0, -2.0]);
        let mut s = StagewiseState::new(&rp);
        s.step(&rp, 0.0).unwrap();
        assert_eq!(s.residual, vec![1.0, -2.0]);
        assert_eq!(s.coefficients, vec![0.0, 0.0]);
    }

    #[test]
    fn hand_simulated_first_step() {
        let rp = identity(vec![1.0, 0.0]);
        let mut s = StagewiseState::new(&rp);
        let st = s.step(&rp, 0.3).unwrap();
        assert_eq!(st.index, 0);
        assert_eq!(s.coefficients, vec![0.3, 0.0]);
        assert_eq!(s.residual, vec![0.7, 0.0]);
    }

    #[test]
    fn negative_correlation_decrements() {
        let rp = identity(vec![0.5, -2.0]);
        let mut s = StagewiseState::new(&rp);
        let st = s.step(&rp, 0.25).unwrap();
        assert_eq!(st.index, 1);
        assert_eq!(s.coefficients, vec![0.0, -0.25]);
        assert_eq!(s.residual, vec![0.5, -1.75]);
    }

    #[test]
    fn line_search_on_identity_zeroes_largest_residual() {
        let rp = identity(vec![3.0, -1.0, 2.0]);
        let t = run_fs(&rp, ShrinkageSchedule::LineSearch, 10).unwrap();
        assert_eq!(t.termination, Termination::Optimal { iteration: 3 });
        assert_eq!(t.coefficients, vec![3.0, -1.0, 2.0]);
        assert_eq!(
            t.records.iter().map(|r| r.index).collect::<Vec<_>>(),
            vec![0, 2, 1, 0]
        );
        assert_eq!(t.records[3].primal, 0.0);
    }

    #[test]
    fn optimal_epsilon_falls_back_to_response_norm() {
        let rp = identity(vec![3.0, 4.0]);
        let s = ShrinkageSchedule::Optimal {
            fitted_norm: None,
            steps: 25,
        };
        assert_eq!(s.epsilon(&rp, 0, 1.0), 5.0 / 5.0);
        assert_eq!(s.fitted_norm(&rp), Some(5.0));
    }

    #[test]
    fn least_squares_shortcut_for_full_row_rank() {
        let x = Matrix::from_rows(&[[1.0, 2.0, 0.5], [0.0, 1.0, -1.0]]).unwrap();
        let rp = RegressionProblem::new(x, vec![3.0, 4.0]).unwrap();
        let fit = rp.least_squares().unwrap();
        assert_eq!(fit.rank, 2);
        assert_eq!(fit.fitted_norm, 5.0);
    }

    #[test]
    fn sparsity_counts() {
        let rp = identity(vec![1.0, 0.0, 0.0]);
        let mut s = StagewiseState::new(&rp);
        for _ in 0..4 {
            s.step(&rp, 0.125).unwrap();
        }
        assert_eq!(s.coef_l0(), 1);
        assert_eq!(s.coef_l1(), 0.5);
    }
}
