//! Turns a validated [`ExperimentConfig`] into a finished, certified run.

use mirrorboost::boosting::run_adaboost;
use mirrorboost::bounds::{self, CertificateRecord};
use mirrorboost::prox::uniform;
use mirrorboost::stagewise::run_fs;
use mirrorboost::{
    Algorithm, ProblemConstants, ProxFunction, RegressionProblem, ShrinkageSchedule, StepSchedule,
    Trace,
};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ScheduleKind, Task};
use crate::data::{
    self, build_stumps, BaseClassifier, DataSource, Dataset, LabeledData, RegressionData,
    SyntheticKind,
};
use crate::error::{HarnessError, Result};

pub const TRACE_FORMAT: u32 = 1;

/// First line of a trace file. Carries everything the certificate checker
/// needs, so a trace can be re-verified without its data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: u32,
    pub task: Task,
    pub algorithm: Algorithm,
    pub schedule: ScheduleKind,
    pub data: DataSource,
    pub iterations: usize,
    /// Examples (`m`), observations (`n`) or primal dimension.
    pub rows: usize,
    /// Base classifiers after negation closure (`n`), predictors (`p`) or
    /// dual dimension.
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// `‖X‖_{1,2}`, FS only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_norm: Option<f64>,
    /// `‖Xβ_LS‖₂`, FS only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_norm: Option<f64>,
    pub center: bool,
    pub scale: bool,
    pub constants: ProblemConstants,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub header: TraceHeader,
    pub trace: Trace,
    pub certificates: Vec<CertificateRecord>,
    /// Stump descriptions for AdaBoost columns.
    pub classifiers: Option<Vec<BaseClassifier>>,
}

fn wrong_kind(task: Task, kind: SyntheticKind) -> HarnessError {
    HarnessError::Usage(format!(
        "synthetic {} data cannot be used for {}",
        kind.name(),
        task.name()
    ))
}

fn load_labeled(source: &DataSource) -> Result<LabeledData> {
    match source {
        DataSource::Csv(p) => data::load_classification_csv(p),
        DataSource::Synthetic(s) => match data::generate(s)? {
            Dataset::Classification(d) => Ok(d),
            _ => Err(wrong_kind(Task::Adaboost, s.kind)),
        },
    }
}

fn load_regression(source: &DataSource) -> Result<RegressionData> {
    match source {
        DataSource::Csv(p) => data::load_regression_csv(p),
        DataSource::Synthetic(s) => match data::generate(s)? {
            Dataset::Regression(d) => Ok(d),
            _ => Err(wrong_kind(Task::Fs, s.kind)),
        },
    }
}

fn load_game(source: &DataSource) -> Result<mirrorboost::Matrix> {
    match source {
        DataSource::Csv(p) => data::load_game_csv(p),
        DataSource::Synthetic(s) => match data::generate(s)? {
            Dataset::Game(a) => Ok(a),
            _ => Err(wrong_kind(Task::MinmaxGame, s.kind)),
        },
    }
}

fn header(
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    rows: usize,
    cols: usize,
    constants: ProblemConstants,
) -> TraceHeader {
    TraceHeader {
        format: TRACE_FORMAT,
        task: cfg.task,
        algorithm,
        schedule: cfg.effective_schedule(),
        data: cfg.data.clone(),
        iterations: cfg.iterations,
        rows,
        cols,
        epsilon: None,
        design_norm: None,
        fitted_norm: None,
        center: cfg.center,
        scale: cfg.scale,
        constants,
    }
}

/// Loads the data, runs the configured algorithm and checks every
/// certificate. Nothing is written to disk.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let k = cfg.iterations;
    let schedule_kind = cfg.effective_schedule();

    let (header, mut trace, classifiers) = match cfg.task {
        Task::Adaboost => {
            let stumps = build_stumps(&load_labeled(&cfg.data)?)?;
            let ts = &stumps.training;
            let schedule = match schedule_kind {
                ScheduleKind::Constant => ts.constant_schedule(k),
                ScheduleKind::Dynamic => ts.dynamic_schedule(),
                _ => StepSchedule::EdgeLineSearch,
            };
            let constants = ProblemConstants {
                algorithm: Algorithm::AdaBoost,
                lipschitz: ts.lipschitz(),
                diameter: Some(ts.diameter()),
                optimum: None,
                optimum_divergence: None,
                optimum_distance: None,
                schedule: schedule.clone(),
            };
            let trace = run_adaboost(ts, &schedule, k)?;
            let h = header(cfg, Algorithm::AdaBoost, ts.m(), ts.n(), constants);
            (h, trace, Some(stumps.classifiers))
        }
        Task::Fs => {
            let mut d = load_regression(&cfg.data)?;
            d.preprocess(cfg.center, cfg.scale)?;
            let rp: RegressionProblem = d.into_problem()?;
            let fitted = rp.least_squares_norm()?;
            let shrink = match schedule_kind {
                ScheduleKind::Constant => {
                    ShrinkageSchedule::Constant(cfg.epsilon.expect("validated"))
                }
                ScheduleKind::Optimal => ShrinkageSchedule::Optimal {
                    fitted_norm: Some(fitted),
                    steps: k,
                },
                _ => ShrinkageSchedule::LineSearch,
            };
            let constants = ProblemConstants {
                algorithm: Algorithm::Stagewise,
                lipschitz: rp.operator_norm(),
                diameter: None,
                optimum: Some(0.0),
                optimum_divergence: Some(0.5 * fitted * fitted),
                optimum_distance: Some(fitted),
                schedule: shrink.to_step_schedule(&rp),
            };
            let trace = run_fs(&rp, shrink, k)?;
            let mut h = header(cfg, Algorithm::Stagewise, rp.n(), rp.p(), constants);
            h.epsilon = cfg.epsilon;
            h.design_norm = Some(rp.operator_norm());
            h.fitted_norm = Some(fitted);
            (h, trace, None)
        }
        Task::MinmaxGame => {
            let problem = data::game_problem(load_game(&cfg.data)?);
            let m = problem.primal_dim();
            let x0 = uniform(m);
            let lipschitz = problem.lipschitz(ProxFunction::Entropy);
            let diameter = ProxFunction::Entropy.diameter_bound(&x0, None)?;
            let schedule = match schedule_kind {
                ScheduleKind::Dynamic => StepSchedule::Dynamic {
                    lipschitz,
                    diameter,
                },
                _ => StepSchedule::Horizon {
                    lipschitz,
                    diameter,
                    steps: k,
                },
            };
            let constants = ProblemConstants {
                algorithm: Algorithm::MirrorDescent,
                lipschitz,
                diameter: Some(diameter),
                optimum: None,
                optimum_divergence: None,
                optimum_distance: None,
                schedule: schedule.clone(),
            };
            let trace = mirrorboost::md::run(&problem, &schedule, ProxFunction::Entropy, x0, k)?;
            let h = header(
                cfg,
                Algorithm::MirrorDescent,
                m,
                problem.dual_dim(),
                constants,
            );
            (h, trace, None)
        }
    };

    if !cfg.record_iterates {
        for r in &mut trace.records {
            r.iterate = Vec::new();
        }
        trace.final_iterate = Vec::new();
    }
    let certificates = bounds::check(&trace.records, &header.constants);
    Ok(Outcome {
        header,
        trace,
        certificates,
        classifiers,
    })
}
