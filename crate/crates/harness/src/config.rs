//! Experiment configuration, loadable from TOML and overridable from the
//! command line.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::data::DataSource;
use crate::error::{HarnessError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MIRRORBOOST_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "mirrorboost-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Adaboost,
    Fs,
    MinmaxGame,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Adaboost => "adaboost",
            Task::Fs => "fs",
            Task::MinmaxGame => "minmax-game",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    /// Fixed step tuned to the horizon; for `fs`, the shrinkage `--epsilon`.
    Constant,
    /// `α_i ∝ 1/√(i+1)`.
    Dynamic,
    /// Exact line search (AdaBoost edge rule, FS coordinate minimization).
    LineSearch,
    /// FS shrinkage tuned to the horizon and `‖Xβ_LS‖₂`.
    Optimal,
}

impl ScheduleKind {
    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::Constant => "constant",
            ScheduleKind::Dynamic => "dynamic",
            ScheduleKind::LineSearch => "line-search",
            ScheduleKind::Optimal => "optimal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub data: DataSource,
    /// Defaults per task: constant, except `fs` without `epsilon`, which
    /// uses the tuned shrinkage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleKind>,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Center regression columns and response.
    #[serde(default)]
    pub center: bool,
    /// Scale regression columns to unit norm.
    #[serde(default)]
    pub scale: bool,
    /// Keep the full iterate in each trace line.
    #[serde(default)]
    pub record_iterates: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(task: Task, data: DataSource, iterations: usize) -> Self {
        Self {
            task,
            data,
            schedule: None,
            iterations,
            epsilon: None,
            center: false,
            scale: false,
            record_iterates: false,
            out_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Usage(format!("invalid config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| HarnessError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn effective_schedule(&self) -> ScheduleKind {
        match (self.schedule, self.task, self.epsilon) {
            (Some(s), _, _) => s,
            (None, Task::Fs, None) => ScheduleKind::Optimal,
            _ => ScheduleKind::Constant,
        }
    }

    /// Rejects combinations that no run could honour. Called before any
    /// output is written.
    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(HarnessError::Usage(m));
        if self.iterations == 0 {
            return usage("--iters must be at least 1".into());
        }
        let schedule = self.effective_schedule();
        let supported: &[ScheduleKind] = match self.task {
            Task::Adaboost => &[
                ScheduleKind::Constant,
                ScheduleKind::Dynamic,
                ScheduleKind::LineSearch,
            ],
            Task::Fs => &[
                ScheduleKind::Constant,
                ScheduleKind::Optimal,
                ScheduleKind::LineSearch,
            ],
            Task::MinmaxGame => &[ScheduleKind::Constant, ScheduleKind::Dynamic],
        };
        if !supported.contains(&schedule) {
            return usage(format!(
                "schedule '{}' is not available for {} (use one of: {})",
                schedule.name(),
                self.task.name(),
                supported
                    .iter()
                    .map(|s| s.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        match (self.task, schedule, self.epsilon) {
            (Task::Fs, ScheduleKind::Constant, None) => {
                return usage("fs with the constant schedule needs --epsilon".into())
            }
            (Task::Fs, ScheduleKind::Constant, Some(e)) if !(e > 0.0 && e.is_finite()) => {
                return usage(format!("--epsilon must be positive, got {e}"))
            }
            (Task::Fs, ScheduleKind::Constant, Some(_)) => {}
            (_, _, Some(_)) => {
                return usage("--epsilon only applies to fs with the constant schedule".into())
            }
            _ => {}
        }
        if (self.center || self.scale) && self.task != Task::Fs {
            return usage("--center/--scale only apply to fs".into());
        }
        Ok(())
    }

    /// Output directory: the config's own, then the environment, then the
    /// built-in default.
    pub fn resolve_out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(default_out_dir)
    }
}

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}
