//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mirrorboost::bounds::{self, summarize};

use crate::config::{ExperimentConfig, ScheduleKind, Task};
use crate::data::{self, DataSource, SyntheticKind, SyntheticSpec};
use crate::error::{exit, HarnessError, Result};
use crate::experiment::run_experiment;
use crate::output::{self, OutputPaths};

#[derive(Debug, Parser)]
#[command(
    name = "mirrorboost",
    version,
    about = "Mirror Descent, AdaBoost and FS-ε runs with certified bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write its trace, certificates, report and plot data.
    Run(RunArgs),
    /// Re-verify the certificates in a saved trace.
    Check(CheckArgs),
    /// Write a synthetic dataset as CSV.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// What to run. May come from --config instead.
    #[arg(value_enum)]
    pub task: Option<Task>,
    #[arg(long, value_enum)]
    pub schedule: Option<ScheduleKind>,
    #[arg(long = "iters")]
    pub iterations: Option<usize>,
    /// `synthetic:<kind>:seed=N[,key=value]*` or a CSV path.
    #[arg(long)]
    pub data: Option<DataSource>,
    /// FS shrinkage for the constant schedule.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Output directory [default: $MIRRORBOOST_OUT_DIR or ./mirrorboost-out].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML experiment file; command-line flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub center: bool,
    #[arg(long)]
    pub scale: bool,
    /// Keep every iterate in the trace.
    #[arg(long)]
    pub record_iterates: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub trace: PathBuf,
    /// Directory for the regenerated certificates, report and plot data.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// A saved report to compare the regenerated one against.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_parser = parse_kind)]
    pub kind: SyntheticKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Examples / observations / primal dimension.
    #[arg(long)]
    pub rows: Option<usize>,
    /// Features / predictors / dual dimension.
    #[arg(long)]
    pub cols: Option<usize>,
    /// Destination file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> std::result::Result<SyntheticKind, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

impl RunArgs {
    /// Merges the optional config file with the flags.
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => {
                let task = self.task.ok_or_else(|| {
                    HarnessError::Usage(
                        "a task (adaboost, fs, minmax-game) or --config is required".into(),
                    )
                })?;
                let data = self.data.clone().ok_or_else(|| {
                    HarnessError::Usage("--data is required without --config".into())
                })?;
                ExperimentConfig::new(task, data, 100)
            }
        };
        if let Some(t) = self.task {
            cfg.task = t;
        }
        if let Some(d) = &self.data {
            cfg.data = d.clone();
        }
        if let Some(s) = self.schedule {
            cfg.schedule = Some(s);
        }
        if let Some(k) = self.iterations {
            cfg.iterations = k;
        }
        if let Some(e) = self.epsilon {
            cfg.epsilon = Some(e);
        }
        if let Some(o) = &self.out {
            cfg.out_dir = Some(o.clone());
        }
        cfg.center |= self.center;
        cfg.scale |= self.scale;
        cfg.record_iterates |= self.record_iterates;
        Ok(cfg)
    }
}

/// Runs a parsed command. Human-readable output goes to `stdout`. A run
/// whose certificates fail still writes its files, then returns
/// [`HarnessError::CertificateFailure`].
pub fn execute<W: Write>(cli: Cli, stdout: &mut W) -> Result<u8> {
    let print = |w: &mut W, s: &str| {
        w.write_all(s.as_bytes())
            .map_err(|e| HarnessError::io("<stdout>", e))
    };
    match cli.command {
        Command::Run(args) => {
            let cfg = args.to_config()?;
            let outcome = run_experiment(&cfg)?;
            let dir = cfg.resolve_out_dir();
            let (paths, report) = output::write_outputs(&dir, &outcome)?;
            print(stdout, &report)?;
            print(stdout, &format!("trace       {}\n", paths.trace.display()))?;
            let failed = summarize(&outcome.certificates).failed;
            if failed > 0 {
                return Err(HarnessError::CertificateFailure { failed });
            }
            Ok(exit::OK)
        }
        Command::Check(args) => {
            let parsed = output::read_trace(&args.trace)?;
            let recomputed = bounds::check(&parsed.records, &parsed.header.constants);
            if recomputed != parsed.certificates {
                return Err(HarnessError::CertificateMismatch(
                    "certificates stored in the trace differ from the recomputed ones".into(),
                ));
            }
            let report = match &args.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
                    output::write_derived(
                        &OutputPaths::in_dir(dir),
                        &parsed.header,
                        &parsed.records,
                        parsed.finish.termination,
                        &recomputed,
                    )?
                }
                None => output::render_report(
                    &parsed.header,
                    parsed.records.len(),
                    parsed.finish.termination,
                    &recomputed,
                ),
            };
            print(stdout, &report)?;
            if let Some(path) = &args.report {
                let saved = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
                if saved != report {
                    return Err(HarnessError::CertificateMismatch(format!(
                        "regenerated report differs from {}",
                        path.display()
                    )));
                }
                print(stdout, &format!("report      matches {}\n", path.display()))?;
            }
            let failed = summarize(&recomputed).failed;
            if failed > 0 {
                return Err(HarnessError::CertificateFailure { failed });
            }
            Ok(exit::OK)
        }
        Command::Gen(args) => {
            let spec = SyntheticSpec {
                kind: args.kind,
                seed: args.seed,
                rows: args.rows,
                cols: args.cols,
            };
            let dataset = data::generate(&spec)?;
            match &args.out {
                Some(path) => {
                    let file =
                        std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
                    data::write_csv(&dataset, file)?;
                }
                None => data::write_csv(&dataset, &mut *stdout)?,
            }
            Ok(exit::OK)
        }
    }
}
