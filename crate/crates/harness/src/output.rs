//! File formats: the line-delimited JSON trace, the certificate records,
//! the human-readable report and the plot columns.
//!
//! A trace is one header line, one line per iteration (the record plus the
//! certificates evaluated at it), and one final line with the termination
//! and the model coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use mirrorboost::bounds::{summarize, BoundKind, CertificateRecord, CertificateStatus};
use mirrorboost::{Algorithm, Termination, TraceRecord};
use serde::{Deserialize, Serialize};

use crate::data::BaseClassifier;
use crate::error::{HarnessError, Result};
use crate::experiment::{Outcome, TraceHeader, TRACE_FORMAT};

pub const TRACE_FILE: &str = "trace.jsonl";
pub const CERTIFICATES_FILE: &str = "certificates.jsonl";
pub const REPORT_FILE: &str = "report.txt";
pub const PLOT_FILE: &str = "plot.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLine {
    #[serde(flatten)]
    pub record: TraceRecord,
    pub certificates: Vec<CertificateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalLine {
    pub termination: Termination,
    pub records: usize,
    pub coefficients: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub final_iterate: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifiers: Option<Vec<BaseClassifier>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceLine {
    Header(TraceHeader),
    Iteration(IterationLine),
    Final(FinalLine),
}

/// A trace file read back into memory.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTrace {
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
    /// Certificates as recorded in the file.
    pub certificates: Vec<CertificateRecord>,
    pub finish: FinalLine,
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("trace values serialize");
    s.push('\n');
    s
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// The trace as text. Exposed so callers can hash or diff it in memory.
pub fn render_trace(outcome: &Outcome) -> String {
    let mut by_iteration: BTreeMap<usize, Vec<CertificateRecord>> = BTreeMap::new();
    for c in &outcome.certificates {
        by_iteration.entry(c.iteration).or_default().push(c.clone());
    }
    let mut out = json_line(&TraceLine::Header(outcome.header.clone()));
    for r in &outcome.trace.records {
        let line = TraceLine::Iteration(IterationLine {
            record: r.clone(),
            certificates: by_iteration.remove(&r.iteration).unwrap_or_default(),
        });
        out.push_str(&json_line(&line));
    }
    out.push_str(&json_line(&TraceLine::Final(FinalLine {
        termination: outcome.trace.termination,
        records: outcome.trace.records.len(),
        coefficients: outcome.trace.coefficients.clone(),
        final_iterate: outcome.trace.final_iterate.clone(),
        classifiers: outcome.classifiers.clone(),
    })));
    out
}

pub fn write_trace(path: &Path, outcome: &Outcome) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(render_trace(outcome).as_bytes())
        .map_err(|e| HarnessError::io(path, e))?;
    finish(path, w)
}

/// Checks that a record carries exactly the optional fields its algorithm
/// produces.
pub fn validate_record(algorithm: Algorithm, r: &TraceRecord) -> std::result::Result<(), String> {
    let has = |present: bool, field: &str, want: bool| {
        if present == want {
            Ok(())
        } else if want {
            Err(format!("missing field '{field}'"))
        } else {
            Err(format!("unexpected field '{field}'"))
        }
    };
    let (grad, coef) = match algorithm {
        Algorithm::AdaBoost => (true, false),
        Algorithm::Stagewise => (false, true),
        Algorithm::MirrorDescent => (false, false),
    };
    has(r.gradient_norm.is_some(), "gradient_norm", grad)?;
    has(r.coef_l1.is_some(), "coef_l1", coef)?;
    has(r.coef_l0.is_some(), "coef_l0", coef)?;
    if algorithm == Algorithm::Stagewise {
        has(r.dual.is_some(), "dual", false)?;
    }
    if !(r.step.is_finite() && r.step >= 0.0) {
        return Err(format!(
            "step {} is not a finite non-negative number",
            r.step
        ));
    }
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<ParsedTrace> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let bad = |line: usize, message: String| HarnessError::Trace {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut header = None;
    let mut records = Vec::new();
    let mut certificates = Vec::new();
    let mut finish = None;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let n = i + 1;
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        if finish.is_some() {
            return Err(bad(n, "content after the final record".into()));
        }
        let parsed: TraceLine = serde_json::from_str(&line).map_err(|e| bad(n, e.to_string()))?;
        match (parsed, &header) {
            (TraceLine::Header(h), None) => {
                if h.format != TRACE_FORMAT {
                    return Err(bad(n, format!("unsupported trace format {}", h.format)));
                }
                header = Some(h);
            }
            (TraceLine::Header(_), Some(_)) => return Err(bad(n, "second header".into())),
            (_, None) => return Err(bad(n, "expected the header first".into())),
            (TraceLine::Iteration(it), Some(h)) => {
                if it.record.iteration != records.len() {
                    return Err(bad(
                        n,
                        format!(
                            "iteration {} out of order, expected {}",
                            it.record.iteration,
                            records.len()
                        ),
                    ));
                }
                validate_record(h.algorithm, &it.record).map_err(|m| bad(n, m))?;
                if it
                    .certificates
                    .iter()
                    .any(|c| c.iteration != it.record.iteration)
                {
                    return Err(bad(n, "certificate attached to the wrong iteration".into()));
                }
                certificates.extend(it.certificates);
                records.push(it.record);
            }
            (TraceLine::Final(f), Some(_)) => {
                if f.records != records.len() {
                    return Err(bad(
                        n,
                        format!(
                            "final line counts {} records, found {}",
                            f.records,
                            records.len()
                        ),
                    ));
                }
                finish = Some(f);
            }
        }
    }
    let header = header.ok_or_else(|| bad(0, "empty trace".into()))?;
    let finish = finish.ok_or_else(|| bad(0, "missing final record".into()))?;
    Ok(ParsedTrace {
        header,
        records,
        certificates,
        finish,
    })
}

pub fn write_certificates(path: &Path, certificates: &[CertificateRecord]) -> Result<()> {
    let mut w = create(path)?;
    for c in certificates {
        w.write_all(json_line(c).as_bytes())
            .map_err(|e| HarnessError::io(path, e))?;
    }
    finish(path, w)
}

fn termination_text(t: Termination) -> String {
    match t {
        Termination::Completed => "completed".into(),
        Termination::EdgeSaturated { iteration } => {
            format!("stopped at iteration {iteration}: edge saturated")
        }
        Termination::Optimal { iteration } => {
            format!("stopped at iteration {iteration}: objective is exactly zero")
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6e}"))
}

/// Human-readable certificate summary. Depends only on what a trace file
/// stores, so `check` reproduces it byte for byte.
pub fn render_report(
    header: &TraceHeader,
    records: usize,
    termination: Termination,
    certificates: &[CertificateRecord],
) -> String {
    let c = &header.constants;
    let mut s = String::new();
    let _ = writeln!(s, "task        {}", header.task.name());
    let _ = writeln!(s, "algorithm   {}", header.algorithm.name());
    let _ = writeln!(
        s,
        "schedule    {} ({})",
        header.schedule.name(),
        c.schedule.name()
    );
    let _ = writeln!(s, "data        {}", header.data);
    let _ = writeln!(s, "size        {} x {}", header.rows, header.cols);
    let _ = writeln!(
        s,
        "iterations  {records} of {} ({})",
        header.iterations,
        termination_text(termination)
    );
    let _ = writeln!(s, "lipschitz   {}", c.lipschitz);
    if let Some(d) = c.diameter {
        let _ = writeln!(s, "diameter    {d}");
    }
    if let Some(e) = header.epsilon {
        let _ = writeln!(s, "epsilon     {e}");
    }
    if let Some(d) = header.fitted_norm {
        let _ = writeln!(s, "fitted norm {d}");
    }
    let _ = writeln!(s);

    let mut kinds: BTreeMap<BoundKind, Vec<&CertificateRecord>> = BTreeMap::new();
    for r in certificates {
        kinds.entry(r.kind).or_default().push(r);
    }
    let _ = writeln!(
        s,
        "{:<20} {:>8} {:>8} {:>6} {:>6} {:>14} {:>14}",
        "bound", "checked", "pass", "fail", "n/a", "min slack", "last slack"
    );
    for (kind, rs) in &kinds {
        let sum = summarize(&rs.iter().map(|r| (*r).clone()).collect::<Vec<_>>());
        let min_slack = rs
            .iter()
            .filter_map(|r| r.slack)
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
        let last = rs.iter().rev().find_map(|r| r.slack);
        let _ = writeln!(
            s,
            "{:<20} {:>8} {:>8} {:>6} {:>6} {:>14} {:>14}",
            kind.name(),
            sum.total(),
            sum.passed,
            sum.failed,
            sum.not_evaluable,
            opt(min_slack),
            opt(last)
        );
    }
    let total = summarize(certificates);
    let _ = writeln!(
        s,
        "{:<20} {:>8} {:>8} {:>6} {:>6}",
        "total",
        total.total(),
        total.passed,
        total.failed,
        total.not_evaluable
    );
    let _ = writeln!(s);
    for r in certificates
        .iter()
        .filter(|r| r.status == CertificateStatus::Fail)
        .take(10)
    {
        let _ = writeln!(
            s,
            "FAIL {} at iteration {}: observed {} > bound {}",
            r.kind.name(),
            r.iteration,
            opt(r.observed),
            opt(r.bound)
        );
    }
    let _ = writeln!(
        s,
        "result      {}",
        if total.all_passed() { "PASS" } else { "FAIL" }
    );
    s
}

/// Plot columns: iteration, step, primal series, running best, dual,
/// observed gap, general bound, closed-form bound, and the FS sparsity
/// statistics. Absent values are empty cells.
pub fn render_plot(
    algorithm: Algorithm,
    records: &[TraceRecord],
    certificates: &[CertificateRecord],
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| HarnessError::Internal(e.to_string());
    w.write_record([
        "iteration",
        "step",
        "primal",
        "best",
        "dual",
        "gap",
        "gap_bound",
        "closed_form_bound",
        "coef_l1",
        "coef_l0",
    ])
    .map_err(csv_err)?;
    let mut by_iteration: BTreeMap<usize, Vec<&CertificateRecord>> = BTreeMap::new();
    for c in certificates {
        by_iteration.entry(c.iteration).or_default().push(c);
    }
    let cell = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    let mut best = f64::INFINITY;
    for r in records {
        let value = match algorithm {
            Algorithm::AdaBoost => r.gradient_norm.unwrap_or(r.primal),
            _ => r.primal,
        };
        best = best.min(value);
        let certs = by_iteration
            .get(&r.iteration)
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        let find = |kinds: &[BoundKind]| certs.iter().find(|c| kinds.contains(&c.kind)).copied();
        let general = find(&[BoundKind::DualityGap, BoundKind::OptimalityGap]);
        let closed = find(&[
            BoundKind::ConstantStep,
            BoundKind::DynamicStep,
            BoundKind::PolyakStep,
        ]);
        w.write_record([
            r.iteration.to_string(),
            r.step.to_string(),
            value.to_string(),
            best.to_string(),
            cell(r.dual),
            cell(general.and_then(|c| c.observed)),
            cell(general.and_then(|c| c.bound)),
            cell(closed.and_then(|c| c.bound)),
            cell(r.coef_l1),
            r.coef_l0.map_or_else(String::new, |v| v.to_string()),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| HarnessError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Internal(e.to_string()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .map_err(|e| HarnessError::io(path, e))?;
    finish(path, w)
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub trace: PathBuf,
    pub certificates: PathBuf,
    pub report: PathBuf,
    pub plot: PathBuf,
}

impl OutputPaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            trace: dir.join(TRACE_FILE),
            certificates: dir.join(CERTIFICATES_FILE),
            report: dir.join(REPORT_FILE),
            plot: dir.join(PLOT_FILE),
        }
    }
}

/// Writes certificates, report and plot for already-checked results.
pub fn write_derived(
    paths: &OutputPaths,
    header: &TraceHeader,
    records: &[TraceRecord],
    termination: Termination,
    certificates: &[CertificateRecord],
) -> Result<String> {
    write_certificates(&paths.certificates, certificates)?;
    let report = render_report(header, records.len(), termination, certificates);
    write_text(&paths.report, &report)?;
    write_text(
        &paths.plot,
        &render_plot(header.algorithm, records, certificates)?,
    )?;
    Ok(report)
}

/// Writes every output file of a run into `dir`, creating it if needed.
/// Returns the report text.
pub fn write_outputs(dir: &Path, outcome: &Outcome) -> Result<(OutputPaths, String)> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let paths = OutputPaths::in_dir(dir);
    write_trace(&paths.trace, outcome)?;
    let report = write_derived(
        &paths,
        &outcome.header,
        &outcome.trace.records,
        outcome.trace.termination,
        &outcome.certificates,
    )?;
    Ok((paths, report))
}
