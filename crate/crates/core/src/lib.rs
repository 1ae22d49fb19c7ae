//! Mirror Descent for minmax-structured convex problems, with AdaBoost and
//! incremental forward stagewise regression (FS-ε) built as exact instances
//! of it.
//!
//! Every run produces an [`trace::Trace`] whose per-iteration records can be
//! handed to [`bounds::check`], which evaluates the known complexity bounds
//! for the schedule that was used and reports each as a pass/fail
//! [`bounds::CertificateRecord`].
//!
//! The crate is `no_std` and only needs `alloc`. The default `std` feature
//! only swaps in the platform's `ln`, `exp` and `sqrt` for libm's. File
//! formats, data loading and the command line live in the harness crate.
//!
//! Layout:
//!
//! * [`linalg`]: dense row-major matrix plus the few vector kernels used
//!   everywhere, and a pivoted Householder least-squares solve.
//! * [`prox`]: entropy and Euclidean prox functions.
//! * [`md`]: the generic Mirror Descent engine.
//! * [`schedule`]: step-size rules.
//! * [`trace`]: per-iteration records and run outcomes.
//! * [`boosting`]: AdaBoost, the exact weak learner and the edge / margin /
//!   log-exponential loss functionals.
//! * [`stagewise`]: FS-ε and its line-search variant.
//! * [`bounds`]: closed-form bound expressions and the certificate checker.

#![no_std]
// `!(x > 0.0)` guards are deliberate: they reject NaN along with non-positives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod boosting;
pub mod bounds;
pub mod error;
pub mod linalg;
mod math;
pub mod md;
pub mod prox;
pub mod schedule;
pub mod stagewise;
pub mod trace;

pub use boosting::{BoostState, TrainingSet};
pub use bounds::{BoundKind, CertificateRecord, CertificateStatus, ProblemConstants};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use md::{DualDomain, MinmaxProblem, MirrorDescentState, PrimalDomain};
pub use prox::ProxFunction;
pub use schedule::StepSchedule;
pub use stagewise::{RegressionProblem, ShrinkageSchedule, StagewiseState};
pub use trace::{Algorithm, Termination, Trace, TraceRecord, TraceSink};

/// Absolute tolerance used when comparing an observed quantity against a
/// bound right-hand side.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-9;
