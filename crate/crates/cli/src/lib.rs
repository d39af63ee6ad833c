//! Declarative experiments that run every case through both the closed-form
//! mappings and the density-matrix oracle, and report the differences.

pub mod error;
pub mod report;
pub mod run;
pub mod spec;

pub use error::{EmitError, RunError, SpecError};
pub use report::{emit_report, write_report, CaseReport, Metadata, Report, ReportFormat, Summary};
pub use run::{run_experiment, run_experiment_filtered};
pub use spec::{load_experiment, parse_experiment, ExperimentKind, ExperimentSpec};
