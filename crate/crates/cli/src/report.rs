//! Comparison reports and their JSON/CSV forms.

use std::io::Write;
use std::path::Path;

use noisy_mbqc::densemath::CMatrix;
use serde::{Deserialize, Serialize};

use crate::error::EmitError;
use crate::spec::ExperimentKind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub name: String,
    /// Choi matrix for block chains, output state otherwise.
    pub closed_form: CMatrix,
    pub oracle: CMatrix,
    pub max_entry_diff: f64,
    pub trace_distance: f64,
    pub branch_prob: f64,
    pub oracle_branch_prob: f64,
}

impl CaseReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_entry_diff <= tolerance && self.trace_distance <= tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub max_entry_diff: f64,
    pub max_trace_distance: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub spec_hash: String,
    pub seed: u64,
    /// Seconds since the Unix epoch; the only field that differs between identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: ExperimentKind,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
    pub metadata: Metadata,
}

impl Report {
    pub fn new(kind: ExperimentKind, cases: Vec<CaseReport>, tolerance: f64, metadata: Metadata) -> Self {
        let max_entry_diff = cases.iter().map(|c| c.max_entry_diff).fold(0.0, f64::max);
        let max_trace_distance = cases.iter().map(|c| c.trace_distance).fold(0.0, f64::max);
        let summary = Summary {
            cases: cases.len(),
            max_entry_diff,
            max_trace_distance,
            tolerance,
            pass: cases.iter().all(|c| c.passes(tolerance)),
        };
        Report { kind, cases, summary, metadata }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    /// CSV for a `.csv` extension, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

const CSV_HEADER: [&str; 8] =
    ["case", "branch_prob", "oracle_branch_prob", "max_entry_diff", "trace_distance", "pass", "closed_form", "oracle"];

pub fn write_report<W: Write>(r: &Report, format: ReportFormat, mut out: W) -> Result<(), EmitError> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for c in &r.cases {
                w.write_record([
                    c.name.clone(),
                    format!("{:?}", c.branch_prob),
                    format!("{:?}", c.oracle_branch_prob),
                    format!("{:?}", c.max_entry_diff),
                    format!("{:?}", c.trace_distance),
                    c.passes(r.summary.tolerance).to_string(),
                    serde_json::to_string(&c.closed_form)?,
                    serde_json::to_string(&c.oracle)?,
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn emit_report(r: &Report, format: ReportFormat, path: &Path) -> Result<(), EmitError> {
    let file = std::fs::File::create(path)?;
    let mut buf = std::io::BufWriter::new(file);
    write_report(r, format, &mut buf)?;
    buf.flush()?;
    Ok(())
}
