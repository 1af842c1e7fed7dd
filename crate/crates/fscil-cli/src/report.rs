//! CSV and JSON writers for protocol reports, plus the long-format sweep
//! CSV. Output is byte-deterministic: fixed column order, sorted JSON keys,
//! shortest-round-trip float formatting.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fscil_core::{ProtocolReport, SessionReport};
use serde_json::{json, Map, Value};

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// One row per session: `session,overall,incremental,n_test,n_test_inc`.
/// The incremental cell is empty when the metric is absent.
pub fn report_to_csv(report: &ProtocolReport) -> String {
    let mut out = String::from("session,overall,incremental,n_test,n_test_inc\n");
    for s in &report.sessions {
        let inc = s
            .incremental_accuracy
            .map(|v| format!("{v}"))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            s.session, s.overall_accuracy, inc, s.n_test, s.n_test_incremental
        )
        .expect("write to string");
    }
    out
}

fn session_to_json(s: &SessionReport) -> Value {
    let drift: Map<String, Value> = s
        .drift
        .iter()
        .map(|(id, d)| (id.0.to_string(), json!(d)))
        .collect();
    json!({
        "session": s.session,
        "overall_accuracy": s.overall_accuracy,
        "incremental_accuracy": s.incremental_accuracy,
        "n_test": s.n_test,
        "n_test_incremental": s.n_test_incremental,
        "drift": drift,
    })
}

pub fn report_to_json(report: &ProtocolReport) -> String {
    let value = json!({
        "seed": report.seed,
        "dataset_fingerprint": format!("{:016x}", report.dataset_fingerprint),
        "strategy": {
            "variant": report.strategy.variant.name(),
            "r": report.strategy.top_r,
            "tau": report.strategy.tau,
            "beta_base": report.strategy.beta_base,
            "beta_inc": report.strategy.beta_inc,
        },
        "sessions": report.sessions.iter().map(session_to_json).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
    text.push('\n');
    text
}

pub fn write_report(report: &ProtocolReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => report_to_csv(report),
        ReportFormat::Json => report_to_json(report),
    };
    fs::write(path, text)?;
    Ok(())
}

/// A sweep result: one row per (parameter value, repeat, session, metrics).
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub seed: u64,
    pub session: usize,
    pub overall: f64,
    pub incremental: Option<f64>,
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("param,value,seed,session,overall,incremental\n");
    for r in rows {
        let inc = r.incremental.map(|v| format!("{v}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.param, r.value, r.seed, r.session, r.overall, inc
        )
        .expect("write to string");
    }
    out
}
