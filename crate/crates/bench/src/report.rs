//! Table-shaped report rows and their csv / json / markdown renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use trustrec_core::eval::Aggregate;

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};
use crate::methods::{Family, Method, MethodSpec};
use crate::pipeline::StageTiming;

/// Aggregate result of one run. Metric means are over covered users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub family: Family,
    pub params: String,
    pub ndcg: f64,
    pub novelty: f64,
    pub diversity: Option<f64>,
    pub coverage: f64,
    pub covered: usize,
    pub users: usize,
    /// `*` when significantly better than every other method.
    pub flags: String,
    pub mode: String,
    pub seed: u64,
    pub wall_time: f64,
    pub peak_memory_kb: Option<u64>,
    pub stages: Vec<StageTiming>,
}

impl ReportRow {
    pub fn new(
        spec: &MethodSpec,
        method: &Method,
        cfg: &ExperimentConfig,
        agg: &Aggregate,
        wall_time: f64,
        stages: Vec<StageTiming>,
    ) -> Self {
        let mut params = format!("k={}", cfg.k);
        if !spec.params.is_empty() {
            params.push(';');
            params.push_str(&spec.describe());
        }
        ReportRow {
            method: spec.name.clone(),
            family: method.family(),
            params,
            ndcg: agg.ndcg,
            novelty: agg.novelty,
            diversity: agg.diversity,
            coverage: agg.coverage,
            covered: agg.covered,
            users: agg.total,
            flags: String::new(),
            mode: cfg.mode.name().to_string(),
            seed: cfg.seed,
            wall_time,
            peak_memory_kb: stages.iter().filter_map(|s| s.peak_memory_kb).max(),
            stages,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            _ => Err(BenchError::config(format!("report format `{s}` is not csv, json or markdown"))),
        }
    }
}

pub const CSV_HEADER: [&str; 7] = ["method", "params", "ndcg", "novelty", "diversity", "coverage", "flags"];

/// Renders rows. csv and markdown carry only the table columns so that
/// identical runs give identical bytes; json carries every field.
pub fn emit_report(rows: &[ReportRow], format: ReportFormat) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Err(BenchError::data("no report rows"));
    }
    match format {
        ReportFormat::Json => serde_json::to_vec_pretty(rows).map_err(|e| BenchError::data(e.to_string())),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let fail = |e: csv::Error| BenchError::data(e.to_string());
            w.write_record(CSV_HEADER).map_err(fail)?;
            for r in rows {
                let div = r.diversity.map(|d| d.to_string()).unwrap_or_default();
                w.write_record([
                    r.method.as_str(),
                    r.params.as_str(),
                    &r.ndcg.to_string(),
                    &r.novelty.to_string(),
                    &div,
                    &r.coverage.to_string(),
                    r.flags.as_str(),
                ])
                .map_err(fail)?;
            }
            w.into_inner().map_err(|e| BenchError::data(e.to_string()))
        }
        ReportFormat::Markdown => Ok(markdown(rows).into_bytes()),
    }
}

pub fn parse_report_json(bytes: &[u8]) -> Result<Vec<ReportRow>> {
    if let Ok(rows) = serde_json::from_slice::<Vec<ReportRow>>(bytes) {
        return Ok(rows);
    }
    serde_json::from_slice::<ReportRow>(bytes).map(|r| vec![r]).map_err(|e| BenchError::data(e.to_string()))
}

fn markdown(rows: &[ReportRow]) -> String {
    let mut sorted: Vec<&ReportRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.family);
    let mut out = String::from("| Cat. | Method | Params | nDCG | Nov. | Div. | UC |\n");
    out.push_str("|---|---|---|---:|---:|---:|---:|\n");
    let mut last = None;
    for r in sorted {
        let cat = if last == Some(r.family) { "" } else { r.family.label() };
        last = Some(r.family);
        let div = r.diversity.map_or("-".to_string(), |d| format!("{d:.4}"));
        let _ = writeln!(
            out,
            "| {cat} | {} | {} | {:.4}{} | {:.4} | {div} | {:.1} % |",
            r.method,
            r.params,
            r.ndcg,
            r.flags,
            r.novelty,
            r.coverage * 100.0
        );
    }
    out
}
