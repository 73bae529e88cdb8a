//! End-to-end study on one dataset: validation grid search per method, test
//! runs with the selected settings, significance flags, correlations and
//! reports.

use std::path::Path;

use serde::Serialize;

use crate::analysis::{compare_methods, correlate_metrics, MethodRecords, MetricCorrelation, SignificanceMatrix};
use crate::config::{ExperimentConfig, Mode};
use crate::error::{BenchError, Result, Stage, StageExt};
use crate::grid::{grid_search_prepared, GridSpec, LeaderboardRow};
use crate::io::{self, UserRecord};
use crate::methods::MethodSpec;
use crate::pipeline::{prepare, run_prepared};
use crate::report::{emit_report, ReportFormat, ReportRow};

pub const DEFAULT_METHODS: &[&str] = &[
    "mp",
    "trust_dir",
    "trust_undir",
    "jaccard",
    "katz",
    "gf",
    "le",
    "lle",
    "hope",
    "grarep",
    "deepwalk",
    "node2vec",
    "role2vec",
    "line",
];

fn axis(name: &str, values: &[&str]) -> (String, Vec<String>) {
    (name.to_string(), values.iter().map(|v| v.to_string()).collect())
}

/// Reconstructed default grid per method (the original extents are not
/// published); a single empty point for methods without one.
pub fn default_grid(method: &str) -> GridSpec {
    let axes = match method {
        "katz" => vec![axis("alpha", &["0.01", "0.05"]), axis("horizon", &["3", "6"])],
        "gf" => vec![axis("dim", &["64", "128"]), axis("reg", &["0.01", "0.1"])],
        "le" | "lle" => vec![axis("dim", &["32", "64", "128"])],
        "hope" => vec![axis("proximity", &["katz", "rpr", "cn", "aa"])],
        "grarep" => vec![axis("order", &["2", "4"])],
        "deepwalk" => vec![axis("window", &["5", "10"])],
        "node2vec" => vec![axis("p", &["0.5", "1", "2"]), axis("q", &["0.5", "1", "2"])],
        "role2vec" => vec![axis("clusters", &["10", "50"])],
        "line" => vec![axis("order", &["1", "2"])],
        _ => Vec::new(),
    };
    GridSpec { axes }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodOutcome {
    pub method: String,
    pub selected: String,
    pub leaderboard: Vec<LeaderboardRow>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Study {
    pub rows: Vec<ReportRow>,
    pub outcomes: Vec<MethodOutcome>,
    pub significance: Option<SignificanceMatrix>,
    pub correlations: Vec<MetricCorrelation>,
}

/// Runs the study. Methods that fail are reported and skipped. With
/// `base.out` set, all artifacts are written there.
pub fn reproduce(base: &ExperimentConfig) -> Result<Study> {
    let methods: Vec<String> = if base.methods.is_empty() {
        DEFAULT_METHODS.iter().map(|m| m.to_string()).collect()
    } else {
        base.methods.clone()
    };
    for m in &methods {
        let mut cfg = base.clone();
        cfg.method = MethodSpec::new(m);
        cfg.validate().stage(Stage::Config)?;
    }
    let p = prepare(base)?;
    let users = p.data.users().clone();
    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    let mut records: Vec<MethodRecords> = Vec::new();
    for m in &methods {
        let mut cfg = base.clone();
        cfg.method = MethodSpec::new(m);
        cfg.mode = Mode::Validate;
        let grid = if base.grid.is_empty() { default_grid(m) } else { GridSpec::new(base.grid.clone())? };
        let (mut chosen, leaderboard) = match grid_search_prepared(&grid, &cfg, &p) {
            Ok(g) => (g.best, g.leaderboard),
            Err(e) => {
                let error = Some(e.to_string());
                outcomes.push(MethodOutcome { method: m.clone(), selected: String::new(), leaderboard: vec![], error });
                continue;
            }
        };
        chosen.mode = Mode::Test;
        match run_prepared(&p, &chosen) {
            Ok(out) => {
                records.push(MethodRecords { method: m.clone(), records: out.user_records(&users) });
                outcomes.push(MethodOutcome { method: m.clone(), selected: out.row.params.clone(), leaderboard, error: None });
                rows.push(out.row);
            }
            Err(e) => outcomes.push(MethodOutcome {
                method: m.clone(),
                selected: chosen.method.describe(),
                leaderboard,
                error: Some(e.to_string()),
            }),
        }
    }
    if rows.is_empty() {
        return Err(BenchError::data("no method completed"));
    }
    let significance = if records.len() >= 2 { Some(compare_methods(&records)?) } else { None };
    if let Some(s) = &significance {
        for (row, &flag) in rows.iter_mut().zip(&s.flagged) {
            if flag {
                row.flags = "*".into();
            }
        }
    }
    let correlations = correlate_metrics(&records)?;
    let study = Study { rows, outcomes, significance, correlations };
    if let Some(dir) = &base.out {
        write_study(&study, &records, dir).stage(Stage::Write)?;
    }
    Ok(study)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let bytes = serde_json::to_vec_pretty(value).map_err(|e| BenchError::data(e.to_string()))?;
    std::fs::write(path, bytes).map_err(|e| BenchError::io(path, e))
}

fn write_study(study: &Study, records: &[MethodRecords], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    for (name, format) in [("report.csv", ReportFormat::Csv), ("report.json", ReportFormat::Json), ("report.md", ReportFormat::Markdown)] {
        let path = dir.join(name);
        std::fs::write(&path, emit_report(&study.rows, format)?).map_err(|e| BenchError::io(&path, e))?;
    }
    let all: Vec<UserRecord> = records.iter().flat_map(|m| m.records.iter().cloned()).collect();
    io::write_user_records(io::create_writer(&dir.join("users.csv"))?, &all)?;
    write_json(&dir.join("grid.json"), &study.outcomes)?;
    write_json(&dir.join("significance.json"), &study.significance)?;
    write_json(&dir.join("correlations.json"), &study.correlations)
}
