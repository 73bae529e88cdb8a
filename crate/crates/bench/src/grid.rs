//! Exhaustive hyperparameter search on warm-start validation users.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Mode};
use crate::error::{BenchError, Result};
use crate::pipeline::{prepare, run_prepared, Prepared};

/// Candidate values per axis. An axis is `k` or a method hyperparameter.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GridSpec {
    pub axes: Vec<(String, Vec<String>)>,
}

impl GridSpec {
    pub fn new(axes: Vec<(String, Vec<String>)>) -> Result<Self> {
        if let Some((name, _)) = axes.iter().find(|(_, v)| v.is_empty()) {
            return Err(BenchError::config(format!("grid axis `{name}` has no candidates")));
        }
        Ok(GridSpec { axes })
    }

    pub fn size(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    /// Cartesian product, first axis outermost.
    pub fn points(&self) -> Vec<BTreeMap<String, String>> {
        let mut points = vec![BTreeMap::new()];
        for (name, values) in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.insert(name.clone(), v.clone());
                        q
                    })
                })
                .collect();
        }
        points
    }
}

/// Applies a grid point to a copy of `base`.
pub fn apply_point(base: &ExperimentConfig, point: &BTreeMap<String, String>) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    for (key, value) in point {
        if key == "k" {
            cfg.k = value.parse().ok().filter(|&k| k >= 1).ok_or_else(|| BenchError::config(format!("k = `{value}`")))?;
        } else {
            cfg.method.params.insert(key.clone(), value.clone());
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub point: BTreeMap<String, String>,
    pub ndcg: Option<f64>,
    pub coverage: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub best: ExperimentConfig,
    pub best_index: usize,
    /// One row per grid point, in enumeration order.
    pub leaderboard: Vec<LeaderboardRow>,
}

/// Index of the first maximum among the scored points.
pub fn select_best(scores: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Some(v) = *s {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// Evaluates every point in parallel on loaded data and returns the first
/// point with the highest validation nDCG. Failing points are recorded.
pub fn grid_search_prepared(grid: &GridSpec, base: &ExperimentConfig, p: &Prepared) -> Result<GridResult> {
    if base.mode != Mode::Validate {
        return Err(BenchError::config("grid search runs in validate mode"));
    }
    let points = grid.points();
    let leaderboard: Vec<LeaderboardRow> = points
        .par_iter()
        .map(|point| match apply_point(base, point).and_then(|cfg| run_prepared(p, &cfg)) {
            Ok(out) => LeaderboardRow {
                point: point.clone(),
                ndcg: Some(out.row.ndcg),
                coverage: Some(out.row.coverage),
                error: None,
            },
            Err(e) => LeaderboardRow { point: point.clone(), ndcg: None, coverage: None, error: Some(e.to_string()) },
        })
        .collect();
    let scores: Vec<Option<f64>> = leaderboard.iter().map(|r| r.ndcg).collect();
    let Some(best_index) = select_best(&scores) else {
        let first = leaderboard.iter().find_map(|r| r.error.clone()).unwrap_or_default();
        return Err(BenchError::data(format!("every grid point failed; first error: {first}")));
    };
    Ok(GridResult { best: apply_point(base, &points[best_index])?, best_index, leaderboard })
}

pub fn grid_search(grid: &GridSpec, base: &ExperimentConfig) -> Result<GridResult> {
    base.validate()?;
    let p = prepare(base)?;
    grid_search_prepared(grid, base, &p)
}
