//! load -> symmetrize -> split -> embed (or baseline) -> kNN -> score ->
//! metrics, with per-stage timing and peak memory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use trustrec_core::eval::{
    aggregate, epc_novelty, epc_novelty_discounted, ild_diversity, ndcg_at_n, train_item_embeddings, EvalRecord,
    ItemEmbeddingModel,
};
use trustrec_core::recsys::{
    knn_from_embedding, neighbors_direct, neighbors_jaccard, neighbors_katz, neighbors_undirected, NeighborList,
    PopularityRanking, RecommendationList, Scorer,
};
use trustrec_core::walk::SgnsConfig;
use trustrec_core::{split_users, EmbeddingMatrix, RatingsMatrix, SplitSpec, TrustGraph};

use crate::config::{EpcVariant, ExperimentConfig, Mode};
use crate::error::{BenchError, Result, Stage, StageExt};
use crate::io::{self, Dataset, Sidecar, UserRecord};
use crate::methods::{Method, MethodSpec};
use crate::report::ReportRow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
    /// Process peak resident set after the stage, if the platform reports it.
    pub peak_memory_kb: Option<u64>,
}

/// `VmHWM` from `/proc/self/status`.
pub fn peak_memory_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn timed<T>(timings: &mut Vec<StageTiming>, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f().stage(stage)?;
    timings.push(StageTiming {
        stage: stage.to_string(),
        seconds: start.elapsed().as_secs_f64(),
        peak_memory_kb: peak_memory_kb(),
    });
    Ok(out)
}

/// Loaded data shared by every run over the same dataset.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub data: Dataset,
    pub undirected: TrustGraph,
    pub split: SplitSpec,
    pub timings: Vec<StageTiming>,
}

impl Prepared {
    pub fn new(data: Dataset, threshold: usize) -> Self {
        let mut timings = Vec::new();
        let split = timed(&mut timings, Stage::Split, || Ok(split_users(&data.ratings, &data.trust, threshold)))
            .expect("splitting cannot fail");
        Prepared { undirected: data.trust.to_undirected(), data, split, timings }
    }

    /// Users with at least one rating.
    pub fn num_rated_users(&self) -> usize {
        self.split.warm_users.len() + self.split.cold_users.len()
    }
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.require_paths().stage(Stage::Config)?;
    let mut timings = Vec::new();
    let data = timed(&mut timings, Stage::Load, || {
        Dataset::open(&cfg.ratings, &cfg.trust, &cfg.ratings_format, &cfg.trust_format)
    })?;
    let mut p = Prepared::new(data, cfg.threshold);
    timings.append(&mut p.timings);
    p.timings = timings;
    Ok(p)
}

/// Training ratings and the targets evaluated against them.
#[derive(Debug, Clone)]
pub struct Task {
    pub train: RatingsMatrix,
    pub targets: Vec<u32>,
}

/// Test: all cold users against warm-side ratings. Validate: validation
/// users in `folds` interleaved folds, each fold held out from the warm-side
/// ratings in turn. Cold-user ratings never enter training.
pub fn tasks(p: &Prepared, mode: Mode, folds: usize) -> Vec<Task> {
    let n = p.data.ratings.num_users();
    match mode {
        Mode::Test => {
            let keep = SplitSpec::mask(&p.split.warm_users, n);
            vec![Task { train: p.data.ratings.restrict_users(&keep), targets: p.split.cold_users.clone() }]
        }
        Mode::Validate => {
            let users = &p.split.validation_users;
            let folds = folds.min(users.len()).max(1);
            (0..folds)
                .map(|f| {
                    let targets: Vec<u32> = users.iter().skip(f).step_by(folds).copied().collect();
                    let mut keep = SplitSpec::mask(&p.split.warm_users, n);
                    for &t in &targets {
                        keep[t as usize] = false;
                    }
                    Task { train: p.data.ratings.restrict_users(&keep), targets }
                })
                .collect()
        }
    }
}

/// Neighbor source of a method; embeddings are computed once per run.
enum Neighbors<'a> {
    Embedding(&'a EmbeddingMatrix),
    Trust(&'a Method),
    Popularity,
}

fn neighbor_lists(src: &Neighbors<'_>, p: &Prepared, targets: &[u32], k: usize) -> Result<Vec<NeighborList>> {
    Ok(match src {
        Neighbors::Embedding(e) => knn_from_embedding(e, targets, k),
        Neighbors::Trust(m) => match m {
            Method::TrustDirect(dir) => neighbors_direct(&p.data.trust, targets, k, *dir)?,
            Method::TrustUndirected => neighbors_undirected(&p.undirected, targets, k)?,
            Method::Jaccard => neighbors_jaccard(&p.undirected, targets, k)?,
            Method::Katz(cfg) => neighbors_katz(&p.undirected, targets, k, cfg)?,
            _ => unreachable!("not a trust baseline"),
        },
        Neighbors::Popularity => Vec::new(),
    })
}

fn recommend_task(src: &Neighbors<'_>, p: &Prepared, task: &Task, cfg: &ExperimentConfig) -> Result<Vec<RecommendationList>> {
    let exclude = |t: u32| task.train.row(t).0.to_vec();
    if let Neighbors::Popularity = src {
        let ranking = PopularityRanking::new(task.train.item_pop());
        return Ok(task
            .targets
            .iter()
            .map(|&t| ranking.recommend(t, cfg.n, if cfg.mp_filter { task.train.row(t).0 } else { &[] }))
            .collect());
    }
    let lists = neighbor_lists(src, p, &task.targets, cfg.k)?;
    Ok(lists
        .par_iter()
        .map_init(|| Scorer::new(task.train.num_items()), |s, nl| s.score(nl, &task.train, cfg.n, &exclude(nl.target)))
        .collect())
}

fn item_model(train: &RatingsMatrix, cfg: &ExperimentConfig) -> Result<Option<ItemEmbeddingModel>> {
    if !cfg.diversity || cfg.mode != Mode::Test || train.num_entries() == 0 {
        return Ok(None);
    }
    let sgns = SgnsConfig { dim: cfg.item_dim, epochs: cfg.item_epochs, seed: cfg.seed, ..SgnsConfig::default() };
    Ok(Some(train_item_embeddings(train, &sgns)?))
}

fn evaluate_task(
    p: &Prepared,
    task: &Task,
    lists: &[RecommendationList],
    model: Option<&ItemEmbeddingModel>,
    cfg: &ExperimentConfig,
) -> Vec<EvalRecord> {
    let pop = task.train.item_pop();
    let num_users = p.num_rated_users();
    lists
        .iter()
        .map(|list| {
            let recs: Vec<u32> = list.item_ids().collect();
            if recs.is_empty() {
                return EvalRecord::uncovered(list.target);
            }
            let truth = p.data.ratings.row(list.target).0;
            let novelty = match cfg.epc {
                EpcVariant::Plain => epc_novelty(&recs, pop, num_users, cfg.n),
                EpcVariant::Discounted => epc_novelty_discounted(&recs, None, pop, num_users, cfg.n),
            };
            EvalRecord {
                user: list.target,
                covered: true,
                ndcg: Some(ndcg_at_n(&recs, truth, cfg.n)),
                novelty: Some(novelty),
                diversity: model.and_then(|m| ild_diversity(&recs, m, cfg.n)),
            }
        })
        .collect()
}

/// Outputs of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub row: ReportRow,
    pub records: Vec<EvalRecord>,
    pub recommendations: Vec<RecommendationList>,
    pub embedding: Option<EmbeddingMatrix>,
}

impl RunOutput {
    pub fn user_records(&self, users: &trustrec_core::IdMap) -> Vec<UserRecord> {
        self.records.iter().map(|r| UserRecord::new(r, &self.row.method, users)).collect()
    }
}

/// Computes the method's embedding (if any) on the undirected graph.
pub fn embed(p: &Prepared, method: &Method) -> Result<Option<EmbeddingMatrix>> {
    if !method.is_embedding() {
        return Ok(None);
    }
    let e = method.embed(&p.undirected, p.data.users())?;
    if e.num_nodes() != p.undirected.num_nodes() || !e.all_finite() {
        return Err(BenchError::data("embedding does not cover the user universe"));
    }
    Ok(Some(e))
}

/// Runs one configuration on loaded data.
pub fn run_prepared(p: &Prepared, cfg: &ExperimentConfig) -> Result<RunOutput> {
    let start = Instant::now();
    let method = Method::parse(&cfg.method, cfg.seed).stage(Stage::Config)?;
    let mut timings = p.timings.clone();
    let embedding = timed(&mut timings, Stage::Embed, || embed(p, &method))?;
    let src = match (&embedding, &method) {
        (Some(e), _) => Neighbors::Embedding(e),
        (None, Method::MostPopular) => Neighbors::Popularity,
        (None, m) => Neighbors::Trust(m),
    };
    let tasks = tasks(p, cfg.mode, cfg.folds);
    let mut records = Vec::new();
    let mut recommendations = Vec::new();
    for task in &tasks {
        let lists = timed(&mut timings, Stage::Recommend, || recommend_task(&src, p, task, cfg))?;
        let model = timed(&mut timings, Stage::Evaluate, || item_model(&task.train, cfg))?;
        records.extend(evaluate_task(p, task, &lists, model.as_ref(), cfg));
        recommendations.extend(lists);
    }
    let order = |a: &u32, b: &u32| a.cmp(b);
    records.sort_by(|a, b| order(&a.user, &b.user));
    recommendations.sort_by(|a, b| order(&a.target, &b.target));
    let agg = aggregate(&records).stage(Stage::Evaluate)?;
    let row = ReportRow::new(&cfg.method, &method, cfg, &agg, start.elapsed().as_secs_f64(), timings);
    Ok(RunOutput { row, records, recommendations, embedding })
}

/// Files written by [`persist`]; removed again unless committed.
struct Outputs {
    paths: Vec<PathBuf>,
    committed: bool,
}

impl Outputs {
    fn track(&mut self, path: PathBuf) -> PathBuf {
        self.paths.push(path.clone());
        path
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.paths {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

/// File stem for a run: `<method>[-<params>]-<mode>`.
pub fn run_stem(spec: &MethodSpec, cfg: &ExperimentConfig) -> String {
    let params: String = spec
        .params
        .iter()
        .map(|(k, v)| format!("-{k}{v}"))
        .collect::<String>()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' || c == '_' { c } else { '_' })
        .collect();
    format!("{}{params}-{}", spec.name, cfg.mode.name())
}

/// Writes per-user records, the report row, the recommendation dump and
/// (for embedding methods) the embedding with its sidecar into `dir`.
pub fn persist(out: &RunOutput, p: &Prepared, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let stem = run_stem(&cfg.method, cfg);
    let mut files = Outputs { paths: Vec::new(), committed: false };
    let users = p.data.users();
    let path = files.track(dir.join(format!("{stem}.users.csv")));
    io::write_user_records(io::create_writer(&path)?, &out.user_records(users))?;
    let path = files.track(dir.join(format!("{stem}.row.json")));
    let json = serde_json::to_vec_pretty(&out.row).map_err(|e| BenchError::data(e.to_string()))?;
    std::fs::write(&path, json).map_err(|e| BenchError::io(&path, e))?;
    let path = files.track(dir.join(format!("{stem}.recs.txt")));
    io::write_recommendations(io::create_writer(&path)?, &out.recommendations, users, p.data.ratings.item_ids())?;
    if let Some(e) = &out.embedding {
        let path = files.track(dir.join(format!("{stem}.emb")));
        io::write_embedding(io::create_writer(&path)?, e, users)?;
        let embed_time = out.row.stages.iter().find(|s| s.stage == "embed").map_or(0.0, |s| s.seconds);
        let path = files.track(dir.join(format!("{stem}.emb.json")));
        let json = serde_json::to_vec_pretty(&Sidecar::new(&e.meta, embed_time)).map_err(|e| BenchError::data(e.to_string()))?;
        std::fs::write(&path, json).map_err(|e| BenchError::io(&path, e))?;
    }
    files.committed = true;
    Ok(files.paths.clone())
}

/// Validates the configuration before touching any file, then loads, runs
/// and (with `out` set) persists.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate().stage(Stage::Config)?;
    let p = prepare(cfg)?;
    let out = run_prepared(&p, cfg)?;
    if let Some(dir) = &cfg.out {
        persist(&out, &p, cfg, dir).stage(Stage::Write)?;
    }
    Ok(out)
}
