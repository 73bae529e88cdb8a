//! Registered methods, their families and hyperparameter domains.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use trustrec_core::factor::{
    graph_factorization, grarep, hope, laplacian_eigenmaps, locally_linear_embedding, GfConfig, GraRepConfig,
    HopeConfig, ProximityKind, SpectralConfig,
};
use trustrec_core::recsys::{Direction, KatzConfig};
use trustrec_core::walk::{
    deepwalk, generate_walks, line, node2vec, role2vec, LineConfig, LineOrder, RoleConfig, RoleFeatures, SgnsConfig,
    WalkBias, WalkConfig, WalkCorpus,
};
use trustrec_core::{EmbeddingMatrix, IdMap, TrustGraph};

use crate::error::{BenchError, Result};

/// Report grouping, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Baseline,
    Factorization,
    #[serde(rename = "RW")]
    RandomWalk,
    #[serde(rename = "LINE")]
    Line,
    #[serde(rename = "imported")]
    Imported,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Baseline => "Baseline",
            Family::Factorization => "Factorization",
            Family::RandomWalk => "RW",
            Family::Line => "LINE",
            Family::Imported => "imported",
        }
    }
}

pub const METHOD_NAMES: &[&str] = &[
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
    "imported",
];

/// Method name plus its raw hyperparameter assignment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MethodSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl MethodSpec {
    pub fn new(name: &str) -> Self {
        MethodSpec { name: name.to_string(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// `key=value` pairs joined by `;`, in key order.
    pub fn describe(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

#[derive(Debug, Clone)]
pub enum Method {
    MostPopular,
    TrustDirect(Direction),
    TrustUndirected,
    Jaccard,
    Katz(KatzConfig),
    Gf(GfConfig),
    Le(SpectralConfig),
    Lle(SpectralConfig),
    Hope(HopeConfig),
    GraRep(GraRepConfig),
    DeepWalk(WalkConfig, SgnsConfig),
    Node2vec(WalkConfig, SgnsConfig),
    Role2vec(WalkConfig, RoleConfig, SgnsConfig),
    Line(LineConfig),
    Imported(PathBuf),
}

/// Typed access to a parameter map that rejects keys nobody asked for.
struct Params<'a> {
    method: &'a str,
    map: &'a BTreeMap<String, String>,
    used: BTreeSet<&'a str>,
}

impl<'a> Params<'a> {
    fn new(spec: &'a MethodSpec) -> Self {
        Params { method: &spec.name, map: &spec.params, used: BTreeSet::new() }
    }

    fn get<T: FromStr>(&mut self, key: &'a str, default: T, ok: impl Fn(&T) -> bool, domain: &str) -> Result<T> {
        self.used.insert(key);
        let Some(raw) = self.map.get(key) else { return Ok(default) };
        match raw.parse::<T>() {
            Ok(v) if ok(&v) => Ok(v),
            _ => Err(BenchError::config(format!("{}: `{key}` = `{raw}` is outside its domain ({domain})", self.method))),
        }
    }

    fn count(&mut self, key: &'a str, default: usize) -> Result<usize> {
        self.get(key, default, |&v| v >= 1, "integer >= 1")
    }

    fn positive(&mut self, key: &'a str, default: f64) -> Result<f64> {
        self.get(key, default, |&v: &f64| v > 0.0 && v.is_finite(), "real > 0")
    }

    fn raw(&mut self, key: &'a str) -> Option<&'a str> {
        self.used.insert(key);
        self.map.get(key).map(String::as_str)
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().find(|k| !self.used.contains(k.as_str())) {
            Some(k) => Err(BenchError::config(format!("{}: unknown hyperparameter `{k}`", self.method))),
            None => Ok(()),
        }
    }
}

fn sgns(p: &mut Params<'_>, seed: u64) -> Result<SgnsConfig> {
    let d = SgnsConfig::default();
    Ok(SgnsConfig {
        dim: p.count("dim", d.dim)?,
        window: p.count("window", d.window)?,
        negatives: p.count("negatives", d.negatives)?,
        epochs: p.count("epochs", d.epochs)?,
        learning_rate: p.positive("lr", d.learning_rate)?,
        seed,
        deterministic: !p.get("parallel", false, |_| true, "true or false")?,
    })
}

fn walks(p: &mut Params<'_>, seed: u64) -> Result<WalkConfig> {
    let d = WalkConfig::default();
    Ok(WalkConfig {
        num_walks: p.count("walks", d.num_walks)?,
        walk_length: p.count("length", d.walk_length)?,
        bias: WalkBias::Uniform,
        seed,
    })
}

impl Method {
    /// Parses and range-checks a method specification.
    pub fn parse(spec: &MethodSpec, seed: u64) -> Result<Method> {
        let mut p = Params::new(spec);
        let method = match spec.name.as_str() {
            "mp" => Method::MostPopular,
            "trust_dir" => Method::TrustDirect(match p.raw("direction").unwrap_or("out") {
                "out" => Direction::Out,
                "in" => Direction::In,
                other => return Err(BenchError::config(format!("trust_dir: direction `{other}` is not `out` or `in`"))),
            }),
            "trust_undir" => Method::TrustUndirected,
            "jaccard" => Method::Jaccard,
            "katz" => {
                let d = KatzConfig::default();
                Method::Katz(KatzConfig { alpha: p.positive("alpha", d.alpha)?, horizon: p.count("horizon", d.horizon)? })
            }
            "gf" => {
                let d = GfConfig::default();
                Method::Gf(GfConfig {
                    dim: p.count("dim", d.dim)?,
                    learning_rate: p.positive("lr", d.learning_rate)?,
                    reg: p.get("reg", d.reg, |&v: &f64| v >= 0.0 && v.is_finite(), "real >= 0")?,
                    epochs: p.count("epochs", d.epochs)?,
                    seed,
                })
            }
            "le" | "lle" => {
                let mut cfg = SpectralConfig::default();
                cfg.dim = p.count("dim", cfg.dim)?;
                cfg.lanczos.seed = seed;
                if spec.name == "le" {
                    Method::Le(cfg)
                } else {
                    Method::Lle(cfg)
                }
            }
            "hope" => {
                let mut cfg = HopeConfig::default();
                cfg.dim = p.get("dim", cfg.dim, |&v: &usize| v >= 2 && v % 2 == 0, "even integer >= 2")?;
                cfg.proximity = match p.raw("proximity").unwrap_or("katz") {
                    "katz" => ProximityKind::Katz { beta: p.positive("beta", 0.01)? },
                    "rpr" => ProximityKind::RootedPageRank {
                        alpha: p.get("alpha", 0.5, |&v: &f64| v > 0.0 && v < 1.0, "real in (0, 1)")?,
                    },
                    "cn" => ProximityKind::CommonNeighbors,
                    "aa" => ProximityKind::AdamicAdar,
                    other => {
                        return Err(BenchError::config(format!("hope: proximity `{other}` is not katz, rpr, cn or aa")))
                    }
                };
                cfg.svd.lanczos.seed = seed;
                Method::Hope(cfg)
            }
            "grarep" => {
                let order = p.count("order", GraRepConfig::default().max_order)?;
                let mut cfg = GraRepConfig::with_order(order);
                cfg.dim = p.get("dim", cfg.dim, |&v: &usize| v >= order && v % order == 0, "multiple of order")?;
                cfg.svd.lanczos.seed = seed;
                Method::GraRep(cfg)
            }
            "deepwalk" => {
                let w = walks(&mut p, seed)?;
                Method::DeepWalk(w, sgns(&mut p, seed)?)
            }
            "node2vec" => {
                let mut w = walks(&mut p, seed)?;
                w.bias = WalkBias::SecondOrder { p: p.positive("p", 1.0)?, q: p.positive("q", 1.0)? };
                Method::Node2vec(w, sgns(&mut p, seed)?)
            }
            "role2vec" => {
                let w = walks(&mut p, seed)?;
                let d = RoleConfig::default();
                let features = match p.raw("features").unwrap_or("wl") {
                    "wl" => RoleFeatures::WlDegree { iterations: p.count("iterations", 2)? },
                    "motif" => RoleFeatures::Motif3,
                    other => return Err(BenchError::config(format!("role2vec: features `{other}` is not wl or motif"))),
                };
                let roles = RoleConfig {
                    features,
                    num_clusters: p.get("clusters", d.num_clusters, |&v: &usize| v >= 2, "integer >= 2")?,
                    log_binning: p.get("binning", d.log_binning, |_| true, "true or false")?,
                };
                Method::Role2vec(w, roles, sgns(&mut p, seed)?)
            }
            "line" => {
                let d = LineConfig::default();
                Method::Line(LineConfig {
                    dim: p.count("dim", d.dim)?,
                    order: match p.get("order", 2usize, |&v| v == 1 || v == 2, "1 or 2")? {
                        1 => LineOrder::First,
                        _ => LineOrder::Second,
                    },
                    samples: match p.raw("samples") {
                        Some(_) => Some(p.count("samples", 1)?),
                        None => None,
                    },
                    negatives: p.count("negatives", d.negatives)?,
                    learning_rate: p.positive("lr", d.learning_rate)?,
                    seed,
                })
            }
            "imported" => match p.raw("path") {
                Some(path) => Method::Imported(PathBuf::from(path)),
                None => return Err(BenchError::config("imported: hyperparameter `path` is required")),
            },
            other => {
                return Err(BenchError::config(format!(
                    "unknown method `{other}` (registered: {})",
                    METHOD_NAMES.join(", ")
                )))
            }
        };
        p.finish()?;
        Ok(method)
    }

    pub fn family(&self) -> Family {
        match self {
            Method::MostPopular | Method::TrustDirect(_) | Method::TrustUndirected | Method::Jaccard | Method::Katz(_) => {
                Family::Baseline
            }
            Method::Gf(_) | Method::Le(_) | Method::Lle(_) | Method::Hope(_) | Method::GraRep(_) => Family::Factorization,
            Method::DeepWalk(..) | Method::Node2vec(..) | Method::Role2vec(..) => Family::RandomWalk,
            Method::Line(_) => Family::Line,
            Method::Imported(_) => Family::Imported,
        }
    }

    pub fn is_embedding(&self) -> bool {
        self.family() != Family::Baseline
    }

    /// Embeds the undirected trust graph. `ids` aligns imported files.
    pub fn embed(&self, g: &TrustGraph, ids: &IdMap) -> Result<EmbeddingMatrix> {
        Ok(match self {
            Method::Gf(cfg) => graph_factorization(g, cfg)?.0,
            Method::Le(cfg) => laplacian_eigenmaps(g, cfg)?,
            Method::Lle(cfg) => locally_linear_embedding(g, cfg)?,
            Method::Hope(cfg) => hope(g, cfg)?,
            Method::GraRep(cfg) => grarep(g, cfg)?,
            Method::DeepWalk(w, s) => deepwalk(g, w, s)?,
            Method::Node2vec(w, s) => node2vec(g, w, s)?,
            Method::Role2vec(w, r, s) => role2vec(g, w, r, s)?,
            Method::Line(cfg) => line(g, cfg)?,
            Method::Imported(path) => {
                crate::io::read_embedding(crate::io::open_reader(path)?, ids, &path.display().to_string())?
            }
            _ => return Err(BenchError::config("baseline methods do not produce embeddings")),
        })
    }

    /// Walk corpus the method trains on, for the corpus dump.
    pub fn corpus(&self, g: &TrustGraph) -> Option<Result<WalkCorpus>> {
        let walk = match self {
            Method::DeepWalk(w, _) | Method::Node2vec(w, _) | Method::Role2vec(w, _, _) => *w,
            _ => return None,
        };
        Some(generate_walks(g, &walk).map_err(Into::into))
    }
}
