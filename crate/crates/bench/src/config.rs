//! Flat `key = value` experiment configuration.
//!
//! Lines starting with `#` are comments. Later assignments win, so command
//! line overrides are applied by appending them after the file. Relative
//! dataset paths resolve against the data root (`TRUSTREC_DATA`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{BenchError, Result};
use crate::io::{Preset, RatingsFormat, Separator, TrustFormat};
use crate::methods::{Method, MethodSpec};

pub const DATA_ROOT_ENV: &str = "TRUSTREC_DATA";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Warm-start validation users, cross-validated over folds.
    Validate,
    /// Cold-start users against the warm-side training ratings.
    Test,
}

impl FromStr for Mode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "validate" => Ok(Mode::Validate),
            "test" => Ok(Mode::Test),
            _ => Err(BenchError::config(format!("mode `{s}` is not `validate` or `test`"))),
        }
    }
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Validate => "validate",
            Mode::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpcVariant {
    Plain,
    Discounted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: Option<Preset>,
    pub ratings: PathBuf,
    pub trust: PathBuf,
    pub ratings_format: RatingsFormat,
    pub trust_format: TrustFormat,
    pub method: MethodSpec,
    pub k: usize,
    pub n: usize,
    pub threshold: usize,
    pub seed: u64,
    pub mode: Mode,
    pub folds: usize,
    /// Train item embeddings and report diversity (test mode only).
    pub diversity: bool,
    pub item_dim: usize,
    pub item_epochs: usize,
    pub epc: EpcVariant,
    /// Exclude the target's training-side items from MP lists.
    pub mp_filter: bool,
    pub out: Option<PathBuf>,
    /// Grid axes, `grid.<key> = v1,v2,...`.
    pub grid: Vec<(String, Vec<String>)>,
    /// Methods for `reproduce`; empty means the default set.
    pub methods: Vec<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: None,
            ratings: PathBuf::new(),
            trust: PathBuf::new(),
            ratings_format: RatingsFormat::default(),
            trust_format: TrustFormat::default(),
            method: MethodSpec::new("mp"),
            k: trustrec_core::recsys::DEFAULT_K,
            n: trustrec_core::recsys::DEFAULT_N,
            threshold: trustrec_core::split::DEFAULT_THRESHOLD,
            seed: 1,
            mode: Mode::Test,
            folds: 5,
            diversity: true,
            item_dim: 64,
            item_epochs: 20,
            epc: EpcVariant::Plain,
            mp_filter: true,
            out: None,
            grid: Vec::new(),
            methods: Vec::new(),
        }
    }
}

/// Ordered assignments from files and overrides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigMap {
    entries: Vec<(String, String)>,
}

impl ConfigMap {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut map = ConfigMap::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| BenchError::config(format!("{source}:{}: expected `key = value`", i + 1)))?;
            map.set(k.trim(), v.trim());
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// Parses `key=value`.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| BenchError::config(format!("`{pair}` is not key=value")))?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    pub fn extend(&mut self, other: &ConfigMap) {
        self.entries.extend(other.entries.iter().cloned());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Last value per key, in key order.
    pub fn resolved(&self) -> BTreeMap<&str, &str> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect()
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| BenchError::config(format!("`{key}` = `{value}` cannot be parsed")))
}

fn parse_count(key: &str, value: &str) -> Result<usize> {
    match parse::<usize>(key, value)? {
        0 => Err(BenchError::config(format!("`{key}` must be at least 1"))),
        v => Ok(v),
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(BenchError::config(format!("`{key}` = `{value}` is not a boolean"))),
    }
}

fn resolve(path: &str, root: Option<&Path>) -> PathBuf {
    let p = PathBuf::from(path);
    match root {
        Some(root) if p.is_relative() => root.join(p),
        _ => p,
    }
}

/// Data root from the environment, if set and non-empty.
pub fn data_root_from_env() -> Option<PathBuf> {
    std::env::var_os(DATA_ROOT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

impl ExperimentConfig {
    /// Builds and validates a configuration. Every key must be known and the
    /// method specification must parse.
    pub fn from_map(map: &ConfigMap, data_root: Option<&Path>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let values = map.resolved();
        // the preset fixes defaults that explicit keys may then override
        if let Some(name) = values.get("dataset") {
            let preset: Preset = name.parse()?;
            cfg.dataset = Some(preset);
            cfg.ratings_format = preset.ratings_format();
            cfg.trust_format = preset.trust_format();
            let dir = resolve(preset.name(), data_root);
            cfg.ratings = dir.join(preset.ratings_file());
            cfg.trust = dir.join(preset.trust_file());
        }
        let mut method = None;
        for (&key, &value) in &values {
            match key {
                "dataset" => {}
                "ratings" => cfg.ratings = resolve(value, data_root),
                "trust" => cfg.trust = resolve(value, data_root),
                "ratings.separator" => cfg.ratings_format.separator = value.parse::<Separator>()?,
                "ratings.user" => cfg.ratings_format.user = parse(key, value)?,
                "ratings.item" => cfg.ratings_format.item = parse(key, value)?,
                "ratings.rating" => cfg.ratings_format.rating = parse(key, value)?,
                "ratings.header" => cfg.ratings_format.header = parse_bool(key, value)?,
                "trust.separator" => cfg.trust_format.separator = value.parse::<Separator>()?,
                "trust.trustor" => cfg.trust_format.trustor = parse(key, value)?,
                "trust.trustee" => cfg.trust_format.trustee = parse(key, value)?,
                "trust.header" => cfg.trust_format.header = parse_bool(key, value)?,
                "method" => method = Some(value.to_string()),
                "k" => cfg.k = parse_count(key, value)?,
                "n" => cfg.n = parse_count(key, value)?,
                "threshold" => cfg.threshold = parse(key, value)?,
                "seed" => cfg.seed = parse(key, value)?,
                "mode" => cfg.mode = value.parse()?,
                "folds" => cfg.folds = parse_count(key, value)?,
                "diversity" => cfg.diversity = parse_bool(key, value)?,
                "item.dim" => cfg.item_dim = parse_count(key, value)?,
                "item.epochs" => cfg.item_epochs = parse_count(key, value)?,
                "epc" => {
                    cfg.epc = match value {
                        "plain" => EpcVariant::Plain,
                        "discounted" => EpcVariant::Discounted,
                        _ => return Err(BenchError::config(format!("epc `{value}` is not `plain` or `discounted`"))),
                    }
                }
                "mp.filter" => cfg.mp_filter = parse_bool(key, value)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                "methods" => {
                    cfg.methods = value.split(',').map(|m| m.trim().to_string()).filter(|m| !m.is_empty()).collect()
                }
                _ => {
                    if let Some(param) = key.strip_prefix("param.") {
                        cfg.method.params.insert(param.to_string(), value.to_string());
                    } else if let Some(axis) = key.strip_prefix("grid.") {
                        let candidates: Vec<String> =
                            value.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
                        if candidates.is_empty() {
                            return Err(BenchError::config(format!("grid axis `{axis}` has no candidates")));
                        }
                        cfg.grid.push((axis.to_string(), candidates));
                    } else {
                        return Err(BenchError::config(format!("unknown configuration key `{key}`")));
                    }
                }
            }
        }
        if let Some(m) = method {
            cfg.method.name = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        Method::parse(&self.method, self.seed)?;
        Ok(())
    }

    pub fn require_paths(&self) -> Result<()> {
        if self.ratings.as_os_str().is_empty() || self.trust.as_os_str().is_empty() {
            return Err(BenchError::config("no dataset: set `dataset` or both `ratings` and `trust`"));
        }
        Ok(())
    }
}
