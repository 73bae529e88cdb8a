//! Text formats: ratings and trust inputs, embeddings, sidecars, dumps and
//! per-user metric files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use trustrec_core::eval::EvalRecord;
use trustrec_core::recsys::RecommendationList;
use trustrec_core::walk::WalkCorpus;
use trustrec_core::{EmbeddingMatrix, EmbeddingMeta, IdMap, RatingsMatrix, TrustGraph};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Separator {
    Whitespace,
    Char(char),
}

impl Separator {
    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self {
            Separator::Whitespace => line.split_whitespace().collect(),
            Separator::Char(c) => line.split(*c).map(str::trim).collect(),
        }
    }
}

impl FromStr for Separator {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whitespace" | "space" => Ok(Separator::Whitespace),
            "comma" => Ok(Separator::Char(',')),
            "tab" => Ok(Separator::Char('\t')),
            "semicolon" => Ok(Separator::Char(';')),
            _ => {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Separator::Char(c)),
                    _ => Err(BenchError::config(format!("unknown separator `{s}`"))),
                }
            }
        }
    }
}

/// Column layout of a ratings file. Columns not named here are skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatingsFormat {
    pub separator: Separator,
    pub user: usize,
    pub item: usize,
    pub rating: usize,
    pub header: bool,
}

impl Default for RatingsFormat {
    fn default() -> Self {
        RatingsFormat { separator: Separator::Whitespace, user: 0, item: 1, rating: 2, header: false }
    }
}

/// Column layout of a trust file; a trust-value column, if any, is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrustFormat {
    pub separator: Separator,
    pub trustor: usize,
    pub trustee: usize,
    pub header: bool,
}

impl Default for TrustFormat {
    fn default() -> Self {
        TrustFormat { separator: Separator::Whitespace, trustor: 0, trustee: 1, header: false }
    }
}

/// Layouts and file names of the commonly distributed dataset archives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `ratings.txt` / `trust.txt`, whitespace separated.
    FilmTrust,
    /// `ratings_data.txt` / `trust_data.txt`, whitespace separated.
    Epinions,
    /// CiaoDVD `movie-ratings.txt` (user, movie, genre, review, rating, date)
    /// and `trusts.txt`, comma separated.
    Ciao,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::FilmTrust => "filmtrust",
            Preset::Epinions => "epinions",
            Preset::Ciao => "ciao",
        }
    }

    pub fn ratings_format(&self) -> RatingsFormat {
        match self {
            Preset::FilmTrust | Preset::Epinions => RatingsFormat::default(),
            Preset::Ciao => RatingsFormat { separator: Separator::Char(','), user: 0, item: 1, rating: 4, header: false },
        }
    }

    pub fn trust_format(&self) -> TrustFormat {
        match self {
            Preset::FilmTrust | Preset::Epinions => TrustFormat::default(),
            Preset::Ciao => TrustFormat { separator: Separator::Char(','), ..TrustFormat::default() },
        }
    }

    pub fn ratings_file(&self) -> &'static str {
        match self {
            Preset::FilmTrust => "ratings.txt",
            Preset::Epinions => "ratings_data.txt",
            Preset::Ciao => "movie-ratings.txt",
        }
    }

    pub fn trust_file(&self) -> &'static str {
        match self {
            Preset::FilmTrust => "trust.txt",
            Preset::Epinions => "trust_data.txt",
            Preset::Ciao => "trusts.txt",
        }
    }
}

impl FromStr for Preset {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "filmtrust" => Ok(Preset::FilmTrust),
            "epinions" => Ok(Preset::Epinions),
            "ciao" | "ciaodvd" => Ok(Preset::Ciao),
            _ => Err(BenchError::config(format!("unknown dataset preset `{s}`"))),
        }
    }
}

/// Counts of a single load, serialized as the load report file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub records_read: usize,
    pub records_dropped: usize,
    pub reasons: BTreeMap<String, usize>,
}

impl LoadReport {
    fn drop(&mut self, reason: &str) {
        self.records_dropped += 1;
        *self.reasons.entry(reason.to_string()).or_default() += 1;
    }
}

/// Non-empty, non-comment records with 1-based line numbers.
fn records<'a, R: BufRead + 'a>(
    reader: R,
    header: bool,
    source: &'a str,
) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    let mut skip_header = header;
    reader.lines().enumerate().filter_map(move |(i, line)| match line {
        Err(e) => Some(Err(BenchError::Malformed { source_name: source.to_string(), line: i + 1, reason: e.to_string() })),
        Ok(line) => {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
                None
            } else if skip_header {
                skip_header = false;
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
    })
}

fn field<'a>(fields: &[&'a str], col: usize, what: &str, source: &str, line: usize) -> Result<&'a str> {
    match fields.get(col) {
        Some(f) if !f.is_empty() => Ok(f),
        _ => Err(BenchError::Malformed {
            source_name: source.to_string(),
            line,
            reason: format!("missing {what} in column {col}"),
        }),
    }
}

/// Reads ratings into `(user, item, rating)` triples, interning ids.
pub fn read_ratings<R: BufRead>(
    reader: R,
    fmt: &RatingsFormat,
    source: &str,
    users: &mut IdMap,
    items: &mut IdMap,
) -> Result<(Vec<(u32, u32, f64)>, LoadReport)> {
    let mut report = LoadReport::default();
    let mut triples = Vec::new();
    for rec in records(reader, fmt.header, source) {
        let (line, text) = rec?;
        report.records_read += 1;
        let fields = fmt.separator.split(&text);
        let u = field(&fields, fmt.user, "user id", source, line)?;
        let i = field(&fields, fmt.item, "item id", source, line)?;
        let raw = field(&fields, fmt.rating, "rating", source, line)?;
        let rating: f64 = raw.parse().map_err(|_| BenchError::Malformed {
            source_name: source.to_string(),
            line,
            reason: format!("rating `{raw}` is not a number"),
        })?;
        if !rating.is_finite() {
            report.drop("non_finite_rating");
            continue;
        }
        if rating <= 0.0 {
            report.drop("non_positive_rating");
            continue;
        }
        triples.push((users.intern(u), items.intern(i), rating));
    }
    let mut seen: Vec<(u32, u32)> = triples.iter().map(|t| (t.0, t.1)).collect();
    seen.sort_unstable();
    let before = seen.len();
    seen.dedup();
    for _ in seen.len()..before {
        report.drop("duplicate_rating");
    }
    Ok((triples, report))
}

/// Reads trust arcs, interning ids. Self-loops are dropped and counted.
pub fn read_trust<R: BufRead>(
    reader: R,
    fmt: &TrustFormat,
    source: &str,
    users: &mut IdMap,
) -> Result<(Vec<(u32, u32)>, LoadReport)> {
    let mut report = LoadReport::default();
    let mut arcs = Vec::new();
    for rec in records(reader, fmt.header, source) {
        let (line, text) = rec?;
        report.records_read += 1;
        let fields = fmt.separator.split(&text);
        let a = users.intern(field(&fields, fmt.trustor, "trustor id", source, line)?);
        let b = users.intern(field(&fields, fmt.trustee, "trustee id", source, line)?);
        if a == b {
            report.drop("self_loop");
            continue;
        }
        arcs.push((a, b));
    }
    Ok((arcs, report))
}

pub fn load_ratings<R: BufRead>(reader: R, fmt: &RatingsFormat, source: &str) -> Result<(RatingsMatrix, LoadReport)> {
    let (mut users, mut items) = (IdMap::new(), IdMap::new());
    let (triples, report) = read_ratings(reader, fmt, source, &mut users, &mut items)?;
    Ok((RatingsMatrix::from_triples(users, items, &triples)?, report))
}

/// Directed trust graph over the ids seen in the file.
pub fn load_trust<R: BufRead>(reader: R, fmt: &TrustFormat, source: &str) -> Result<(TrustGraph, LoadReport)> {
    let mut users = IdMap::new();
    let (arcs, mut report) = read_trust(reader, fmt, source, &mut users)?;
    let (g, stats) = TrustGraph::from_arcs(users, arcs, true);
    for _ in 0..stats.duplicates {
        report.drop("duplicate_arc");
    }
    Ok((g, report))
}

/// Ratings and directed trust over one shared user id universe: users seen
/// only in ratings become isolated graph nodes, users seen only in trust
/// have empty rating rows.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub ratings: RatingsMatrix,
    pub trust: TrustGraph,
    pub ratings_report: LoadReport,
    pub trust_report: LoadReport,
}

impl Dataset {
    pub fn users(&self) -> &IdMap {
        self.ratings.user_ids()
    }

    pub fn from_readers<R: BufRead, T: BufRead>(
        ratings: R,
        trust: T,
        rfmt: &RatingsFormat,
        tfmt: &TrustFormat,
        names: (&str, &str),
    ) -> Result<Dataset> {
        let (mut users, mut items) = (IdMap::new(), IdMap::new());
        let (triples, ratings_report) = read_ratings(ratings, rfmt, names.0, &mut users, &mut items)?;
        let (arcs, mut trust_report) = read_trust(trust, tfmt, names.1, &mut users)?;
        let (trust, stats) = TrustGraph::from_arcs(users.clone(), arcs, true);
        for _ in 0..stats.duplicates {
            trust_report.drop("duplicate_arc");
        }
        let (items, triples) = canonical_items(&items, triples);
        let ratings = RatingsMatrix::from_triples(users, items, &triples)?;
        Ok(Dataset { ratings, trust, ratings_report, trust_report })
    }

    pub fn open(ratings: &Path, trust: &Path, rfmt: &RatingsFormat, tfmt: &TrustFormat) -> Result<Dataset> {
        let r = open_reader(ratings)?;
        let t = open_reader(trust)?;
        Self::from_readers(r, t, rfmt, tfmt, (&ratings.display().to_string(), &trust.display().to_string()))
    }
}

/// Item indices ordered by external id (numeric ids numerically), so that
/// index-based tie-breaking does not depend on the order of lines in the file.
fn canonical_items(items: &IdMap, triples: Vec<(u32, u32, f64)>) -> (IdMap, Vec<(u32, u32, f64)>) {
    let mut order: Vec<u32> = (0..items.len() as u32).collect();
    let key = |i: &u32| {
        let name = items.name(*i).unwrap_or_default();
        (name.parse::<u64>().ok(), name)
    };
    order.sort_by(|a, b| key(a).cmp(&key(b)));
    let mut sorted = IdMap::new();
    let mut remap = vec![0u32; order.len()];
    for old in order {
        remap[old as usize] = sorted.intern(items.name(old).unwrap_or_default());
    }
    let triples = triples.into_iter().map(|(u, i, r)| (u, remap[i as usize], r)).collect();
    (sorted, triples)
}

pub fn open_reader(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| BenchError::io(path, e))
}

pub fn create_writer(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| BenchError::io(path, e))
}

fn write_err(e: std::io::Error) -> BenchError {
    BenchError::io("<output>", e)
}

/// `N d` header, then `node_id v1 .. vd` per row. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_embedding<W: Write>(mut w: W, e: &EmbeddingMatrix, ids: &IdMap) -> Result<()> {
    writeln!(w, "{} {}", e.num_nodes(), e.dim()).map_err(write_err)?;
    for u in 0..e.num_nodes() {
        let name = ids.name(u as u32).ok_or_else(|| BenchError::data(format!("no id for embedding row {u}")))?;
        write!(w, "{name}").map_err(write_err)?;
        for v in e.row(u) {
            write!(w, " {v}").map_err(write_err)?;
        }
        writeln!(w).map_err(write_err)?;
    }
    w.flush().map_err(write_err)
}

/// Reads an embedding file and aligns its rows to `ids`.
pub fn read_embedding<R: BufRead>(reader: R, ids: &IdMap, source: &str) -> Result<EmbeddingMatrix> {
    let bad = |line: usize, reason: String| BenchError::Malformed { source_name: source.to_string(), line, reason };
    let mut lines = reader.lines().enumerate();
    let (n, d) = loop {
        let Some((i, line)) = lines.next() else {
            return Err(bad(1, "missing `N d` header".into()));
        };
        let line = line.map_err(|e| bad(i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parsed = match parts.as_slice() {
            [a, b] => a.parse::<usize>().ok().zip(b.parse::<usize>().ok()),
            _ => None,
        };
        break parsed.ok_or_else(|| bad(i + 1, format!("expected header `N d`, found `{}`", line.trim())))?;
    };
    if d == 0 {
        return Err(BenchError::data(format!("{source}: embedding dimension must be at least 1")));
    }
    let mut values = vec![0.0; ids.len() * d];
    let mut filled = vec![false; ids.len()];
    let mut rows = 0usize;
    for (i, line) in lines {
        let line = line.map_err(|e| bad(i + 1, e.to_string()))?;
        let mut parts = line.split_whitespace();
        let Some(name) = parts.next() else { continue };
        let u = ids.get(name).ok_or_else(|| bad(i + 1, format!("unknown node id `{name}`")))? as usize;
        if filled[u] {
            return Err(bad(i + 1, format!("duplicate row for node `{name}`")));
        }
        let row: Vec<&str> = parts.collect();
        if row.len() != d {
            return Err(bad(i + 1, format!("dimension mismatch: expected {d} values, found {}", row.len())));
        }
        for (j, raw) in row.iter().enumerate() {
            let v: f64 = raw.parse().map_err(|_| bad(i + 1, format!("`{raw}` is not a number")))?;
            if !v.is_finite() {
                return Err(bad(i + 1, format!("non-finite value `{raw}`")));
            }
            values[u * d + j] = v;
        }
        filled[u] = true;
        rows += 1;
    }
    if rows != n {
        return Err(BenchError::data(format!("{source}: header announces {n} rows, found {rows}")));
    }
    let missing: Vec<&str> = (0..ids.len()).filter(|&u| !filled[u]).filter_map(|u| ids.name(u as u32)).collect();
    if !missing.is_empty() {
        let shown: Vec<&str> = missing.iter().take(20).copied().collect();
        return Err(BenchError::data(format!(
            "{source}: {} node(s) missing from the embedding: {}{}",
            missing.len(),
            shown.join(", "),
            if missing.len() > shown.len() { ", ..." } else { "" }
        )));
    }
    Ok(EmbeddingMatrix::new(ids.len(), d, values, EmbeddingMeta::new("imported"))?)
}

/// Method metadata written next to an exported embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub method: String,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub wall_time: f64,
}

impl Sidecar {
    pub fn new(meta: &EmbeddingMeta, wall_time: f64) -> Self {
        Sidecar {
            method: meta.method.clone(),
            params: meta.params.iter().cloned().collect(),
            seed: meta.seed,
            wall_time,
        }
    }
}

/// One walk per line, space-separated external node ids.
pub fn write_corpus<W: Write>(mut w: W, corpus: &WalkCorpus, ids: &IdMap) -> Result<()> {
    for walk in corpus.walks() {
        let names: Vec<&str> = walk.iter().map(|&u| ids.name(u).unwrap_or("?")).collect();
        writeln!(w, "{}", names.join(" ")).map_err(write_err)?;
    }
    w.flush().map_err(write_err)
}

/// `user_id item_id rank score`, ranks starting at 1.
pub fn write_recommendations<W: Write>(
    mut w: W,
    lists: &[RecommendationList],
    users: &IdMap,
    items: &IdMap,
) -> Result<()> {
    for list in lists {
        let user = users.name(list.target).unwrap_or("?");
        for (rank, &(item, score)) in list.items.iter().enumerate() {
            writeln!(w, "{user} {} {} {score}", items.name(item).unwrap_or("?"), rank + 1).map_err(write_err)?;
        }
    }
    w.flush().map_err(write_err)
}

/// One row of the per-user metric file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user: String,
    pub method: String,
    pub ndcg: Option<f64>,
    pub novelty: Option<f64>,
    pub diversity: Option<f64>,
    pub covered: bool,
}

impl UserRecord {
    pub fn new(r: &EvalRecord, method: &str, users: &IdMap) -> Self {
        UserRecord {
            user: users.name(r.user).unwrap_or("?").to_string(),
            method: method.to_string(),
            ndcg: r.ndcg,
            novelty: r.novelty,
            diversity: r.diversity,
            covered: r.covered,
        }
    }
}

pub fn write_user_records<W: Write>(w: W, records: &[UserRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r).map_err(|e| BenchError::data(e.to_string()))?;
    }
    out.flush().map_err(write_err)
}

pub fn read_user_records<R: std::io::Read>(r: R, source: &str) -> Result<Vec<UserRecord>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .enumerate()
        .map(|(i, rec)| {
            rec.map_err(|e| BenchError::Malformed { source_name: source.to_string(), line: i + 2, reason: e.to_string() })
        })
        .collect()
}
