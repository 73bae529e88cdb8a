//! Skip-gram with negative sampling over walk corpora.
//!
//! The same engine trains item vectors for diversity (paragraph-vector
//! style, see `eval`). Updates follow word2vec: input vectors start uniform
//! in `±0.5/d`, output vectors at zero, and the learning rate decays
//! linearly to `1e-4` of its initial value.

use alloc::vec::Vec;

use rand::Rng as _;

use super::alias::AliasTable;
use super::walks::WalkCorpus;
use crate::embedding::{EmbeddingMatrix, EmbeddingMeta};
use crate::error::{Error, Result};
use crate::factor::DEFAULT_DIM;
use crate::math;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgnsConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Single worker, bit-reproducible. Otherwise workers update shared
    /// parameters without locks (requires the `std` feature).
    pub deterministic: bool,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig { dim: DEFAULT_DIM, window: 5, negatives: 5, epochs: 5, learning_rate: 0.025, seed: 1, deterministic: true }
    }
}

impl SgnsConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::param("dim", "must be at least 1"));
        }
        if self.window == 0 {
            return Err(Error::param("window", "must be at least 1"));
        }
        if self.negatives == 0 {
            return Err(Error::param("negatives", "must be at least 1"));
        }
        if self.epochs == 0 {
            return Err(Error::param("epochs", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::param("learning_rate", "must be positive"));
        }
        Ok(())
    }

    pub(crate) fn describe(&self, meta: EmbeddingMeta) -> EmbeddingMeta {
        meta.param("dim", self.dim)
            .param("window", self.window)
            .param("negatives", self.negatives)
            .param("epochs", self.epochs)
            .param("learning_rate", self.learning_rate)
            .param("deterministic", self.deterministic)
            .seed(self.seed)
    }
}

/// `log s(y.z) + sum_n log s(-y.z_n)` for one (center, context) pair.
pub fn pair_objective(y: &[f64], z: &[f64], negatives: &[&[f64]]) -> f64 {
    math::log_sigmoid(math::dot(y, z)) + negatives.iter().map(|n| math::log_sigmoid(-math::dot(y, n))).sum::<f64>()
}

/// Gradient of [`pair_objective`] with respect to `y`, `z` and each negative.
pub fn pair_gradient(y: &[f64], z: &[f64], negatives: &[&[f64]]) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let gp = 1.0 - math::sigmoid(math::dot(y, z));
    let mut gy: Vec<f64> = z.iter().map(|x| gp * x).collect();
    let gz = y.iter().map(|x| gp * x).collect();
    let mut gn = Vec::with_capacity(negatives.len());
    for n in negatives {
        let s = math::sigmoid(math::dot(y, n));
        math::axpy(-s, n, &mut gy);
        gn.push(y.iter().map(|x| -s * x).collect());
    }
    (gy, gz, gn)
}

/// Trained input and output tables, one row per vocabulary entry.
#[derive(Debug, Clone)]
pub struct SgnsModel {
    pub dim: usize,
    pub vocab_size: usize,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    /// Mean loss after each epoch on a fixed sample of pairs with fixed
    /// negatives.
    pub epoch_loss: Vec<f64>,
    /// Running mean of the pre-update pair loss during each epoch.
    pub train_loss: Vec<f64>,
}

impl SgnsModel {
    pub fn input_row(&self, t: usize) -> &[f64] {
        &self.input[t * self.dim..(t + 1) * self.dim]
    }

    pub fn output_row(&self, t: usize) -> &[f64] {
        &self.output[t * self.dim..(t + 1) * self.dim]
    }
}

/// A training set split into independent units (walks, documents).
pub(crate) trait PairSource: Sync {
    fn num_units(&self) -> usize;
    /// Appends the (input, output) pairs of one unit.
    fn pairs(&self, unit: usize, out: &mut Vec<(u32, u32)>);
}

struct SkipGram<'a> {
    corpus: &'a WalkCorpus,
    relabel: Option<&'a [u32]>,
    window: usize,
}

impl SkipGram<'_> {
    #[inline]
    fn token(&self, t: u32) -> u32 {
        self.relabel.map_or(t, |r| r[t as usize])
    }
}

impl PairSource for SkipGram<'_> {
    fn num_units(&self) -> usize {
        self.corpus.len()
    }

    fn pairs(&self, unit: usize, out: &mut Vec<(u32, u32)>) {
        let w = self.corpus.walk(unit);
        for i in 0..w.len() {
            let lo = i.saturating_sub(self.window);
            let hi = (i + self.window).min(w.len() - 1);
            for j in lo..=hi {
                if j != i {
                    out.push((self.token(w[i]), self.token(w[j])));
                }
            }
        }
    }
}

/// Fits SGNS on a walk corpus. With `relabel`, token `t` is replaced by
/// `relabel[t]` on both sides of every pair.
pub fn fit_sgns(corpus: &WalkCorpus, relabel: Option<&[u32]>, cfg: &SgnsConfig) -> Result<SgnsModel> {
    cfg.validate()?;
    let vocab = match relabel {
        Some(r) => {
            if r.len() != corpus.num_nodes() {
                return Err(Error::LengthMismatch { left: r.len(), right: corpus.num_nodes() });
            }
            r.iter().map(|&x| x as usize + 1).max().unwrap_or(0)
        }
        None => corpus.num_nodes(),
    };
    let mut counts = alloc::vec![0.0; vocab];
    for (t, &c) in corpus.counts().iter().enumerate() {
        counts[relabel.map_or(t, |r| r[t] as usize)] += c as f64;
    }
    let source = SkipGram { corpus, relabel, window: cfg.window };
    train(&source, vocab, vocab, &counts, cfg)
}

/// Node embedding from a walk corpus: row `u` is the input vector of `u`'s
/// token, or zero if `u` never occurs in the corpus.
pub fn train_sgns(corpus: &WalkCorpus, relabel: Option<&[u32]>, cfg: &SgnsConfig) -> Result<EmbeddingMatrix> {
    let model = fit_sgns(corpus, relabel, cfg)?;
    let (n, d) = (corpus.num_nodes(), cfg.dim);
    let mut values = alloc::vec![0.0; n * d];
    for u in 0..n {
        if corpus.counts()[u] > 0 {
            let t = relabel.map_or(u, |r| r[u] as usize);
            values[u * d..(u + 1) * d].copy_from_slice(model.input_row(t));
        }
    }
    EmbeddingMatrix::new(n, d, values, cfg.describe(EmbeddingMeta::new("sgns")))
}

/// Negatives are drawn from `counts^0.75` over the output vocabulary.
pub(crate) fn train(source: &dyn PairSource, n_in: usize, n_out: usize, counts: &[f64], cfg: &SgnsConfig) -> Result<SgnsModel> {
    cfg.validate()?;
    if counts.iter().all(|&c| c <= 0.0) || n_in == 0 {
        return Err(Error::EmptyVocabulary);
    }
    let noise = AliasTable::new(&counts.iter().map(|&c| math::powf(c, 0.75)).collect::<Vec<_>>())?;
    let mut scratch = Vec::new();
    let mut total_pairs = 0usize;
    for u in 0..source.num_units() {
        scratch.clear();
        source.pairs(u, &mut scratch);
        total_pairs += scratch.len();
    }
    if total_pairs == 0 {
        return Err(Error::InsufficientData("corpus has no context pairs".into()));
    }

    let probe = Probe::new(source, total_pairs, &noise, cfg);
    let d = cfg.dim;
    let mut r = rng::seeded(cfg.seed);
    let input: Vec<f64> = (0..n_in * d).map(|_| (r.random::<f64>() - 0.5) / d as f64).collect();
    let output = alloc::vec![0.0; n_out * d];
    let schedule = Schedule { lr0: cfg.learning_rate, total: (cfg.epochs * total_pairs) as f64 };

    #[cfg(feature = "std")]
    if !cfg.deterministic {
        return hogwild::train(source, input, output, &noise, &probe, schedule, cfg);
    }

    let mut store = Plain { dim: d, input, output };
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    let mut train_loss = Vec::with_capacity(cfg.epochs);
    let mut work = Work::new(d);
    let mut processed = 0usize;
    for epoch in 0..cfg.epochs {
        let mut sum = 0.0;
        for u in 0..source.num_units() {
            scratch.clear();
            source.pairs(u, &mut scratch);
            for &(c, x) in &scratch {
                let lr = schedule.rate(processed);
                let loss = step(&mut store, c, x, cfg.negatives, &noise, &mut r, lr, &mut work);
                if !loss.is_finite() {
                    return Err(Error::NonFiniteLoss { epoch, step: processed });
                }
                sum += loss;
                processed += 1;
            }
        }
        train_loss.push(sum / total_pairs as f64);
        epoch_loss.push(probe.loss(&store, &mut work));
    }
    Ok(SgnsModel { dim: d, vocab_size: n_in, input: store.input, output: store.output, epoch_loss, train_loss })
}

const PROBE_PAIRS: usize = 50_000;

/// Evenly spaced training pairs with negatives drawn once, so the loss is
/// comparable across epochs.
struct Probe {
    pairs: Vec<(u32, u32)>,
    negatives: Vec<u32>,
    per_pair: usize,
}

impl Probe {
    fn new(source: &dyn PairSource, total: usize, noise: &AliasTable, cfg: &SgnsConfig) -> Self {
        let stride = total.div_ceil(PROBE_PAIRS);
        let mut r = rng::stream(cfg.seed, u64::MAX);
        let (mut pairs, mut negatives) = (Vec::new(), Vec::new());
        let (mut scratch, mut index) = (Vec::new(), 0usize);
        for u in 0..source.num_units() {
            scratch.clear();
            source.pairs(u, &mut scratch);
            for &(c, x) in &scratch {
                if index % stride == 0 {
                    pairs.push((c, x));
                    negatives.extend((0..cfg.negatives).map(|_| noise.sample(&mut r)));
                }
                index += 1;
            }
        }
        Probe { pairs, negatives, per_pair: cfg.negatives }
    }

    fn loss<S: Store>(&self, store: &S, w: &mut Work) -> f64 {
        let mut total = 0.0;
        for (i, &(c, x)) in self.pairs.iter().enumerate() {
            store.load_in(c as usize, &mut w.y);
            store.load_out(x as usize, &mut w.z);
            total -= math::log_sigmoid(math::dot(&w.y, &w.z));
            for &n in &self.negatives[i * self.per_pair..(i + 1) * self.per_pair] {
                if n != x {
                    store.load_out(n as usize, &mut w.z);
                    total -= math::log_sigmoid(-math::dot(&w.y, &w.z));
                }
            }
        }
        total / self.pairs.len() as f64
    }
}

#[derive(Clone, Copy)]
struct Schedule {
    lr0: f64,
    total: f64,
}

impl Schedule {
    #[inline]
    fn rate(&self, processed: usize) -> f64 {
        self.lr0 * (1.0 - processed as f64 / self.total).max(1e-4)
    }
}

/// Row access to the two parameter tables.
trait Store {
    fn load_in(&self, r: usize, out: &mut [f64]);
    fn load_out(&self, r: usize, out: &mut [f64]);
    fn add_in(&mut self, r: usize, alpha: f64, x: &[f64]);
    fn add_out(&mut self, r: usize, alpha: f64, x: &[f64]);
}

struct Plain {
    dim: usize,
    input: Vec<f64>,
    output: Vec<f64>,
}

impl Store for Plain {
    fn load_in(&self, r: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.input[r * self.dim..(r + 1) * self.dim]);
    }

    fn load_out(&self, r: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.output[r * self.dim..(r + 1) * self.dim]);
    }

    fn add_in(&mut self, r: usize, alpha: f64, x: &[f64]) {
        math::axpy(alpha, x, &mut self.input[r * self.dim..(r + 1) * self.dim]);
    }

    fn add_out(&mut self, r: usize, alpha: f64, x: &[f64]) {
        math::axpy(alpha, x, &mut self.output[r * self.dim..(r + 1) * self.dim]);
    }
}

struct Work {
    y: Vec<f64>,
    z: Vec<f64>,
    neu: Vec<f64>,
}

impl Work {
    fn new(d: usize) -> Self {
        Work { y: alloc::vec![0.0; d], z: alloc::vec![0.0; d], neu: alloc::vec![0.0; d] }
    }
}

/// One ascent step on the pair objective; returns the pair's loss.
#[allow(clippy::too_many_arguments)]
fn step<S: Store>(store: &mut S, center: u32, context: u32, negatives: usize, noise: &AliasTable, r: &mut Rng, lr: f64, w: &mut Work) -> f64 {
    store.load_in(center as usize, &mut w.y);
    w.neu.iter_mut().for_each(|x| *x = 0.0);
    let mut loss = 0.0;
    for t in 0..=negatives {
        let (target, label) = if t == 0 {
            (context, 1.0)
        } else {
            let n = noise.sample(r);
            if n == context {
                continue;
            }
            (n, 0.0)
        };
        store.load_out(target as usize, &mut w.z);
        let f = math::dot(&w.y, &w.z);
        loss -= if label > 0.0 { math::log_sigmoid(f) } else { math::log_sigmoid(-f) };
        let g = (label - math::sigmoid(f)) * lr;
        math::axpy(g, &w.z, &mut w.neu);
        store.add_out(target as usize, g, &w.y);
    }
    store.add_in(center as usize, 1.0, &w.neu);
    loss
}

#[cfg(feature = "std")]
mod hogwild {
    //! Lock-free parallel training. Parameters live in relaxed atomics so
    //! concurrent updates race without undefined behaviour.

    use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering::Relaxed};

    use rayon::prelude::*;

    use super::*;

    struct Shared {
        dim: usize,
        input: Vec<AtomicU64>,
        output: Vec<AtomicU64>,
    }

    struct View<'a>(&'a Shared);

    fn load(t: &[AtomicU64], out: &mut [f64]) {
        for (o, a) in out.iter_mut().zip(t) {
            *o = f64::from_bits(a.load(Relaxed));
        }
    }

    fn add(t: &[AtomicU64], alpha: f64, x: &[f64]) {
        for (a, xi) in t.iter().zip(x) {
            a.store((f64::from_bits(a.load(Relaxed)) + alpha * xi).to_bits(), Relaxed);
        }
    }

    impl Store for View<'_> {
        fn load_in(&self, r: usize, out: &mut [f64]) {
            load(&self.0.input[r * self.0.dim..(r + 1) * self.0.dim], out);
        }

        fn load_out(&self, r: usize, out: &mut [f64]) {
            load(&self.0.output[r * self.0.dim..(r + 1) * self.0.dim], out);
        }

        fn add_in(&mut self, r: usize, alpha: f64, x: &[f64]) {
            add(&self.0.input[r * self.0.dim..(r + 1) * self.0.dim], alpha, x);
        }

        fn add_out(&mut self, r: usize, alpha: f64, x: &[f64]) {
            add(&self.0.output[r * self.0.dim..(r + 1) * self.0.dim], alpha, x);
        }
    }

    pub(super) fn train(
        source: &dyn PairSource,
        input: Vec<f64>,
        output: Vec<f64>,
        noise: &AliasTable,
        probe: &Probe,
        schedule: Schedule,
        cfg: &SgnsConfig,
    ) -> Result<SgnsModel> {
        let d = cfg.dim;
        let shared = Shared {
            dim: d,
            input: input.into_iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
            output: output.into_iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
        };
        let units = source.num_units();
        let chunks = (rayon::current_num_threads() * 4).min(units).max(1);
        let per = units.div_ceil(chunks);
        let processed = AtomicUsize::new(0);
        let mut epoch_loss = Vec::with_capacity(cfg.epochs);
        let mut train_loss = Vec::with_capacity(cfg.epochs);
        for epoch in 0..cfg.epochs {
            let results: Vec<Result<(f64, usize)>> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut r = rng::stream(cfg.seed, (epoch * chunks + c) as u64 + 1);
                    let mut view = View(&shared);
                    let mut work = Work::new(d);
                    let mut pairs = Vec::new();
                    let (mut sum, mut count) = (0.0, 0usize);
                    for u in c * per..((c + 1) * per).min(units) {
                        pairs.clear();
                        source.pairs(u, &mut pairs);
                        let base = processed.fetch_add(pairs.len(), Relaxed);
                        for (i, &(x, y)) in pairs.iter().enumerate() {
                            let loss = step(&mut view, x, y, cfg.negatives, noise, &mut r, schedule.rate(base + i), &mut work);
                            if !loss.is_finite() {
                                return Err(Error::NonFiniteLoss { epoch, step: base + i });
                            }
                            sum += loss;
                        }
                        count += pairs.len();
                    }
                    Ok((sum, count))
                })
                .collect();
            let (mut sum, mut count) = (0.0, 0);
            for res in results {
                let (s, c) = res?;
                sum += s;
                count += c;
            }
            train_loss.push(sum / count.max(1) as f64);
            epoch_loss.push(probe.loss(&View(&shared), &mut Work::new(d)));
        }
        let unpack = |t: Vec<AtomicU64>| t.into_iter().map(|a| f64::from_bits(a.into_inner())).collect();
        Ok(SgnsModel {
            dim: d,
            vocab_size: shared.input.len() / d,
            input: unpack(shared.input),
            output: unpack(shared.output),
            epoch_loss,
            train_loss,
        })
    }
}
