use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::adam::{clip_grad_norm, Adam, AdamConfig};
use crate::error::{Diagnostic, TrainError};
use crate::metalang::TrainingPair;
use crate::model::checkpoint::{write_checkpoint, Checkpoint};
use crate::model::{Params, Transformer};
use crate::{CheckpointError, Scalar};

/// One training sequence: token ids and the positions that count toward the loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub ids: Vec<usize>,
    pub mask: Vec<bool>,
}

impl Example {
    pub fn from_pair(p: &TrainingPair) -> Self {
        let (ids, mask) = p.stream();
        Example { ids, mask }
    }

    /// Every position after the first is a target.
    pub fn full(ids: Vec<usize>) -> Self {
        let mask = (0..ids.len()).map(|t| t > 0).collect();
        Example { ids, mask }
    }
}

/// Renumber the token ids used by `examples` densely from 0, keeping their order. Returns the renumbered
/// examples and, for each new id, the original one.
pub fn compact_ids(examples: &[Example]) -> (Vec<Example>, Vec<usize>) {
    let used: std::collections::BTreeSet<usize> = examples.iter().flat_map(|e| e.ids.iter().copied()).collect();
    let old: Vec<usize> = used.into_iter().collect();
    let new_of: BTreeMap<usize, usize> = old.iter().enumerate().map(|(n, &o)| (o, n)).collect();
    let out = examples
        .iter()
        .map(|e| Example { ids: e.ids.iter().map(|i| new_of[i]).collect(), mask: e.mask.clone() })
        .collect();
    (out, old)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Planned total steps; the warmup length is a fraction of this.
    pub steps: u64,
    pub lr: f64,
    /// Sequences per step; the whole set is used when it is smaller.
    pub batch_size: usize,
    pub warmup_frac: f64,
    pub clip: f64,
    pub adam: AdamConfig,
    pub log_every: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { steps: 1000, lr: 1e-3, batch_size: 16, warmup_frac: 0.01, clip: 1.0, adam: AdamConfig::default(), log_every: 10 }
    }
}

impl TrainConfig {
    pub fn warmup_steps(&self) -> u64 {
        ((self.steps as f64 * self.warmup_frac).ceil() as u64).max(1)
    }

    /// Linear warmup to `lr`, then constant. `step` is 0-based.
    pub fn lr_at(&self, step: u64) -> f64 {
        self.lr * ((step + 1) as f64 / self.warmup_steps() as f64).min(1.0)
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |s: &str| Err(TrainError::BadOption(s.into()));
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if !(0.0..=1.0).contains(&self.warmup_frac) {
            return bad("warmup_frac must lie in [0, 1]");
        }
        if self.clip.is_nan() || self.clip <= 0.0 {
            return bad("clip must be positive");
        }
        Ok(())
    }

    /// Accepts `steps`, `lr`, `batch_size`, `warmup_frac`, `clip`, `log_every`.
    /// Returns false for keys it does not own.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, TrainError> {
        let bad = || TrainError::BadOption(format!("{key}={value}"));
        match key {
            "steps" => self.steps = value.parse().map_err(|_| bad())?,
            "lr" => self.lr = value.parse().map_err(|_| bad())?,
            "batch_size" => self.batch_size = value.parse().map_err(|_| bad())?,
            "warmup_frac" => self.warmup_frac = value.parse().map_err(|_| bad())?,
            "clip" => self.clip = value.parse().map_err(|_| bad())?,
            "log_every" => self.log_every = value.parse().map_err(|_| bad())?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn to_meta(self, meta: &mut BTreeMap<String, String>) {
        for (k, v) in [
            ("steps", self.steps.to_string()),
            ("lr", format!("{:e}", self.lr)),
            ("batch_size", self.batch_size.to_string()),
            ("warmup_frac", self.warmup_frac.to_string()),
            ("clip", self.clip.to_string()),
            ("log_every", self.log_every.to_string()),
        ] {
            meta.insert(format!("train.{k}"), v);
        }
    }

    fn from_meta(meta: &BTreeMap<String, String>) -> Result<Self, TrainError> {
        let mut c = TrainConfig::default();
        for (k, v) in meta {
            if let Some(key) = k.strip_prefix("train.") {
                c.set(key, v)?;
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    /// 1-based index of the step just taken.
    pub step: u64,
    pub loss: f64,
    pub lr: f64,
    pub grad_norm: f64,
    pub tokens: usize,
    pub tokens_per_sec: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogRecord {
    pub step: u64,
    pub loss: f64,
    pub lr: f64,
    #[serde(rename = "tokens/sec")]
    pub tokens_per_sec: f64,
}

impl From<&StepStats> for LogRecord {
    fn from(s: &StepStats) -> Self {
        LogRecord { step: s.step, loss: s.loss, lr: s.lr, tokens_per_sec: s.tokens_per_sec }
    }
}

#[derive(Debug, Clone)]
pub struct Trainer<T> {
    pub model: Transformer<T>,
    pub config: TrainConfig,
    pub adam: Adam<T>,
    /// Steps taken so far.
    pub step: u64,
    /// Vocabulary stored alongside the weights in checkpoints.
    pub vocab: Vec<String>,
    /// Where to write a checkpoint if training blows up.
    pub snapshot_dir: Option<PathBuf>,
    seed: u64,
    rng: ChaCha8Rng,
}

impl<T: Scalar> Trainer<T> {
    pub fn new(model: Transformer<T>, config: TrainConfig, vocab: Vec<String>, seed: u64) -> Result<Self, TrainError> {
        config.validate()?;
        let adam = Adam::new(model.params.data.len(), config.adam);
        Ok(Trainer { model, config, adam, step: 0, vocab, snapshot_dir: None, seed, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    fn pick(&mut self, n: usize) -> Vec<usize> {
        if self.config.batch_size >= n {
            return (0..n).collect();
        }
        let mut idx = sample(&mut self.rng, n, self.config.batch_size).into_vec();
        idx.sort_unstable();
        idx
    }

    /// Draw a batch, take one optimizer step.
    pub fn train_step(&mut self, data: &[Example]) -> Result<StepStats, TrainError> {
        if data.is_empty() {
            return Err(TrainError::EmptyCorpus);
        }
        let start = Instant::now();
        let idx = self.pick(data.len());
        let batch: Vec<(&[usize], &[bool])> = idx.iter().map(|&i| (data[i].ids.as_slice(), data[i].mask.as_slice())).collect();
        let mut grads = Params::zeros(self.model.params.layout.clone());
        let stats = self.model.loss_and_grad(&batch, &mut grads)?;
        let loss = stats.mean();
        let lr = self.config.lr_at(self.step);
        let grad_norm = clip_grad_norm(&mut grads.data, self.config.clip);
        if !loss.is_finite() || !grad_norm.is_finite() {
            let lengths = batch.iter().map(|b| b.0.len()).collect();
            return Err(self.abort(loss, grad_norm, lr, lengths));
        }
        self.adam.update(&mut self.model.params.data, &grads.data, lr);
        self.step += 1;
        let tokens: usize = batch.iter().map(|b| b.0.len()).sum();
        let secs = start.elapsed().as_secs_f64().max(1e-9);
        Ok(StepStats { step: self.step, loss, lr, grad_norm, tokens, tokens_per_sec: tokens as f64 / secs })
    }

    fn abort(&self, loss: f64, grad_norm: f64, lr: f64, batch_lengths: Vec<usize>) -> TrainError {
        let mut diag = Diagnostic {
            step: self.step + 1,
            loss,
            grad_norm,
            lr,
            param_norm: self.model.params.norm().f64(),
            batch_lengths,
            snapshot: None,
        };
        if let Some(dir) = &self.snapshot_dir {
            let path = dir.join(format!("nonfinite_step{}.ckpt", diag.step));
            let written = std::fs::create_dir_all(dir)
                .map_err(CheckpointError::from)
                .and_then(|_| std::fs::File::create(&path).map_err(CheckpointError::from))
                .and_then(|f| write_checkpoint(std::io::BufWriter::new(f), &self.checkpoint()));
            if written.is_ok() {
                diag.snapshot = Some(path.clone());
                let json = serde_json::to_string_pretty(&diag).unwrap_or_default();
                let _ = std::fs::write(path.with_extension("json"), json);
            }
        }
        TrainError::NonFinite(Box::new(diag))
    }

    /// Step until `self.step == until`, writing a JSONL record every
    /// `log_every` steps and on the last one.
    pub fn run(&mut self, data: &[Example], until: u64, mut log: Option<&mut dyn Write>) -> Result<Vec<StepStats>, TrainError> {
        let mut out = Vec::new();
        while self.step < until {
            let s = self.train_step(data)?;
            if let Some(w) = log.as_deref_mut() {
                if s.step % self.config.log_every.max(1) == 0 || s.step == until {
                    serde_json::to_writer(&mut *w, &LogRecord::from(&s)).map_err(std::io::Error::from)?;
                    writeln!(w)?;
                }
            }
            out.push(s);
        }
        Ok(out)
    }

    pub fn checkpoint(&self) -> Checkpoint<T> {
        let mut meta = BTreeMap::new();
        meta.insert("step".into(), self.step.to_string());
        meta.insert("seed".into(), self.seed.to_string());
        meta.insert("rng_stream".into(), self.rng.get_stream().to_string());
        meta.insert("rng_word_pos".into(), self.rng.get_word_pos().to_string());
        meta.insert("adam_t".into(), self.adam.t.to_string());
        self.config.to_meta(&mut meta);
        let layout = self.model.params.layout.clone();
        let moments = |v: &Vec<T>| Params { layout: layout.clone(), data: v.clone() };
        Checkpoint {
            config: self.model.config.clone(),
            meta,
            vocab: self.vocab.clone(),
            sections: vec![
                ("params".into(), self.model.params.clone()),
                ("adam_m".into(), moments(&self.adam.m)),
                ("adam_v".into(), moments(&self.adam.v)),
            ],
        }
    }

    /// Restore a trainer exactly where [`Trainer::checkpoint`] left it.
    /// A checkpoint holding only `params` starts fresh optimizer state.
    pub fn from_checkpoint(ck: Checkpoint<T>) -> Result<Self, TrainError> {
        let corrupt = |s: &str| TrainError::Checkpoint(CheckpointError::Corrupt(s.into()));
        let num = |k: &str| -> Result<u128, TrainError> {
            ck.meta.get(k).map_or(Ok(0), |v| v.parse().map_err(|_| corrupt(k)))
        };
        let (step, seed, stream, word_pos, t) =
            (num("step")? as u64, num("seed")? as u64, num("rng_stream")? as u64, num("rng_word_pos")?, num("adam_t")? as u64);
        let config = TrainConfig::from_meta(&ck.meta)?;
        let params = ck.section("params").ok_or_else(|| corrupt("no params section"))?.clone();
        let model = Transformer::with_params(ck.config.clone(), params);
        let mut tr = Trainer::new(model, config, ck.vocab.clone(), seed)?;
        if let (Some(m), Some(v)) = (ck.section("adam_m"), ck.section("adam_v")) {
            tr.adam.m = m.data.clone();
            tr.adam.v = v.data.clone();
            tr.adam.t = t;
        }
        tr.step = step;
        tr.rng.set_stream(stream);
        tr.rng.set_word_pos(word_pos);
        Ok(tr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResult {
    pub lr: f64,
    pub before: f64,
    pub after: f64,
}

impl ProbeResult {
    pub fn decreased(&self) -> bool {
        self.after < self.before
    }
}

/// Loss on a fixed batch before and after one fresh clipped Adam step at
/// each learning rate.
pub fn probe_learning_rates<T: Scalar>(
    model: &Transformer<T>,
    batch: &[Example],
    lrs: &[f64],
    clip: f64,
) -> Result<Vec<ProbeResult>, TrainError> {
    let refs: Vec<(&[usize], &[bool])> = batch.iter().map(|e| (e.ids.as_slice(), e.mask.as_slice())).collect();
    let mut grads = Params::zeros(model.params.layout.clone());
    let before = model.loss_and_grad(&refs, &mut grads)?.mean();
    clip_grad_norm(&mut grads.data, clip);
    lrs.iter()
        .map(|&lr| {
            let mut m = model.clone();
            Adam::new(m.params.data.len(), AdamConfig::default()).update(&mut m.params.data, &grads.data, lr);
            Ok(ProbeResult { lr, before, after: m.loss(&refs)?.mean() })
        })
        .collect()
}
