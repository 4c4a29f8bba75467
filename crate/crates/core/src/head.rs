//! Scalar regression head on pooled hidden states, trained together with
//! the language model.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::TrainError;
use crate::metalang::vocab::{tag_id, PAD, SEP};
use crate::metalang::{TaskSpec, Vocab};
use crate::MetalangError;
use crate::model::ops::{swish, swish_grad};
use crate::model::{Params, Transformer};
use crate::train::{Adam, AdamConfig};
use crate::Scalar;

/// Input ids for the head: the property-prediction tag, the molecule, SEP.
pub fn head_input(vocab: &Vocab, smiles_tokens: &[String]) -> Result<Vec<usize>, MetalangError> {
    let mut ids = vec![tag_id(TaskSpec::PREDICT)];
    ids.extend(vocab.encode(smiles_tokens)?);
    ids.push(SEP);
    Ok(ids)
}

/// `[max-pool ‖ mean-pool]` (2d) → d with swish → scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolHead<T> {
    pub d: usize,
    /// w1 (2d × d), b1 (d), w2 (d), b2 (1), in that order.
    pub data: Vec<T>,
}

struct HeadCache<T> {
    pooled: Vec<T>,
    z: Vec<T>,
    argmax: Vec<usize>,
    live: Vec<usize>,
}

impl<T: Scalar> PoolHead<T> {
    pub fn new(d: usize, rng: &mut impl Rng) -> Self {
        let mut data = vec![T::zero(); Self::len_for(d)];
        let n1 = Normal::new(0.0, 1.0 / ((2 * d) as f64).sqrt()).unwrap();
        let n2 = Normal::new(0.0, 1.0 / (d as f64).sqrt()).unwrap();
        data[..2 * d * d].iter_mut().for_each(|x| *x = T::c(n1.sample(rng)));
        data[2 * d * d + d..2 * d * d + 2 * d].iter_mut().for_each(|x| *x = T::c(n2.sample(rng)));
        PoolHead { d, data }
    }

    pub fn len_for(d: usize) -> usize {
        2 * d * d + 2 * d + 1
    }

    fn split(&self) -> (&[T], &[T], &[T], T) {
        let d = self.d;
        let (w1, rest) = self.data.split_at(2 * d * d);
        let (b1, rest) = rest.split_at(d);
        let (w2, b2) = rest.split_at(d);
        (w1, b1, w2, b2[0])
    }

    /// Max and mean over the rows whose id is not PAD.
    pub fn pool(&self, hidden: &[T], ids: &[usize]) -> Vec<T> {
        self.pool_with_argmax(hidden, ids).0
    }

    fn pool_with_argmax(&self, hidden: &[T], ids: &[usize]) -> (Vec<T>, Vec<usize>, Vec<usize>) {
        let d = self.d;
        let live: Vec<usize> = (0..ids.len()).filter(|&t| ids[t] != PAD).collect();
        let mut out = vec![T::zero(); 2 * d];
        let mut argmax = vec![0; d];
        if live.is_empty() {
            return (out, argmax, live);
        }
        let inv = T::one() / T::c(live.len() as f64);
        for j in 0..d {
            let mut best = live[0];
            for &t in &live {
                if hidden[t * d + j] > hidden[best * d + j] {
                    best = t;
                }
                out[d + j] += hidden[t * d + j] * inv;
            }
            argmax[j] = best;
            out[j] = hidden[best * d + j];
        }
        (out, argmax, live)
    }

    fn forward_cached(&self, hidden: &[T], ids: &[usize]) -> (T, HeadCache<T>) {
        let d = self.d;
        let (w1, b1, w2, b2) = self.split();
        let (pooled, argmax, live) = self.pool_with_argmax(hidden, ids);
        let mut z = b1.to_vec();
        for (i, &p) in pooled.iter().enumerate() {
            for j in 0..d {
                z[j] += p * w1[i * d + j];
            }
        }
        let y = z.iter().zip(w2).map(|(&zj, &w)| swish(zj) * w).sum::<T>() + b2;
        (y, HeadCache { pooled, z, argmax, live })
    }

    /// Prediction for one sequence from its hidden states (rows × d).
    pub fn forward(&self, hidden: &[T], ids: &[usize]) -> T {
        self.forward_cached(hidden, ids).0
    }

    /// Accumulate `dy`-weighted gradients into `grads` (same layout as
    /// `data`) and `dhidden` (rows × d).
    fn backward(&self, c: &HeadCache<T>, dy: T, grads: &mut [T], dhidden: &mut [T]) {
        let d = self.d;
        let (w1, _, w2, _) = self.split();
        let (gw1, rest) = grads.split_at_mut(2 * d * d);
        let (gb1, rest) = rest.split_at_mut(d);
        let (gw2, gb2) = rest.split_at_mut(d);
        gb2[0] += dy;
        let mut dz = vec![T::zero(); d];
        for j in 0..d {
            gw2[j] += dy * swish(c.z[j]);
            dz[j] = dy * w2[j] * swish_grad(c.z[j]);
            gb1[j] += dz[j];
        }
        let mut dpool = vec![T::zero(); 2 * d];
        for i in 0..2 * d {
            for j in 0..d {
                gw1[i * d + j] += c.pooled[i] * dz[j];
                dpool[i] += w1[i * d + j] * dz[j];
            }
        }
        if c.live.is_empty() {
            return;
        }
        let inv = T::one() / T::c(c.live.len() as f64);
        for j in 0..d {
            dhidden[c.argmax[j] * d + j] += dpool[j];
            for &t in &c.live {
                dhidden[t * d + j] += dpool[d + j] * inv;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinetuneConfig {
    pub lr: f64,
    pub clip: f64,
    pub batch_size: usize,
}

impl Default for FinetuneConfig {
    fn default() -> Self {
        FinetuneConfig { lr: 1e-3, clip: 1.0, batch_size: 16 }
    }
}

/// Language model plus regression head, trained end to end on squared
/// error of standardized targets.
#[derive(Debug, Clone)]
pub struct Finetuner<T> {
    pub model: Transformer<T>,
    pub head: PoolHead<T>,
    pub config: FinetuneConfig,
    /// Target standardization learned from the training set.
    pub mean: f64,
    pub std: f64,
    model_adam: Adam<T>,
    head_adam: Adam<T>,
}

impl<T: Scalar> Finetuner<T> {
    pub fn new(model: Transformer<T>, config: FinetuneConfig, targets: &[f64], rng: &mut impl Rng) -> Result<Self, TrainError> {
        if targets.is_empty() {
            return Err(TrainError::EmptyCorpus);
        }
        let n = targets.len() as f64;
        let mean = targets.iter().sum::<f64>() / n;
        let var = targets.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
        let std = if var > 0.0 { var.sqrt() } else { 1.0 };
        let head = PoolHead::new(model.config.d_model, rng);
        let model_adam = Adam::new(model.params.data.len(), AdamConfig::default());
        let head_adam = Adam::new(head.data.len(), AdamConfig::default());
        Ok(Finetuner { model, head, config, mean, std, model_adam, head_adam })
    }

    /// Reassemble from saved parts with fresh optimizer state.
    pub fn from_parts(model: Transformer<T>, head: PoolHead<T>, mean: f64, std: f64) -> Self {
        let model_adam = Adam::new(model.params.data.len(), AdamConfig::default());
        let head_adam = Adam::new(head.data.len(), AdamConfig::default());
        Finetuner { model, head, config: FinetuneConfig::default(), mean, std, model_adam, head_adam }
    }

    pub fn predict(&self, seqs: &[&[usize]]) -> Result<Vec<f64>, TrainError> {
        let fw = self.model.forward(seqs, false)?;
        let d = self.model.config.d_model;
        Ok(fw
            .spans
            .iter()
            .zip(seqs)
            .map(|(&(start, len), ids)| {
                let y = self.head.forward(&fw.hidden[start * d..(start + len) * d], ids);
                y.f64() * self.std + self.mean
            })
            .collect())
    }

    /// Mean squared error (standardized units) of the batch and its gradient
    /// with respect to every model and head parameter.
    pub fn loss_and_grad(&self, batch: &[(&[usize], f64)]) -> Result<(f64, Params<T>, Vec<T>), TrainError> {
        let seqs: Vec<&[usize]> = batch.iter().map(|b| b.0).collect();
        let fw = self.model.forward(&seqs, false)?;
        let d = self.model.config.d_model;
        let mut dhidden = vec![T::zero(); fw.hidden.len()];
        let mut ghead = vec![T::zero(); self.head.data.len()];
        let n = batch.len() as f64;
        let mut loss = 0.0;
        for (&(start, len), (ids, target)) in fw.spans.iter().zip(batch) {
            let rows = start * d..(start + len) * d;
            let (y, cache) = self.head.forward_cached(&fw.hidden[rows.clone()], ids);
            let err = y.f64() - (target - self.mean) / self.std;
            loss += err * err / n;
            self.head.backward(&cache, T::c(2.0 * err / n), &mut ghead, &mut dhidden[rows]);
        }
        let mut gmodel = Params::zeros(self.model.params.layout.clone());
        self.model.backward(&fw, None, Some(&dhidden), &mut gmodel);
        Ok((loss, gmodel, ghead))
    }

    /// One clipped Adam step on both parts; returns the batch loss.
    pub fn train_step(&mut self, batch: &[(&[usize], f64)]) -> Result<f64, TrainError> {
        let (loss, mut gm, mut gh) = self.loss_and_grad(batch)?;
        let norm = (gm.data.iter().chain(&gh).map(|x| x.f64() * x.f64()).sum::<f64>()).sqrt();
        if !loss.is_finite() || !norm.is_finite() {
            return Err(TrainError::NonFinite(Box::new(crate::Diagnostic {
                step: self.head_adam.t + 1,
                loss,
                grad_norm: norm,
                lr: self.config.lr,
                param_norm: self.model.params.norm().f64(),
                batch_lengths: batch.iter().map(|b| b.0.len()).collect(),
                snapshot: None,
            })));
        }
        if norm > self.config.clip {
            // joint norm across both parts
            let s = T::c(self.config.clip / norm);
            gm.data.iter_mut().chain(gh.iter_mut()).for_each(|x| *x *= s);
        }
        self.model_adam.update(&mut self.model.params.data, &gm.data, self.config.lr);
        self.head_adam.update(&mut self.head.data, &gh, self.config.lr);
        Ok(loss)
    }
}
