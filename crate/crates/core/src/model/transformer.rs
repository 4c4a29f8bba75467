use rand::Rng;

use super::config::ModelConfig;
use super::ops::{matmul, matmul_nt, matmul_tn, rmsnorm, rmsnorm_backward, softmax_prefix, swiglu, swiglu_backward, Rope};
use super::params::{Layout, Params};
use crate::error::ModelError;
use crate::Scalar;

/// Decoder-only transformer: pre-norm attention with rotary positions and a
/// gated FFN per layer, final norm, untied output projection.
#[derive(Debug, Clone)]
pub struct Transformer<T> {
    pub config: ModelConfig,
    pub params: Params<T>,
    rope: Rope<T>,
}

#[derive(Debug, Clone)]
struct LayerCache<T> {
    x_in: Vec<T>,
    r1: Vec<T>,
    a: Vec<T>,
    q: Vec<T>,
    k: Vec<T>,
    v: Vec<T>,
    probs: Vec<T>,
    z: Vec<T>,
    x_mid: Vec<T>,
    r2: Vec<T>,
    b: Vec<T>,
    g: Vec<T>,
    u: Vec<T>,
    h: Vec<T>,
}

/// Activations of one batched forward pass, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct Forward<T> {
    /// `(first row, length)` of each sequence in the packed rows.
    pub spans: Vec<(usize, usize)>,
    pub ids: Vec<usize>,
    layers: Vec<LayerCache<T>>,
    x_last: Vec<T>,
    r_last: Vec<T>,
    /// Final normed hidden states, rows × d_model.
    pub hidden: Vec<T>,
    /// rows × vocab_size.
    pub logits: Vec<T>,
}

impl<T: Scalar> Forward<T> {
    /// Row-major `len × len` attention weights of one head for one sequence.
    pub fn attention(&self, layer: usize, seq: usize, head: usize) -> &[T] {
        let heads = self.layers[layer].probs.len() / self.spans.iter().map(|&(_, l)| l * l).sum::<usize>();
        let off: usize = self.spans[..seq].iter().map(|&(_, l)| heads * l * l).sum();
        let len = self.spans[seq].1;
        let start = off + head * len * len;
        &self.layers[layer].probs[start..start + len * len]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossStats {
    /// Summed negative log-likelihood over target tokens.
    pub sum: f64,
    pub count: usize,
}

impl LossStats {
    pub fn mean(&self) -> f64 {
        self.sum / self.count.max(1) as f64
    }
}

impl<T: Scalar> Transformer<T> {
    pub fn new(config: ModelConfig, rng: &mut impl Rng) -> Result<Self, ModelError> {
        config.validate()?;
        let params = Params::init(&config, rng);
        Ok(Self::with_params(config, params))
    }

    pub fn with_params(config: ModelConfig, params: Params<T>) -> Self {
        let rope = Rope::new(config.d_head, config.max_len, config.rope_base);
        Transformer { config, params, rope }
    }

    pub fn layout(&self) -> &Layout {
        &self.params.layout
    }

    fn check(&self, ids: &[usize]) -> Result<(), ModelError> {
        if ids.is_empty() {
            return Err(ModelError::EmptyInput);
        }
        if ids.len() > self.config.max_len {
            return Err(ModelError::TooLong { len: ids.len(), max: self.config.max_len });
        }
        if let Some(&id) = ids.iter().find(|&&i| i >= self.config.vocab_size) {
            return Err(ModelError::BadToken { id, vocab: self.config.vocab_size });
        }
        Ok(())
    }

    /// Run every sequence of the batch; logits are skipped when not needed.
    pub fn forward(&self, batch: &[&[usize]], with_logits: bool) -> Result<Forward<T>, ModelError> {
        let c = &self.config;
        let (d, f, m, dh) = (c.d_model, c.ffn_dim, c.vocab_size, c.d_head);
        let mut spans = Vec::with_capacity(batch.len());
        let mut ids = Vec::new();
        for s in batch {
            self.check(s)?;
            spans.push((ids.len(), s.len()));
            ids.extend_from_slice(s);
        }
        if ids.is_empty() {
            return Err(ModelError::EmptyInput);
        }
        let n = ids.len();
        let p = &self.params;
        let lay = &p.layout;
        let emb = p.block(Layout::TOK_EMB);
        let mut x: Vec<T> = ids.iter().flat_map(|&i| emb[i * d..(i + 1) * d].iter().copied()).collect();
        let scale = T::one() / T::c((dh as f64).sqrt());
        let probs_len: usize = spans.iter().map(|&(_, l)| c.heads * l * l).sum();

        let mut layers = Vec::with_capacity(c.layers);
        for l in 0..c.layers {
            let lb = lay.layer(l);
            let x_in = x.clone();
            let mut r1 = vec![T::zero(); n];
            let mut a = vec![T::zero(); n * d];
            rmsnorm(&x, p.block(lb.attn_norm), &mut a, &mut r1);
            let mut q = vec![T::zero(); n * d];
            let mut k = vec![T::zero(); n * d];
            let mut v = vec![T::zero(); n * d];
            matmul(&a, p.block(lb.wq), &mut q, n, d, d, false);
            matmul(&a, p.block(lb.wk), &mut k, n, d, d, false);
            matmul(&a, p.block(lb.wv), &mut v, n, d, d, false);
            for &(start, len) in &spans {
                for t in 0..len {
                    let r = (start + t) * d;
                    self.rope.rotate(&mut q[r..r + d], t, false);
                    self.rope.rotate(&mut k[r..r + d], t, false);
                }
            }
            let mut probs = vec![T::zero(); probs_len];
            let mut z = vec![T::zero(); n * d];
            let mut off = 0;
            for &(start, len) in &spans {
                for h in 0..c.heads {
                    let base = start * d + h * dh;
                    let pm = &mut probs[off..off + len * len];
                    T::gemm(len, dh, len, scale, &q[base..], d as isize, 1, &k[base..], 1, d as isize, T::zero(), pm, len as isize, 1);
                    for (i, row) in pm.chunks_exact_mut(len).enumerate() {
                        softmax_prefix(row, i + 1);
                    }
                    T::gemm(len, len, dh, T::one(), pm, len as isize, 1, &v[base..], d as isize, 1, T::zero(), &mut z[base..], d as isize, 1);
                    off += len * len;
                }
            }
            matmul(&z, p.block(lb.wo), &mut x, n, d, d, true);
            let x_mid = x.clone();
            let mut r2 = vec![T::zero(); n];
            let mut b = vec![T::zero(); n * d];
            rmsnorm(&x, p.block(lb.ffn_norm), &mut b, &mut r2);
            let (g, u, hh) = swiglu(&b, p.block(lb.w_gate), p.block(lb.w_up), p.block(lb.w_down), &mut x, n, d, f);
            layers.push(LayerCache { x_in, r1, a, q, k, v, probs, z, x_mid, r2, b, g, u, h: hh });
        }

        let mut r_last = vec![T::zero(); n];
        let mut hidden = vec![T::zero(); n * d];
        rmsnorm(&x, p.block(lay.final_norm()), &mut hidden, &mut r_last);
        let mut logits = Vec::new();
        if with_logits {
            logits = vec![T::zero(); n * m];
            matmul(&hidden, p.block(lay.out_proj()), &mut logits, n, d, m, false);
        }
        Ok(Forward { spans, ids, layers, x_last: x, r_last, hidden, logits })
    }

    /// Accumulate parameter gradients given the gradient of some scalar with
    /// respect to the logits and/or the final hidden states.
    pub fn backward(&self, fw: &Forward<T>, dlogits: Option<&[T]>, dhidden: Option<&[T]>, grads: &mut Params<T>) {
        let c = &self.config;
        let (d, f, m, dh) = (c.d_model, c.ffn_dim, c.vocab_size, c.d_head);
        let n = fw.ids.len();
        let p = &self.params;
        let lay = &p.layout;
        let scale = T::one() / T::c((dh as f64).sqrt());

        let mut dhid = vec![T::zero(); n * d];
        if let Some(dl) = dlogits {
            matmul_tn(&fw.hidden, dl, grads.block_mut(lay.out_proj()), d, n, m, true);
            matmul_nt(dl, p.block(lay.out_proj()), &mut dhid, n, m, d, true);
        }
        if let Some(dhx) = dhidden {
            dhid.iter_mut().zip(dhx).for_each(|(a, &b)| *a += b);
        }
        let mut dx = vec![T::zero(); n * d];
        rmsnorm_backward(&fw.x_last, p.block(lay.final_norm()), &fw.r_last, &dhid, &mut dx, grads.block_mut(lay.final_norm()));

        for l in (0..c.layers).rev() {
            let lb = lay.layer(l);
            let lc = &fw.layers[l];
            // FFN
            let (dwg, dwu, dwd) = grads.three_mut(lb.w_gate, lb.w_up, lb.w_down);
            let db = swiglu_backward(
                &lc.b,
                (&lc.g, &lc.u, &lc.h),
                (p.block(lb.w_gate), p.block(lb.w_up), p.block(lb.w_down)),
                &dx,
                (dwg, dwu, dwd),
                n,
                d,
                f,
            );
            rmsnorm_backward(&lc.x_mid, p.block(lb.ffn_norm), &lc.r2, &db, &mut dx, grads.block_mut(lb.ffn_norm));

            // attention
            matmul_tn(&lc.z, &dx, grads.block_mut(lb.wo), d, n, d, true);
            let mut dz = vec![T::zero(); n * d];
            matmul_nt(&dx, p.block(lb.wo), &mut dz, n, d, d, false);
            let mut dq = vec![T::zero(); n * d];
            let mut dk = vec![T::zero(); n * d];
            let mut dv = vec![T::zero(); n * d];
            let mut off = 0;
            for &(start, len) in &fw.spans {
                let mut dp = vec![T::zero(); len * len];
                for h in 0..c.heads {
                    let base = start * d + h * dh;
                    let pm = &lc.probs[off..off + len * len];
                    // dP = dO · Vᵀ
                    T::gemm(len, dh, len, T::one(), &dz[base..], d as isize, 1, &lc.v[base..], 1, d as isize, T::zero(), &mut dp, len as isize, 1);
                    // dV = Pᵀ · dO
                    T::gemm(len, len, dh, T::one(), pm, 1, len as isize, &dz[base..], d as isize, 1, T::one(), &mut dv[base..], d as isize, 1);
                    for (prow, drow) in pm.chunks_exact(len).zip(dp.chunks_exact_mut(len)) {
                        let dot: T = prow.iter().zip(drow.iter()).map(|(&a, &b)| a * b).sum();
                        for (dv_, &pv) in drow.iter_mut().zip(prow) {
                            *dv_ = pv * (*dv_ - dot);
                        }
                    }
                    // dQ = s·dS·K, dK = s·dSᵀ·Q
                    T::gemm(len, len, dh, scale, &dp, len as isize, 1, &lc.k[base..], d as isize, 1, T::one(), &mut dq[base..], d as isize, 1);
                    T::gemm(len, len, dh, scale, &dp, 1, len as isize, &lc.q[base..], d as isize, 1, T::one(), &mut dk[base..], d as isize, 1);
                    off += len * len;
                }
            }
            for &(start, len) in &fw.spans {
                for t in 0..len {
                    let r = (start + t) * d;
                    self.rope.rotate(&mut dq[r..r + d], t, true);
                    self.rope.rotate(&mut dk[r..r + d], t, true);
                }
            }
            matmul_tn(&lc.a, &dq, grads.block_mut(lb.wq), d, n, d, true);
            matmul_tn(&lc.a, &dk, grads.block_mut(lb.wk), d, n, d, true);
            matmul_tn(&lc.a, &dv, grads.block_mut(lb.wv), d, n, d, true);
            let mut da = vec![T::zero(); n * d];
            matmul_nt(&dq, p.block(lb.wq), &mut da, n, d, d, false);
            matmul_nt(&dk, p.block(lb.wk), &mut da, n, d, d, true);
            matmul_nt(&dv, p.block(lb.wv), &mut da, n, d, d, true);
            rmsnorm_backward(&lc.x_in, p.block(lb.attn_norm), &lc.r1, &da, &mut dx, grads.block_mut(lb.attn_norm));
        }

        let demb = grads.block_mut(Layout::TOK_EMB);
        for (r, &id) in fw.ids.iter().enumerate() {
            for j in 0..d {
                demb[id * d + j] += dx[r * d + j];
            }
        }
    }

    /// Masked next-token loss of a forward pass. Position t of a sequence
    /// contributes −log p(ids[t] | ids[..t]) when `masks[t]` is set.
    /// With `dlogits`, writes the gradient of the mean loss.
    pub fn masked_loss(
        &self,
        fw: &Forward<T>,
        masks: &[&[bool]],
        mut dlogits: Option<&mut Vec<T>>,
    ) -> Result<LossStats, ModelError> {
        let m = self.config.vocab_size;
        let count: usize =
            masks.iter().zip(&fw.spans).map(|(mk, &(_, len))| mk[1..len].iter().filter(|&&b| b).count()).sum();
        if count == 0 {
            return Err(ModelError::EmptyTarget);
        }
        if let Some(dl) = dlogits.as_deref_mut() {
            dl.clear();
            dl.resize(fw.logits.len(), T::zero());
        }
        let inv = T::one() / T::c(count as f64);
        let mut sum = 0.0;
        for (mk, &(start, len)) in masks.iter().zip(&fw.spans) {
            for t in 1..len {
                if !mk[t] {
                    continue;
                }
                let row = (start + t - 1) * m;
                let logits = &fw.logits[row..row + m];
                let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
                let lse = logits.iter().map(|&z| (z - max).exp()).sum::<T>().ln() + max;
                let target = fw.ids[start + t];
                sum += (lse - logits[target]).f64();
                if let Some(dl) = dlogits.as_deref_mut() {
                    for (j, g) in dl[row..row + m].iter_mut().enumerate() {
                        let p = (logits[j] - lse).exp();
                        *g = inv * (p - if j == target { T::one() } else { T::zero() });
                    }
                }
            }
        }
        Ok(LossStats { sum, count })
    }

    /// Mean masked loss over a batch, accumulating its gradient into `grads`.
    pub fn loss_and_grad(
        &self,
        batch: &[(&[usize], &[bool])],
        grads: &mut Params<T>,
    ) -> Result<LossStats, ModelError> {
        let ids: Vec<&[usize]> = batch.iter().map(|b| b.0).collect();
        let masks: Vec<&[bool]> = batch.iter().map(|b| b.1).collect();
        let fw = self.forward(&ids, true)?;
        let mut dl = Vec::new();
        let stats = self.masked_loss(&fw, &masks, Some(&mut dl))?;
        self.backward(&fw, Some(&dl), None, grads);
        Ok(stats)
    }

    pub fn loss(&self, batch: &[(&[usize], &[bool])]) -> Result<LossStats, ModelError> {
        let ids: Vec<&[usize]> = batch.iter().map(|b| b.0).collect();
        let masks: Vec<&[bool]> = batch.iter().map(|b| b.1).collect();
        let fw = self.forward(&ids, true)?;
        self.masked_loss(&fw, &masks, None)
    }

    /// Logits of one sequence, rows × vocab_size.
    pub fn logits(&self, ids: &[usize]) -> Result<Vec<T>, ModelError> {
        Ok(self.forward(&[ids], true)?.logits)
    }

    /// Final normed hidden states of one sequence, rows × d_model.
    pub fn embed(&self, ids: &[usize]) -> Result<Vec<T>, ModelError> {
        Ok(self.forward(&[ids], false)?.hidden)
    }

    pub fn new_cache(&self) -> KvCache<T> {
        KvCache { k: vec![Vec::new(); self.config.layers], v: vec![Vec::new(); self.config.layers], len: 0 }
    }

    /// Feed one token after the cached prefix and return its logits.
    pub fn step(&self, cache: &mut KvCache<T>, id: usize) -> Result<Vec<T>, ModelError> {
        let c = &self.config;
        let (d, f, m, dh) = (c.d_model, c.ffn_dim, c.vocab_size, c.d_head);
        if id >= m {
            return Err(ModelError::BadToken { id, vocab: m });
        }
        if cache.len >= c.max_len {
            return Err(ModelError::TooLong { len: cache.len + 1, max: c.max_len });
        }
        let pos = cache.len;
        let p = &self.params;
        let lay = &p.layout;
        let scale = T::one() / T::c((dh as f64).sqrt());
        let mut x = p.block(Layout::TOK_EMB)[id * d..(id + 1) * d].to_vec();
        let mut r = [T::zero()];
        let mut a = vec![T::zero(); d];
        for l in 0..c.layers {
            let lb = lay.layer(l);
            rmsnorm(&x, p.block(lb.attn_norm), &mut a, &mut r);
            let mut q = vec![T::zero(); d];
            let mut k = vec![T::zero(); d];
            let mut v = vec![T::zero(); d];
            matmul(&a, p.block(lb.wq), &mut q, 1, d, d, false);
            matmul(&a, p.block(lb.wk), &mut k, 1, d, d, false);
            matmul(&a, p.block(lb.wv), &mut v, 1, d, d, false);
            self.rope.rotate(&mut q, pos, false);
            self.rope.rotate(&mut k, pos, false);
            cache.k[l].extend_from_slice(&k);
            cache.v[l].extend_from_slice(&v);
            let (kc, vc) = (&cache.k[l], &cache.v[l]);
            let mut z = vec![T::zero(); d];
            let mut scores = vec![T::zero(); pos + 1];
            for h in 0..c.heads {
                let o = h * dh;
                for (j, s) in scores.iter_mut().enumerate() {
                    *s = scale * (0..dh).map(|i| q[o + i] * kc[j * d + o + i]).sum::<T>();
                }
                softmax_prefix(&mut scores, pos + 1);
                for (j, &w) in scores.iter().enumerate() {
                    for i in 0..dh {
                        z[o + i] += w * vc[j * d + o + i];
                    }
                }
            }
            matmul(&z, p.block(lb.wo), &mut x, 1, d, d, true);
            rmsnorm(&x, p.block(lb.ffn_norm), &mut a, &mut r);
            swiglu(&a, p.block(lb.w_gate), p.block(lb.w_up), p.block(lb.w_down), &mut x, 1, d, f);
        }
        rmsnorm(&x.clone(), p.block(lay.final_norm()), &mut x, &mut r);
        let mut logits = vec![T::zero(); m];
        matmul(&x, p.block(lay.out_proj()), &mut logits, 1, d, m, false);
        cache.len += 1;
        Ok(logits)
    }
}

/// Rotated keys and values of every processed position, per layer.
#[derive(Debug, Clone)]
pub struct KvCache<T> {
    k: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
    len: usize,
}

impl<T> KvCache<T> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tiny() -> Transformer<f64> {
        Transformer::new(ModelConfig::tiny(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap()
    }

    #[test]
    fn shapes_and_errors() {
        let t = tiny();
        assert_eq!(t.logits(&[1, 2, 3]).unwrap().len(), 3 * 50);
        assert_eq!(t.embed(&[1, 2, 3]).unwrap().len(), 3 * 16);
        assert_eq!(t.logits(&[]), Err(ModelError::EmptyInput));
        assert_eq!(t.logits(&[50]), Err(ModelError::BadToken { id: 50, vocab: 50 }));
        assert!(matches!(t.logits(&vec![1; 257]), Err(ModelError::TooLong { .. })));
    }

    #[test]
    fn cache_matches_full_pass() {
        let t = tiny();
        let ids = [4, 9, 1, 33, 7, 7, 21];
        let full = t.logits(&ids).unwrap();
        let mut cache = t.new_cache();
        for (i, &id) in ids.iter().enumerate() {
            let row = t.step(&mut cache, id).unwrap();
            for (a, b) in row.iter().zip(&full[i * 50..(i + 1) * 50]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert_eq!(cache.len(), ids.len());
    }

    #[test]
    fn batching_is_transparent() {
        let t = tiny();
        let (a, b) = ([1usize, 2, 3, 4], [9usize, 8]);
        let both = t.forward(&[&a, &b], true).unwrap();
        let alone = t.logits(&b).unwrap();
        for (x, y) in both.logits[4 * 50..].iter().zip(&alone) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_logits_give_log_m() {
        let mut t = tiny();
        let out = t.layout().out_proj();
        t.params.block_mut(out).iter_mut().for_each(|x| *x = 0.0);
        let ids = [1usize, 2, 3, 4, 5];
        let mask = [false, false, true, true, true];
        let s = t.loss(&[(&ids, &mask)]).unwrap();
        assert_eq!(s.count, 3);
        assert!((s.sum - 3.0 * 50f64.ln()).abs() < 1e-9);
        assert_eq!(t.loss(&[(&ids, &[false; 5])]), Err(ModelError::EmptyTarget));
    }
}
