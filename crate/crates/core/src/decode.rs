//! Autoregressive decoding with a key/value cache.

use rand::Rng;

use crate::error::DecodeError;
use crate::model::Transformer;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    Greedy,
    /// Sample among the `k` highest logits after temperature scaling.
    TopK,
    /// Sample from the full tempered distribution.
    Temperature,
}

impl std::str::FromStr for DecodeMode {
    type Err = DecodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(DecodeMode::Greedy),
            "top-k" | "topk" => Ok(DecodeMode::TopK),
            "temperature" => Ok(DecodeMode::Temperature),
            _ => Err(DecodeError::BadParams(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeParams {
    pub mode: DecodeMode,
    pub k: usize,
    pub temperature: f64,
    /// ≥ 1; 1 leaves the logits alone.
    pub repetition_penalty: f64,
    pub max_new_tokens: usize,
}

impl Default for DecodeParams {
    fn default() -> Self {
        DecodeParams { mode: DecodeMode::Greedy, k: 10, temperature: 1.0, repetition_penalty: 1.0, max_new_tokens: 128 }
    }
}

impl DecodeParams {
    pub fn validate(&self) -> Result<(), DecodeError> {
        let bad = |s: &str| Err(DecodeError::BadParams(s.into()));
        if !(self.repetition_penalty >= 1.0 && self.repetition_penalty.is_finite()) {
            return bad("repetition_penalty must be a finite value >= 1");
        }
        if self.mode != DecodeMode::Greedy && !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be positive");
        }
        if self.mode == DecodeMode::TopK && self.k == 0 {
            return bad("k must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    /// Generated ids, without the prompt and without the stop token.
    pub tokens: Vec<usize>,
    /// True when decoding stopped on a length limit instead of the stop token.
    pub truncated: bool,
}

/// Penalize logits of tokens already emitted: positive logits are divided
/// by `penalty`, negative ones multiplied. Each distinct token counts once.
pub fn apply_repetition_penalty(logits: &mut [f64], emitted: &[usize], penalty: f64) {
    if penalty == 1.0 {
        return;
    }
    let mut seen = vec![false; logits.len()];
    for &t in emitted {
        if t < logits.len() && !seen[t] {
            seen[t] = true;
            let z = &mut logits[t];
            *z = if *z > 0.0 { *z / penalty } else { *z * penalty };
        }
    }
}

fn argmax(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in x.iter().enumerate() {
        if v > x[best] {
            best = i;
        }
    }
    best
}

fn softmax(z: &[f64], scale: f64) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|&v| if v == f64::NEG_INFINITY { 0.0 } else { ((v - max) * scale).exp() }).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// The distribution the next token is drawn from. Greedy decoding gives a
/// point mass on the lowest-index maximum.
pub fn next_token_distribution(logits: &[f64], emitted: &[usize], p: &DecodeParams) -> Vec<f64> {
    let mut z = logits.to_vec();
    apply_repetition_penalty(&mut z, emitted, p.repetition_penalty);
    match p.mode {
        DecodeMode::Greedy => {
            let mut out = vec![0.0; z.len()];
            out[argmax(&z)] = 1.0;
            out
        }
        DecodeMode::Temperature => softmax(&z, 1.0 / p.temperature),
        DecodeMode::TopK => {
            if p.k < z.len() {
                let mut order: Vec<usize> = (0..z.len()).collect();
                order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
                for &i in &order[p.k..] {
                    z[i] = f64::NEG_INFINITY;
                }
            }
            softmax(&z, 1.0 / p.temperature)
        }
    }
}

fn draw(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Extend `prompt` until `stop` is produced, `max_new_tokens` are emitted or
/// the context is full. The penalty applies to generated tokens only.
pub fn generate<T: Scalar>(
    model: &Transformer<T>,
    prompt: &[usize],
    stop: usize,
    params: &DecodeParams,
    rng: &mut impl Rng,
) -> Result<Generation, DecodeError> {
    params.validate()?;
    if prompt.is_empty() {
        return Err(DecodeError::Model(crate::ModelError::EmptyInput));
    }
    let max_len = model.config.max_len;
    if prompt.len() > max_len {
        return Err(DecodeError::Model(crate::ModelError::TooLong { len: prompt.len(), max: max_len }));
    }
    let mut cache = model.new_cache();
    let mut logits = Vec::new();
    for &id in prompt {
        logits = model.step(&mut cache, id)?;
    }
    let mut tokens = Vec::new();
    loop {
        if tokens.len() >= params.max_new_tokens {
            return Ok(Generation { tokens, truncated: true });
        }
        let z: Vec<f64> = logits.iter().map(|v| v.f64()).collect();
        let next = match params.mode {
            DecodeMode::Greedy => {
                let mut z = z;
                apply_repetition_penalty(&mut z, &tokens, params.repetition_penalty);
                argmax(&z)
            }
            _ => draw(&next_token_distribution(&z, &tokens, params), rng),
        };
        if next == stop {
            return Ok(Generation { tokens, truncated: false });
        }
        tokens.push(next);
        if prompt.len() + tokens.len() >= max_len {
            return Ok(Generation { tokens, truncated: true });
        }
        logits = model.step(&mut cache, next)?;
    }
}
