use std::collections::BTreeMap;

use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub layers: usize,
    pub heads: usize,
    pub d_model: usize,
    pub d_head: usize,
    pub ffn_dim: usize,
    pub vocab_size: usize,
    pub max_len: usize,
    pub rope_base: f64,
}

impl ModelConfig {
    /// 2 layers, width 16, 50 tokens: the verification size.
    pub fn tiny() -> Self {
        ModelConfig {
            layers: 2,
            heads: 2,
            d_model: 16,
            d_head: 8,
            ffn_dim: 48,
            vocab_size: 50,
            max_len: 256,
            rope_base: 10000.0,
        }
    }

    /// 4 layers, width 128: the desk training size.
    pub fn small() -> Self {
        ModelConfig {
            layers: 4,
            heads: 4,
            d_model: 128,
            d_head: 32,
            ffn_dim: 344,
            vocab_size: 256,
            max_len: 256,
            rope_base: 10000.0,
        }
    }

    /// 12 layers, 12 heads, width 768, FFN 2560.
    pub fn full() -> Self {
        ModelConfig {
            layers: 12,
            heads: 12,
            d_model: 768,
            d_head: 64,
            ffn_dim: 2560,
            vocab_size: 512,
            max_len: 1024,
            rope_base: 10000.0,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "tiny" => Some(Self::tiny()),
            "small" => Some(Self::small()),
            "full" => Some(Self::full()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |s: String| Err(ModelError::BadConfig(s));
        if self.layers == 0 || self.heads == 0 || self.d_head == 0 || self.ffn_dim == 0 {
            return bad("layers, heads, d_head and ffn_dim must be positive".into());
        }
        if self.d_model != self.heads * self.d_head {
            return bad(format!("d_model {} != heads {} × d_head {}", self.d_model, self.heads, self.d_head));
        }
        if self.d_head % 2 != 0 {
            return bad(format!("rotary embedding needs an even d_head, got {}", self.d_head));
        }
        if self.vocab_size < 2 || self.max_len < 2 {
            return bad("vocab_size and max_len must be at least 2".into());
        }
        if self.rope_base.is_nan() || self.rope_base <= 1.0 {
            return bad(format!("rope_base {} must exceed 1", self.rope_base));
        }
        Ok(())
    }

    /// Set one field from its text form. Returns false for keys that are not
    /// model fields.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, ModelError> {
        let int = || value.trim().parse::<usize>().map_err(|_| ModelError::BadConfig(format!("{key}={value}")));
        match key {
            "layers" => self.layers = int()?,
            "heads" => self.heads = int()?,
            "d_model" => self.d_model = int()?,
            "d_head" => self.d_head = int()?,
            "ffn_dim" => self.ffn_dim = int()?,
            "vocab_size" => self.vocab_size = int()?,
            "max_len" => self.max_len = int()?,
            "rope_base" => {
                self.rope_base = value.trim().parse().map_err(|_| ModelError::BadConfig(format!("{key}={value}")))?
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn to_kv(&self) -> BTreeMap<String, String> {
        [
            ("layers", self.layers.to_string()),
            ("heads", self.heads.to_string()),
            ("d_model", self.d_model.to_string()),
            ("d_head", self.d_head.to_string()),
            ("ffn_dim", self.ffn_dim.to_string()),
            ("vocab_size", self.vocab_size.to_string()),
            ("max_len", self.max_len.to_string()),
            ("rope_base", format!("{:?}", self.rope_base)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    pub fn from_kv(kv: &BTreeMap<String, String>) -> Result<Self, ModelError> {
        let mut c = Self::tiny();
        for field in ["layers", "heads", "d_model", "d_head", "ffn_dim", "vocab_size", "max_len", "rope_base"] {
            let v = kv.get(field).ok_or_else(|| ModelError::BadConfig(format!("missing {field}")))?;
            c.set(field, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn param_count(&self) -> usize {
        let (d, f, m) = (self.d_model, self.ffn_dim, self.vocab_size);
        2 * m * d + d + self.layers * (2 * d + 4 * d * d + 3 * d * f)
    }
}

/// `key=value` lines; blank lines and `#` comments ignored.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}
