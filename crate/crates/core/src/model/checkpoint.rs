//! Binary checkpoint: magic, version, a `key=value` header holding the model
//! config and training metadata, the vocabulary, then named sections of
//! named parameter blocks stored little-endian in the header's dtype.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::config::ModelConfig;
use super::params::{Layout, Params};
use crate::error::CheckpointError;
use crate::Scalar;

pub const MAGIC: &[u8; 8] = b"SPOKECKP";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<T> {
    pub config: ModelConfig,
    /// Free-form metadata such as `step` or RNG state.
    pub meta: BTreeMap<String, String>,
    pub vocab: Vec<String>,
    /// e.g. `params`, `adam_m`, `adam_v`.
    pub sections: Vec<(String, Params<T>)>,
}

impl<T: Scalar> Checkpoint<T> {
    pub fn section(&self, name: &str) -> Option<&Params<T>> {
        self.sections.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn step(&self) -> u64 {
        self.meta.get("step").and_then(|s| s.parse().ok()).unwrap_or(0)
    }
}

fn put_u32(w: &mut impl Write, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_str(w: &mut impl Write, s: &str) -> std::io::Result<()> {
    put_u32(w, s.len() as u32)?;
    w.write_all(s.as_bytes())
}

pub fn write_checkpoint<T: Scalar>(mut w: impl Write, ck: &Checkpoint<T>) -> Result<(), CheckpointError> {
    w.write_all(MAGIC)?;
    put_u32(&mut w, VERSION)?;
    let mut header = ck.config.to_kv();
    header.insert("dtype".into(), T::NAME.into());
    for (k, v) in &ck.meta {
        header.insert(k.clone(), v.clone());
    }
    let text: String = header.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    put_str(&mut w, &text)?;
    put_u32(&mut w, ck.vocab.len() as u32)?;
    for t in &ck.vocab {
        put_str(&mut w, t)?;
    }
    put_u32(&mut w, ck.sections.len() as u32)?;
    for (name, p) in &ck.sections {
        put_str(&mut w, name)?;
        put_u32(&mut w, p.layout.blocks.len() as u32)?;
        for (i, b) in p.layout.blocks.iter().enumerate() {
            put_str(&mut w, &b.name)?;
            put_u32(&mut w, b.rows as u32)?;
            put_u32(&mut w, b.cols as u32)?;
            let mut buf = Vec::with_capacity(b.len() * 8);
            for &x in p.block(i) {
                if T::NAME == "f32" {
                    buf.extend_from_slice(&(x.f64() as f32).to_le_bytes());
                } else {
                    buf.extend_from_slice(&x.f64().to_le_bytes());
                }
            }
            w.write_all(&buf)?;
        }
    }
    Ok(())
}

struct Reader<R> {
    r: R,
}

impl<R: Read> Reader<R> {
    fn bytes(&mut self, n: usize) -> Result<Vec<u8>, CheckpointError> {
        let mut buf = vec![0; n];
        self.r.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => CheckpointError::Corrupt("truncated file".into()),
            _ => CheckpointError::Io(e),
        })?;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, CheckpointError> {
        let n = self.u32()? as usize;
        if n > 1 << 24 {
            return Err(CheckpointError::Corrupt(format!("string length {n}")));
        }
        String::from_utf8(self.bytes(n)?).map_err(|_| CheckpointError::Corrupt("non-UTF-8 string".into()))
    }
}

/// Load a checkpoint, converting stored values to `T`.
pub fn read_checkpoint<T: Scalar>(r: impl Read) -> Result<Checkpoint<T>, CheckpointError> {
    let mut rd = Reader { r };
    if rd.bytes(8)? != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = rd.u32()?;
    if version != VERSION {
        return Err(CheckpointError::Version(version));
    }
    let header = super::config::parse_kv(&rd.string()?).map_err(CheckpointError::Corrupt)?;
    let config = ModelConfig::from_kv(&header).map_err(|e| CheckpointError::Corrupt(e.to_string()))?;
    let wide = match header.get("dtype").map(String::as_str) {
        Some("f64") => true,
        Some("f32") => false,
        other => return Err(CheckpointError::Corrupt(format!("dtype {other:?}"))),
    };
    let config_keys = config.to_kv();
    let meta = header.into_iter().filter(|(k, _)| !config_keys.contains_key(k) && k != "dtype").collect();
    let n_vocab = rd.u32()? as usize;
    let vocab = (0..n_vocab).map(|_| rd.string()).collect::<Result<Vec<_>, _>>()?;
    let layout = Layout::for_config(&config);
    let n_sections = rd.u32()? as usize;
    let mut sections = Vec::with_capacity(n_sections);
    for _ in 0..n_sections {
        let name = rd.string()?;
        let n_blocks = rd.u32()? as usize;
        if n_blocks != layout.blocks.len() {
            return Err(CheckpointError::Corrupt(format!("section {name}: {n_blocks} blocks")));
        }
        let mut p = Params::zeros(layout.clone());
        for i in 0..n_blocks {
            let (bname, rows, cols) = (rd.string()?, rd.u32()? as usize, rd.u32()? as usize);
            let want = &layout.blocks[i];
            if bname != want.name || rows != want.rows || cols != want.cols {
                return Err(CheckpointError::Corrupt(format!(
                    "block {bname} {rows}×{cols}, expected {} {}×{}",
                    want.name, want.rows, want.cols
                )));
            }
            let width = if wide { 8 } else { 4 };
            let raw = rd.bytes(rows * cols * width)?;
            for (x, chunk) in p.block_mut(i).iter_mut().zip(raw.chunks_exact(width)) {
                *x = if wide {
                    T::c(f64::from_le_bytes(chunk.try_into().unwrap()))
                } else {
                    T::c(f32::from_le_bytes(chunk.try_into().unwrap()) as f64)
                };
            }
        }
        sections.push((name, p));
    }
    Ok(Checkpoint { config, meta, vocab, sections })
}
