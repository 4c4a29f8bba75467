use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spoke_chem::{compute, PROPERTY_NAMES};
use spoke_core::head::{head_input, FinetuneConfig, Finetuner, PoolHead};
use spoke_core::metalang::{Molecule, Vocab};
use spoke_core::model::checkpoint::Checkpoint;
use spoke_core::Scalar;

use crate::error::{CliError, Result};
use crate::files::{load_model, read_text, save_checkpoint, seed, write_atomic, write_text};
use crate::{with_dtype, Dtype};

#[derive(clap::Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["data", "smiles"]))]
pub struct FinetuneArgs {
    /// Checkpoint from `spoke train`
    #[arg(long)]
    model: PathBuf,
    /// `SMILES value` lines
    #[arg(long)]
    data: Option<PathBuf>,
    /// SMILES list whose targets are computed from --property
    #[arg(long, requires = "property")]
    smiles: Option<PathBuf>,
    #[arg(long)]
    property: Option<String>,
    /// Fine-tuned checkpoint to write
    #[arg(long)]
    out: PathBuf,
    /// Head JSON to write
    #[arg(long)]
    head: PathBuf,
    #[arg(long, default_value_t = 500)]
    steps: u64,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 16)]
    batch_size: usize,
    #[arg(long, value_enum, default_value_t = Dtype::F32)]
    dtype: Dtype,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
pub struct PredictArgs {
    /// Checkpoint from `spoke finetune`
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    head: PathBuf,
    #[arg(long)]
    smiles: PathBuf,
    /// `SMILES<TAB>value` lines; nan where the molecule cannot be read
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Dtype::F32)]
    dtype: Dtype,
}

#[derive(clap::Args)]
pub struct EmbedArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    smiles: PathBuf,
    /// JSON lines {smiles, tokens, embedding: rows of d_model values}
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Dtype::F32)]
    dtype: Dtype,
}

/// Head weights are stored as f64 whatever the training dtype.
#[derive(Serialize, Deserialize)]
struct HeadFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    property: Option<String>,
    mean: f64,
    std: f64,
    head: PoolHead<f64>,
}

/// Model input for one SMILES, or why there is none.
fn encode(vocab: &Vocab, max_len: usize, smiles: &str) -> std::result::Result<Vec<usize>, String> {
    let mol = Molecule::parse(smiles).map_err(|e| e.to_string())?;
    let ids = head_input(vocab, &mol.tokens).map_err(|e| e.to_string())?;
    if ids.len() > max_len {
        return Err(format!("{} tokens exceed max_len {max_len}", ids.len()));
    }
    Ok(ids)
}

fn first_fields(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>())).filter(|(_, f)| !f.is_empty())
}

pub fn run_finetune(a: FinetuneArgs) -> Result<()> {
    with_dtype!(a.dtype, finetune(&a))
}

fn finetune<T: Scalar>(a: &FinetuneArgs) -> Result<()> {
    if a.batch_size == 0 || a.lr.is_nan() || a.lr <= 0.0 {
        return Err(CliError::Usage("need batch-size > 0 and lr > 0".into()));
    }
    if let Some(p) = &a.property {
        if !PROPERTY_NAMES.contains(&p.as_str()) {
            return Err(CliError::Usage(format!("unknown property {p}")));
        }
    }
    let (model, vocab) = load_model::<T>(&a.model)?;
    let max_len = model.config.max_len;
    let (path, text) = match (&a.data, &a.smiles) {
        (Some(p), _) | (None, Some(p)) => (p, read_text(p)?),
        (None, None) => unreachable!("clap requires one input"),
    };
    let mut set: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut skipped = 0;
    for (line, f) in first_fields(&text) {
        let target = match &a.property {
            Some(name) if a.data.is_none() => {
                spoke_chem::parse_smiles(f[0]).ok().and_then(|g| compute(name, &g).ok()).map(|p| p.value)
            }
            _ => {
                let v = f.get(1).ok_or_else(|| CliError::format(path, format!("line {line}: expected `SMILES value`")))?;
                Some(v.parse::<f64>().map_err(|_| CliError::format(path, format!("line {line}: bad value {v}")))?)
            }
        };
        match (encode(&vocab, max_len, f[0]), target) {
            (Ok(ids), Some(t)) if t.is_finite() => set.push((ids, t)),
            _ => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} molecules that cannot be encoded");
    }
    if set.is_empty() {
        return Err(CliError::format(path, "no usable molecules"));
    }
    let seed = seed(a.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets: Vec<f64> = set.iter().map(|s| s.1).collect();
    let config = FinetuneConfig { lr: a.lr, clip: 1.0, batch_size: a.batch_size };
    let mut ft = Finetuner::new(model, config, &targets, &mut rng).map_err(CliError::train)?;
    let bs = a.batch_size.min(set.len());
    for step in 1..=a.steps {
        let mut idx = rand::seq::index::sample(&mut rng, set.len(), bs).into_vec();
        idx.sort_unstable();
        let batch: Vec<(&[usize], f64)> = idx.iter().map(|&i| (set[i].0.as_slice(), set[i].1)).collect();
        let loss = ft.train_step(&batch).map_err(CliError::train)?;
        if step % 100 == 0 || step == a.steps {
            log::info!("step {step} loss {loss:.4}");
        }
    }
    let ck = Checkpoint {
        config: ft.model.config.clone(),
        meta: [("finetune.steps".to_string(), a.steps.to_string()), ("seed".to_string(), seed.to_string())].into(),
        vocab: vocab.tokens().to_vec(),
        sections: vec![("params".into(), ft.model.params.clone())],
    };
    save_checkpoint(&a.out, &ck)?;
    let head = PoolHead { d: ft.head.d, data: ft.head.data.iter().map(|v| v.f64()).collect() };
    let head = HeadFile { property: a.property.clone(), mean: ft.mean, std: ft.std, head };
    let json = serde_json::to_string(&head).map_err(|e| CliError::Model(e.to_string()))?;
    write_text(&a.head, &(json + "\n"))
}

fn load_head<T: Scalar>(path: &Path, d_model: usize) -> Result<(PoolHead<T>, f64, f64)> {
    let h: HeadFile = serde_json::from_str(&read_text(path)?).map_err(|e| CliError::format(path, e))?;
    if h.head.d != d_model || h.head.data.len() != PoolHead::<f64>::len_for(d_model) {
        return Err(CliError::Model(format!("{}: head does not fit a d_model {d_model} model", path.display())));
    }
    Ok((PoolHead { d: h.head.d, data: h.head.data.iter().map(|&v| T::c(v)).collect() }, h.mean, h.std))
}

pub fn run_predict(a: PredictArgs) -> Result<()> {
    with_dtype!(a.dtype, predict(&a))
}

fn predict<T: Scalar>(a: &PredictArgs) -> Result<()> {
    let (model, vocab) = load_model::<T>(&a.model)?;
    let (head, mean, std) = load_head::<T>(&a.head, model.config.d_model)?;
    let max_len = model.config.max_len;
    let ft = Finetuner::from_parts(model, head, mean, std);
    let text = read_text(&a.smiles)?;
    let mut lines = Vec::new();
    let mut failed = 0;
    for (_, f) in first_fields(&text) {
        let value = match encode(&vocab, max_len, f[0]) {
            Ok(ids) => ft.predict(&[&ids]).map_err(CliError::train)?[0],
            Err(why) => {
                log::warn!("{}: {why}", f[0]);
                failed += 1;
                f64::NAN
            }
        };
        lines.push(format!("{}\t{value}", f[0]));
    }
    write_text(&a.out, &(lines.join("\n") + "\n"))?;
    log::info!("{} predictions, {failed} unreadable", lines.len());
    Ok(())
}

#[derive(Serialize)]
struct EmbedRecord<'a> {
    smiles: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    tokens: Vec<String>,
    embedding: Vec<Vec<f64>>,
}

pub fn run_embed(a: EmbedArgs) -> Result<()> {
    with_dtype!(a.dtype, embed(&a))
}

fn embed<T: Scalar>(a: &EmbedArgs) -> Result<()> {
    let (model, vocab) = load_model::<T>(&a.model)?;
    let d = model.config.d_model;
    let text = read_text(&a.smiles)?;
    let mut records = Vec::new();
    for (_, f) in first_fields(&text) {
        let rec = match encode(&vocab, model.config.max_len, f[0]) {
            Ok(ids) => {
                let h = model.embed(&ids).map_err(|e| CliError::Model(e.to_string()))?;
                let embedding = h.chunks(d).map(|row| row.iter().map(|v| v.f64()).collect()).collect();
                EmbedRecord { smiles: f[0], error: None, tokens: vocab.decode(&ids), embedding }
            }
            Err(why) => EmbedRecord { smiles: f[0], error: Some(why), tokens: Vec::new(), embedding: Vec::new() },
        };
        records.push(rec);
    }
    write_atomic(&a.out, |w| {
        for r in &records {
            serde_json::to_writer(&mut *w, r)?;
            writeln!(w)?;
        }
        Ok(())
    })
}
