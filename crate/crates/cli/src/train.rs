use std::fs::OpenOptions;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spoke_core::metalang::{read_corpus, Vocab};
use spoke_core::model::{parse_kv, ModelConfig, Transformer};
use spoke_core::train::{Example, TrainConfig, Trainer};
use spoke_core::Scalar;

use crate::error::{CliError, Result};
use crate::files::{load_checkpoint, load_vocab, read_text, save_checkpoint, seed};
use crate::{with_dtype, Dtype};

#[derive(clap::Args)]
pub struct Args {
    /// Training pairs from `spoke corpus`
    #[arg(long)]
    corpus: PathBuf,
    /// [default: <corpus>.vocab]
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Checkpoint to write
    #[arg(long)]
    out: PathBuf,
    /// tiny, small or full
    #[arg(long, default_value = "small")]
    preset: String,
    /// key=value file of model and training settings
    #[arg(long)]
    config: Option<PathBuf>,
    /// One key=value setting; applied after --config
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Loss log, JSON lines
    #[arg(long)]
    log: Option<PathBuf>,
    /// Continue from a checkpoint written by this command
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Write the checkpoint every this many steps
    #[arg(long, default_value_t = 1000)]
    save_every: u64,
    #[arg(long, value_enum, default_value_t = Dtype::F32)]
    dtype: Dtype,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Settings from `--config` then `--set`, in order.
fn settings(a: &Args) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    if let Some(p) = &a.config {
        let kv = parse_kv(&read_text(p)?).map_err(|e| CliError::format(p, e))?;
        out.extend(kv);
    }
    for s in &a.set {
        let (k, v) = s.split_once('=').ok_or_else(|| CliError::Usage(format!("--set {s}: expected key=value")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Apply settings; model keys are refused when `model` is None (resuming).
fn apply(settings: &[(String, String)], mut model: Option<&mut ModelConfig>, train: &mut TrainConfig) -> Result<()> {
    for (k, v) in settings {
        if let Some(m) = model.as_deref_mut() {
            if m.set(k, v).map_err(|e| CliError::Usage(e.to_string()))? {
                continue;
            }
        } else if ModelConfig::tiny().set(k, v).unwrap_or(false) {
            return Err(CliError::Usage(format!("{k}: model shape is fixed by the checkpoint being resumed")));
        }
        if !train.set(k, v).map_err(CliError::train)? {
            return Err(CliError::Usage(format!("unknown setting `{k}`")));
        }
    }
    Ok(())
}

pub fn run(a: Args) -> Result<()> {
    with_dtype!(a.dtype, run_typed(&a))
}

fn run_typed<T: Scalar>(a: &Args) -> Result<()> {
    let vocab_path = a.vocab.clone().unwrap_or_else(|| {
        let mut p = a.corpus.clone().into_os_string();
        p.push(".vocab");
        p.into()
    });
    let vocab = load_vocab(&vocab_path)?;
    let settings = settings(a)?;
    let seed = seed(a.seed)?;
    let mut trainer = match &a.resume {
        Some(p) => resume::<T>(p, &vocab, &settings)?,
        None => fresh::<T>(&a.preset, &vocab, &settings, seed)?,
    };
    let pairs = read_corpus(&vocab, &read_text(&a.corpus)?).map_err(|e| CliError::format(&a.corpus, e))?;
    let max_len = trainer.model.config.max_len;
    let total = pairs.len();
    let data: Vec<Example> = pairs.iter().filter(|p| p.stream_len() <= max_len).map(Example::from_pair).collect();
    if data.len() < total {
        log::warn!("skipped {} pairs longer than max_len {max_len}", total - data.len());
    }
    if data.is_empty() {
        return Err(CliError::format(&a.corpus, "no usable training pairs"));
    }
    trainer.snapshot_dir = Some(a.out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf());
    let mut log = match &a.log {
        Some(p) => {
            let f = OpenOptions::new()
                .create(true)
                .write(true)
                .append(a.resume.is_some())
                .truncate(a.resume.is_none())
                .open(p)
                .map_err(|e| CliError::io(p, e))?;
            Some((p, BufWriter::new(f)))
        }
        None => None,
    };
    log::info!(
        "{} params ({}), {} pairs, steps {}..{}",
        trainer.model.config.param_count(),
        T::NAME,
        data.len(),
        trainer.step,
        trainer.config.steps
    );
    let steps = trainer.config.steps;
    while trainer.step < steps {
        let until = (trainer.step + a.save_every.max(1)).min(steps);
        let w = log.as_mut().map(|(_, w)| w as &mut dyn Write);
        let stats = trainer.run(&data, until, w).map_err(CliError::train)?;
        if let Some((p, w)) = log.as_mut() {
            w.flush().map_err(|e| CliError::io(p, e))?;
        }
        save_checkpoint(&a.out, &trainer.checkpoint())?;
        if let Some(s) = stats.last() {
            log::info!("step {} loss {:.4} ({:.0} tokens/s)", s.step, s.loss, s.tokens_per_sec);
        }
    }
    if !a.out.exists() {
        // nothing left to run, e.g. resuming a finished job
        save_checkpoint(&a.out, &trainer.checkpoint())?;
    }
    Ok(())
}

fn fresh<T: Scalar>(preset: &str, vocab: &Vocab, settings: &[(String, String)], seed: u64) -> Result<Trainer<T>> {
    let mut config = ModelConfig::preset(preset).ok_or_else(|| CliError::Usage(format!("unknown preset `{preset}`")))?;
    // the embedding table is sized to the vocabulary unless a setting says otherwise
    config.vocab_size = vocab.len();
    let mut train = TrainConfig::default();
    apply(settings, Some(&mut config), &mut train)?;
    if config.vocab_size < vocab.len() {
        return Err(CliError::Model(format!("vocab_size {} < {} tokens in the vocabulary", config.vocab_size, vocab.len())));
    }
    config.validate().map_err(|e| CliError::Model(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = Transformer::new(config, &mut rng).map_err(|e| CliError::Model(e.to_string()))?;
    Trainer::new(model, train, vocab.tokens().to_vec(), seed).map_err(CliError::train)
}

fn resume<T: Scalar>(path: &Path, vocab: &Vocab, settings: &[(String, String)]) -> Result<Trainer<T>> {
    let mut trainer = Trainer::from_checkpoint(load_checkpoint::<T>(path)?).map_err(CliError::train)?;
    if trainer.vocab != vocab.tokens() {
        return Err(CliError::Model(format!("{}: vocabulary differs from the corpus vocabulary", path.display())));
    }
    apply(settings, None, &mut trainer.config)?;
    trainer.config.validate().map_err(CliError::train)?;
    Ok(trainer)
}
