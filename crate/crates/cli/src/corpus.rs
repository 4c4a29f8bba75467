use std::path::PathBuf;

use spoke_core::metalang::{load_conformers, load_smiles, vocab_for, write_corpus, CorpusStream, SampleOptions, TaskMixture};

use crate::error::{CliError, Result};
use crate::files::{read_text, seed, write_atomic, write_text};

#[derive(clap::Args)]
pub struct Args {
    /// SMILES list, first field per line
    #[arg(long)]
    smiles: PathBuf,
    /// Conformer JSON lines {smiles, coords}
    #[arg(long)]
    conformers: Option<PathBuf>,
    /// Training pairs, JSON lines
    #[arg(long)]
    out: PathBuf,
    /// Vocabulary to write [default: <out>.vocab]
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    /// `uniform` or a comma list of tag=weight
    #[arg(long, default_value = "uniform")]
    mixture: String,
    /// Fewest property triples per property sample
    #[arg(long, default_value_t = 1)]
    k_min: usize,
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    #[arg(long, default_value_t = 0.15)]
    mask_rate: f64,
    /// Longest source + BOS + target stream
    #[arg(long, default_value_t = 256)]
    max_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn run(a: Args) -> Result<()> {
    let mixture = TaskMixture::parse(&a.mixture).map_err(|e| CliError::Usage(e.to_string()))?;
    if a.k_min > a.k_max || !(0.0..=1.0).contains(&a.mask_rate) {
        return Err(CliError::Usage("need k-min <= k-max and mask-rate in [0, 1]".into()));
    }
    let (molecules, bad) = load_smiles(&read_text(&a.smiles)?);
    if bad > 0 {
        log::warn!("{}: skipped {bad} unparseable lines", a.smiles.display());
    }
    let conformers = match &a.conformers {
        Some(p) => {
            let (c, bad) = load_conformers(&read_text(p)?).map_err(|e| CliError::format(p, e))?;
            if bad > 0 {
                log::warn!("{}: skipped {bad} records", p.display());
            }
            c
        }
        None => Vec::new(),
    };
    if molecules.is_empty() && conformers.is_empty() {
        return Err(CliError::format(&a.smiles, "no usable molecules"));
    }
    let vocab = vocab_for(molecules.iter().chain(&conformers));
    let opts = SampleOptions { k_min: a.k_min, k_max: a.k_max, mask_rate: a.mask_rate, max_len: a.max_len };
    let mut stream = CorpusStream::new(&vocab, &molecules, &conformers, &mixture, opts, seed(a.seed)?)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut n = 0;
    write_atomic(&a.out, |w| {
        n = write_corpus(&vocab, stream.by_ref().take(a.count), w)?;
        Ok(())
    })?;
    if n < a.count {
        log::warn!("stream ran dry after {n} pairs");
    }
    let vocab_path = a.vocab.unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".vocab");
        p.into()
    });
    write_text(&vocab_path, &vocab.to_text())?;
    log::info!(
        "{n} pairs from {} molecules ({} skipped draws), {} tokens in {}",
        molecules.len() + conformers.len(),
        stream.skipped,
        vocab.len(),
        vocab_path.display()
    );
    Ok(())
}
