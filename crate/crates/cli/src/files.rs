use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use spoke_core::metalang::Vocab;
use spoke_core::model::checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
use spoke_core::model::Transformer;
use spoke_core::Scalar;

use crate::error::{CliError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::InvalidData => CliError::format(path, "not UTF-8 text"),
        _ => CliError::io(path, e),
    })
}

/// Writes through a sibling temp file so a crash never leaves half a file.
pub fn write_atomic(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let file = File::create(&tmp).map_err(|e| CliError::Io { path: tmp.clone(), source: e })?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::Io { path: tmp.clone(), source: e })?;
    drop(w);
    std::fs::rename(&tmp, path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |w| w.write_all(text.as_bytes()))
}

pub fn load_vocab(path: &Path) -> Result<Vocab> {
    Vocab::parse(&read_text(path)?).map_err(|e| CliError::format(path, e))
}

pub fn load_checkpoint<T: Scalar>(path: &Path) -> Result<Checkpoint<T>> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_checkpoint(BufReader::new(f)).map_err(|e| CliError::checkpoint(path, e))
}

pub fn save_checkpoint<T: Scalar>(path: &Path, ck: &Checkpoint<T>) -> Result<()> {
    write_atomic(path, |w| {
        write_checkpoint(w, ck).map_err(|e| match e {
            spoke_core::CheckpointError::Io(e) => e,
            other => std::io::Error::other(other.to_string()),
        })
    })
}

/// Model and vocabulary from a checkpoint.
pub fn load_model<T: Scalar>(path: &Path) -> Result<(Transformer<T>, Vocab)> {
    let ck = load_checkpoint::<T>(path)?;
    let vocab = Vocab::from_tokens(ck.vocab.clone()).map_err(|e| CliError::format(path, e))?;
    let params = ck.section("params").ok_or_else(|| CliError::format(path, "no params section"))?.clone();
    if vocab.len() > ck.config.vocab_size {
        return Err(CliError::Model(format!(
            "{}: vocabulary has {} tokens but the model only {}",
            path.display(),
            vocab.len(),
            ck.config.vocab_size
        )));
    }
    Ok((Transformer::with_params(ck.config, params), vocab))
}

/// `--seed`, overridden by `SPOKE_SEED` when set.
pub fn seed(flag: u64) -> Result<u64> {
    match std::env::var("SPOKE_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("SPOKE_SEED={v} is not an integer"))),
        Err(_) => Ok(flag),
    }
}
