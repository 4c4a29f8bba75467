use std::path::PathBuf;

use spoke_core::conformer::{decode_conformer, encode_conformer, read_internal, read_xyz, write_internal, write_xyz};

use crate::error::{CliError, Result};
use crate::files::{read_text, write_text};

#[derive(clap::Args)]
pub struct EncodeArgs {
    /// `symbol x y z` lines, optionally with the XYZ count and comment lines
    #[arg(long)]
    xyz: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Full precision instead of the quantized text the model sees
    #[arg(long)]
    exact: bool,
}

#[derive(clap::Args)]
pub struct DecodeArgs {
    /// Internal-coordinate file from conf-encode
    #[arg(long)]
    internal: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

pub fn encode(a: EncodeArgs) -> Result<()> {
    let (symbols, c) = read_xyz::<f64>(&read_text(&a.xyz)?).map_err(|e| CliError::format(&a.xyz, e))?;
    let ic = encode_conformer(&c).map_err(|e| CliError::format(&a.xyz, e))?;
    let symbols: Vec<&str> = symbols.iter().map(String::as_str).collect();
    write_text(&a.out, &write_internal(&symbols, &ic, a.exact))
}

pub fn decode(a: DecodeArgs) -> Result<()> {
    let (symbols, ic) = read_internal::<f64>(&read_text(&a.internal)?).map_err(|e| CliError::format(&a.internal, e))?;
    let c = decode_conformer(&ic).map_err(|e| CliError::format(&a.internal, e))?;
    let symbols: Vec<&str> = symbols.iter().map(String::as_str).collect();
    write_text(&a.out, &write_xyz(&symbols, &c))
}
