use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spoke_chem::{PropertyValue, PROPERTY_NAMES};
use spoke_core::decode::{generate, DecodeMode, DecodeParams};
use spoke_core::metalang::vocab::EOS;
use spoke_core::metalang::{canonical_value, generation_prompt, TaskSpec};
use spoke_core::metrics::GeneratedOutput;
use spoke_core::Scalar;

use crate::error::{CliError, Result};
use crate::files::{load_model, seed, write_atomic};
use crate::{with_dtype, Dtype};

#[derive(clap::Args)]
pub struct Args {
    /// Checkpoint from `spoke train`
    #[arg(long)]
    model: PathBuf,
    /// Outputs, JSON lines {text, conditions, truncated}
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// NAME=VALUE, or NAME=LO..HI to draw a value per sample
    #[arg(long = "condition", value_name = "SPEC")]
    conditions: Vec<String>,
    /// Task tag of the prompt
    #[arg(long, default_value = "prop_seq_subj")]
    task: String,
    /// greedy, top-k or temperature
    #[arg(long, default_value = "greedy")]
    mode: DecodeMode,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    temperature: f64,
    #[arg(long, default_value_t = 1.0)]
    repetition_penalty: f64,
    #[arg(long, default_value_t = 128)]
    max_new_tokens: usize,
    #[arg(long, value_enum, default_value_t = Dtype::F32)]
    dtype: Dtype,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
enum Condition {
    Fixed(&'static str, f64),
    Range(&'static str, f64, f64),
}

fn parse_condition(spec: &str) -> Result<Condition> {
    let bad = |why: &str| CliError::Usage(format!("--condition {spec}: {why}"));
    let (name, value) = spec.split_once('=').ok_or_else(|| bad("expected NAME=VALUE or NAME=LO..HI"))?;
    let name = PROPERTY_NAMES.iter().find(|n| **n == name.trim()).ok_or_else(|| bad("unknown property"))?;
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad("not a number"));
    match value.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(bad("empty range"));
            }
            Ok(Condition::Range(name, lo, hi))
        }
        None => Ok(Condition::Fixed(name, num(value)?)),
    }
}

/// The value as the model will read it, so the recorded condition is what
/// was actually asked for.
fn quantized(v: f64) -> Result<f64> {
    let text = canonical_value(v).map_err(|e| CliError::Usage(e.to_string()))?;
    text.parse().map_err(|_| CliError::Usage(format!("value {v} has no text form")))
}

pub fn run(a: Args) -> Result<()> {
    with_dtype!(a.dtype, run_typed(&a))
}

fn run_typed<T: Scalar>(a: &Args) -> Result<()> {
    let conditions = a.conditions.iter().map(|s| parse_condition(s)).collect::<Result<Vec<_>>>()?;
    let tag = if a.task.starts_with('<') { a.task.clone() } else { format!("<{}>", a.task) };
    let task = TaskSpec::from_tag(&tag).ok_or_else(|| CliError::Usage(format!("unknown task {tag}")))?;
    let params = DecodeParams {
        mode: a.mode,
        k: a.k,
        temperature: a.temperature,
        repetition_penalty: a.repetition_penalty,
        max_new_tokens: a.max_new_tokens,
    };
    params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let (model, vocab) = load_model::<T>(&a.model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed(a.seed)?);
    let mut outputs = Vec::with_capacity(a.n);
    for _ in 0..a.n {
        let mut props = Vec::new();
        for c in &conditions {
            let (name, v) = match *c {
                Condition::Fixed(n, v) => (n, v),
                Condition::Range(n, lo, hi) => (n, if lo == hi { lo } else { rng.random_range(lo..=hi) }),
            };
            props.push(PropertyValue { name, value: quantized(v)? });
        }
        let prompt = generation_prompt(&vocab, task, &props).map_err(|e| CliError::Usage(e.to_string()))?;
        let g = generate(&model, &prompt, EOS, &params, &mut rng).map_err(|e| CliError::Model(e.to_string()))?;
        outputs.push(GeneratedOutput {
            text: vocab.decode(&g.tokens).concat(),
            conditions: props.iter().map(|p| (p.name.to_string(), p.value)).collect::<BTreeMap<_, _>>(),
            truncated: g.truncated,
        });
    }
    write_atomic(&a.out, |w| {
        for o in &outputs {
            serde_json::to_writer(&mut *w, o)?;
            writeln!(w)?;
        }
        Ok(())
    })?;
    let truncated = outputs.iter().filter(|o| o.truncated).count();
    log::info!("{} outputs ({truncated} truncated) in {}", outputs.len(), a.out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_specs() {
        assert_eq!(parse_condition("MolWt=120.5").unwrap(), Condition::Fixed("MolWt", 120.5));
        assert_eq!(parse_condition("TPSA=10..40").unwrap(), Condition::Range("TPSA", 10.0, 40.0));
        assert!(parse_condition("Nope=1").is_err());
        assert!(parse_condition("MolWt=4..1").is_err());
        assert!(parse_condition("MolWt").is_err());
        assert!(parse_condition("MolWt=nan").is_err());
    }

    #[test]
    fn quantized_values_round_trip() {
        let q = quantized(123.456789).unwrap();
        assert_eq!(quantized(q).unwrap(), q);
    }
}
