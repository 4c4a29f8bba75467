use std::path::{Path, PathBuf};

use spoke_core::metrics::{eval_generation, plot_csv, Constraints, GeneratedOutput};

use crate::error::{CliError, Result};
use crate::files::{read_text, write_text};

#[derive(clap::Args)]
pub struct Args {
    /// JSON lines from `spoke generate`, or plain text with one output per line
    #[arg(long)]
    outputs: PathBuf,
    /// Count unique valid outputs passing all five Lipinski rules
    #[arg(long)]
    lipinski: bool,
    /// Report JSON to write
    #[arg(long)]
    report: PathBuf,
    /// property,x,y rows of condition vs achieved values
    #[arg(long)]
    plot: Option<PathBuf>,
}

/// Lines starting with `{` are JSON records; anything else is raw output
/// text. Blank lines are skipped.
pub fn parse_outputs(path: &Path, text: &str) -> Result<Vec<GeneratedOutput>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            if l.trim_start().starts_with('{') {
                serde_json::from_str(l).map_err(|e| CliError::format(path, format!("line {}: {e}", i + 1)))
            } else {
                Ok(GeneratedOutput::plain(l.trim()))
            }
        })
        .collect()
}

pub fn run(a: Args) -> Result<()> {
    let outputs = parse_outputs(&a.outputs, &read_text(&a.outputs)?)?;
    let report = eval_generation(&outputs, a.lipinski.then_some(Constraints::Lipinski));
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Model(e.to_string()))?;
    write_text(&a.report, &(json + "\n"))?;
    if let Some(p) = &a.plot {
        write_text(p, &plot_csv(&report))?;
    }
    let g = &report.generation;
    print!("total {} valid {} unique {}", g.n_total, g.n_valid, g.n_unique);
    if let Some(s) = g.n_success {
        print!(" success {s}");
    }
    println!();
    println!("valid ratio {:.4} unique ratio {:.4}", g.valid_ratio, g.unique_ratio);
    for c in &report.conditions {
        let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        println!(
            "{}: {} points, slope {}, pearsonr {}, %difference {}",
            c.property,
            c.pairs.len(),
            show(c.slope),
            show(c.pearsonr),
            show(c.pct_difference)
        );
    }
    Ok(())
}
