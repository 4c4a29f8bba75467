use std::path::{Path, PathBuf};

use serde::Deserialize;
use spoke_chem::parity::{spearman, within, TANIMOTO_RANK_FLOOR};
use spoke_chem::{compute, fingerprint, parse_smiles, perceive_rings, tanimoto, Fingerprint, FingerprintKind, MolGraph};
use std::collections::BTreeMap;

use crate::error::{CliError, Result};
use crate::files::read_text;

#[derive(clap::Args)]
pub struct Args {
    /// Reference descriptors and fingerprints, JSON lines
    #[arg(long, default_value = "data/golden/descriptors.jsonl")]
    golden: PathBuf,
    /// Our own fingerprint bits from an earlier run, JSON lines
    #[arg(long)]
    fingerprints: Option<PathBuf>,
}

#[derive(Deserialize)]
struct GoldenRecord {
    smiles: String,
    properties: BTreeMap<String, f64>,
    fingerprints: BTreeMap<String, String>,
    ring_count: usize,
    aromatic_ring_count: usize,
}

#[derive(Deserialize)]
struct BitsRecord {
    smiles: String,
    kind: String,
    radius: u8,
    hex: String,
}

fn records<R: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<R>> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| CliError::format(path, format!("line {}: {e}", i + 1))))
        .collect()
}

fn graph(path: &Path, smiles: &str) -> Result<MolGraph> {
    parse_smiles(smiles).map_err(|e| CliError::format(path, format!("{smiles}: {e}")))
}

pub fn run(a: Args) -> Result<()> {
    let golden: Vec<GoldenRecord> = records(&a.golden)?;
    if golden.is_empty() {
        return Err(CliError::format(&a.golden, "no records"));
    }
    let graphs = golden.iter().map(|r| graph(&a.golden, &r.smiles)).collect::<Result<Vec<_>>>()?;
    let mut failures = Vec::new();
    let mut checked = 0;
    for (r, g) in golden.iter().zip(&graphs) {
        for (name, &want) in &r.properties {
            let got = compute(name, g).map_err(|e| CliError::format(&a.golden, format!("{}: {e}", r.smiles)))?.value;
            checked += 1;
            if !within(name, got, want) {
                failures.push(format!("{} {name}: got {got}, want {want}", r.smiles));
            }
        }
        let rings = perceive_rings(g).len();
        if rings != r.ring_count {
            failures.push(format!("{} rings: got {rings}, want {}", r.smiles, r.ring_count));
        }
        let aromatic = compute("NAR", g).map_or(f64::NAN, |p| p.value);
        if aromatic != r.aromatic_ring_count as f64 {
            failures.push(format!("{} aromatic rings: got {aromatic}, want {}", r.smiles, r.aromatic_ring_count));
        }
    }
    println!("descriptors: {} molecules, {checked} values, {} mismatches", golden.len(), failures.len());

    for kind in FingerprintKind::ALL {
        let p = kind.default_param();
        let mut ours = Vec::new();
        let mut theirs = Vec::new();
        for (r, g) in golden.iter().zip(&graphs) {
            let Some(hex) = r.fingerprints.get(kind.name()) else { continue };
            ours.push(fingerprint(g, kind, p).map_err(|e| CliError::Model(e.to_string()))?);
            theirs.push(Fingerprint::from_hex(kind, p, hex).map_err(|e| CliError::format(&a.golden, e))?);
        }
        if ours.len() < 3 {
            continue;
        }
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for i in 0..ours.len() {
            for j in i + 1..ours.len() {
                x.push(tanimoto(&ours[i], &ours[j]).map_err(|e| CliError::Model(e.to_string()))?);
                y.push(tanimoto(&theirs[i], &theirs[j]).map_err(|e| CliError::Model(e.to_string()))?);
            }
        }
        let rho = spearman(&x, &y);
        let ok = rho >= TANIMOTO_RANK_FLOOR;
        println!("{}: tanimoto rank correlation {rho:.3} over {} pairs (floor {TANIMOTO_RANK_FLOOR})", kind.name(), x.len());
        if !ok {
            failures.push(format!("{} rank correlation {rho:.3}", kind.name()));
        }
    }

    if let Some(path) = &a.fingerprints {
        let bits: Vec<BitsRecord> = records(path)?;
        let before = failures.len();
        for b in &bits {
            let kind = FingerprintKind::from_name(&b.kind).ok_or_else(|| CliError::format(path, format!("kind {}", b.kind)))?;
            let fp = fingerprint(&graph(path, &b.smiles)?, kind, b.radius).map_err(|e| CliError::format(path, e))?;
            if fp.to_hex() != b.hex {
                failures.push(format!("{} {} bits changed", b.smiles, b.kind));
            }
        }
        println!("fingerprint bits: {} records, {} changed", bits.len(), failures.len() - before);
    }

    if failures.is_empty() {
        println!("all checks passed");
        Ok(())
    } else {
        let shown: Vec<&str> = failures.iter().take(10).map(String::as_str).collect();
        Err(CliError::Parity(format!("{} failures\n{}", failures.len(), shown.join("\n"))))
    }
}
