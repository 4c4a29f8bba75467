use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use spoke_chem::{canonical_key, compute_all, lipinski_pass, parse_smiles};

use super::{fit_degree_one, pct_difference, pearsonr};

/// One model output with the property conditions it was generated under.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneratedOutput {
    pub text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub conditions: BTreeMap<String, f64>,
    #[serde(default)]
    pub truncated: bool,
}

impl GeneratedOutput {
    pub fn plain(text: &str) -> Self {
        GeneratedOutput { text: text.to_string(), ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraints {
    /// Success means passing all five Lipinski rules.
    Lipinski,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub raw: String,
    /// "ok" or the parse error.
    pub status: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub properties: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationReport {
    pub n_total: usize,
    pub n_valid: usize,
    pub n_unique: usize,
    /// Present only when constraints were given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_success: Option<usize>,
    /// n_valid / n_total.
    pub valid_ratio: f64,
    /// n_unique / n_valid, 0 when nothing is valid.
    pub unique_ratio: f64,
    /// n_success / n_total.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success_ratio: Option<f64>,
    pub records: Vec<OutputRecord>,
}

/// Requested vs achieved values of one property over valid outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub property: String,
    /// (condition, achieved)
    pub pairs: Vec<(f64, f64)>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub pearsonr: Option<f64>,
    pub pct_difference: Option<f64>,
    /// Why any of the statistics above is missing.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConditionReport {
    fn from_pairs(property: &str, pairs: Vec<(f64, f64)>) -> Self {
        let mut notes = Vec::new();
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        let (slope, intercept) = match fit_degree_one(&pairs) {
            Ok((s, b)) => (Some(s), Some(b)),
            Err(e) => {
                notes.push(format!("fit: {e}"));
                (None, None)
            }
        };
        let r = pearsonr(&xs, &ys).map_err(|e| notes.push(format!("pearsonr: {e}"))).ok();
        let pct = pct_difference(&ys, &xs).map_err(|e| notes.push(format!("pct_difference: {e}"))).ok();
        ConditionReport { property: property.to_string(), pairs, slope, intercept, pearsonr: r, pct_difference: pct, notes }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub generation: GenerationReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<ConditionReport>,
}

/// Parse, deduplicate and score generated molecules. Malformed outputs are
/// counted as invalid, never as errors.
pub fn eval_generation(outputs: &[GeneratedOutput], constraints: Option<Constraints>) -> EvalReport {
    let mut records = Vec::with_capacity(outputs.len());
    let mut keys = BTreeSet::new();
    let (mut n_valid, mut n_success) = (0, 0);
    let mut pairs: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for out in outputs {
        let g = match parse_smiles(out.text.trim()) {
            Ok(g) => g,
            Err(e) => {
                records.push(OutputRecord { raw: out.text.clone(), status: e.to_string(), properties: BTreeMap::new() });
                continue;
            }
        };
        let properties: BTreeMap<String, f64> = match compute_all(&g) {
            Ok(p) => p.into_iter().map(|p| (p.name.to_string(), p.value)).collect(),
            Err(e) => {
                records.push(OutputRecord { raw: out.text.clone(), status: e.to_string(), properties: BTreeMap::new() });
                continue;
            }
        };
        n_valid += 1;
        if keys.insert(canonical_key(&g)) && constraints == Some(Constraints::Lipinski) && lipinski_pass(&g) {
            n_success += 1;
        }
        for (name, &want) in &out.conditions {
            if let Some(&got) = properties.get(name) {
                pairs.entry(name.clone()).or_default().push((want, got));
            }
        }
        records.push(OutputRecord { raw: out.text.clone(), status: "ok".into(), properties });
    }
    let n_total = outputs.len();
    let n_unique = keys.len();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let n_success = constraints.map(|_| n_success);
    let generation = GenerationReport {
        n_total,
        n_valid,
        n_unique,
        n_success,
        valid_ratio: ratio(n_valid, n_total),
        unique_ratio: ratio(n_unique, n_valid),
        success_ratio: n_success.map(|s| ratio(s, n_total)),
        records,
    };
    let conditions = pairs.into_iter().map(|(name, p)| ConditionReport::from_pairs(&name, p)).collect();
    EvalReport { generation, conditions }
}

/// `property,x,y` rows, one per valid conditioned output.
pub fn plot_csv(report: &EvalReport) -> String {
    let mut s = String::from("property,x,y\n");
    for c in &report.conditions {
        for (x, y) in &c.pairs {
            s.push_str(&format!("{},{x},{y}\n", c.property));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_outputs() {
        let outs: Vec<GeneratedOutput> = ["CCO", "OCC", "xyz"].iter().map(|s| GeneratedOutput::plain(s)).collect();
        let r = eval_generation(&outs, None).generation;
        assert_eq!((r.n_total, r.n_valid, r.n_unique, r.n_success), (3, 2, 1, None));
        assert!(r.success_ratio.is_none());
        assert_ne!(r.records[2].status, "ok");
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("success_ratio").is_none());
        let with = eval_generation(&outs, Some(Constraints::Lipinski)).generation;
        assert_eq!(with.n_success, Some(1));
    }

    #[test]
    fn condition_achieved_exactly() {
        let mut out = GeneratedOutput::plain("CCO");
        out.conditions.insert("MolWt".into(), 46.069);
        let r = eval_generation(&[out], None);
        let c = &r.conditions[0];
        assert!(c.pct_difference.unwrap() < 1e-4);
        assert!(c.slope.is_none() && c.pearsonr.is_none());
        assert_eq!(c.notes.len(), 2);
    }
}
