use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{quantize_internal, Conformer, InternalConformer, Record};
use crate::error::ConformerError;
use crate::Scalar;

/// One line of a conformer JSON-lines file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConformerRecord {
    pub smiles: String,
    pub coords: Vec<[f64; 3]>,
}

impl ConformerRecord {
    pub fn conformer<T: Scalar>(&self) -> Conformer<T> {
        Conformer::new(self.coords.iter().map(|p| [T::c(p[0]), T::c(p[1]), T::c(p[2])]).collect())
    }
}

pub fn read_conformer_jsonl(text: &str) -> Result<Vec<ConformerRecord>, ConformerError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ConformerError::Format { line: i + 1, reason: e.to_string() })
        })
        .collect()
}

/// XYZ-style text: one `symbol x y z` line per atom, no header.
pub fn write_xyz<T: Scalar>(symbols: &[&str], c: &Conformer<T>) -> String {
    let mut out = String::new();
    for (s, p) in symbols.iter().zip(&c.coords) {
        let _ = writeln!(out, "{s} {:.6} {:.6} {:.6}", p[0].f64(), p[1].f64(), p[2].f64());
    }
    out
}

/// Parses XYZ-style text. A leading atom-count line and a comment line are
/// skipped when present.
pub fn read_xyz<T: Scalar>(text: &str) -> Result<(Vec<String>, Conformer<T>), ConformerError> {
    let mut lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()).collect();
    if lines.first().is_some_and(|(_, l)| l.parse::<usize>().is_ok()) {
        lines.remove(0);
        if lines.first().is_some_and(|(_, l)| l.split_whitespace().count() != 4) {
            lines.remove(0);
        }
    }
    let mut symbols = Vec::new();
    let mut coords = Vec::new();
    for (n, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        let bad = |reason: &str| ConformerError::Format { line: n, reason: reason.to_string() };
        if f.len() != 4 {
            return Err(bad("expected `symbol x y z`"));
        }
        let mut p = [T::zero(); 3];
        for k in 0..3 {
            let v: f64 = f[k + 1].parse().map_err(|_| bad("bad coordinate"))?;
            if !v.is_finite() {
                return Err(bad("non-finite coordinate"));
            }
            p[k] = T::c(v);
        }
        symbols.push(f[0].to_string());
        coords.push(p);
    }
    Ok((symbols, Conformer::new(coords)))
}

/// Internal-coordinate text: one `symbol value…` line per atom with the
/// record's values in written order, and a trailing `flat` where the
/// dihedral was undefined. `exact` keeps full precision instead of the
/// quantized spelling.
pub fn write_internal<T: Scalar>(symbols: &[&str], ic: &InternalConformer<T>, exact: bool) -> String {
    let text = quantize_internal(ic);
    let mut out = String::new();
    for (i, (s, r)) in symbols.iter().zip(&ic.records).enumerate() {
        out.push_str(s);
        if exact {
            r.values().iter().for_each(|v| {
                let _ = write!(out, " {}", v.f64());
            });
        } else {
            text[i].iter().for_each(|v| {
                let _ = write!(out, " {v}");
            });
        }
        if ic.degenerate.get(i).copied().unwrap_or(false) {
            out.push_str(" flat");
        }
        out.push('\n');
    }
    out
}

pub fn read_internal<T: Scalar>(text: &str) -> Result<(Vec<String>, InternalConformer<T>), ConformerError> {
    let mut symbols = Vec::new();
    let mut records = Vec::new();
    let mut degenerate = Vec::new();
    for (n, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()) {
        let bad = |reason: &str| ConformerError::Format { line: n, reason: reason.to_string() };
        let mut f: Vec<&str> = line.split_whitespace().collect();
        let flat = f.last() == Some(&"flat");
        if flat {
            f.pop();
        }
        let values = f[1..]
            .iter()
            .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()).map(T::c))
            .collect::<Option<Vec<T>>>()
            .ok_or_else(|| bad("bad number"))?;
        let r = Record::from_values(records.len(), &values).ok_or_else(|| bad("wrong number of values for this atom"))?;
        symbols.push(f[0].to_string());
        records.push(r);
        degenerate.push(flat);
    }
    Ok((symbols, InternalConformer { records, degenerate }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xyz_roundtrip_and_header() {
        let c = Conformer::new(vec![[0.0, 1.5, -2.25], [1.0, 0.0, 0.0]]);
        let text = write_xyz(&["C", "O"], &c);
        let (s, back) = read_xyz::<f64>(&text).unwrap();
        assert_eq!(s, vec!["C", "O"]);
        assert_eq!(back, c);
        let (_, with_header) = read_xyz::<f64>(&format!("2\nethanol fragment\n{text}")).unwrap();
        assert_eq!(with_header, c);
        assert!(read_xyz::<f64>("C 1 2").is_err());
    }

    #[test]
    fn jsonl_records() {
        let recs = read_conformer_jsonl("{\"smiles\":\"CO\",\"coords\":[[0,0,0],[1.4,0,0]]}\n").unwrap();
        assert_eq!(recs[0].conformer::<f32>().len(), 2);
        assert!(read_conformer_jsonl("{").is_err());
    }

    #[test]
    fn internal_text() {
        let ic = InternalConformer {
            records: vec![Record::First, Record::Second { d: 1.5 }, Record::Third { d: 1.25, alpha: 100.0 }, Record::Full {
                alpha: 120.0,
                beta: 0.0,
                d: 1.0 / 3.0,
            }],
            degenerate: vec![false, false, false, true],
        };
        let exact = write_internal(&["C", "C", "O", "N"], &ic, true);
        let (s, back) = read_internal::<f64>(&exact).unwrap();
        assert_eq!((s.len(), back), (4, ic.clone()));
        let rounded = write_internal(&["C", "C", "O", "N"], &ic, false);
        assert_eq!(rounded.lines().last().unwrap(), "N 120.0 0.0 0.333 flat");
        assert!(read_internal::<f64>("C 1.0").is_err());
    }
}
