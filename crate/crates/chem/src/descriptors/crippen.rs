//! Atom-contribution logP and molar refractivity.
//!
//! Every atom, hydrogens included, gets the type of the first table row
//! whose pattern matches with that atom as the root.

use std::sync::OnceLock;

use crate::descriptors::pattern::{ExpandedGraph, Pattern};
use crate::graph::MolGraph;

pub struct CrippenType {
    pub id: String,
    pub pattern: Pattern,
    pub logp: f64,
    pub mr: f64,
}

const TABLE: &str = include_str!("crippen.txt");

pub fn crippen_table() -> &'static [CrippenType] {
    static PARSED: OnceLock<Vec<CrippenType>> = OnceLock::new();
    PARSED.get_or_init(|| {
        TABLE
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| {
                let cols: Vec<&str> = l.split('\t').collect();
                let num = |k: usize| cols.get(k).and_then(|s| s.trim().parse().ok()).unwrap_or(0.0);
                CrippenType {
                    id: cols[0].to_string(),
                    pattern: Pattern::parse(cols[1]).unwrap_or_else(|e| panic!("bundled table: {e}")),
                    logp: num(2),
                    mr: num(3),
                }
            })
            .collect()
    })
}

/// Per-atom `(type index, logP, MR)` for the hydrogen-expanded graph.
pub fn crippen_contribs(g: &MolGraph) -> Vec<Option<(usize, f64, f64)>> {
    let table = crippen_table();
    let x = ExpandedGraph::new(g);
    (0..x.atoms.len())
        .map(|i| {
            table
                .iter()
                .position(|t| t.pattern.matches_at(&x, i))
                .map(|k| (k, table[k].logp, table[k].mr))
        })
        .collect()
}

/// `(logP, MR)` summed over all atoms.
pub fn crippen(g: &MolGraph) -> (f64, f64) {
    crippen_contribs(g)
        .into_iter()
        .flatten()
        .fold((0.0, 0.0), |(lp, mr), (_, a, b)| (lp + a, mr + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_smiles;

    #[test]
    fn every_row_parses() {
        assert!(crippen_table().len() > 100);
    }

    #[test]
    fn methane() {
        let (lp, mr) = crippen(&parse_smiles("C").unwrap());
        // C1 carbon plus four H1 hydrogens
        assert!((lp - (0.1441 + 4.0 * 0.123)).abs() < 1e-9);
        assert!((mr - (2.503 + 4.0 * 1.057)).abs() < 1e-9);
    }
}
