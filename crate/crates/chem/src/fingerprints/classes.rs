use std::sync::OnceLock;

use crate::descriptors::{ExpandedGraph, Pattern};
use crate::graph::MolGraph;

/// Bit order of the FCFP class byte (bit 0 first).
pub const FEATURE_CLASS_NAMES: [&str; 6] = ["donor", "acceptor", "negative", "positive", "aromatic", "halogen"];

struct Rule {
    class: usize,
    value: bool,
    pattern: Pattern,
}

fn rules() -> &'static [Rule] {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    RULES.get_or_init(|| {
        include_str!("classes.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let f: Vec<&str> = l.split_whitespace().collect();
                let class = FEATURE_CLASS_NAMES
                    .iter()
                    .position(|&c| c == f[0])
                    .unwrap_or_else(|| panic!("unknown class in rule `{l}`"));
                let pattern = Pattern::parse(f[2]).unwrap_or_else(|e| panic!("rule `{l}`: {e}"));
                Rule { class, value: f[1] == "1", pattern }
            })
            .collect()
    })
}

/// Six-bit functional class of every atom.
pub fn feature_classes(g: &MolGraph) -> Vec<u8> {
    let eg = ExpandedGraph::new(g);
    (0..g.atom_count())
        .map(|i| {
            let mut decided = 0u8;
            let mut bits = 0u8;
            for r in rules() {
                let mask = 1 << r.class;
                if decided & mask == 0 && r.pattern.matches_at(&eg, i) {
                    decided |= mask;
                    if r.value {
                        bits |= mask;
                    }
                }
            }
            bits
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_smiles;

    fn classes(s: &str) -> Vec<u8> {
        feature_classes(&parse_smiles(s).unwrap())
    }

    const DONOR: u8 = 1;
    const ACCEPTOR: u8 = 2;
    const NEGATIVE: u8 = 4;
    const POSITIVE: u8 = 8;
    const AROMATIC: u8 = 16;
    const HALOGEN: u8 = 32;

    #[test]
    fn rule_file_parses() {
        assert!(rules().len() > 10);
    }

    #[test]
    fn ethanol() {
        assert_eq!(classes("CCO"), vec![0, 0, DONOR | ACCEPTOR]);
    }

    #[test]
    fn acid_and_amines() {
        assert_eq!(classes("CC(=O)O"), vec![0, 0, ACCEPTOR | NEGATIVE, DONOR | ACCEPTOR | NEGATIVE]);
        assert_eq!(classes("CCN")[2], DONOR | ACCEPTOR | POSITIVE);
        // amide N is neither
        assert_eq!(classes("CC(=O)N")[3], DONOR);
        assert_eq!(classes("[NH4+]")[0], DONOR | POSITIVE);
        assert_eq!(classes("C[N+](=O)[O-]")[1], 0);
    }

    #[test]
    fn rings_and_halogens() {
        let c = classes("c1ccncc1");
        assert_eq!(c[0], AROMATIC);
        assert_eq!(c[3], AROMATIC | ACCEPTOR);
        assert_eq!(classes("c1cc[nH]c1")[3], AROMATIC | DONOR);
        assert_eq!(classes("CCl")[1], HALOGEN);
    }
}
