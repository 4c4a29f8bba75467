use std::collections::BTreeSet;

use crate::canon::fnv1a;
use crate::graph::MolGraph;

/// Hashes of all simple paths with 1..=max_len bonds. A path is spelled as
/// element, bond, element, ... and read in whichever direction sorts first.
pub fn path_identifiers(g: &MolGraph, max_len: u8) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut on_path = vec![false; g.atom_count()];
    let mut spelling = Vec::new();
    for start in 0..g.atom_count() {
        spelling.clear();
        spelling.push(g.atom(start).atomic_number());
        on_path[start] = true;
        walk(g, start, max_len as usize, &mut on_path, &mut spelling, &mut out);
        on_path[start] = false;
    }
    out
}

fn walk(g: &MolGraph, at: usize, left: usize, on_path: &mut [bool], spelling: &mut Vec<u8>, out: &mut BTreeSet<u64>) {
    if left == 0 {
        return;
    }
    for &(w, b) in g.neighbors(at) {
        if on_path[w] {
            continue;
        }
        spelling.push(g.bonds()[b].order.code());
        spelling.push(g.atom(w).atomic_number());
        out.insert(hash_path(spelling));
        on_path[w] = true;
        walk(g, w, left - 1, on_path, spelling, out);
        on_path[w] = false;
        spelling.truncate(spelling.len() - 2);
    }
}

fn hash_path(spelling: &[u8]) -> u64 {
    let reversed: Vec<u8> = spelling.iter().rev().copied().collect();
    let canonical = if reversed.as_slice() < spelling { &reversed[..] } else { spelling };
    let mut bytes = Vec::with_capacity(canonical.len() + 1);
    bytes.push(b'P');
    bytes.extend_from_slice(canonical);
    fnv1a(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_smiles;

    fn ids(s: &str) -> BTreeSet<u64> {
        path_identifiers(&parse_smiles(s).unwrap(), 7)
    }

    #[test]
    fn small_chains() {
        assert_eq!(ids("CC").len(), 1);
        assert_eq!(ids("CCC").len(), 2);
        assert!(ids("CC").is_subset(&ids("CCC")));
        assert!(ids("C").is_empty());
    }

    #[test]
    fn direction_does_not_matter() {
        assert_eq!(ids("CCO"), ids("OCC"));
        assert_eq!(ids("CCO").len(), 3);
    }

    #[test]
    fn length_limit() {
        let chain = "CCCCCCCCCCCC";
        assert_eq!(path_identifiers(&parse_smiles(chain).unwrap(), 3).len(), 3);
        assert_eq!(ids(chain).len(), 7);
    }
}
