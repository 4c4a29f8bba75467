use std::collections::{BTreeSet, HashSet};

use crate::canon::{fnv1a, fnv1a_extend};
use crate::graph::MolGraph;

use super::classes::feature_classes;

fn ecfp_seed(g: &MolGraph, i: usize) -> u64 {
    let a = g.atom(i);
    fnv1a(&[
        b'E',
        a.atomic_number(),
        a.degree,
        a.total_h(),
        a.formal_charge as u8,
        a.aromatic as u8,
        g.is_ring_atom(i) as u8,
    ])
}

/// ECFP identifiers for environments of radius 0..=radius.
pub fn ecfp_identifiers(g: &MolGraph, radius: u8) -> BTreeSet<u64> {
    let seeds = (0..g.atom_count()).map(|i| ecfp_seed(g, i)).collect();
    grow(g, seeds, radius)
}

/// FCFP identifiers: seeds are the six functional-class bits.
pub fn fcfp_identifiers(g: &MolGraph, radius: u8) -> BTreeSet<u64> {
    let seeds = feature_classes(g).into_iter().map(|c| fnv1a(&[b'F', c])).collect();
    grow(g, seeds, radius)
}

/// Iterated neighbour hashing. An environment whose bond set was already
/// produced (earlier round, or another atom this round with a smaller
/// identifier) is dropped.
fn grow(g: &MolGraph, mut ids: Vec<u64>, radius: u8) -> BTreeSet<u64> {
    let n = g.atom_count();
    let words = g.bonds().len().div_ceil(64).max(1);
    let mut out: BTreeSet<u64> = ids.iter().copied().collect();
    let mut envs: Vec<Vec<u64>> = vec![vec![0; words]; n];
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(vec![0; words]);
    let mut live = vec![true; n];

    for round in 1..=radius {
        let mut next_ids = Vec::with_capacity(n);
        let mut next_envs = Vec::with_capacity(n);
        for i in 0..n {
            let mut nbrs: Vec<(u8, u64)> =
                g.neighbors(i).iter().map(|&(w, b)| (g.bonds()[b].order.code(), ids[w])).collect();
            nbrs.sort_unstable();
            let mut h = fnv1a_extend(fnv1a(&[round]), &ids[i].to_le_bytes());
            for (code, id) in nbrs {
                h = fnv1a_extend(h, &[code]);
                h = fnv1a_extend(h, &id.to_le_bytes());
            }
            next_ids.push(h);

            let mut env = envs[i].clone();
            for &(w, b) in g.neighbors(i) {
                env[b / 64] |= 1 << (b % 64);
                for (e, x) in env.iter_mut().zip(&envs[w]) {
                    *e |= x;
                }
            }
            next_envs.push(env);
        }

        let mut candidates: Vec<usize> = (0..n).filter(|&i| live[i]).collect();
        candidates.sort_by(|&a, &b| next_envs[a].cmp(&next_envs[b]).then(next_ids[a].cmp(&next_ids[b])));
        for i in candidates {
            if seen.insert(next_envs[i].clone()) {
                out.insert(next_ids[i]);
            } else {
                live[i] = false;
            }
        }
        ids = next_ids;
        envs = next_envs;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_smiles;

    fn ecfp_count(s: &str, r: u8) -> usize {
        ecfp_identifiers(&parse_smiles(s).unwrap(), r).len()
    }

    #[test]
    fn ethanol_radius_zero() {
        assert_eq!(ecfp_count("CCO", 0), 3);
    }

    #[test]
    fn benzene_one_identifier_per_level() {
        assert_eq!(ecfp_count("c1ccccc1", 0), 1);
        assert_eq!(ecfp_count("c1ccccc1", 1), 2);
        assert_eq!(ecfp_count("c1ccccc1", 2), 3);
        // radius 3 covers the whole ring from every atom: one more environment
        assert_eq!(ecfp_count("c1ccccc1", 3), 4);
        // and nothing grows after that
        assert_eq!(ecfp_count("c1ccccc1", 4), 4);
    }

    #[test]
    fn fcfp_classes_collapse_carbons() {
        let g = parse_smiles("CCO").unwrap();
        assert_eq!(fcfp_identifiers(&g, 0).len(), 2);
        assert_eq!(fcfp_identifiers(&parse_smiles("CC").unwrap(), 0).len(), 1);
    }
}
