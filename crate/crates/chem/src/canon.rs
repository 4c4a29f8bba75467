//! Order-independent atom classes by iterative neighbourhood refinement.

use crate::graph::MolGraph;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    fnv1a_extend(FNV_OFFSET, bytes)
}

pub(crate) fn fnv1a_extend(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn initial_labels(g: &MolGraph) -> Vec<u64> {
    g.atoms()
        .iter()
        .map(|a| {
            let iso = a.isotope.unwrap_or(0).to_le_bytes();
            fnv1a(&[
                a.atomic_number(),
                a.formal_charge as u8,
                a.degree,
                a.total_h(),
                a.aromatic as u8,
                iso[0],
                iso[1],
            ])
        })
        .collect()
}

fn refine(g: &MolGraph, labels: &[u64]) -> Vec<u64> {
    (0..g.atom_count())
        .map(|i| {
            let mut nbrs: Vec<(u8, u64)> = g
                .neighbors(i)
                .iter()
                .map(|&(n, b)| (g.bonds()[b].order.code(), labels[n]))
                .collect();
            nbrs.sort_unstable();
            let mut h = fnv1a_extend(FNV_OFFSET, &labels[i].to_le_bytes());
            for (order, label) in nbrs {
                h = fnv1a_extend(h, &[order]);
                h = fnv1a_extend(h, &label.to_le_bytes());
            }
            h
        })
        .collect()
}

/// Labels after `atom_count` refinement rounds (at least one).
pub(crate) fn wl_labels(g: &MolGraph) -> Vec<u64> {
    let mut labels = initial_labels(g);
    for _ in 0..g.atom_count().max(1) {
        labels = refine(g, &labels);
    }
    labels
}

/// Hash string that is identical for any atom numbering of the same graph.
pub fn canonical_key(g: &MolGraph) -> String {
    let mut labels = wl_labels(g);
    labels.sort_unstable();
    let mut h = fnv1a_extend(FNV_OFFSET, &(g.atom_count() as u64).to_le_bytes());
    h = fnv1a_extend(h, &(g.bonds().len() as u64).to_le_bytes());
    for l in labels {
        h = fnv1a_extend(h, &l.to_le_bytes());
    }
    format!("{h:016x}")
}

/// A total order of atoms: WL classes, with ties split by repeatedly
/// singling out one atom of the smallest tied class and refining again.
pub(crate) fn atom_ranks(g: &MolGraph) -> Vec<usize> {
    let n = g.atom_count();
    let mut labels = wl_labels(g);
    loop {
        let mut sorted: Vec<(u64, usize)> = labels.iter().copied().zip(0..n).collect();
        sorted.sort_unstable();
        let tie = sorted.windows(2).find(|w| w[0].0 == w[1].0).map(|w| w[0]);
        match tie {
            None => {
                let mut rank = vec![0; n];
                for (r, &(_, i)) in sorted.iter().enumerate() {
                    rank[i] = r;
                }
                return rank;
            }
            Some((_, atom)) => {
                labels[atom] = fnv1a_extend(labels[atom], b"split");
                for _ in 0..n {
                    labels = refine(g, &labels);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_smiles;

    fn key(s: &str) -> String {
        canonical_key(&parse_smiles(s).unwrap())
    }

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn renumbering_and_difference() {
        assert_eq!(key("CCO"), key("OCC"));
        assert_ne!(key("CCO"), key("CCN"));
        assert_eq!(key("c1ccccc1O"), key("Oc1ccccc1"));
        assert_ne!(key("CC=O"), key("C=CO"));
    }

    #[test]
    fn ranks_are_a_permutation() {
        let g = parse_smiles("c1ccccc1").unwrap();
        let mut r = atom_ranks(&g);
        r.sort_unstable();
        assert_eq!(r, (0..6).collect::<Vec<_>>());
    }
}
