//! Aromaticity: validation of lower-case input and perception of aromatic
//! rings written in Kekulé form.
//!
//! Both use the 4n+2 rule, first per SSSR ring and then over fused systems
//! (rings joined through a shared bond).

use crate::graph::{ring_has_edge, Bond, BondOrder, MolGraph};

/// Validate lower-case atoms, demote stray aromatic bonds and aromatize
/// Kekulé rings. On failure returns the index of an offending atom.
pub(crate) fn finalize(graph: MolGraph) -> Result<MolGraph, usize> {
    let flagged: Vec<usize> = (0..graph.atom_count()).filter(|&i| graph.atom(i).aromatic).collect();
    let graph = if flagged.is_empty() { graph } else { validate(graph, &flagged)? };
    Ok(perceive(graph))
}

fn validate(graph: MolGraph, flagged: &[usize]) -> Result<MolGraph, usize> {
    let owned: Vec<Vec<usize>> = graph
        .rings()
        .iter()
        .filter(|r| r.iter().all(|&a| graph.atom(a).aromatic))
        .cloned()
        .collect();
    let rings: Vec<&Vec<usize>> = owned.iter().collect();
    let electrons: Vec<Option<u32>> = rings
        .iter()
        .map(|r| r.iter().map(|&a| flagged_pi(&graph, a)).sum())
        .collect();
    let systems = fused_systems(&rings);

    let mut ok = vec![false; graph.atom_count()];
    for (ring, e) in rings.iter().zip(&electrons) {
        if e.is_some_and(huckel) {
            ring.iter().for_each(|&a| ok[a] = true);
        }
    }
    for system in &systems {
        let mut atoms: Vec<usize> = system.iter().flat_map(|&r| rings[r].iter().copied()).collect();
        atoms.sort_unstable();
        atoms.dedup();
        let total: Option<u32> = atoms.iter().map(|&a| flagged_pi(&graph, a)).sum();
        if total.is_some_and(huckel) {
            atoms.iter().for_each(|&a| ok[a] = true);
        }
    }
    if let Some(&bad) = flagged.iter().find(|&&a| !ok[a]) {
        return Err(bad);
    }

    let (atoms, mut bonds) = graph.into_parts();
    for bond in bonds.iter_mut() {
        if bond.order == BondOrder::Aromatic && !rings.iter().any(|r| ring_has_edge(r, bond.a, bond.b)) {
            bond.order = BondOrder::Single;
        }
    }
    Ok(MolGraph::assemble(atoms, bonds))
}

fn huckel(e: u32) -> bool {
    e >= 2 && (e - 2) % 4 == 0
}

/// Pi electrons donated by an atom written in lower case.
fn flagged_pi(graph: &MolGraph, i: usize) -> Option<u32> {
    let atom = graph.atom(i);
    // an acyclic double bond to a heteroatom withdraws the electron
    let exo: Vec<u8> = graph
        .neighbors(i)
        .iter()
        .filter(|&&(n, b)| {
            graph.bonds()[b].order == BondOrder::Double && !graph.atom(n).aromatic && !graph.is_ring_bond(b)
        })
        .map(|&(n, _)| graph.atom(n).atomic_number())
        .collect();
    let exo_double = !exo.is_empty();
    let connections = atom.degree + atom.total_h();
    Some(match (atom.atomic_number(), atom.formal_charge) {
        (6, 0) => u32::from(exo.iter().all(|&z| z == 6)),
        (6, -1) => 2,
        (6, 1) => 0,
        (7 | 15 | 33, 0) => {
            if connections == 3 && !exo_double {
                2
            } else {
                1
            }
        }
        (7 | 15 | 33, 1) => 1,
        (7 | 15 | 33, -1) => 2,
        (8 | 16 | 34, 0) => 2,
        (8 | 16 | 34, 1) => 1,
        (5, 0) => 0,
        (5, -1) => 1,
        _ => return None,
    })
}

/// Groups of ring indices connected through shared bonds.
fn fused_systems(rings: &[&Vec<usize>]) -> Vec<Vec<usize>> {
    let n = rings.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if shares_bond(rings[i], rings[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups.retain(|g| g.len() > 1);
    groups
}

fn shares_bond(a: &[usize], b: &[usize]) -> bool {
    (0..a.len()).any(|k| ring_has_edge(b, a[k], a[(k + 1) % a.len()]))
}

/// Pi electrons of an atom in an upper-case ring, `None` if it breaks
/// conjugation.
fn kekule_pi(graph: &MolGraph, i: usize) -> Option<u32> {
    let atom = graph.atom(i);
    let mut ring_double = false;
    let mut exo_double_to_hetero = false;
    for &(n, b) in graph.neighbors(i) {
        match graph.bonds()[b].order {
            BondOrder::Triple => return None,
            BondOrder::Double if graph.is_ring_bond(b) => ring_double = true,
            BondOrder::Double if graph.atom(n).atomic_number() != 6 => exo_double_to_hetero = true,
            BondOrder::Double => ring_double = true,
            _ => {}
        }
    }
    let connections = atom.degree + atom.total_h();
    let z = atom.atomic_number();
    match (z, atom.formal_charge) {
        (6, 0) if ring_double => Some(1),
        (6, 0) if exo_double_to_hetero => Some(0),
        (6, -1) if !ring_double => Some(2),
        (7 | 15, 0) if ring_double && connections == 2 => Some(1),
        (7 | 15, 0) if !ring_double && connections == 3 => Some(2),
        (7, 1) if ring_double && connections == 3 => Some(1),
        (8 | 16 | 34, 0) if !ring_double && connections == 2 => Some(2),
        _ => None,
    }
}

fn perceive(graph: MolGraph) -> MolGraph {
    let candidates: Vec<&Vec<usize>> = graph
        .rings()
        .iter()
        .filter(|r| r.iter().all(|&a| !graph.atom(a).aromatic))
        .collect();
    if candidates.is_empty() {
        return graph;
    }
    let pis: Vec<Option<Vec<u32>>> = candidates
        .iter()
        .map(|r| r.iter().map(|&a| kekule_pi(&graph, a)).collect())
        .collect();
    let has_ring_double = |r: &[usize]| {
        (0..r.len()).any(|k| {
            graph
                .bond_between(r[k], r[(k + 1) % r.len()])
                .is_some_and(|b| b.order == BondOrder::Double)
        })
    };

    let mut aromatic_ring = vec![false; candidates.len()];
    for (k, ring) in candidates.iter().enumerate() {
        if let Some(p) = &pis[k] {
            if huckel(p.iter().sum()) && has_ring_double(ring) {
                aromatic_ring[k] = true;
            }
        }
    }
    // fused systems of fully conjugated rings
    let conjugated: Vec<usize> = (0..candidates.len()).filter(|&k| pis[k].is_some()).collect();
    let sub: Vec<&Vec<usize>> = conjugated.iter().map(|&k| candidates[k]).collect();
    for system in fused_systems(&sub) {
        if system.iter().all(|&s| aromatic_ring[conjugated[s]]) {
            continue;
        }
        let mut atoms: Vec<usize> = system.iter().flat_map(|&s| sub[s].iter().copied()).collect();
        atoms.sort_unstable();
        atoms.dedup();
        let total: Option<u32> = atoms.iter().map(|&a| kekule_pi(&graph, a)).sum();
        if total.is_some_and(huckel) {
            system.iter().for_each(|&s| aromatic_ring[conjugated[s]] = true);
        }
    }
    if !aromatic_ring.iter().any(|&x| x) {
        return graph;
    }

    let rings: Vec<Vec<usize>> = candidates
        .iter()
        .zip(&aromatic_ring)
        .filter(|(_, &a)| a)
        .map(|(r, _)| r.to_vec())
        .collect();
    let (mut atoms, bonds) = graph.into_parts();
    for r in &rings {
        for &a in r {
            atoms[a].aromatic = true;
        }
    }
    let bonds: Vec<Bond> = bonds
        .into_iter()
        .map(|mut b| {
            if rings.iter().any(|r| ring_has_edge(r, b.a, b.b)) {
                b.order = BondOrder::Aromatic;
            }
            b
        })
        .collect();
    MolGraph::assemble(atoms, bonds)
}
