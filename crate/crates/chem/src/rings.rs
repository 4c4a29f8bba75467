//! Smallest set of smallest rings.
//!
//! Candidate cycles follow Horton's construction (shortest path to each end
//! of an edge from every root atom); a minimum basis is then selected greedily
//! by Gaussian elimination over GF(2) in edge space. Ties between equal-size
//! cycles go to the lexicographically smallest sorted atom set.

use std::collections::{HashSet, VecDeque};

use crate::graph::Bond;

/// Rings as atom cycles in traversal order, sorted by size then atom set.
pub fn sssr(n_atoms: usize, bonds: &[Bond], adjacency: &[Vec<(usize, usize)>]) -> Vec<Vec<usize>> {
    let components = count_components(n_atoms, adjacency);
    let expected = (bonds.len() + components).saturating_sub(n_atoms);
    if expected == 0 {
        return Vec::new();
    }

    let words = bonds.len().div_ceil(64);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut candidates: Vec<(Vec<usize>, Vec<u64>)> = Vec::new();

    for root in 0..n_atoms {
        let (dist, parent) = bfs(root, adjacency);
        for (k, bond) in bonds.iter().enumerate() {
            let (x, y) = (bond.a, bond.b);
            let (Some(dx), Some(dy)) = (dist[x], dist[y]) else { continue };
            // The edge must not be a tree edge of this root's BFS.
            if parent[x] == Some((y, k)) || parent[y] == Some((x, k)) {
                continue;
            }
            if dx.abs_diff(dy) > 1 {
                continue;
            }
            let px = path_to_root(x, &parent);
            let py = path_to_root(y, &parent);
            // Paths must meet only at the root.
            let sx: HashSet<usize> = px.iter().map(|&(a, _)| a).collect();
            if py.iter().filter(|(a, _)| sx.contains(a)).count() != 1 {
                continue;
            }
            let mut edges = vec![0u64; words];
            let mut set_edge = |e: usize| edges[e / 64] ^= 1 << (e % 64);
            set_edge(k);
            for &(_, e) in px.iter().chain(py.iter()) {
                if let Some(e) = e {
                    set_edge(e);
                }
            }
            if !seen.insert(edges.clone()) {
                continue;
            }
            // Cycle order: root .. x, then y .. (just before root).
            let mut cycle: Vec<usize> = px.iter().rev().map(|&(a, _)| a).collect();
            cycle.extend(py.iter().map(|&(a, _)| a).take(py.len() - 1));
            candidates.push((cycle, edges));
        }
    }

    candidates.sort_by(|(a, _), (b, _)| {
        a.len().cmp(&b.len()).then_with(|| sorted(a).cmp(&sorted(b)))
    });

    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rings = Vec::new();
    for (cycle, edges) in candidates {
        if rings.len() == expected {
            break;
        }
        let mut v = edges;
        for (row, &p) in basis.iter().zip(&pivots) {
            if v[p / 64] >> (p % 64) & 1 == 1 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
        if let Some(p) = first_bit(&v) {
            basis.push(v);
            pivots.push(p);
            rings.push(canonical_rotation(cycle));
        }
    }
    rings
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Rotate so the smallest atom index comes first, and orient so that its
/// smaller neighbour follows.
fn canonical_rotation(mut cycle: Vec<usize>) -> Vec<usize> {
    let pos = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, a)| **a)
        .map(|(i, _)| i)
        .unwrap_or(0);
    cycle.rotate_left(pos);
    if cycle.len() > 2 && cycle[cycle.len() - 1] < cycle[1] {
        cycle[1..].reverse();
    }
    cycle
}

type Parent = Option<(usize, usize)>;

fn bfs(root: usize, adjacency: &[Vec<(usize, usize)>]) -> (Vec<Option<usize>>, Vec<Parent>) {
    let n = adjacency.len();
    let mut dist = vec![None; n];
    let mut parent = vec![None; n];
    dist[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        let mut nbrs = adjacency[v].clone();
        nbrs.sort_unstable();
        for (w, b) in nbrs {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                parent[w] = Some((v, b));
                queue.push_back(w);
            }
        }
    }
    (dist, parent)
}

/// `[(atom, bond to its parent)]` from `v` up to the root (root has `None`).
fn path_to_root(v: usize, parent: &[Parent]) -> Vec<(usize, Option<usize>)> {
    let mut path = Vec::new();
    let mut cur = v;
    loop {
        match parent[cur] {
            Some((p, b)) => {
                path.push((cur, Some(b)));
                cur = p;
            }
            None => {
                path.push((cur, None));
                break;
            }
        }
    }
    path
}

fn count_components(n: usize, adjacency: &[Vec<(usize, usize)>]) -> usize {
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &(w, _) in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use crate::parse_smiles;

    fn ring_sizes(smiles: &str) -> Vec<usize> {
        let g = parse_smiles(smiles).unwrap();
        g.rings().iter().map(|r| r.len()).collect()
    }

    #[test]
    fn acyclic_has_no_rings() {
        assert!(ring_sizes("CC").is_empty());
        assert!(ring_sizes("CC(C)(C)CO").is_empty());
    }

    #[test]
    fn benzene_and_naphthalene() {
        assert_eq!(ring_sizes("c1ccccc1"), vec![6]);
        assert_eq!(ring_sizes("c1ccc2ccccc2c1"), vec![6, 6]);
    }

    #[test]
    fn bridged_and_spiro() {
        // norbornane: two 5-rings, not the 6-ring
        assert_eq!(ring_sizes("C1CC2CCC1C2"), vec![5, 5]);
        assert_eq!(ring_sizes("C1CC2(C1)CC2"), vec![3, 4]);
    }

    #[test]
    fn cubane_has_five_four_rings() {
        assert_eq!(ring_sizes("C12C3C4C1C5C2C3C45"), vec![4; 5]);
    }

    #[test]
    fn rings_are_cycles() {
        let g = parse_smiles("c1ccc2c(c1)oc1ccccc12").unwrap();
        for r in g.rings() {
            for k in 0..r.len() {
                assert!(g.bond_between(r[k], r[(k + 1) % r.len()]).is_some());
            }
        }
    }
}
