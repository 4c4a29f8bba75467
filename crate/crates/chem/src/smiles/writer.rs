use std::fmt::Write as _;

use crate::canon::atom_ranks;
use crate::graph::{BondOrder, MolGraph};
use crate::smiles::implicit_hydrogens;

/// Deterministic SMILES for a graph. Equal graphs under renumbering give the
/// same string whenever refinement separates all non-equivalent atoms.
pub fn write_smiles(g: &MolGraph) -> String {
    write_smiles_with_order(g).0
}

/// SMILES plus the written atom order: atom `k` of the re-parsed string is
/// atom `order[k]` of `g`.
pub fn write_smiles_with_order(g: &MolGraph) -> (String, Vec<usize>) {
    let n = g.atom_count();
    if n == 0 {
        return (String::new(), Vec::new());
    }
    let rank = atom_ranks(g);
    let sorted_nbrs = |i: usize| {
        let mut v: Vec<(usize, usize)> = g.neighbors(i).to_vec();
        v.sort_by_key(|&(a, _)| rank[a]);
        v
    };

    // Pass 1: spanning tree and ring-closure bonds.
    let start = (0..n).min_by_key(|&i| rank[i]).unwrap();
    let mut visited = vec![false; n];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    // closures[i]: (partner, bond) in the order the digits are written at i
    let mut closures: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut tree_bond = vec![false; g.bonds().len()];
    let mut stack = vec![(start, usize::MAX)];
    let mut preorder = Vec::with_capacity(n);
    while let Some((v, via)) = stack.pop() {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        preorder.push(v);
        if via != usize::MAX {
            tree_bond[via] = true;
        }
        let nbrs = sorted_nbrs(v);
        for &(w, b) in nbrs.iter().rev() {
            if !visited[w] {
                stack.push((w, b));
            }
        }
    }
    // Recover the tree (which parent actually claimed each atom).
    let mut parent = vec![usize::MAX; n];
    for (k, bond) in g.bonds().iter().enumerate() {
        if tree_bond[k] {
            let pos = |x: usize| preorder.iter().position(|&p| p == x).unwrap();
            let (p, c) = if pos(bond.a) < pos(bond.b) { (bond.a, bond.b) } else { (bond.b, bond.a) };
            parent[c] = p;
            children[p].push((c, k));
        }
    }
    for c in children.iter_mut() {
        c.sort_by_key(|&(a, _)| rank[a]);
    }
    let position: Vec<usize> = {
        let mut p = vec![0; n];
        for (k, &a) in preorder.iter().enumerate() {
            p[a] = k;
        }
        p
    };
    let mut ring_bonds: Vec<usize> = (0..g.bonds().len()).filter(|&k| !tree_bond[k]).collect();
    // open at the earlier atom; order digits by the partner's position
    ring_bonds.sort_by_key(|&k| {
        let b = g.bonds()[k];
        let (x, y) = (position[b.a].min(position[b.b]), position[b.a].max(position[b.b]));
        (x, y)
    });
    for &k in &ring_bonds {
        let b = g.bonds()[k];
        closures[b.a].push((b.b, k));
        closures[b.b].push((b.a, k));
    }
    for (i, c) in closures.iter_mut().enumerate() {
        let pi = position[i];
        c.sort_by_key(|&(p, _)| {
            let pp = position[p];
            // closings (partner earlier) before openings, each by partner position
            (pp > pi, pp)
        });
    }

    // Pass 2: emit.
    let mut out = String::new();
    let mut order = Vec::with_capacity(n);
    let mut digit_of_bond: Vec<Option<u32>> = vec![None; g.bonds().len()];
    let mut free_digits: Vec<bool> = vec![true; 100];
    enum Step {
        Atom(usize, usize),
        Text(&'static str),
    }
    let mut work = vec![Step::Atom(start, usize::MAX)];
    while let Some(step) = work.pop() {
        let (v, via) = match step {
            Step::Text(t) => {
                out.push_str(t);
                continue;
            }
            Step::Atom(v, via) => (v, via),
        };
        if via != usize::MAX {
            out.push_str(bond_symbol(g, via));
        }
        out.push_str(&atom_text(g, v));
        order.push(v);
        for &(p, k) in &closures[v] {
            match digit_of_bond[k] {
                Some(d) => {
                    free_digits[d as usize] = true;
                    write_digit(&mut out, d);
                }
                None => {
                    let d = (1..100).find(|&d| free_digits[d]).expect("ring digits exhausted") as u32;
                    free_digits[d as usize] = false;
                    digit_of_bond[k] = Some(d);
                    out.push_str(bond_symbol(g, k));
                    let _ = p;
                    write_digit(&mut out, d);
                }
            }
        }
        let kids = &children[v];
        for (idx, &(c, k)) in kids.iter().enumerate().rev() {
            if idx + 1 == kids.len() {
                work.push(Step::Atom(c, k));
            } else {
                work.push(Step::Text(")"));
                work.push(Step::Atom(c, k));
                work.push(Step::Text("("));
            }
        }
    }
    (out, order)
}

fn write_digit(out: &mut String, d: u32) {
    if d < 10 {
        let _ = write!(out, "{d}");
    } else {
        let _ = write!(out, "%{d:02}");
    }
}

fn bond_symbol(g: &MolGraph, k: usize) -> &'static str {
    let b = g.bonds()[k];
    match b.order {
        BondOrder::Single if g.atom(b.a).aromatic && g.atom(b.b).aromatic => "-",
        BondOrder::Single | BondOrder::Aromatic => "",
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
    }
}

fn atom_text(g: &MolGraph, i: usize) -> String {
    let a = g.atom(i);
    let organic = matches!(a.atomic_number(), 5 | 6 | 7 | 8 | 9 | 15 | 16 | 17 | 35 | 53);
    let symbol = if a.aromatic { a.symbol().to_lowercase() } else { a.symbol().to_string() };
    let mut order_sum = 0u8;
    let mut aromatic_bond = false;
    for &(_, b) in g.neighbors(i) {
        let o = g.bonds()[b].order;
        order_sum += o.int_order();
        aromatic_bond |= o == BondOrder::Aromatic;
    }
    let implied = if organic && a.formal_charge == 0 && a.isotope.is_none() {
        implicit_hydrogens(a, order_sum, aromatic_bond)
    } else {
        None
    };
    if implied == Some(a.total_h()) {
        return symbol;
    }
    let mut s = String::from("[");
    if let Some(iso) = a.isotope {
        let _ = write!(s, "{iso}");
    }
    s.push_str(&symbol);
    match a.total_h() {
        0 => {}
        1 => s.push('H'),
        h => {
            let _ = write!(s, "H{h}");
        }
    }
    match a.formal_charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        c if c > 0 => {
            let _ = write!(s, "+{c}");
        }
        c => {
            let _ = write!(s, "-{}", -c);
        }
    }
    s.push(']');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{canonical_key, parse_smiles};

    fn roundtrip(s: &str) -> String {
        let g = parse_smiles(s).unwrap();
        let w = write_smiles(&g);
        let back = parse_smiles(&w).unwrap_or_else(|e| panic!("{s} -> {w}: {e}"));
        assert_eq!(canonical_key(&g), canonical_key(&back), "{s} -> {w}");
        w
    }

    #[test]
    fn identity_cases() {
        assert_eq!(roundtrip("C"), "C");
        let w = roundtrip("CCO");
        let g = parse_smiles(&w).unwrap();
        assert_eq!(g.atom_count(), 3);
        assert!(g.bonds().iter().all(|b| b.order == BondOrder::Single));
    }

    #[test]
    fn assorted_roundtrips() {
        for s in [
            "c1ccccc1",
            "c1ccc2ccccc2c1",
            "c1cc[nH]c1",
            "O=c1cccc[nH]1",
            "C[N+](C)(C)C",
            "[O-][n+]1ccccc1",
            "c1ccccc1-c1ccccc1",
            "C12C3C4C1C5C2C3C45",
            "[2H]C([2H])([2H])Cl",
            "CC(=O)Nc1ccc(O)cc1",
            "C#N",
            "[Na+]",
            "[Fe+2]",
            "C1CC2CCC1C2",
            "OB(O)c1ccccc1",
            "CS(=O)(=O)N",
            "c1ccc2c(c1)oc1ccccc12",
        ] {
            roundtrip(s);
        }
    }

    #[test]
    fn order_maps_written_atoms() {
        let g = parse_smiles("OCC(N)Cl").unwrap();
        let (w, order) = write_smiles_with_order(&g);
        let back = parse_smiles(&w).unwrap();
        for (k, &src) in order.iter().enumerate() {
            assert_eq!(back.atom(k).symbol(), g.atom(src).symbol());
        }
    }

    #[test]
    fn independent_of_input_numbering() {
        let a = parse_smiles("OCC(N)Cl").unwrap();
        let b = parse_smiles("ClC(N)CO").unwrap();
        assert_eq!(write_smiles(&a), write_smiles(&b));
    }
}
