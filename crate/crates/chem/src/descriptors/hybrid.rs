//! Orbital hybridization from electron counting, with a conjugation pass
//! that lets lone-pair atoms next to pi systems count as sp2.

use crate::graph::{BondOrder, MolGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hybridization {
    S,
    Sp,
    Sp2,
    Sp3,
    Sp3d,
    Sp3d2,
    Unspecified,
}

pub(crate) fn default_valence(z: u8) -> i32 {
    match z {
        1 | 3 | 9 | 11 | 17 | 19 | 35 | 37 | 53 | 55 => 1,
        4 | 8 | 12 | 16 | 20 | 34 | 38 | 50 | 52 | 56 | 82 => 2,
        5 | 7 | 13 | 15 | 31 | 33 | 49 | 51 | 83 => 3,
        6 | 14 | 32 => 4,
        _ => -1,
    }
}

/// Heavy neighbours plus hydrogens.
pub(crate) fn total_degree(g: &MolGraph, i: usize) -> i32 {
    g.atom(i).degree as i32 + g.atom(i).total_h() as i32
}

/// Valence of the atom in a Kekulé structure: aromatic atoms take the
/// smallest allowed valence that covers one bond order per aromatic bond.
pub(crate) fn kekule_valence(g: &MolGraph, i: usize) -> i32 {
    let atom = g.atom(i);
    let base: i32 = g
        .neighbors(i)
        .iter()
        .map(|&(_, b)| g.bonds()[b].order.int_order() as i32)
        .sum::<i32>()
        + atom.total_h() as i32;
    if !atom.aromatic {
        return base;
    }
    atom.element
        .bracket_valences(atom.formal_charge)
        .and_then(|vs| vs.iter().map(|&v| v as i32).find(|&v| v >= base))
        .unwrap_or(base)
}

/// Electrons the atom could donate to a neighbouring pi system; positive
/// means it can take part in conjugation.
fn donor_electrons(g: &MolGraph, i: usize) -> i32 {
    let atom = g.atom(i);
    let dv = default_valence(atom.atomic_number());
    if dv <= 1 {
        return -1;
    }
    let degree = total_degree(g, i);
    if degree > 3 {
        return -1;
    }
    let lone = (atom.element.outer_electrons as i32 - dv - atom.formal_charge as i32).max(0);
    (dv - degree) + lone
}

fn conjugation_candidate(g: &MolGraph, i: usize) -> bool {
    let z = g.atom(i).atomic_number();
    let outer = g.atom(i).element.outer_electrons;
    (z <= 10 || (outer != 5 && outer != 6)) && donor_electrons(g, i) > 0
}

/// Conjugated flag per bond.
pub fn conjugated_bonds(g: &MolGraph) -> Vec<bool> {
    let mut conj: Vec<bool> = g.bonds().iter().map(|b| b.order == BondOrder::Aromatic).collect();
    for at in 0..g.atom_count() {
        if !conjugation_candidate(g, at) {
            continue;
        }
        let sub = total_degree(g, at);
        if !(2..=3).contains(&sub) {
            continue;
        }
        for &(_, b1) in g.neighbors(at) {
            if g.bonds()[b1].order.valence() < 1.5 {
                continue;
            }
            for &(other, b2) in g.neighbors(at) {
                if b1 == b2 || total_degree(g, other) > 3 {
                    continue;
                }
                if conjugation_candidate(g, other) {
                    conj[b1] = true;
                    conj[b2] = true;
                }
            }
        }
    }
    conj
}

pub fn hybridizations(g: &MolGraph) -> Vec<Hybridization> {
    let conj = conjugated_bonds(g);
    (0..g.atom_count())
        .map(|i| {
            let atom = g.atom(i);
            let degree = total_degree(g, i);
            let orbitals = if atom.atomic_number() <= 1 {
                degree
            } else {
                let free = atom.element.outer_electrons as i32 - kekule_valence(g, i) - atom.formal_charge as i32;
                degree + free / 2
            };
            match orbitals {
                0 | 1 => Hybridization::S,
                2 => Hybridization::Sp,
                3 => Hybridization::Sp2,
                4 => {
                    let has_conj = g.neighbors(i).iter().any(|&(_, b)| conj[b]);
                    if degree < 4 && has_conj {
                        Hybridization::Sp2
                    } else {
                        Hybridization::Sp3
                    }
                }
                5 => Hybridization::Sp3d,
                6 => Hybridization::Sp3d2,
                _ => Hybridization::Unspecified,
            }
        })
        .collect()
}
