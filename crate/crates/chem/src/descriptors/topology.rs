//! Connectivity and shape indices, counts.

use crate::descriptors::hybrid::{hybridizations, Hybridization};
use crate::graph::{BondOrder, MolGraph};

fn is_heavy(g: &MolGraph, i: usize) -> bool {
    g.atom(i).atomic_number() > 1
}

/// Valence delta per atom (0 for hydrogens).
pub(crate) fn valence_deltas(g: &MolGraph) -> Vec<f64> {
    g.atoms()
        .iter()
        .map(|a| {
            let z = a.atomic_number() as f64;
            if z <= 1.0 {
                return 0.0;
            }
            let nv = a.element.outer_electrons as f64;
            let nh = a.total_h() as f64;
            if z <= 10.0 {
                nv - nh
            } else {
                (nv - nh) / (z - nv - 1.0)
            }
        })
        .collect()
}

fn inv_sqrt(d: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        1.0 / d.sqrt()
    }
}

/// Simple paths with `len` atoms over heavy atoms, each reported once.
pub(crate) fn atom_paths(g: &MolGraph, len: usize) -> Vec<Vec<usize>> {
    fn grow(g: &MolGraph, path: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if path.len() == len {
            if path[0] < path[len - 1] || len == 1 {
                out.push(path.clone());
            }
            return;
        }
        let last = *path.last().unwrap();
        for &(n, _) in g.neighbors(last) {
            if g.atom(n).atomic_number() > 1 && !path.contains(&n) {
                path.push(n);
                grow(g, path, len, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    for start in (0..g.atom_count()).filter(|&i| is_heavy(g, i)) {
        grow(g, &mut vec![start], len, &mut out);
    }
    out
}

/// Valence connectivity index of the given order. Paths are bond paths of
/// `order` bonds without repeated bonds; an order-3 path can therefore close
/// a three-membered ring, in which case its three atoms count once.
pub fn chi_v(g: &MolGraph, order: usize) -> f64 {
    let d: Vec<f64> = valence_deltas(g).into_iter().map(inv_sqrt).collect();
    let open: f64 = atom_paths(g, order + 1)
        .iter()
        .map(|p| p.iter().map(|&i| d[i]).product::<f64>())
        .sum();
    let triangles: f64 = if order == 3 {
        g.rings()
            .iter()
            .filter(|r| r.len() == 3)
            .map(|r| r.iter().map(|&i| d[i]).product::<f64>())
            .sum()
    } else {
        0.0
    };
    open + triangles
}

pub(crate) fn hall_kier_alpha(g: &MolGraph, hyb: &[Hybridization]) -> f64 {
    const CARBON_RADIUS: f64 = 0.77;
    (0..g.atom_count())
        .filter(|&i| is_heavy(g, i))
        .map(|i| {
            let a = g.atom(i);
            let table: &[Option<f64>] = match a.atomic_number() {
                6 => &[Some(-0.22), Some(-0.13), Some(0.0)],
                7 => &[Some(-0.29), Some(-0.20), Some(-0.04)],
                8 => &[None, Some(-0.20), Some(-0.04)],
                9 => &[None, None, Some(-0.07)],
                15 => &[None, Some(0.30), Some(0.43)],
                16 => &[None, Some(0.22), Some(0.35)],
                17 => &[None, None, Some(0.29)],
                35 => &[None, None, Some(0.48)],
                53 => &[None, None, Some(0.73)],
                _ => return a.element.covalent_radius / CARBON_RADIUS - 1.0,
            };
            let slot = match hyb[i] {
                Hybridization::Sp => Some(0),
                Hybridization::Sp2 => Some(1),
                Hybridization::Sp3 => Some(2),
                _ => None,
            };
            slot.and_then(|k| table[k]).unwrap_or_else(|| table.last().unwrap().unwrap())
        })
        .sum()
}

/// First-order shape index with the heteroatom/hybridization correction.
pub fn kappa1(g: &MolGraph) -> f64 {
    let hyb = hybridizations(g);
    let alpha = hall_kier_alpha(g, &hyb);
    let atoms = g.heavy_atom_count() as f64;
    let bonds = g.bonds().iter().filter(|b| is_heavy(g, b.a) && is_heavy(g, b.b)).count() as f64;
    let denom = bonds + alpha;
    if denom == 0.0 {
        return 0.0;
    }
    let a = atoms + alpha;
    a * (a - 1.0) * (a - 1.0) / (denom * denom)
}

fn has_triple(g: &MolGraph, i: usize) -> bool {
    g.neighbors(i).iter().any(|&(_, b)| g.bonds()[b].order == BondOrder::Triple)
}

fn is_aliphatic(g: &MolGraph, i: usize, z: u8) -> bool {
    g.atom(i).atomic_number() == z && !g.atom(i).aromatic
}

fn count_neighbors(g: &MolGraph, i: usize, pred: impl Fn(usize) -> bool) -> usize {
    g.neighbors(i).iter().filter(|&&(n, _)| pred(n)).count()
}

/// CX3 (trihalomethyl) or C(CH3)3 centre.
fn is_bulky_center(g: &MolGraph, i: usize) -> bool {
    if !is_aliphatic(g, i, 6) {
        return false;
    }
    [9u8, 17, 35]
        .iter()
        .any(|&z| count_neighbors(g, i, |n| is_aliphatic(g, n, z)) >= 3)
        || count_neighbors(g, i, |n| is_aliphatic(g, n, 6) && g.atom(n).total_h() == 3) >= 3
}

/// Carbon of degree 3 with a double bond to an atom accepted by `partner`.
fn is_carbonyl_like(g: &MolGraph, i: usize, partner: impl Fn(usize) -> bool) -> bool {
    is_aliphatic(g, i, 6)
        && g.atom(i).degree == 3
        && g.neighbors(i).iter().any(|&(n, b)| g.bonds()[b].order == BondOrder::Double && partner(n))
}

fn acyclic_single(g: &MolGraph, b: usize) -> bool {
    g.bonds()[b].order == BondOrder::Single && !g.is_ring_bond(b)
}

/// Bond partners across amide, ester, thioester and amidinium linkages.
fn in_amide_like_linkage(g: &MolGraph, i: usize) -> bool {
    let nos = |n: usize| [7u8, 8, 16].iter().any(|&z| is_aliphatic(g, n, z));
    let cation_n = |n: usize| is_aliphatic(g, n, 7) && g.atom(n).formal_charge == 1;
    let hetero = |n: usize| {
        g.atom(n).atomic_number() == 7 || is_aliphatic(g, n, 8) || (is_aliphatic(g, n, 16) && g.atom(n).degree != 1)
    };
    let n_not_terminal = |n: usize| g.atom(n).atomic_number() == 7 && g.atom(n).degree != 1;
    let linked = |x: usize, pred: &dyn Fn(usize) -> bool| {
        g.neighbors(x).iter().any(|&(n, b)| acyclic_single(g, b) && pred(n))
    };
    (is_carbonyl_like(g, i, nos) && linked(i, &hetero))
        || (hetero(i) && linked(i, &|c| is_carbonyl_like(g, c, nos)))
        || (is_carbonyl_like(g, i, cation_n) && linked(i, &n_not_terminal))
        || (n_not_terminal(i) && linked(i, &|c| is_carbonyl_like(g, c, cation_n)))
}

/// Acyclic single bonds between non-terminal atoms, skipping triple-bond
/// atoms, CX3 and tert-butyl centres, and bonds whose both ends sit in an
/// amide-like linkage.
pub fn rotatable_bonds(g: &MolGraph) -> usize {
    let plain = |i: usize| g.atom(i).degree > 1 && !has_triple(g, i) && !is_bulky_center(g, i);
    let lead = |i: usize| plain(i) && !in_amide_like_linkage(g, i);
    g.bonds()
        .iter()
        .enumerate()
        .filter(|&(k, b)| {
            acyclic_single(g, k) && ((lead(b.a) && plain(b.b)) || (lead(b.b) && plain(b.a)))
        })
        .count()
}

pub fn fraction_csp3(g: &MolGraph) -> f64 {
    let hyb = hybridizations(g);
    let carbons: Vec<usize> = (0..g.atom_count()).filter(|&i| g.atom(i).atomic_number() == 6).collect();
    if carbons.is_empty() {
        return 0.0;
    }
    let sp3 = carbons.iter().filter(|&&i| hyb[i] == Hybridization::Sp3).count();
    sp3 as f64 / carbons.len() as f64
}

pub fn aromatic_ring_count(g: &MolGraph) -> usize {
    g.rings()
        .iter()
        .filter(|r| {
            (0..r.len()).all(|k| {
                g.bond_between(r[k], r[(k + 1) % r.len()])
                    .is_some_and(|b| b.order == BondOrder::Aromatic)
            })
        })
        .count()
}

pub fn donor_count(g: &MolGraph) -> usize {
    g.atoms()
        .iter()
        .filter(|a| matches!(a.atomic_number(), 7 | 8) && a.total_h() > 0)
        .count()
}

pub fn acceptor_count(g: &MolGraph) -> usize {
    g.atoms().iter().filter(|a| matches!(a.atomic_number(), 7 | 8)).count()
}

pub fn molecular_weight(g: &MolGraph) -> f64 {
    g.atoms()
        .iter()
        .map(|a| a.mass() + a.total_h() as f64 * crate::element::HYDROGEN_MASS)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_smiles;

    fn g(s: &str) -> MolGraph {
        parse_smiles(s).unwrap()
    }

    #[test]
    fn paths_counted_once() {
        assert_eq!(atom_paths(&g("CCCC"), 4).len(), 1);
        assert_eq!(atom_paths(&g("CC(C)C"), 4).len(), 0);
        // each of the 6 atoms starts 2 directions, halved
        assert_eq!(atom_paths(&g("C1CCCCC1"), 4).len(), 6);
        assert_eq!(atom_paths(&g("CCO"), 1).len(), 3);
    }

    #[test]
    fn chi_small_cases() {
        // butane: deltas 1,2,2,1
        let chi1 = 2.0 * (1.0 / 2f64.sqrt()) + 0.5;
        assert!((chi_v(&g("CCCC"), 1) - chi1).abs() < 1e-12);
        assert_eq!(chi_v(&g("CCO"), 3), 0.0);
        assert!((chi_v(&g("C1CC1"), 3) - 8f64.sqrt().recip()).abs() < 1e-12);
    }

    #[test]
    fn kappa_with_heteroatom_correction() {
        assert!((kappa1(&g("CCl")) - 2.29).abs() < 1e-9);
        assert!((kappa1(&g("[NH4+]")) - 0.96).abs() < 1e-9);
        assert_eq!(kappa1(&g("C")), 0.0);
    }

    #[test]
    fn rotatable() {
        assert_eq!(rotatable_bonds(&g("CCO")), 0);
        assert_eq!(rotatable_bonds(&g("CCCC")), 1);
        assert_eq!(rotatable_bonds(&g("CC(=O)NCC")), 1);
        assert_eq!(rotatable_bonds(&g("CC(=O)NCCC")), 2);
        assert_eq!(rotatable_bonds(&g("CC#CCC")), 0);
        assert_eq!(rotatable_bonds(&g("CCCCC#CC")), 2);
    }
}
