use std::collections::BTreeMap;

use crate::aromatic;
use crate::element::Element;
use crate::error::{SmilesError, SmilesErrorKind as K};
use crate::graph::{Atom, Bond, BondOrder, MolGraph};
use crate::smiles::lexer::lex;
use crate::smiles::valence::{bracket_valence_ok, implicit_hydrogens};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BondSymbol {
    Single,
    Double,
    Triple,
    Aromatic,
    Directional,
}

impl BondSymbol {
    fn from_char(c: &str) -> Option<Self> {
        Some(match c {
            "-" => BondSymbol::Single,
            "=" => BondSymbol::Double,
            "#" => BondSymbol::Triple,
            ":" => BondSymbol::Aromatic,
            "/" | "\\" => BondSymbol::Directional,
            _ => return None,
        })
    }
}

#[derive(Default)]
struct Builder {
    atoms: Vec<Atom>,
    offsets: Vec<usize>,
    bonds: Vec<Bond>,
}

impl Builder {
    fn add_bond(&mut self, a: usize, b: usize, symbol: Option<BondSymbol>, offset: usize) -> Result<(), SmilesError> {
        if a == b || self.bonds.iter().any(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a)) {
            return Err(SmilesError::new(K::DuplicateBond, offset));
        }
        let both_aromatic = self.atoms[a].aromatic && self.atoms[b].aromatic;
        let order = match symbol {
            None | Some(BondSymbol::Aromatic) if both_aromatic => BondOrder::Aromatic,
            None | Some(BondSymbol::Aromatic) => BondOrder::Single,
            Some(BondSymbol::Single | BondSymbol::Directional) => BondOrder::Single,
            Some(BondSymbol::Double) => BondOrder::Double,
            Some(BondSymbol::Triple) => BondOrder::Triple,
        };
        self.bonds.push(Bond { a, b, order });
        Ok(())
    }
}

/// Parse a single-component SMILES string into a [`MolGraph`].
///
/// Atom order follows the order atoms appear in the text. Stereo markers are
/// accepted and dropped. Explicit `[H]` atoms bonded to a heavy atom are
/// folded into that atom's hydrogen count.
pub fn parse_smiles(text: &str) -> Result<MolGraph, SmilesError> {
    if text.trim().is_empty() {
        return Err(SmilesError::new(K::Empty, 0));
    }
    let lexemes = lex(text)?;
    let mut b = Builder::default();
    let mut prev: Option<usize> = None;
    let mut pending: Option<(BondSymbol, usize)> = None;
    let mut branches: Vec<(usize, usize)> = Vec::new();
    let mut open_rings: BTreeMap<u16, (usize, Option<BondSymbol>, usize)> = BTreeMap::new();

    for lx in &lexemes {
        let t = lx.text;
        let at = lx.offset;
        if let Some(atom) = parse_atom_token(t, at)? {
            let idx = b.atoms.len();
            b.atoms.push(atom);
            b.offsets.push(at);
            match prev {
                Some(p) => {
                    let sym = pending.take().map(|(s, _)| s);
                    b.add_bond(p, idx, sym, at)?;
                }
                None => {
                    if let Some((_, off)) = pending {
                        return Err(SmilesError::new(K::DanglingBond, off));
                    }
                }
            }
            prev = Some(idx);
            continue;
        }
        if let Some(sym) = BondSymbol::from_char(t) {
            if pending.is_some() || prev.is_none() {
                return Err(SmilesError::new(K::DanglingBond, at));
            }
            pending = Some((sym, at));
            continue;
        }
        if let Some(n) = ring_number(t) {
            let Some(p) = prev else {
                return Err(SmilesError::new(K::UnexpectedCharacter, at));
            };
            let sym = pending.take().map(|(s, _)| s);
            match open_rings.remove(&n) {
                Some((other, other_sym, _)) => {
                    let resolved = match (other_sym, sym) {
                        (Some(x), Some(y)) if x != y => {
                            return Err(SmilesError::new(K::RingBondConflict, at))
                        }
                        (x, y) => x.or(y),
                    };
                    b.add_bond(other, p, resolved, at)?;
                }
                None => {
                    open_rings.insert(n, (p, sym, at));
                }
            }
            continue;
        }
        match t {
            "(" => {
                let Some(p) = prev else {
                    return Err(SmilesError::new(K::UnmatchedParenthesis, at));
                };
                if pending.is_some() {
                    return Err(SmilesError::new(K::DanglingBond, at));
                }
                branches.push((p, at));
            }
            ")" => {
                if let Some((_, off)) = pending {
                    return Err(SmilesError::new(K::DanglingBond, off));
                }
                let (p, _) = branches
                    .pop()
                    .ok_or(SmilesError::new(K::UnmatchedParenthesis, at))?;
                prev = Some(p);
            }
            "." => return Err(SmilesError::new(K::MultipleComponents, at)),
            "$" => return Err(SmilesError::new(K::Unsupported, at)),
            _ => {
                let kind = if t.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '*') {
                    K::UnknownElement
                } else {
                    K::UnexpectedCharacter
                };
                return Err(SmilesError::new(kind, at));
            }
        }
    }

    if let Some((_, off)) = pending {
        return Err(SmilesError::new(K::DanglingBond, off));
    }
    if let Some(&(_, off)) = branches.first() {
        return Err(SmilesError::new(K::UnmatchedParenthesis, off));
    }
    if let Some((_, &(_, _, off))) = open_rings.iter().next() {
        return Err(SmilesError::new(K::UnclosedRingBond, off));
    }
    if b.atoms.is_empty() {
        return Err(SmilesError::new(K::Empty, 0));
    }

    assign_hydrogens(&mut b)?;
    let (atoms, bonds, offsets) = fold_explicit_hydrogens(b);
    let graph = MolGraph::assemble(atoms, bonds);
    aromatic::finalize(graph).map_err(|atom| SmilesError::new(K::BadAromaticity, offsets[atom]))
}

fn ring_number(t: &str) -> Option<u16> {
    if t.len() == 1 && t.as_bytes()[0].is_ascii_digit() {
        return Some((t.as_bytes()[0] - b'0') as u16);
    }
    if t.len() == 3 && t.starts_with('%') {
        return t[1..].parse().ok();
    }
    None
}

fn parse_atom_token(t: &str, offset: usize) -> Result<Option<Atom>, SmilesError> {
    if t.starts_with('[') {
        return parse_bracket(&t[1..t.len() - 1], offset).map(Some);
    }
    let (symbol, aromatic) = match t {
        "B" | "C" | "N" | "O" | "P" | "S" | "F" | "Cl" | "Br" | "I" => (t, false),
        "b" => ("B", true),
        "c" => ("C", true),
        "n" => ("N", true),
        "o" => ("O", true),
        "p" => ("P", true),
        "s" => ("S", true),
        _ => return Ok(None),
    };
    let mut atom = Atom::new(Element::by_symbol(symbol).expect("organic subset"));
    atom.aromatic = aromatic;
    Ok(Some(atom))
}

fn parse_bracket(inner: &str, offset: usize) -> Result<Atom, SmilesError> {
    let bad = |k| SmilesError::new(k, offset);
    let bytes = inner.as_bytes();
    let mut i = 0;

    let digits_end = |from: usize| {
        let mut j = from;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };

    let iso_end = digits_end(0);
    let isotope = if iso_end > 0 {
        Some(inner[..iso_end].parse::<u16>().map_err(|_| bad(K::BadBracketAtom))?)
    } else {
        None
    };
    i = iso_end.max(i);

    // element symbol
    let rest = &inner[i..];
    let (element, aromatic, len) = if let Some(sym) = ["se", "as"].iter().find(|s| rest.starts_with(**s)) {
        let upper = format!("{}{}", sym[..1].to_uppercase(), &sym[1..]);
        (Element::by_symbol(&upper), true, 2)
    } else if let Some(c) = rest.chars().next().filter(|c| matches!(c, 'b' | 'c' | 'n' | 'o' | 'p' | 's')) {
        (Element::by_symbol(&c.to_uppercase().to_string()), true, 1)
    } else if rest.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
        let two = rest.get(..2).filter(|s| s.as_bytes()[1].is_ascii_lowercase());
        match two.and_then(Element::by_symbol) {
            Some(e) => (Some(e), false, 2),
            None => (Element::by_symbol(&rest[..1]), false, 1),
        }
    } else {
        return Err(bad(K::BadBracketAtom));
    };
    let element = element.ok_or(bad(K::UnknownElement))?;
    i += len;

    // chirality, dropped
    if bytes.get(i) == Some(&b'@') {
        i += 1;
        if bytes.get(i) == Some(&b'@') {
            i += 1;
        } else if let Some(tag) = inner.get(i..i + 2).filter(|t| ["TH", "AL", "SP", "TB", "OH"].contains(t)) {
            let _ = tag;
            i = digits_end(i + 2);
        }
    }

    let mut hydrogens = 0u8;
    if bytes.get(i) == Some(&b'H') {
        i += 1;
        let end = digits_end(i);
        hydrogens = if end > i {
            inner[i..end].parse().map_err(|_| bad(K::BadBracketAtom))?
        } else {
            1
        };
        i = end;
    }

    let mut charge: i8 = 0;
    if let Some(&sign @ (b'+' | b'-')) = bytes.get(i) {
        let unit: i8 = if sign == b'+' { 1 } else { -1 };
        i += 1;
        let end = digits_end(i);
        if end > i {
            let n: i8 = inner[i..end].parse().map_err(|_| bad(K::BadBracketAtom))?;
            charge = unit * n;
            i = end;
        } else {
            charge = unit;
            while bytes.get(i) == Some(&sign) {
                charge += unit;
                i += 1;
            }
        }
    }

    if bytes.get(i) == Some(&b':') {
        let end = digits_end(i + 1);
        if end == i + 1 {
            return Err(bad(K::BadBracketAtom));
        }
        i = end;
    }
    if i != bytes.len() {
        return Err(bad(K::BadBracketAtom));
    }
    if aromatic && !element.can_be_aromatic() {
        return Err(bad(K::BadAromaticity));
    }

    let mut atom = Atom::new(element);
    atom.aromatic = aromatic;
    atom.isotope = isotope;
    atom.formal_charge = charge;
    atom.explicit_h = Some(hydrogens);
    atom.bracket = true;
    Ok(atom)
}

fn assign_hydrogens(b: &mut Builder) -> Result<(), SmilesError> {
    let n = b.atoms.len();
    let mut order_sum = vec![0u8; n];
    let mut aromatic_bonds = vec![0u8; n];
    for bond in &b.bonds {
        for end in [bond.a, bond.b] {
            order_sum[end] += bond.order.int_order();
            if bond.order == BondOrder::Aromatic {
                aromatic_bonds[end] += 1;
            }
        }
    }
    for i in 0..n {
        let atom = &b.atoms[i];
        if atom.bracket {
            if !bracket_valence_ok(atom, order_sum[i]) {
                return Err(SmilesError::new(K::ValenceOverflow, b.offsets[i]));
            }
            continue;
        }
        let h = implicit_hydrogens(atom, order_sum[i], aromatic_bonds[i] > 0)
            .ok_or(SmilesError::new(K::ValenceOverflow, b.offsets[i]))?;
        b.atoms[i].implicit_h = h;
    }
    Ok(())
}

fn fold_explicit_hydrogens(b: Builder) -> (Vec<Atom>, Vec<Bond>, Vec<usize>) {
    let n = b.atoms.len();
    let mut neighbors = vec![Vec::new(); n];
    for bond in &b.bonds {
        neighbors[bond.a].push(bond.b);
        neighbors[bond.b].push(bond.a);
    }
    let foldable = |i: usize| {
        let a = &b.atoms[i];
        a.atomic_number() == 1
            && a.isotope.is_none()
            && a.formal_charge == 0
            && a.explicit_h == Some(0)
            && neighbors[i].len() == 1
            && b.atoms[neighbors[i][0]].atomic_number() > 1
    };
    let remove: Vec<bool> = (0..n).map(foldable).collect();
    if !remove.iter().any(|&r| r) {
        return (b.atoms, b.bonds, b.offsets);
    }
    let mut atoms = b.atoms.clone();
    for i in (0..n).filter(|&i| remove[i]) {
        let host = neighbors[i][0];
        atoms[host].explicit_h = Some(atoms[host].explicit_h.unwrap_or(0) + 1);
    }
    let mut new_index = vec![usize::MAX; n];
    let mut kept_atoms = Vec::new();
    let mut kept_offsets = Vec::new();
    for i in 0..n {
        if !remove[i] {
            new_index[i] = kept_atoms.len();
            kept_atoms.push(atoms[i].clone());
            kept_offsets.push(b.offsets[i]);
        }
    }
    let bonds = b
        .bonds
        .iter()
        .filter(|bd| !remove[bd.a] && !remove[bd.b])
        .map(|bd| Bond { a: new_index[bd.a], b: new_index[bd.b], order: bd.order })
        .collect();
    (kept_atoms, bonds, kept_offsets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(s: &str) -> SmilesError {
        parse_smiles(s).unwrap_err()
    }

    #[test]
    fn methane() {
        let g = parse_smiles("C").unwrap();
        assert_eq!(g.atom_count(), 1);
        assert!(g.bonds().is_empty());
        assert_eq!(g.atom(0).implicit_h, 4);
    }

    #[test]
    fn benzene() {
        let g = parse_smiles("c1ccccc1").unwrap();
        assert_eq!(g.atom_count(), 6);
        assert!(g.atoms().iter().all(|a| a.aromatic && a.total_h() == 1));
        assert_eq!(g.bonds().len(), 6);
        assert!(g.bonds().iter().all(|b| b.order == BondOrder::Aromatic));
        assert_eq!(g.rings().len(), 1);
    }

    #[test]
    fn kekule_benzene_is_perceived_aromatic() {
        let g = parse_smiles("C1=CC=CC=C1").unwrap();
        assert!(g.atoms().iter().all(|a| a.aromatic && a.total_h() == 1));
        assert!(g.bonds().iter().all(|b| b.order == BondOrder::Aromatic));
    }

    #[test]
    fn error_categories_carry_offsets() {
        assert_eq!(err("C1CC"), SmilesError::new(K::UnclosedRingBond, 1));
        assert_eq!(err("CC(C").kind, K::UnmatchedParenthesis);
        assert_eq!(err("CC)C").kind, K::UnmatchedParenthesis);
        assert_eq!(err("CXC"), SmilesError::new(K::UnknownElement, 1));
        assert_eq!(err("[Xx]").kind, K::UnknownElement);
        assert_eq!(err("CC(C)(C)(C)C").kind, K::ValenceOverflow);
        assert_eq!(err("C=C=C=C(=C)C").kind, K::ValenceOverflow);
        assert_eq!(err("CC.O").kind, K::MultipleComponents);
        assert_eq!(err("").kind, K::Empty);
        assert_eq!(err("C=").kind, K::DanglingBond);
        assert_eq!(err("C1C1").kind, K::DuplicateBond);
        assert_eq!(err("cccc").kind, K::BadAromaticity);
        assert_eq!(err("c1cccc1").kind, K::BadAromaticity);
        assert_eq!(err("[NH").kind, K::UnclosedBracket);
    }

    #[test]
    fn ring_bond_symbol_on_either_end() {
        let g = parse_smiles("C=1CCCCC1").unwrap();
        assert_eq!(g.bonds().iter().filter(|b| b.order == BondOrder::Double).count(), 1);
        assert!(parse_smiles("C=1CCCCC=1").is_ok());
        assert_eq!(err("C=1CCCCC#1").kind, K::RingBondConflict);
    }

    #[test]
    fn bracket_atoms() {
        let g = parse_smiles("[NH4+]").unwrap();
        assert_eq!(g.atom(0).total_h(), 4);
        assert_eq!(g.atom(0).formal_charge, 1);
        let g = parse_smiles("[13CH3][C@@H](O)[O-]").unwrap();
        assert_eq!(g.atom(0).isotope, Some(13));
        assert_eq!(g.atom(1).total_h(), 1);
        assert_eq!(g.atom(3).formal_charge, -1);
        let g = parse_smiles("[Fe++]").unwrap();
        assert_eq!(g.atom(0).formal_charge, 2);
        assert_eq!(err("[CH5]").kind, K::ValenceOverflow);
    }

    #[test]
    fn stereo_is_dropped() {
        let a = parse_smiles("F/C=C/F").unwrap();
        let b = parse_smiles("FC=CF").unwrap();
        assert_eq!(a.bonds(), b.bonds());
        assert!(parse_smiles("N[C@@H](C)C(=O)O").is_ok());
    }

    #[test]
    fn explicit_hydrogens_fold() {
        let g = parse_smiles("[H]C([H])([H])[H]").unwrap();
        assert_eq!(g.atom_count(), 1);
        assert_eq!(g.atom(0).total_h(), 4);
        let g = parse_smiles("[H]O[H]").unwrap();
        assert_eq!(g.atom_count(), 1);
        assert_eq!(g.atom(0).total_h(), 2);
    }

    #[test]
    fn aromatic_hydrogen_rules() {
        let g = parse_smiles("c1cc[nH]c1").unwrap();
        assert_eq!(g.atom(3).total_h(), 1);
        let g = parse_smiles("Cn1cccc1").unwrap();
        assert_eq!(g.atom(1).total_h(), 0);
        let g = parse_smiles("O=c1cccc[nH]1").unwrap();
        assert_eq!(g.atom(1).total_h(), 0);
        let g = parse_smiles("c1ccsc1").unwrap();
        assert_eq!(g.atom(3).total_h(), 0);
    }

    #[test]
    fn biphenyl_link_is_single() {
        let g = parse_smiles("c1ccccc1c1ccccc1").unwrap();
        let link = g.bond_between(5, 6).unwrap();
        assert_eq!(link.order, BondOrder::Single);
    }

    #[test]
    fn azulene_passes_as_fused_system() {
        assert!(parse_smiles("c1ccc2cccc2cc1").is_ok());
    }
}
