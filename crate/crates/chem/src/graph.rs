//! Molecular graph: atoms in SMILES encounter order, typed bonds and the
//! smallest set of smallest rings.

use crate::element::Element;
use crate::rings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Bond valence with aromatic bonds counted as 1.5.
    pub fn valence(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }

    /// Integer order used for hydrogen bookkeeping (aromatic counts as 1).
    pub fn int_order(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub element: &'static Element,
    pub aromatic: bool,
    pub formal_charge: i8,
    pub isotope: Option<u16>,
    /// Hydrogen count written inside brackets (or folded in from explicit `[H]` atoms).
    pub explicit_h: Option<u8>,
    /// Heavy-atom neighbour count.
    pub degree: u8,
    /// Hydrogens implied by the valence model for bracket-free atoms.
    pub implicit_h: u8,
    /// Written inside brackets in the source text.
    pub bracket: bool,
}

impl Atom {
    pub fn new(element: &'static Element) -> Self {
        Atom {
            element,
            aromatic: false,
            formal_charge: 0,
            isotope: None,
            explicit_h: None,
            degree: 0,
            implicit_h: 0,
            bracket: false,
        }
    }

    pub fn total_h(&self) -> u8 {
        self.explicit_h.unwrap_or(0) + self.implicit_h
    }

    pub fn atomic_number(&self) -> u8 {
        self.element.number
    }

    pub fn symbol(&self) -> &'static str {
        self.element.symbol
    }

    pub fn mass(&self) -> f64 {
        match self.isotope {
            Some(a) => self.element.isotope_mass(a),
            None => self.element.mass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

/// Immutable molecular graph. Build one with [`crate::parse_smiles`].
#[derive(Debug, Clone)]
pub struct MolGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
    rings: Vec<Vec<usize>>,
}

impl MolGraph {
    /// Assemble a graph and perceive its rings. Callers guarantee bond
    /// endpoints are valid and distinct.
    pub(crate) fn assemble(mut atoms: Vec<Atom>, bonds: Vec<Bond>) -> Self {
        let adjacency = build_adjacency(atoms.len(), &bonds);
        for (i, atom) in atoms.iter_mut().enumerate() {
            atom.degree = adjacency[i].len() as u8;
        }
        let rings = rings::sssr(atoms.len(), &bonds, &adjacency);
        MolGraph { atoms, bonds, adjacency, rings }
    }

    pub(crate) fn into_parts(self) -> (Vec<Atom>, Vec<Bond>) {
        (self.atoms, self.bonds)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn rings(&self) -> &[Vec<usize>] {
        &self.rings
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.atomic_number() > 1).count()
    }

    /// `(neighbour, bond index)` pairs of atom `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn bond_between(&self, i: usize, j: usize) -> Option<&Bond> {
        self.adjacency[i]
            .iter()
            .find(|&&(n, _)| n == j)
            .map(|&(_, b)| &self.bonds[b])
    }

    pub fn is_ring_atom(&self, i: usize) -> bool {
        self.rings.iter().any(|r| r.contains(&i))
    }

    pub fn is_ring_bond(&self, bond: usize) -> bool {
        let Bond { a, b, .. } = self.bonds[bond];
        self.rings.iter().any(|r| ring_has_edge(r, a, b))
    }

    pub fn in_ring_of_size(&self, i: usize, size: usize) -> bool {
        self.rings.iter().any(|r| r.len() == size && r.contains(&i))
    }

    /// Sum of bond valences (aromatic = 1.5) plus hydrogens.
    pub fn total_valence(&self, i: usize) -> f64 {
        let bonds: f64 = self.adjacency[i]
            .iter()
            .map(|&(_, b)| self.bonds[b].order.valence())
            .sum();
        bonds + self.atoms[i].total_h() as f64
    }

    /// Number of connected components (always 1 for parsed SMILES).
    pub fn component_count(&self) -> usize {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Same molecule with atoms renumbered: new atom `k` is old atom `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> MolGraph {
        assert_eq!(order.len(), self.atoms.len());
        let mut inverse = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let atoms = order.iter().map(|&o| self.atoms[o].clone()).collect();
        let bonds = self
            .bonds
            .iter()
            .map(|b| Bond { a: inverse[b.a], b: inverse[b.b], order: b.order })
            .collect();
        MolGraph::assemble(atoms, bonds)
    }
}

pub(crate) fn build_adjacency(n: usize, bonds: &[Bond]) -> Vec<Vec<(usize, usize)>> {
    let mut adjacency = vec![Vec::new(); n];
    for (k, b) in bonds.iter().enumerate() {
        adjacency[b.a].push((b.b, k));
        adjacency[b.b].push((b.a, k));
    }
    adjacency
}

pub(crate) fn ring_has_edge(ring: &[usize], a: usize, b: usize) -> bool {
    let n = ring.len();
    (0..n).any(|k| {
        let (x, y) = (ring[k], ring[(k + 1) % n]);
        (x == a && y == b) || (x == b && y == a)
    })
}
