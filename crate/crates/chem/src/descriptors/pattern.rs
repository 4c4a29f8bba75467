//! A small substructure-pattern language for atom typing.
//!
//! Supports the acyclic subset of SMARTS that atom-contribution tables use:
//! bracket atoms with `#n`, element symbols, `A`/`a`, `H<n>`, `X<n>`,
//! charges, `!`, `&`, `,` and `;`; bare organic atoms; bonds `- = # :` and
//! the implicit single-or-aromatic bond; branches. Ring closures and
//! recursive patterns are not supported.

use std::fmt;

use crate::graph::{BondOrder, MolGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternError {
    pub pattern: String,
    pub offset: usize,
}

impl fmt::Display for PatternError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse pattern `{}` at {}", self.pattern, self.offset)
    }
}

impl std::error::Error for PatternError {}

#[derive(Debug, Clone, PartialEq)]
enum Prim {
    Any,
    Number(u8),
    Element { number: u8, aromatic: bool },
    Aliphatic,
    Aromatic,
    Hydrogens(u8),
    Connections(u8),
    Charge(i8),
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Prim(Prim),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BondQuery {
    SingleOrAromatic,
    Order(BondOrder),
}

#[derive(Debug, Clone)]
struct Node {
    expr: Expr,
    parent: Option<(usize, BondQuery)>,
}

/// A parsed tree-shaped pattern. Node 0 is the root atom.
#[derive(Debug, Clone)]
pub struct Pattern {
    nodes: Vec<Node>,
}

/// Atom view used for matching: hydrogens are explicit atoms.
#[derive(Debug, Clone)]
pub struct QueryAtom {
    pub number: u8,
    pub aromatic: bool,
    pub charge: i8,
    pub hydrogens: u8,
    pub connections: u8,
}

/// Graph with every hydrogen as its own atom, in the layout the typer needs.
#[derive(Debug, Clone)]
pub struct ExpandedGraph {
    pub atoms: Vec<QueryAtom>,
    pub adjacency: Vec<Vec<(usize, BondOrder)>>,
    /// Index of the graph atom for heavy atoms, or the host atom for added hydrogens.
    pub origin: Vec<usize>,
}

impl ExpandedGraph {
    pub fn new(g: &MolGraph) -> Self {
        let n = g.atom_count();
        let mut atoms = Vec::new();
        let mut adjacency: Vec<Vec<(usize, BondOrder)>> = vec![Vec::new(); n];
        let mut origin: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let a = g.atom(i);
            let explicit_h_neighbors = g.neighbors(i).iter().filter(|&&(w, _)| g.atom(w).atomic_number() == 1).count();
            atoms.push(QueryAtom {
                number: a.atomic_number(),
                aromatic: a.aromatic,
                charge: a.formal_charge,
                hydrogens: a.total_h() + explicit_h_neighbors as u8,
                connections: a.degree + a.total_h(),
            });
        }
        for b in g.bonds() {
            adjacency[b.a].push((b.b, b.order));
            adjacency[b.b].push((b.a, b.order));
        }
        for i in 0..n {
            for _ in 0..g.atom(i).total_h() {
                let h = atoms.len();
                atoms.push(QueryAtom { number: 1, aromatic: false, charge: 0, hydrogens: 0, connections: 1 });
                adjacency.push(vec![(i, BondOrder::Single)]);
                adjacency[i].push((h, BondOrder::Single));
                origin.push(i);
            }
        }
        ExpandedGraph { atoms, adjacency, origin }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self) -> PatternError {
        PatternError { pattern: self.text.to_string(), offset: self.pos }
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.text[start..self.pos].parse().ok()
    }

    fn element(&mut self) -> Option<Prim> {
        const TWO: [(&str, u8); 2] = [("Cl", 17), ("Br", 35)];
        const ONE: [(u8, u8, bool); 14] = [
            (b'B', 5, false),
            (b'C', 6, false),
            (b'N', 7, false),
            (b'O', 8, false),
            (b'F', 9, false),
            (b'P', 15, false),
            (b'S', 16, false),
            (b'I', 53, false),
            (b'b', 5, true),
            (b'c', 6, true),
            (b'n', 7, true),
            (b'o', 8, true),
            (b'p', 15, true),
            (b's', 16, true),
        ];
        for (sym, z) in TWO {
            if self.text[self.pos..].starts_with(sym) {
                self.pos += 2;
                return Some(Prim::Element { number: z, aromatic: false });
            }
        }
        let c = self.peek()?;
        let &(_, z, aromatic) = ONE.iter().find(|(s, _, _)| *s == c)?;
        self.pos += 1;
        Some(Prim::Element { number: z, aromatic })
    }

    fn primitive(&mut self) -> Result<Prim, PatternError> {
        if let Some(e) = self.element() {
            return Ok(e);
        }
        let c = self.peek().ok_or_else(|| self.err())?;
        self.pos += 1;
        let small = |v: Option<u32>, default: u32| v.unwrap_or(default).min(255) as u8;
        Ok(match c {
            b'*' => Prim::Any,
            b'A' => Prim::Aliphatic,
            b'a' => Prim::Aromatic,
            b'#' => Prim::Number(self.number().map(|v| v as u8).ok_or_else(|| self.err())?),
            b'H' => Prim::Hydrogens(small(self.number(), 1)),
            b'X' => Prim::Connections(small(self.number(), 1)),
            b'+' => Prim::Charge(small(self.number(), 1) as i8),
            b'-' => Prim::Charge(-(small(self.number(), 1) as i8)),
            _ => {
                self.pos -= 1;
                return Err(self.err());
            }
        })
    }

    fn unary(&mut self) -> Result<Expr, PatternError> {
        if self.eat(b'!') {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        Ok(Expr::Prim(self.primitive()?))
    }

    fn high_and(&mut self) -> Result<Expr, PatternError> {
        let mut parts = vec![self.unary()?];
        loop {
            self.eat(b'&');
            match self.peek() {
                Some(b',' | b';' | b']') | None => break,
                _ => parts.push(self.unary()?),
            }
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::And(parts) })
    }

    fn or(&mut self) -> Result<Expr, PatternError> {
        let mut parts = vec![self.high_and()?];
        while self.eat(b',') {
            parts.push(self.high_and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Or(parts) })
    }

    fn low_and(&mut self) -> Result<Expr, PatternError> {
        let mut parts = vec![self.or()?];
        while self.eat(b';') {
            parts.push(self.or()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::And(parts) })
    }

    fn atom(&mut self) -> Result<Expr, PatternError> {
        if self.eat(b'[') {
            let e = self.low_and()?;
            if !self.eat(b']') {
                return Err(self.err());
            }
            return Ok(e);
        }
        match self.peek() {
            Some(b'*' | b'A' | b'a') => Ok(Expr::Prim(self.primitive()?)),
            _ => self.element().map(Expr::Prim).ok_or_else(|| self.err()),
        }
    }

    fn bond(&mut self) -> BondQuery {
        let q = match self.peek() {
            Some(b'-') => BondQuery::Order(BondOrder::Single),
            Some(b'=') => BondQuery::Order(BondOrder::Double),
            Some(b'#') => BondQuery::Order(BondOrder::Triple),
            Some(b':') => BondQuery::Order(BondOrder::Aromatic),
            _ => return BondQuery::SingleOrAromatic,
        };
        self.pos += 1;
        q
    }

    fn chain(&mut self, nodes: &mut Vec<Node>, mut prev: usize) -> Result<(), PatternError> {
        loop {
            match self.peek() {
                None | Some(b')') => return Ok(()),
                Some(b'(') => {
                    self.pos += 1;
                    let bond = self.bond();
                    let expr = self.atom()?;
                    nodes.push(Node { expr, parent: Some((prev, bond)) });
                    let head = nodes.len() - 1;
                    self.chain(nodes, head)?;
                    if !self.eat(b')') {
                        return Err(self.err());
                    }
                }
                _ => {
                    let bond = self.bond();
                    let expr = self.atom()?;
                    nodes.push(Node { expr, parent: Some((prev, bond)) });
                    prev = nodes.len() - 1;
                }
            }
        }
    }
}

impl Pattern {
    pub fn parse(text: &str) -> Result<Pattern, PatternError> {
        let mut p = Parser { text, pos: 0 };
        let root = p.atom()?;
        let mut nodes = vec![Node { expr: root, parent: None }];
        p.chain(&mut nodes, 0)?;
        if p.pos != text.len() {
            return Err(p.err());
        }
        Ok(Pattern { nodes })
    }

    /// Whether some embedding maps the root to `atom`.
    pub fn matches_at(&self, g: &ExpandedGraph, atom: usize) -> bool {
        if !eval(&self.nodes[0].expr, &g.atoms[atom]) {
            return false;
        }
        let mut assignment = vec![usize::MAX; self.nodes.len()];
        assignment[0] = atom;
        self.extend(g, &mut assignment, 1)
    }

    fn extend(&self, g: &ExpandedGraph, assignment: &mut [usize], k: usize) -> bool {
        if k == self.nodes.len() {
            return true;
        }
        let (parent, bond) = self.nodes[k].parent.expect("non-root node has a parent");
        let from = assignment[parent];
        for &(cand, order) in &g.adjacency[from] {
            if assignment[..k].contains(&cand) {
                continue;
            }
            let bond_ok = match bond {
                BondQuery::SingleOrAromatic => matches!(order, BondOrder::Single | BondOrder::Aromatic),
                BondQuery::Order(o) => o == order,
            };
            if !bond_ok || !eval(&self.nodes[k].expr, &g.atoms[cand]) {
                continue;
            }
            assignment[k] = cand;
            if self.extend(g, assignment, k + 1) {
                return true;
            }
        }
        assignment[k] = usize::MAX;
        false
    }
}

fn eval(e: &Expr, a: &QueryAtom) -> bool {
    match e {
        Expr::Prim(p) => match *p {
            Prim::Any => true,
            Prim::Number(z) => a.number == z,
            Prim::Element { number, aromatic } => a.number == number && a.aromatic == aromatic,
            Prim::Aliphatic => !a.aromatic,
            Prim::Aromatic => a.aromatic,
            Prim::Hydrogens(h) => a.hydrogens == h,
            Prim::Connections(x) => a.connections == x,
            Prim::Charge(c) => a.charge == c,
        },
        Expr::Not(inner) => !eval(inner, a),
        Expr::And(parts) => parts.iter().all(|p| eval(p, a)),
        Expr::Or(parts) => parts.iter().any(|p| eval(p, a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_smiles;

    fn roots(pattern: &str, smiles: &str) -> Vec<usize> {
        let g = parse_smiles(smiles).unwrap();
        let x = ExpandedGraph::new(&g);
        let p = Pattern::parse(pattern).unwrap();
        (0..x.atoms.len()).filter(|&i| p.matches_at(&x, i)).collect()
    }

    #[test]
    fn precedence_of_logical_operators() {
        // N with 1..3 H and positive charge
        assert_eq!(roots("[NH3,NH2,NH;+,+2,+3]", "C[NH3+]"), vec![1]);
        assert!(roots("[NH3,NH2,NH;+,+2,+3]", "CN").is_empty());
        assert_eq!(roots("[!#1;A,a]", "CO").len(), 2);
    }

    #[test]
    fn branches_and_bonds() {
        assert_eq!(roots("[O]=C(C)([A;!#1])", "CC(C)=O"), vec![3]);
        assert!(roots("[O]=C(C)([A;!#1])", "CC=O").is_empty());
        assert_eq!(roots("[c](:a)(:a)-C", "Cc1ccccc1"), vec![1]);
        assert_eq!(roots("[#1]O[CX4,c]", "CO").len(), 1);
    }

    #[test]
    fn injective_mapping() {
        // two distinct carbons required
        assert!(roots("[CH2](C)C", "CC").is_empty());
        assert_eq!(roots("[CH2](C)C", "CCC"), vec![1]);
    }

    #[test]
    fn rejects_unsupported_syntax() {
        assert!(Pattern::parse("C1CC1").is_err());
        assert!(Pattern::parse("[C").is_err());
    }
}
