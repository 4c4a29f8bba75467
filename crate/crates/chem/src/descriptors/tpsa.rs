//! Topological polar surface area from N and O fragment contributions.

use std::sync::OnceLock;

use crate::graph::{BondOrder, MolGraph};

const TABLE: &str = include_str!("tpsa.txt");

#[derive(Debug, Clone, PartialEq)]
struct Rule {
    element: u8,
    counts: [Option<i32>; 7],
    in_3_ring: Option<bool>,
    value: f64,
}

fn rules() -> &'static [Rule] {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    RULES.get_or_init(|| {
        TABLE
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| {
                let cols: Vec<&str> = l.split_whitespace().collect();
                assert_eq!(cols.len(), 10, "bundled table row: {l}");
                let opt = |s: &str| if s == "*" { None } else { Some(s.parse::<i32>().expect("bundled table")) };
                let mut counts = [None; 7];
                for (k, c) in counts.iter_mut().enumerate() {
                    *c = opt(cols[1 + k]);
                }
                Rule {
                    element: if cols[0] == "N" { 7 } else { 8 },
                    counts,
                    in_3_ring: match cols[8] {
                        "y" => Some(true),
                        "n" => Some(false),
                        _ => None,
                    },
                    value: cols[9].parse().expect("bundled table"),
                }
            })
            .collect()
    })
}

/// Contribution of each atom (zero for anything but N and O).
pub fn tpsa_contribs(g: &MolGraph) -> Vec<f64> {
    (0..g.atom_count())
        .map(|i| {
            let a = g.atom(i);
            let z = a.atomic_number();
            if z != 7 && z != 8 {
                return 0.0;
            }
            let mut neighbors = 0;
            let mut hydrogens = a.total_h() as i32;
            let (mut single, mut double, mut triple, mut aromatic) = (0, 0, 0, 0);
            for &(n, b) in g.neighbors(i) {
                if g.atom(n).atomic_number() == 1 {
                    hydrogens += 1;
                    continue;
                }
                neighbors += 1;
                match g.bonds()[b].order {
                    BondOrder::Single => single += 1,
                    BondOrder::Double => double += 1,
                    BondOrder::Triple => triple += 1,
                    BondOrder::Aromatic => aromatic += 1,
                }
            }
            let actual = [neighbors, hydrogens, single, double, triple, aromatic, a.formal_charge as i32];
            let ring3 = g.in_ring_of_size(i, 3);
            let hit = rules().iter().find(|r| {
                r.element == z
                    && r.counts.iter().zip(&actual).all(|(want, got)| want.map_or(true, |w| w == *got))
                    && r.in_3_ring.map_or(true, |w| w == ring3)
            });
            match hit {
                Some(r) => r.value,
                None if z == 7 => (30.5 - 8.2 * neighbors as f64 + 1.5 * hydrogens as f64).max(0.0),
                None => (28.5 - 8.6 * neighbors as f64 + 1.5 * hydrogens as f64).max(0.0),
            }
        })
        .collect()
}

pub fn tpsa(g: &MolGraph) -> f64 {
    tpsa_contribs(g).iter().sum()
}
