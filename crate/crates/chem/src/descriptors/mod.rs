//! The property registry.

mod charpoly;
mod crippen;
mod hybrid;
mod pattern;
mod topology;
mod tpsa;

pub use charpoly::characteristic_polynomial;
pub use crippen::{crippen, crippen_contribs, crippen_table, CrippenType};
pub use hybrid::{conjugated_bonds, hybridizations, Hybridization};
pub use pattern::{ExpandedGraph, Pattern, PatternError};
pub use topology::{chi_v, kappa1, rotatable_bonds};
pub use tpsa::{tpsa, tpsa_contribs};

use crate::error::DescriptorError;
use crate::graph::MolGraph;

/// Property names in registry order.
pub const PROPERTY_NAMES: [&str; 16] = [
    "MolWt",
    "HeavyAtomCount",
    "NHD",
    "NHA",
    "NRB",
    "NAR",
    "RingCount",
    "FractionCSP3",
    "TPSA",
    "MolLogP",
    "MolMR",
    "Kappa1",
    "Chi0v",
    "Chi1v",
    "Chi3v",
    "Ipc",
];

/// Properties whose values are integer counts.
pub const INTEGER_PROPERTIES: [&str; 6] = ["HeavyAtomCount", "NHD", "NHA", "NRB", "NAR", "RingCount"];

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyValue {
    pub name: &'static str,
    pub value: f64,
}

pub fn property_index(name: &str) -> Option<usize> {
    PROPERTY_NAMES.iter().position(|&p| p == name)
}

pub fn compute(name: &str, g: &MolGraph) -> Result<PropertyValue, DescriptorError> {
    let idx = property_index(name).ok_or_else(|| DescriptorError::UnknownProperty(name.to_string()))?;
    if g.is_empty() {
        return Err(DescriptorError::EmptyGraph);
    }
    let value = match idx {
        0 => topology::molecular_weight(g),
        1 => g.heavy_atom_count() as f64,
        2 => topology::donor_count(g) as f64,
        3 => topology::acceptor_count(g) as f64,
        4 => rotatable_bonds(g) as f64,
        5 => topology::aromatic_ring_count(g) as f64,
        6 => g.rings().len() as f64,
        7 => topology::fraction_csp3(g),
        8 => tpsa(g),
        9 => crippen(g).0,
        10 => crippen(g).1,
        11 => kappa1(g),
        12 => chi_v(g, 0),
        13 => chi_v(g, 1),
        14 => chi_v(g, 3),
        15 => charpoly::ipc(g),
        _ => unreachable!(),
    };
    Ok(PropertyValue { name: PROPERTY_NAMES[idx], value })
}

/// Every registry property, in registry order.
pub fn compute_all(g: &MolGraph) -> Result<Vec<PropertyValue>, DescriptorError> {
    PROPERTY_NAMES.iter().map(|n| compute(n, g)).collect()
}

/// Lipinski-style screen: MolWt <= 500, NHD <= 5, NHA <= 10,
/// -2 <= MolLogP <= 5, NRB <= 10.
pub fn lipinski_pass(g: &MolGraph) -> bool {
    lipinski_violations(g) == 0
}

/// Number of the five Lipinski bounds the molecule breaks.
pub fn lipinski_violations(g: &MolGraph) -> usize {
    if g.is_empty() {
        return 5;
    }
    let get = |n: &str| compute(n, g).map(|p| p.value).unwrap_or(f64::NAN);
    let within = |v: f64, lo: f64, hi: f64| (lo..=hi).contains(&v);
    [
        within(get("MolWt"), 0.0, 500.0),
        within(get("NHD"), 0.0, 5.0),
        within(get("NHA"), 0.0, 10.0),
        within(get("MolLogP"), -2.0, 5.0),
        within(get("NRB"), 0.0, 10.0),
    ]
    .iter()
    .filter(|ok| !**ok)
    .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_smiles;

    #[test]
    fn registry_examples() {
        let cco = parse_smiles("CCO").unwrap();
        assert_eq!(compute("NRB", &cco).unwrap().value, 0.0);
        assert_eq!(compute("Chi3v", &cco).unwrap().value, 0.0);
        assert!((compute("TPSA", &cco).unwrap().value - 20.23).abs() < 1e-9);
        let methane = parse_smiles("C").unwrap();
        assert!((compute("MolWt", &methane).unwrap().value - 16.043).abs() < 1e-9);
        let all = compute_all(&methane).unwrap();
        assert_eq!(all.len(), 16);
        assert!(all.iter().all(|p| p.value.is_finite()));
        assert_eq!(compute_all(&cco).unwrap()[2], PropertyValue { name: "NHD", value: 1.0 });
    }

    #[test]
    fn errors() {
        let g = parse_smiles("C").unwrap();
        assert!(matches!(compute("QED", &g), Err(DescriptorError::UnknownProperty(_))));
    }

    #[test]
    fn lipinski() {
        assert!(lipinski_pass(&parse_smiles("CCO").unwrap()));
        let long = "C".repeat(60);
        let g = parse_smiles(&long).unwrap();
        assert!(compute("MolWt", &g).unwrap().value > 842.0);
        assert!(!lipinski_pass(&g));
        assert_eq!(lipinski_violations(&parse_smiles("CCO").unwrap()), 0);
    }
}
