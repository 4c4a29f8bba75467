//! Molecular graphs from SMILES, with ring perception, descriptors and
//! hashed fingerprints.

mod aromatic;
mod canon;
pub mod descriptors;
pub mod element;
mod error;
pub mod fingerprints;
mod graph;
pub mod parity;
mod rings;
mod smiles;

pub use canon::{canonical_key, fnv1a};
pub use element::Element;
pub use error::{DescriptorError, FingerprintError, SmilesError, SmilesErrorKind};
pub use graph::{Atom, Bond, BondOrder, MolGraph};
pub use smiles::{parse_smiles, tokenize_smiles, write_smiles, write_smiles_with_order};

/// Smallest set of smallest rings of a parsed graph.
pub fn perceive_rings(g: &MolGraph) -> Vec<Vec<usize>> {
    g.rings().to_vec()
}

pub use descriptors::{compute, compute_all, lipinski_pass, PropertyValue, PROPERTY_NAMES};
pub use fingerprints::{ecfp, fcfp, fingerprint, path_fp, tanimoto, Fingerprint, FingerprintKind, FP_BITS};
