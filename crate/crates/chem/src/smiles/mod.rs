mod lexer;
mod parser;
mod valence;
mod writer;

pub use lexer::tokenize_smiles;
pub use parser::parse_smiles;
pub(crate) use valence::implicit_hydrogens;
pub use writer::{write_smiles, write_smiles_with_order};
