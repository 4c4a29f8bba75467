//! The molecular meta language: vocabulary, value text, ⟨S, P, O⟩ sequences,
//! corruption operators, the task grid and corpus streaming.

mod corpus;
mod noise;
mod numeric;
mod sample;
mod sequence;
mod task;
pub mod vocab;

pub use corpus::{
    load_conformers, load_smiles, read_corpus, vocab_for, write_corpus, CorpusRecord, CorpusStream, TaskMixture,
};
pub use noise::{apply_order_noise, apply_sequence_noise, apply_token_noise, generation_prompt, TrainingPair};
pub use numeric::{canonical_value, decode_value, encode_value, NUMERIC_CHARS};
pub use sample::{is_atom_token, make_sample, Molecule, SampleOptions};
pub use sequence::{build_meta_sequence, Item, MetaSequence};
pub use task::{Direction, Knowledge, Noise, TaskSpec, TASK_COUNT};
pub use vocab::Vocab;
