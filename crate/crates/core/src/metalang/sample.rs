use rand::seq::IndexedRandom;
use rand::Rng;
use spoke_chem::{compute, fingerprint, parse_smiles, tokenize_smiles, FingerprintKind, MolGraph, PROPERTY_NAMES};

use super::noise::{apply_order_noise, apply_sequence_noise, apply_token_noise, TrainingPair};
use super::sequence::{build_meta_sequence, Item, MetaSequence};
use super::task::{Knowledge, Noise, TaskSpec};
use super::vocab::{Vocab, COMMA};
use crate::conformer::{encode_conformer, quantize_internal, Conformer, ConformerRecord};
use crate::error::MetalangError;

/// A parsed input molecule; `tokens` concatenate back to `smiles`.
#[derive(Debug, Clone)]
pub struct Molecule {
    pub smiles: String,
    pub tokens: Vec<String>,
    pub graph: MolGraph,
    pub conformer: Option<Conformer<f64>>,
}

impl Molecule {
    pub fn parse(smiles: &str) -> Result<Self, MetalangError> {
        let graph = parse_smiles(smiles)?;
        let tokens = tokenize_smiles(smiles)?;
        Ok(Molecule { smiles: smiles.to_string(), tokens, graph, conformer: None })
    }

    pub fn from_record(rec: &ConformerRecord) -> Result<Self, MetalangError> {
        let mut m = Self::parse(&rec.smiles)?;
        if rec.coords.len() != m.graph.atom_count() {
            return Err(MetalangError::Conformer(crate::ConformerError::LengthMismatch(
                rec.coords.len(),
                m.graph.atom_count(),
            )));
        }
        m.conformer = Some(rec.conformer());
        Ok(m)
    }

    /// SMILES tokens that denote atoms, in order.
    pub fn atom_tokens(&self) -> Vec<&str> {
        self.tokens.iter().map(String::as_str).filter(|t| is_atom_token(t)).collect()
    }
}

pub fn is_atom_token(t: &str) -> bool {
    t.starts_with('[') || t.starts_with(|c: char| c.is_ascii_alphabetic())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    /// Property triples per sample are drawn uniformly from `k_min..=k_max`.
    pub k_min: usize,
    pub k_max: usize,
    pub mask_rate: f64,
    /// Longest allowed `source, BOS, target` stream.
    pub max_len: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { k_min: 1, k_max: 10, mask_rate: 0.15, max_len: 512 }
    }
}

fn property_sequence(
    vocab: &Vocab,
    mol: &Molecule,
    task: TaskSpec,
    opts: &SampleOptions,
    rng: &mut impl Rng,
) -> Result<MetaSequence, MetalangError> {
    let k_max = opts.k_max.min(PROPERTY_NAMES.len());
    let k = rng.random_range(opts.k_min.min(k_max)..=k_max);
    let props = PROPERTY_NAMES
        .choose_multiple(rng, k)
        .map(|name| compute(name, &mol.graph))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| MetalangError::Io(e.to_string()))?;
    build_meta_sequence(vocab, &mol.tokens, &props, task)
}

fn fingerprint_sequence(
    vocab: &Vocab,
    mol: &Molecule,
    task: TaskSpec,
    rng: &mut impl Rng,
) -> Result<MetaSequence, MetalangError> {
    let kind = *FingerprintKind::ALL.choose(rng).unwrap();
    let fp = fingerprint(&mol.graph, kind, kind.default_param()).map_err(|e| MetalangError::Io(e.to_string()))?;
    let (zero, one) = (vocab.id("0")?, vocab.id("1")?);
    let value = fp.bits().into_iter().map(|b| if b { one } else { zero }).collect();
    Ok(MetaSequence { task, subject: vocab.encode(&mol.tokens)?, items: vec![Item { name: vocab.id(kind.name())?, value }] })
}

fn conformation_sequence(vocab: &Vocab, mol: &Molecule, task: TaskSpec) -> Result<MetaSequence, MetalangError> {
    let conf = mol.conformer.as_ref().ok_or(MetalangError::MissingConformer)?;
    let records = quantize_internal(&encode_conformer(conf)?);
    let atoms = mol.atom_tokens();
    if atoms.len() != records.len() {
        return Err(MetalangError::Conformer(crate::ConformerError::LengthMismatch(atoms.len(), records.len())));
    }
    let mut items = Vec::with_capacity(atoms.len());
    for (atom, numbers) in atoms.iter().zip(&records) {
        let mut value = Vec::new();
        for (i, n) in numbers.iter().enumerate() {
            if i > 0 {
                value.push(COMMA);
            }
            for ch in n.chars() {
                value.push(vocab.id(ch.encode_utf8(&mut [0; 4]))?);
            }
        }
        items.push(Item { name: vocab.id(atom)?, value });
    }
    Ok(MetaSequence { task, subject: vocab.encode(&mol.tokens)?, items })
}

/// Build the meta sequence a task calls for, then corrupt it.
pub fn make_sample(
    vocab: &Vocab,
    mol: &Molecule,
    task: TaskSpec,
    opts: &SampleOptions,
    rng: &mut impl Rng,
) -> Result<TrainingPair, MetalangError> {
    let seq = match task.knowledge {
        Knowledge::Property => property_sequence(vocab, mol, task, opts, rng)?,
        Knowledge::Fingerprint => fingerprint_sequence(vocab, mol, task, rng)?,
        Knowledge::Conformation => conformation_sequence(vocab, mol, task)?,
    };
    let pair = match task.noise {
        Noise::Token => apply_token_noise(vocab, &seq, opts.mask_rate, task.direction, rng)?,
        Noise::Sequence => apply_sequence_noise(&seq, task.direction)?,
        Noise::Order => apply_order_noise(&seq, task.direction, rng)?,
    };
    if pair.stream_len() > opts.max_len {
        return Err(MetalangError::TooLong { len: pair.stream_len(), max: opts.max_len });
    }
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metalang::task::{Direction, Knowledge as K, Noise as N};
    use crate::metalang::vocab::{EOS, MASK, SEP, VALUE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mol_with_conformer() -> Molecule {
        let rec = ConformerRecord {
            smiles: "CCO".into(),
            coords: vec![[0.0, 0.0, 0.0], [1.52, 0.0, 0.0], [2.0, 1.35, 0.0]],
        };
        Molecule::from_record(&rec).unwrap()
    }

    #[test]
    fn fingerprint_prediction_shape() {
        let v = Vocab::new(Vec::<String>::new());
        let m = Molecule::parse("c1ccccc1O").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = TaskSpec::new(K::Fingerprint, N::Sequence, Direction::Object);
        let p = make_sample(&v, &m, t, &SampleOptions::default(), &mut rng).unwrap();
        assert_eq!(p.target.len(), 176 + 1);
        assert_eq!(*p.target.last().unwrap(), EOS);
        assert_eq!(p.source[p.source.len() - 1], VALUE);
        assert_eq!(p.reconstruct(&v).unwrap().items[0].value.len(), 176);
    }

    #[test]
    fn conformation_tasks() {
        let v = Vocab::new(Vec::<String>::new());
        let m = mol_with_conformer();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = TaskSpec::new(K::Conformation, N::Sequence, Direction::Object);
        let p = make_sample(&v, &m, t, &SampleOptions::default(), &mut rng).unwrap();
        let text: String = v.decode(&p.target).concat();
        assert_eq!(text, "<SEP>1.520<SEP>1.433<,>109.6<EOS>");
        let t = TaskSpec::new(K::Conformation, N::Token, Direction::Object);
        let p = make_sample(&v, &m, t, &SampleOptions::default(), &mut rng).unwrap();
        assert!(p.source.contains(&MASK));
        assert!(!p.source[..p.source.iter().position(|&x| x == SEP).unwrap()].contains(&MASK));
        let plain = Molecule::parse("CCO").unwrap();
        assert_eq!(make_sample(&v, &plain, t, &SampleOptions::default(), &mut rng), Err(MetalangError::MissingConformer));
    }

    #[test]
    fn property_counts_and_length_limit() {
        let v = Vocab::new(Vec::<String>::new());
        let m = Molecule::parse("CC(=O)Oc1ccccc1C(=O)O").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let opts = SampleOptions { k_min: 3, k_max: 3, ..Default::default() };
        let p = make_sample(&v, &m, TaskSpec::PREDICT, &opts, &mut rng).unwrap();
        assert_eq!(p.source.iter().filter(|&&x| x == VALUE).count(), 3);
        let unconditional = SampleOptions { k_min: 0, k_max: 0, ..Default::default() };
        let p = make_sample(&v, &m, TaskSpec::GENERATE, &unconditional, &mut rng).unwrap();
        assert_eq!(p.source.len(), 3);
        let short = SampleOptions { max_len: 10, ..Default::default() };
        assert!(matches!(make_sample(&v, &m, TaskSpec::GENERATE, &short, &mut rng), Err(MetalangError::TooLong { .. })));
    }

    #[test]
    fn atom_tokens() {
        let m = Molecule::parse("C[C@@H](Cl)c1cc[nH]c1").unwrap();
        assert_eq!(m.atom_tokens().len(), m.graph.atom_count());
    }
}
