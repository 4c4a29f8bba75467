use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::noise::TrainingPair;
use super::sample::{make_sample, Molecule, SampleOptions};
use super::task::{Knowledge, TaskSpec, TASK_COUNT};
use super::vocab::Vocab;
use crate::conformer::read_conformer_jsonl;
use crate::error::MetalangError;

/// Sampling weights over the 18 tasks, indexed by [`TaskSpec::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct TaskMixture {
    weights: [f64; TASK_COUNT],
}

impl TaskMixture {
    pub fn uniform() -> Self {
        TaskMixture { weights: [1.0 / TASK_COUNT as f64; TASK_COUNT] }
    }

    pub fn only(task: TaskSpec) -> Self {
        let mut weights = [0.0; TASK_COUNT];
        weights[task.index()] = 1.0;
        TaskMixture { weights }
    }

    /// Normalizes; rejects negative, non-finite or all-zero weights.
    pub fn from_weights(weights: [f64; TASK_COUNT]) -> Result<Self, MetalangError> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(MetalangError::BadMixture("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(MetalangError::BadMixture("all weights are zero".into()));
        }
        Ok(TaskMixture { weights: weights.map(|w| w / total) })
    }

    /// `uniform`, or a comma list of `tag=weight` (tags with or without the
    /// angle brackets); unlisted tasks get weight 0.
    pub fn parse(text: &str) -> Result<Self, MetalangError> {
        let text = text.trim();
        if text.is_empty() || text == "uniform" {
            return Ok(Self::uniform());
        }
        let mut weights = [0.0; TASK_COUNT];
        for part in text.split(',') {
            let (tag, w) = part
                .split_once('=')
                .ok_or_else(|| MetalangError::BadMixture(format!("expected tag=weight, got `{part}`")))?;
            let tag = tag.trim();
            let tag = if tag.starts_with('<') { tag.to_string() } else { format!("<{tag}>") };
            let task = TaskSpec::from_tag(&tag).ok_or_else(|| MetalangError::BadMixture(format!("unknown task {tag}")))?;
            weights[task.index()] =
                w.trim().parse().map_err(|_| MetalangError::BadMixture(format!("bad weight `{w}`")))?;
        }
        Self::from_weights(weights)
    }

    pub fn weights(&self) -> &[f64; TASK_COUNT] {
        &self.weights
    }

    pub fn without_conformation(&self) -> Result<Self, MetalangError> {
        let mut w = self.weights;
        for t in TaskSpec::all().iter().filter(|t| t.knowledge == Knowledge::Conformation) {
            w[t.index()] = 0.0;
        }
        Self::from_weights(w)
    }

    fn needs_conformers(&self) -> bool {
        TaskSpec::all().iter().any(|t| t.knowledge == Knowledge::Conformation && self.weights[t.index()] > 0.0)
    }
}

/// Parse a SMILES list (first whitespace field per line). Returns the
/// molecules and the number of lines that failed to parse.
pub fn load_smiles(text: &str) -> (Vec<Molecule>, usize) {
    let mut bad = 0;
    let mut out = Vec::new();
    for line in text.lines() {
        let Some(smiles) = line.split_whitespace().next() else { continue };
        match Molecule::parse(smiles) {
            Ok(m) => out.push(m),
            Err(_) => bad += 1,
        }
    }
    (out, bad)
}

/// Conformer JSONL into molecules; records that fail to parse or whose atom
/// count disagrees with the SMILES are counted and dropped.
pub fn load_conformers(text: &str) -> Result<(Vec<Molecule>, usize), MetalangError> {
    let records = read_conformer_jsonl(text)?;
    let mut bad = 0;
    let mut out = Vec::new();
    for r in &records {
        match Molecule::from_record(r) {
            Ok(m) => out.push(m),
            Err(_) => bad += 1,
        }
    }
    Ok((out, bad))
}

/// Vocabulary covering every SMILES token of the given molecules.
pub fn vocab_for<'a>(molecules: impl IntoIterator<Item = &'a Molecule>) -> Vocab {
    Vocab::new(molecules.into_iter().flat_map(|m| m.tokens.iter()))
}

/// Infinite, seeded stream of training pairs. Plain molecules and
/// conformer-bearing molecules are each visited in order, cycling.
pub struct CorpusStream<'a> {
    vocab: &'a Vocab,
    molecules: &'a [Molecule],
    conformers: &'a [Molecule],
    dist: WeightedIndex<f64>,
    opts: SampleOptions,
    rng: ChaCha8Rng,
    next_molecule: usize,
    next_conformer: usize,
    /// Molecules drawn but not emitted (too long, or no region to corrupt).
    pub skipped: usize,
}

impl<'a> CorpusStream<'a> {
    pub fn new(
        vocab: &'a Vocab,
        molecules: &'a [Molecule],
        conformers: &'a [Molecule],
        mixture: &TaskMixture,
        opts: SampleOptions,
        seed: u64,
    ) -> Result<Self, MetalangError> {
        let mixture = if conformers.is_empty() && mixture.needs_conformers() {
            mixture.without_conformation()?
        } else {
            mixture.clone()
        };
        let needs_plain = TaskSpec::all()
            .iter()
            .any(|t| t.knowledge != Knowledge::Conformation && mixture.weights[t.index()] > 0.0);
        if needs_plain && molecules.is_empty() {
            return Err(MetalangError::BadMixture("no molecules to sample from".into()));
        }
        let dist = WeightedIndex::new(mixture.weights).map_err(|e| MetalangError::BadMixture(e.to_string()))?;
        Ok(CorpusStream {
            vocab,
            molecules,
            conformers,
            dist,
            opts,
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_molecule: 0,
            next_conformer: 0,
            skipped: 0,
        })
    }
}

impl Iterator for CorpusStream<'_> {
    type Item = TrainingPair;

    fn next(&mut self) -> Option<TrainingPair> {
        // give up if nothing in a long run of draws is usable
        let limit = 100 + 2 * (self.molecules.len() + self.conformers.len());
        for _ in 0..limit {
            let task = TaskSpec::from_index(self.dist.sample(&mut self.rng));
            let mol = if task.knowledge == Knowledge::Conformation {
                self.next_conformer += 1;
                &self.conformers[(self.next_conformer - 1) % self.conformers.len()]
            } else {
                self.next_molecule += 1;
                &self.molecules[(self.next_molecule - 1) % self.molecules.len()]
            };
            match make_sample(self.vocab, mol, task, &self.opts, &mut self.rng) {
                Ok(p) => return Some(p),
                Err(_) => self.skipped += 1,
            }
        }
        None
    }
}

/// One line of a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub task: String,
    pub source: Vec<String>,
    pub target: Vec<String>,
}

impl CorpusRecord {
    pub fn from_pair(vocab: &Vocab, p: &TrainingPair) -> Self {
        CorpusRecord { task: p.task.tag(), source: vocab.decode(&p.source), target: vocab.decode(&p.target) }
    }

    pub fn to_pair(&self, vocab: &Vocab) -> Result<TrainingPair, MetalangError> {
        let task = TaskSpec::from_tag(&self.task).ok_or_else(|| MetalangError::UnknownToken(self.task.clone()))?;
        Ok(TrainingPair { task, source: vocab.encode(&self.source)?, target: vocab.encode(&self.target)? })
    }
}

pub fn write_corpus(
    vocab: &Vocab,
    pairs: impl IntoIterator<Item = TrainingPair>,
    mut out: impl std::io::Write,
) -> std::io::Result<usize> {
    let mut n = 0;
    for p in pairs {
        serde_json::to_writer(&mut out, &CorpusRecord::from_pair(vocab, &p))?;
        out.write_all(b"\n")?;
        n += 1;
    }
    Ok(n)
}

pub fn read_corpus(vocab: &Vocab, text: &str) -> Result<Vec<TrainingPair>, MetalangError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let rec: CorpusRecord =
                serde_json::from_str(l).map_err(|e| MetalangError::Io(format!("corpus line {}: {e}", i + 1)))?;
            rec.to_pair(vocab)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_parsing() {
        assert_eq!(TaskMixture::parse("uniform").unwrap(), TaskMixture::uniform());
        let m = TaskMixture::parse("prop_seq_subj=3, <prop_seq_obj>=1").unwrap();
        assert_eq!(m.weights()[TaskSpec::GENERATE.index()], 0.75);
        assert!(TaskMixture::parse("nope=1").is_err());
        assert!(TaskMixture::parse("prop_seq_subj=-1").is_err());
        assert!(TaskMixture::parse("prop_seq_subj=0").is_err());
        let conf_only = TaskMixture::parse("conf_tok_obj=1").unwrap();
        assert!(conf_only.without_conformation().is_err());
    }

    #[test]
    fn bad_lines_are_counted() {
        let (mols, bad) = load_smiles("CCO\nC1CC\n\nc1ccccc1 benzene\nCC.O\n");
        assert_eq!((mols.len(), bad), (2, 2));
    }

    #[test]
    fn records_roundtrip() {
        let (mols, _) = load_smiles("CCO\nc1ccccc1\n");
        let v = vocab_for(&mols);
        let stream = CorpusStream::new(&v, &mols, &[], &TaskMixture::uniform(), SampleOptions::default(), 3).unwrap();
        let pairs: Vec<_> = stream.take(20).collect();
        let mut buf = Vec::new();
        write_corpus(&v, pairs.clone(), &mut buf).unwrap();
        assert_eq!(read_corpus(&v, std::str::from_utf8(&buf).unwrap()).unwrap(), pairs);
        assert!(pairs.iter().all(|p| p.task.knowledge != Knowledge::Conformation));
    }
}
