//! Corruption operators. Each turns a meta sequence into a (source, target)
//! pair whose target is what the model must restore.

use rand::seq::SliceRandom;
use rand::Rng;

use spoke_chem::PropertyValue;

use super::sequence::{build_meta_sequence, MetaSequence};
use super::task::{Direction, Knowledge, Noise, TaskSpec};
use super::vocab::{Vocab, BOS, EOS, MASK, SEP, SPAN, VALUE};
use crate::error::MetalangError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingPair {
    pub task: TaskSpec,
    pub source: Vec<usize>,
    /// Ends with EOS.
    pub target: Vec<usize>,
}

impl TrainingPair {
    /// `source, BOS, target` with the loss flags set on target positions.
    pub fn stream(&self) -> (Vec<usize>, Vec<bool>) {
        let mut ids = self.source.clone();
        ids.push(BOS);
        ids.extend(&self.target);
        let mut mask = vec![false; self.source.len() + 1];
        mask.resize(ids.len(), true);
        (ids, mask)
    }

    pub fn stream_len(&self) -> usize {
        self.source.len() + 1 + self.target.len()
    }

    /// Undo the corruption and return the original sequence.
    pub fn reconstruct(&self, vocab: &Vocab) -> Result<MetaSequence, MetalangError> {
        let bad = |why: &str| MetalangError::Io(format!("cannot reconstruct: {why}"));
        let src = &self.source;
        let task = src.first().and_then(|&t| vocab.tag_task(t)).ok_or_else(|| bad("no task tag"))?;
        let t = self.target.strip_suffix(&[EOS]).ok_or_else(|| bad("target lacks EOS"))?;
        let sep = src.iter().position(|&x| x == SEP).ok_or_else(|| bad("no SEP"))?;
        let mut flat: Vec<usize> = match (task.noise, task.direction) {
            (Noise::Token, _) => {
                let mut fill = t.iter();
                let out: Vec<usize> =
                    src.iter().map(|&x| if x == MASK { fill.next().copied() } else { Some(x) }).collect::<Option<_>>()
                        .ok_or_else(|| bad("more masks than target tokens"))?;
                if fill.next().is_some() {
                    return Err(bad("more target tokens than masks"));
                }
                out
            }
            (Noise::Sequence, Direction::Subject) => {
                if src[1..sep] != [SPAN] {
                    return Err(bad("subject is not a span"));
                }
                [&src[..1], t, &src[sep..]].concat()
            }
            (Noise::Sequence, Direction::Object) => {
                let mut values = t.split(|&x| x == SEP);
                let mut out = Vec::new();
                for &x in src {
                    if x == VALUE {
                        out.extend(values.next().ok_or_else(|| bad("too few values"))?);
                    } else {
                        out.push(x);
                    }
                }
                if values.next().is_some() {
                    return Err(bad("too many values"));
                }
                out
            }
            (Noise::Order, Direction::Subject) => [&src[..1], t, &src[sep..]].concat(),
            (Noise::Order, Direction::Object) => [&src[..=sep], t].concat(),
        };
        flat.push(EOS);
        MetaSequence::parse(vocab, &flat)
    }
}

/// Positions (in the EOS-free token list) that token noise may mask.
fn token_region(vocab: &Vocab, seq: &MetaSequence, direction: Direction) -> Vec<usize> {
    match direction {
        Direction::Subject => (1..1 + seq.subject.len()).collect(),
        Direction::Object => {
            let mut pos = 2 + seq.subject.len();
            let mut out = Vec::new();
            for it in &seq.items {
                pos += 1;
                for &v in &it.value {
                    if vocab.is_numeric(v) {
                        out.push(pos);
                    }
                    pos += 1;
                }
            }
            out
        }
    }
}

pub fn apply_token_noise(
    vocab: &Vocab,
    seq: &MetaSequence,
    rate: f64,
    direction: Direction,
    rng: &mut impl Rng,
) -> Result<TrainingPair, MetalangError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(MetalangError::BadRate(rate));
    }
    let region = token_region(vocab, seq, direction);
    if region.is_empty() {
        return Err(MetalangError::EmptyRegion);
    }
    let mut chosen: Vec<usize> = region.iter().copied().filter(|_| rng.random_bool(rate)).collect();
    if chosen.is_empty() {
        chosen.push(region[rng.random_range(0..region.len())]);
    }
    let mut source = seq.tokens_without_eos();
    let mut target: Vec<usize> = chosen.iter().map(|&p| source[p]).collect();
    target.push(EOS);
    chosen.iter().for_each(|&p| source[p] = MASK);
    Ok(TrainingPair { task: seq.task, source, target })
}

pub fn apply_sequence_noise(seq: &MetaSequence, direction: Direction) -> Result<TrainingPair, MetalangError> {
    let tag = seq.tokens_without_eos()[0];
    let (source, mut target) = match direction {
        Direction::Subject => {
            if seq.subject.is_empty() {
                return Err(MetalangError::EmptyRegion);
            }
            let mut src = vec![tag, SPAN, SEP];
            seq.items.iter().for_each(|it| {
                src.push(it.name);
                src.extend(&it.value);
            });
            (src, seq.subject.clone())
        }
        Direction::Object => {
            if seq.items.is_empty() {
                return Err(MetalangError::EmptyRegion);
            }
            let mut src = vec![tag];
            src.extend(&seq.subject);
            src.push(SEP);
            let mut tgt = Vec::new();
            for (i, it) in seq.items.iter().enumerate() {
                src.extend([it.name, VALUE]);
                if i > 0 {
                    tgt.push(SEP);
                }
                tgt.extend(&it.value);
            }
            (src, tgt)
        }
    };
    target.push(EOS);
    Ok(TrainingPair { task: seq.task, source, target })
}

/// Prompt for generating a molecule under property conditions: the source
/// of a subject-direction sequence-noise pair, then BOS. The model's
/// continuation up to EOS is the molecule.
pub fn generation_prompt(vocab: &Vocab, task: TaskSpec, conditions: &[PropertyValue]) -> Result<Vec<usize>, MetalangError> {
    if task.noise != Noise::Sequence || task.direction != Direction::Subject {
        return Err(MetalangError::Unsupported(format!("{} does not generate molecules from a prompt", task.tag())));
    }
    if task.knowledge != Knowledge::Property && !conditions.is_empty() {
        return Err(MetalangError::Unsupported(format!("{} takes no property conditions", task.tag())));
    }
    // the subject never reaches the source in this layout
    let seq = build_meta_sequence(vocab, &["C"], conditions, task)?;
    let mut ids = apply_sequence_noise(&seq, Direction::Subject)?.source;
    ids.push(BOS);
    Ok(ids)
}

/// Shuffle the region's units: single tokens of the subject, or whole names
/// and whole values of the object. The result differs from the original
/// whenever the units are not all identical.
pub fn apply_order_noise(
    seq: &MetaSequence,
    direction: Direction,
    rng: &mut impl Rng,
) -> Result<TrainingPair, MetalangError> {
    let units: Vec<Vec<usize>> = match direction {
        Direction::Subject => seq.subject.iter().map(|&t| vec![t]).collect(),
        Direction::Object => seq.items.iter().flat_map(|it| [vec![it.name], it.value.clone()]).collect(),
    };
    if units.len() < 2 {
        return Err(MetalangError::RegionTooShort);
    }
    let original: Vec<usize> = units.concat();
    let mut order: Vec<usize> = (0..units.len()).collect();
    let flatten = |order: &[usize]| order.iter().flat_map(|&i| units[i].iter().copied()).collect::<Vec<_>>();
    let mut shuffled = original.clone();
    for _ in 0..64 {
        order.shuffle(rng);
        shuffled = flatten(&order);
        if shuffled != original {
            break;
        }
    }
    if shuffled == original {
        // few distinct units: swap the first differing pair
        order = (0..units.len()).collect();
        if let Some(j) = (1..units.len()).find(|&j| units[j] != units[0]) {
            order.swap(0, j);
        }
        shuffled = flatten(&order);
    }

    let flat = seq.tokens_without_eos();
    let start = match direction {
        Direction::Subject => 1,
        Direction::Object => 2 + seq.subject.len(),
    };
    let mut source = flat[..start].to_vec();
    source.extend(&shuffled);
    source.extend(&flat[start + original.len()..]);
    let mut target = original;
    target.push(EOS);
    Ok(TrainingPair { task: seq.task, source, target })
}
