use spoke_chem::PropertyValue;

use super::numeric::encode_value;
use super::task::TaskSpec;
use super::vocab::{tag_id, Vocab, EOS, SEP};
use crate::error::MetalangError;

/// One (p, v) pair of the object region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub name: usize,
    pub value: Vec<usize>,
}

/// `tag, s_1..s_l, SEP, p_1, v_1, …, p_k, v_k, EOS` kept in structured form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaSequence {
    pub task: TaskSpec,
    pub subject: Vec<usize>,
    pub items: Vec<Item>,
}

impl MetaSequence {
    pub fn tokens(&self) -> Vec<usize> {
        let mut out = self.tokens_without_eos();
        out.push(EOS);
        out
    }

    pub(crate) fn tokens_without_eos(&self) -> Vec<usize> {
        let mut out = vec![tag_id(self.task)];
        out.extend(&self.subject);
        out.push(SEP);
        for it in &self.items {
            out.push(it.name);
            out.extend(&it.value);
        }
        out
    }

    pub fn len(&self) -> usize {
        3 + self.subject.len() + self.items.iter().map(|i| 1 + i.value.len()).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Inverse of [`MetaSequence::tokens`]; fails unless the layout is exact.
    pub fn parse(vocab: &Vocab, tokens: &[usize]) -> Result<Self, MetalangError> {
        let malformed = |why: &str| MetalangError::Io(format!("malformed meta sequence: {why}"));
        let (&tag, rest) = tokens.split_first().ok_or_else(|| malformed("empty"))?;
        let task = vocab.tag_task(tag).ok_or_else(|| malformed("no task tag"))?;
        let rest = rest.strip_suffix(&[EOS]).ok_or_else(|| malformed("no EOS"))?;
        let sep = rest.iter().position(|&t| t == SEP).ok_or_else(|| malformed("no SEP"))?;
        let subject = rest[..sep].to_vec();
        if subject.iter().any(|&t| vocab.is_special(t)) {
            return Err(malformed("special token in subject"));
        }
        let mut items: Vec<Item> = Vec::new();
        for &t in &rest[sep + 1..] {
            if vocab.is_value_token(t) {
                items.last_mut().ok_or_else(|| malformed("value before property"))?.value.push(t);
            } else if vocab.is_special(t) {
                return Err(malformed("special token in object"));
            } else {
                items.push(Item { name: t, value: Vec::new() });
            }
        }
        Ok(MetaSequence { task, subject, items })
    }
}

/// Assemble the sequence for a SMILES (already tokenized) and a property list,
/// keeping the properties in the order given.
pub fn build_meta_sequence<S: AsRef<str>>(
    vocab: &Vocab,
    smiles_tokens: &[S],
    properties: &[PropertyValue],
    task: TaskSpec,
) -> Result<MetaSequence, MetalangError> {
    let subject = vocab.encode(smiles_tokens)?;
    let items = properties
        .iter()
        .map(|p| Ok(Item { name: vocab.id(p.name)?, value: vocab.encode(&encode_value(p.value)?)? }))
        .collect::<Result<_, MetalangError>>()?;
    Ok(MetaSequence { task, subject, items })
}
