use std::collections::HashMap;

use spoke_chem::{FingerprintKind, PROPERTY_NAMES};

use super::numeric::NUMERIC_CHARS;
use super::task::{TaskSpec, TASK_COUNT};
use crate::error::MetalangError;

pub const PAD: usize = 0;
pub const BOS: usize = 1;
pub const EOS: usize = 2;
pub const SEP: usize = 3;
pub const MASK: usize = 4;
pub const VALUE: usize = 5;
pub const SPAN: usize = 6;
/// Separates the numbers inside one conformation record.
pub const COMMA: usize = 7;

pub const SPECIALS: [&str; 8] = ["<PAD>", "<BOS>", "<EOS>", "<SEP>", "<MASK>", "<VALUE>", "<SPAN>", "<,>"];

/// Ids below this are specials or task tags.
pub const FIRST_PLAIN: usize = SPECIALS.len() + TASK_COUNT;

pub fn tag_id(task: TaskSpec) -> usize {
    SPECIALS.len() + task.index()
}

/// SMILES tokens always present, so small corpora still share ids.
const BASE_SMILES: [&str; 45] = [
    "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "b", "c", "n", "o", "p", "s", "(", ")", "=", "#", "-", ":", "/",
    "\\", ".", "1", "2", "3", "4", "5", "6", "7", "8", "9", "%10", "[nH]", "[NH+]", "[NH2+]", "[NH3+]", "[N+]", "[O-]",
    "[C@H]", "[C@@H]", "[C@]", "[C@@]",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    /// Specials and task tags, then numeric characters, property names,
    /// fingerprint kinds, and SMILES tokens (the base set plus `extra`,
    /// sorted). Shared spellings get one id.
    pub fn new<S: AsRef<str>>(extra_smiles: impl IntoIterator<Item = S>) -> Self {
        let mut tokens: Vec<String> = SPECIALS.iter().map(|s| s.to_string()).collect();
        tokens.extend(TaskSpec::all().iter().map(|t| t.tag()));
        tokens.extend(NUMERIC_CHARS.iter().map(|s| s.to_string()));
        tokens.extend(PROPERTY_NAMES.iter().map(|s| s.to_string()));
        tokens.extend(FingerprintKind::ALL.iter().map(|k| k.name().to_string()));
        let mut smiles: Vec<String> = BASE_SMILES.iter().map(|s| s.to_string()).collect();
        smiles.extend(extra_smiles.into_iter().map(|s| s.as_ref().to_string()));
        smiles.sort();
        tokens.extend(smiles);

        let mut v = Vocab { tokens: Vec::new(), index: HashMap::new() };
        for t in tokens {
            v.push(t);
        }
        v
    }

    fn push(&mut self, t: String) {
        if !self.index.contains_key(&t) {
            self.index.insert(t.clone(), self.tokens.len());
            self.tokens.push(t);
        }
    }

    /// Rebuild from a stored token list, checking the fixed prefix.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self, MetalangError> {
        let fixed: Vec<String> =
            SPECIALS.iter().map(|s| s.to_string()).chain(TaskSpec::all().iter().map(|t| t.tag())).collect();
        if tokens.len() < fixed.len() || tokens[..fixed.len()] != fixed[..] {
            return Err(MetalangError::Io("vocabulary does not start with the special tokens".into()));
        }
        let mut index = HashMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(MetalangError::Io(format!("duplicate vocabulary token `{t}`")));
            }
        }
        Ok(Vocab { tokens, index })
    }

    /// One token per line.
    pub fn parse(text: &str) -> Result<Self, MetalangError> {
        Self::from_tokens(text.lines().map(str::to_string).collect())
    }

    pub fn to_text(&self) -> String {
        self.tokens.iter().flat_map(|t| [t.as_str(), "\n"]).collect()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id(&self, token: &str) -> Result<usize, MetalangError> {
        self.index.get(token).copied().ok_or_else(|| MetalangError::UnknownToken(token.to_string()))
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<usize>, MetalangError> {
        tokens.iter().map(|t| self.id(t.as_ref())).collect()
    }

    pub fn decode(&self, ids: &[usize]) -> Vec<String> {
        ids.iter().map(|&i| self.tokens.get(i).cloned().unwrap_or_else(|| format!("<{i}?>"))).collect()
    }

    pub fn is_special(&self, id: usize) -> bool {
        id < FIRST_PLAIN
    }

    /// Numeric characters and fingerprint bits.
    pub fn is_numeric(&self, id: usize) -> bool {
        self.tokens.get(id).is_some_and(|t| NUMERIC_CHARS.contains(&t.as_str()))
    }

    /// Tokens that may appear inside an object value.
    pub fn is_value_token(&self, id: usize) -> bool {
        id == COMMA || self.is_numeric(id)
    }

    pub fn tag_task(&self, id: usize) -> Option<TaskSpec> {
        (SPECIALS.len()..FIRST_PLAIN).contains(&id).then(|| TaskSpec::from_index(id - SPECIALS.len()))
    }
}
