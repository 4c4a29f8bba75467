use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmilesErrorKind {
    Empty,
    UnclosedBracket,
    BadBracketAtom,
    UnknownElement,
    UnexpectedCharacter,
    UnmatchedParenthesis,
    UnclosedRingBond,
    RingBondConflict,
    DuplicateBond,
    DanglingBond,
    ValenceOverflow,
    BadAromaticity,
    MultipleComponents,
    Unsupported,
}

impl SmilesErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SmilesErrorKind::Empty => "empty input",
            SmilesErrorKind::UnclosedBracket => "unclosed bracket atom",
            SmilesErrorKind::BadBracketAtom => "malformed bracket atom",
            SmilesErrorKind::UnknownElement => "unknown element",
            SmilesErrorKind::UnexpectedCharacter => "unexpected character",
            SmilesErrorKind::UnmatchedParenthesis => "unmatched parenthesis",
            SmilesErrorKind::UnclosedRingBond => "unclosed ring-bond digit",
            SmilesErrorKind::RingBondConflict => "conflicting ring-bond orders",
            SmilesErrorKind::DuplicateBond => "duplicate or self bond",
            SmilesErrorKind::DanglingBond => "bond symbol without a following atom",
            SmilesErrorKind::ValenceOverflow => "valence overflow",
            SmilesErrorKind::BadAromaticity => "aromatic atoms fail the ring check",
            SmilesErrorKind::MultipleComponents => "multi-component SMILES not supported",
            SmilesErrorKind::Unsupported => "unsupported SMILES feature",
        }
    }
}

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} at byte {offset}", kind.as_str())]
pub struct SmilesError {
    pub kind: SmilesErrorKind,
    pub offset: usize,
}

impl SmilesError {
    pub fn new(kind: SmilesErrorKind, offset: usize) -> Self {
        SmilesError { kind, offset }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DescriptorError {
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("molecule has no atoms")]
    EmptyGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FingerprintError {
    #[error("fingerprint kinds or parameters differ ({0} vs {1})")]
    KindMismatch(String, String),
    #[error("parameter {0} out of range")]
    BadParameter(usize),
    #[error("bad fingerprint hex `{0}`")]
    BadHex(String),
}
