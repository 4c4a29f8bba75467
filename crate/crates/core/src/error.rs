use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConformerError {
    #[error("conformer has no atoms")]
    Empty,
    #[error("conformer lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("atoms {0} and {1} coincide")]
    Coincident(usize, usize),
    #[error("non-finite coordinate at atom {0}")]
    NonFinite(usize),
    #[error("record {index}: {reason}")]
    BadRecord { index: usize, reason: &'static str },
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValueError {
    #[error("non-finite value")]
    NonFinite,
    #[error("malformed number `{0}`")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetalangError {
    #[error("token `{0}` is not in the vocabulary")]
    UnknownToken(String),
    #[error("noise region is empty")]
    EmptyRegion,
    #[error("noise region too short for shuffling")]
    RegionTooShort,
    #[error("bad noise rate {0}")]
    BadRate(f64),
    #[error("conformation task needs a conformer")]
    MissingConformer,
    #[error("sequence of {len} tokens exceeds the limit {max}")]
    TooLong { len: usize, max: usize },
    #[error("task mixture: {0}")]
    BadMixture(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Smiles(#[from] spoke_chem::SmilesError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Conformer(#[from] ConformerError),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("sequence length {len} exceeds max_len {max}")]
    TooLong { len: usize, max: usize },
    #[error("token id {id} outside vocabulary of {vocab}")]
    BadToken { id: usize, vocab: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("pair has no target positions")]
    EmptyTarget,
    #[error("invalid config: {0}")]
    BadConfig(String),
}

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// State captured when training hits a non-finite loss or gradient.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Diagnostic {
    pub step: u64,
    pub loss: f64,
    pub grad_norm: f64,
    pub lr: f64,
    pub param_norm: f64,
    /// Lengths of the sequences in the offending batch.
    pub batch_lengths: Vec<usize>,
    /// Checkpoint of the pre-step state, when a snapshot directory was set.
    pub snapshot: Option<std::path::PathBuf>,
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("non-finite loss {} (grad norm {}) at step {}", .0.loss, .0.grad_norm, .0.step)]
    NonFinite(Box<Diagnostic>),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("bad training option: {0}")]
    BadOption(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("bad decode parameter: {0}")]
    BadParams(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {0} points")]
    TooFew(usize),
    #[error("zero variance: correlation undefined")]
    ZeroVariance,
    #[error("all x values equal: slope undefined")]
    DegenerateX,
}
