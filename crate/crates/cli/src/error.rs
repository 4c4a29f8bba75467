use std::path::{Path, PathBuf};

use spoke_core::{CheckpointError, TrainError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: no such file", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: {reason}", path.display())]
    Format { path: PathBuf, reason: String },
    #[error("golden parity failed: {0}")]
    Parity(String),
    #[error("training diverged: {0}")]
    Diverged(String),
    #[error("{0}")]
    Model(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// Process exit status; 2 is also what clap uses for unparseable flags.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::MissingFile(_) => 3,
            CliError::Format { .. } => 4,
            CliError::Parity(_) => 5,
            CliError::Diverged(_) => 6,
            CliError::Model(_) => 7,
            CliError::Io { .. } => 8,
        }
    }

    pub fn format(path: &Path, reason: impl ToString) -> Self {
        CliError::Format { path: path.to_path_buf(), reason: reason.to_string() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            CliError::MissingFile(path.to_path_buf())
        } else {
            CliError::Io { path: path.to_path_buf(), source }
        }
    }

    pub fn checkpoint(path: &Path, e: CheckpointError) -> Self {
        match e {
            CheckpointError::Io(source) if source.kind() != std::io::ErrorKind::UnexpectedEof => CliError::io(path, source),
            other => CliError::format(path, other),
        }
    }

    pub fn train(e: TrainError) -> Self {
        match e {
            TrainError::NonFinite(d) => {
                let snap = d.snapshot.as_ref().map(|p| format!(", snapshot {}", p.display())).unwrap_or_default();
                CliError::Diverged(format!("step {} loss {} grad norm {}{snap}", d.step, d.loss, d.grad_norm))
            }
            TrainError::BadOption(s) => CliError::Usage(s),
            other => CliError::Model(other.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
