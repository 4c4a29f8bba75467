//! Optimization loop for the language model.

mod adam;
mod trainer;

pub use adam::{clip_grad_norm, Adam, AdamConfig};
pub use trainer::{compact_ids, probe_learning_rates, Example, LogRecord, ProbeResult, StepStats, TrainConfig, Trainer};
