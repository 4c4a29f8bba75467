//! Meta-language corpus construction, conformer codec, a small decoder-only
//! transformer with hand-written gradients, training, decoding and metrics.

pub mod conformer;
pub mod decode;
pub mod head;
pub mod metalang;
pub mod metrics;
pub mod model;
pub mod train;
mod error;
mod scalar;

pub use error::{CheckpointError, ConformerError, DecodeError, Diagnostic, MetalangError, MetricError, ModelError, TrainError, ValueError};
pub use scalar::Scalar;

pub type Conformer64 = conformer::Conformer<f64>;
pub type InternalConformer64 = conformer::InternalConformer<f64>;
