//! Decoder-only transformer with hand-written reverse-mode gradients.

pub mod checkpoint;
mod config;
pub mod ops;
pub mod gradcheck;
mod params;
mod transformer;

pub use config::{parse_kv, ModelConfig};
pub use params::{BlockInfo, LayerBlocks, Layout, Params};
pub use transformer::{Forward, KvCache, LossStats, Transformer};
