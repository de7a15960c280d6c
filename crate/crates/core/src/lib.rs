//! Extractive long-document summarization over a sentence hypergraph.
//!
//! Sentences become nodes; sections, latent topics and shared keywords become
//! hyperedges. A stack of hypergraph transformer layers (two-phase node/edge
//! attention with multi-head projection, feed-forward block, residuals and
//! layer norm) refines the sentence vectors, and a small MLP head scores each
//! sentence for inclusion in the summary.
//!
//! This crate is `no_std` + `alloc`. File formats, JSONL ingestion and the
//! command-line driver live in the `hegel` crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod embed;
pub mod error;
pub mod hypergraph;
pub mod keywords;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod rouge;
pub mod tensor;
pub mod text;
pub mod topics;
pub mod trainer;

pub use corpus::{Document, RawDocument, Section};
pub use embed::{EmbeddingMatrix, PositionalConfig};
pub use error::{Error, Result};
pub use hypergraph::{EdgeType, Hypergraph, IncidenceColumns};
pub use model::{ModelConfig, ModelParams};
pub use oracle::LabelVector;
pub use rouge::PrfScore;
pub use tensor::{Scalar, Tensor};
pub use topics::TopicModel;
pub use trainer::{Checkpoint, TrainConfig};
