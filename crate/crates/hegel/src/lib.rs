//! File formats, corpus IO and pipeline stages behind the `hegel` binary.

pub mod checkpoint;
pub mod cli;
pub mod emb;
pub mod error;
pub mod graph_cache;
pub mod jsonl;
pub mod manifest;
pub mod stages;
pub mod synth;

pub use error::{Error, Result};
