//! Fine-grained evaluation toolkit for video-text retrieval.
//!
//! The crate generates hard-negative captions by swapping single words (or
//! pairs of adjacent words) for antonyms or same-tag vocabulary words, scores
//! retrieval models on those negatives with a per-part-of-speech mean
//! reciprocal rank (PoSRank), reproduces corpus diagnostics, and ships a small
//! trainer for checking the coarse and fine contrastive objectives end to end.
//!
//! The main entry points:
//!
//! - [`lexicon::Lexicon`] parses a WordNet 3.x database directory.
//! - [`corpus::Corpus`] loads and tags caption corpora.
//! - [`negatives`] builds evaluation suites and training negatives.
//! - [`similarity`] holds the built-in lexical scorers and external score ingestion.
//! - [`metrics`] computes PoSRank, Recall@k and average rank.
//! - [`analysis`] covers deletion-duplicate and proportion statistics.
//! - [`toytrain`] is the synthetic dual-head trainer.
//! - [`cli`] wires everything into the `posrank` binary.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod io;
pub mod lexicon;
pub mod metrics;
pub mod negatives;
pub mod pos;
pub mod rng;
pub mod similarity;
pub mod toytrain;

pub use error::{Error, Result};
pub use pos::Pos;
