//! Content-based community detection for short user-generated messages.
//!
//! The pipeline learns an n-gram embedding space from the messages
//! themselves, composes each message vector as the mean of its n-gram
//! vectors, discovers communities as dense regions of that space with
//! DBSCAN, and profiles the result: community centroids, top descriptive
//! n-grams, a row-stochastic user-affiliation matrix, and multi-membership
//! statistics. K-means baselines (over TF-IDF user vectors and over the
//! latent message vectors) and clustering-quality metrics (silhouette, NMI)
//! support evaluation against reference labelings.
//!
//! ```
//! use neurocom::corpus::{build_vocabulary, Corpus, Message};
//! use neurocom::embedding::{train, TrainConfig};
//! use neurocom::message::{embed_corpus, CompositionMode};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let corpus = Corpus::from_messages([
//!     Message::new("m1", "ana", "low carb lunch today"),
//!     Message::new("m2", "bo", "morning run then a long walk"),
//!     Message::new("m3", "ana", "carb count for lunch"),
//! ])?;
//! let vocab = build_vocabulary(&corpus, 2, 1)?;
//! let config = TrainConfig { dimension: 8, epochs: 2, ..TrainConfig::default() };
//! let matrices = train(&corpus, &vocab, &config)?;
//! let (vectors, skipped) = embed_corpus(&corpus, &vocab, &matrices, 2, CompositionMode::Multiset);
//! assert_eq!(vectors.len(), 3);
//! assert!(skipped.is_empty());
//! # Ok(())
//! # }
//! ```
//!
//! The accompanying guide under `book/` walks through each stage; its code
//! snippets compile and run as part of `cargo test --doc`.

pub mod clustering;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod message;
pub mod metrics;
pub mod pipeline;
pub mod profiling;
pub mod synth;

pub use clustering::{ClusterAssignment, Metric};
pub use corpus::{Corpus, Message, Vocabulary};
pub use embedding::{EmbeddingMatrix, TrainConfig};
pub use message::{CompositionMode, MessageVector};
pub use metrics::MetricsReport;
pub use pipeline::{run_pipeline, PipelineConfig};

// The guide's code blocks double as doctests so the book can never drift
// from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/embeddings.md")]
    mod embeddings {}
    #[doc = include_str!("../../../book/src/messages.md")]
    mod messages {}
    #[doc = include_str!("../../../book/src/clustering.md")]
    mod clustering {}
    #[doc = include_str!("../../../book/src/profiling.md")]
    mod profiling {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}
