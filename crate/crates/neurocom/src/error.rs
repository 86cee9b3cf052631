//! Error types, one enum per subsystem.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate message id {id:?}")]
    DuplicateId { id: String },
    #[error("no n-gram meets the frequency threshold")]
    EmptyVocabulary,
}

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("index {index} out of range for vocabulary of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("n-gram {0:?} is out of vocabulary")]
    OutOfVocabulary(String),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite matrix entry after training")]
    NonFinite,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad embedding file: {0}")]
    Format(String),
}

#[derive(Debug, Error)]
pub enum EmbedMessageError {
    #[error("message {id:?} has no in-vocabulary n-gram")]
    NotEmbeddable { id: String },
}

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("dimension mismatch: point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("k = {k} exceeds the number of points ({points})")]
    KTooLarge { k: usize, points: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad assignment file: {0}")]
    Format(String),
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("fewer than 2 non-noise clusters")]
    DegenerateClustering,
    #[error("label vectors have different lengths ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("id {0:?} missing from the reference labeling")]
    UnknownId(String),
    #[error("length mismatch: {a} assignments vs {b} points")]
    LengthMismatch { a: usize, b: usize },
    #[error("degenerate result: {0}")]
    Degenerate(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    pub fn stage<E>(stage: &'static str) -> impl FnOnce(E) -> PipelineError
    where
        E: std::error::Error + Send + Sync + 'static,
    {
        move |source| PipelineError::Stage {
            stage,
            source: Box::new(source),
        }
    }
}
