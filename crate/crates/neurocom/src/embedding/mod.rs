//! N-gram embedding training: a context-average model with negative
//! sampling, trained by SGD over a linearly decaying learning rate.
//!
//! The learned object is a pair of `N x v` matrices. The input side holds the
//! vectors used everywhere downstream (message composition, top-word search);
//! the output side exists only for the negative-sampling objective.

mod io;
mod loss;
mod noise;
mod train;

pub use loss::{ns_loss_and_grads, NsGradients};
pub use noise::NoiseTable;
pub use train::{train, unit_stream};

use crate::corpus::Vocabulary;
use crate::error::EmbeddingError;

/// Input- and output-side embedding matrices, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    input: Vec<f64>,
    output: Vec<f64>,
    rows: usize,
    dimension: usize,
}

impl EmbeddingMatrix {
    /// All-zero matrices of the given shape.
    pub fn zeros(rows: usize, dimension: usize) -> Self {
        EmbeddingMatrix {
            input: vec![0.0; rows * dimension],
            output: vec![0.0; rows * dimension],
            rows,
            dimension,
        }
    }

    /// Builds a matrix from explicit input-side rows; the output side is
    /// zero. Handy for tests and examples.
    pub fn from_input_rows(rows: Vec<Vec<f64>>) -> Self {
        let dimension = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == dimension),
            "rows must share one dimension"
        );
        let n = rows.len();
        EmbeddingMatrix {
            input: rows.into_iter().flatten().collect(),
            output: vec![0.0; n * dimension],
            rows: n,
            dimension,
        }
    }

    pub(crate) fn from_raw(input: Vec<f64>, output: Vec<f64>, rows: usize, dimension: usize) -> Self {
        debug_assert_eq!(input.len(), rows * dimension);
        debug_assert_eq!(output.len(), rows * dimension);
        EmbeddingMatrix {
            input,
            output,
            rows,
            dimension,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn input_row(&self, index: usize) -> &[f64] {
        &self.input[index * self.dimension..(index + 1) * self.dimension]
    }

    pub fn output_row(&self, index: usize) -> &[f64] {
        &self.output[index * self.dimension..(index + 1) * self.dimension]
    }

    pub fn input_row_mut(&mut self, index: usize) -> &mut [f64] {
        &mut self.input[index * self.dimension..(index + 1) * self.dimension]
    }

    pub fn output_row_mut(&mut self, index: usize) -> &mut [f64] {
        &mut self.output[index * self.dimension..(index + 1) * self.dimension]
    }

    /// True when every entry of both sides is finite.
    pub fn is_finite(&self) -> bool {
        self.input.iter().chain(self.output.iter()).all(|x| x.is_finite())
    }
}

/// Hyperparameters for [`train`].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    /// Embedding dimension v.
    pub dimension: usize,
    /// Window radius: up to this many units of context on each side.
    pub window: usize,
    /// Negative samples per positive.
    pub negatives: usize,
    pub epochs: usize,
    /// Initial learning rate; decays linearly to `min_learning_rate`.
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    /// Noise-distribution exponent in [0, 1].
    pub noise_power: f64,
    /// Pairwise updates (each context unit predicts the target on its own,
    /// the default) versus one averaged-context update per target.
    ///
    /// At small corpus sizes the averaged-context update drives all vectors
    /// toward a shared direction, which flattens the cosine geometry that
    /// message means and density clustering depend on; pairwise updates keep
    /// the space spread out.
    pub pair_mode: bool,
    pub seed: u64,
    /// Worker threads. Training is bit-reproducible only with one worker.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dimension: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            noise_power: 0.75,
            pair_mode: true,
            seed: 42,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), EmbeddingError> {
        let fail = |msg: &str| Err(EmbeddingError::InvalidConfig(msg.to_string()));
        if self.dimension < 1 {
            return fail("dimension must be at least 1");
        }
        if self.window < 1 {
            return fail("window must be at least 1");
        }
        if self.negatives < 1 {
            return fail("negatives must be at least 1");
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1");
        }
        if !(self.learning_rate > self.min_learning_rate && self.min_learning_rate > 0.0) {
            return fail("need learning_rate > min_learning_rate > 0");
        }
        if !(0.0..=1.0).contains(&self.noise_power) {
            return fail("noise_power must lie in [0, 1]");
        }
        if self.workers < 1 {
            return fail("workers must be at least 1");
        }
        Ok(())
    }
}

/// Input-side vector of an n-gram.
pub fn word_vector<'m>(
    vocab: &Vocabulary,
    matrices: &'m EmbeddingMatrix,
    ngram: &str,
) -> Result<&'m [f64], EmbeddingError> {
    let index = vocab
        .index_of(ngram)
        .ok_or_else(|| EmbeddingError::OutOfVocabulary(ngram.to_string()))?;
    if matrices.rows() != vocab.len() {
        return Err(EmbeddingError::DimensionMismatch {
            expected: vocab.len(),
            got: matrices.rows(),
        });
    }
    Ok(matrices.input_row(index))
}

/// Cosine similarity with a zero-vector guard (zero similarity when either
/// norm vanishes).
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocabulary, Corpus, Message};

    fn tiny_vocab() -> Vocabulary {
        let corpus = Corpus::from_messages([Message::new("m", "u", "a a b")]).unwrap();
        build_vocabulary(&corpus, 1, 1).unwrap()
    }

    #[test]
    fn word_vector_returns_matching_row() {
        let vocab = tiny_vocab();
        let mut m = EmbeddingMatrix::zeros(vocab.len(), 3);
        m.input_row_mut(0).copy_from_slice(&[1.0, 2.0, 3.0]);
        assert_eq!(word_vector(&vocab, &m, vocab.ngram(0)).unwrap(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn word_vector_rejects_oov() {
        let vocab = tiny_vocab();
        let m = EmbeddingMatrix::zeros(vocab.len(), 3);
        assert!(matches!(
            word_vector(&vocab, &m, "zzz"),
            Err(EmbeddingError::OutOfVocabulary(_))
        ));
    }

    #[test]
    fn config_validation_catches_bad_rates() {
        let mut cfg = TrainConfig::default();
        cfg.min_learning_rate = cfg.learning_rate;
        assert!(cfg.validate().is_err());
        assert!(TrainConfig::default().validate().is_ok());
    }
}
