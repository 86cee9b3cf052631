//! Noise distribution for negative sampling: vocabulary counts raised to a
//! power, sampled through the cumulative distribution by binary search.

use rand::Rng;

use crate::corpus::Vocabulary;
use crate::error::EmbeddingError;

#[derive(Debug, Clone)]
pub struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    /// P(i) proportional to count_i^power.
    pub fn build(vocab: &Vocabulary, power: f64) -> Result<Self, EmbeddingError> {
        if vocab.is_empty() {
            return Err(EmbeddingError::EmptyVocabulary);
        }
        let weights: Vec<f64> = vocab
            .entries()
            .iter()
            .map(|&(_, count)| (count as f64).powf(power))
            .collect();
        let total: f64 = weights.iter().sum();
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w / total;
            cumulative.push(acc);
        }
        // Pin the last entry so sampling never falls off the end.
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(NoiseTable { cumulative })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// Probability of index `i`.
    pub fn probability(&self, i: usize) -> f64 {
        if i == 0 {
            self.cumulative[0]
        } else {
            self.cumulative[i] - self.cumulative[i - 1]
        }
    }

    /// Draws one vocabulary index in O(log N).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|&c| c < u).min(self.cumulative.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocabulary, Corpus, Message};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vocab_with_counts(text: &str) -> Vocabulary {
        let corpus = Corpus::from_messages([Message::new("m", "u", text)]).unwrap();
        build_vocabulary(&corpus, 1, 1).unwrap()
    }

    #[test]
    fn equal_counts_give_uniform() {
        let vocab = vocab_with_counts("a b");
        let table = NoiseTable::build(&vocab, 1.0).unwrap();
        assert_abs_diff_eq!(table.probability(0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(table.probability(1), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn unit_power_is_proportional_to_counts() {
        // counts 4 and 1
        let vocab = vocab_with_counts("a a a a b");
        let table = NoiseTable::build(&vocab, 1.0).unwrap();
        assert_abs_diff_eq!(table.probability(0), 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(table.probability(1), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn zero_power_flattens() {
        let vocab = vocab_with_counts("a a a a b");
        let table = NoiseTable::build(&vocab, 0.0).unwrap();
        assert_abs_diff_eq!(table.probability(0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(table.probability(1), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let vocab = vocab_with_counts("a a a b b c d d d d d e");
        let table = NoiseTable::build(&vocab, 0.75).unwrap();
        let sum: f64 = (0..table.len()).map(|i| table.probability(i)).sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn sampling_tracks_the_distribution() {
        let vocab = vocab_with_counts("a a a a a a a a a b");
        let table = NoiseTable::build(&vocab, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 20_000;
        let hits = (0..draws).filter(|_| table.sample(&mut rng) == 0).count();
        let frac = hits as f64 / draws as f64;
        assert!((frac - 0.9).abs() < 0.02, "observed {frac}");
    }
}
