//! SGD training loop.
//!
//! Each message is turned into a stream of vocabulary units by a greedy
//! longest-match pass over its tokens, so that multi-token vocabulary
//! entries (bigrams and up) are trained as single units wherever they occur
//! contiguously. Out-of-vocabulary tokens are dropped from the stream and
//! windows close over the gap.
//!
//! With more than one worker the matrices are updated without locks: entries
//! are stored as atomic bit patterns, so concurrent updates may overwrite
//! one another but a reader never observes a torn value. Bit-reproducibility
//! is guaranteed only for a single worker.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Vocabulary};
use crate::error::EmbeddingError;

use super::{ns_loss_and_grads, EmbeddingMatrix, NoiseTable, TrainConfig};

/// f64 matrix behind relaxed atomics, shared across workers.
struct SharedMatrix {
    data: Vec<AtomicU64>,
    dimension: usize,
}

impl SharedMatrix {
    fn from_values(values: Vec<f64>, dimension: usize) -> Self {
        SharedMatrix {
            data: values.into_iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
            dimension,
        }
    }

    fn read_row(&self, row: usize, out: &mut [f64]) {
        let base = row * self.dimension;
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = f64::from_bits(self.data[base + i].load(Ordering::Relaxed));
        }
    }

    /// `row += scale * delta`, element-wise. Racy across workers by design.
    fn add_scaled(&self, row: usize, delta: &[f64], scale: f64) {
        let base = row * self.dimension;
        for (i, d) in delta.iter().enumerate() {
            let cell = &self.data[base + i];
            let current = f64::from_bits(cell.load(Ordering::Relaxed));
            cell.store((current + scale * d).to_bits(), Ordering::Relaxed);
        }
    }

    fn into_values(self) -> Vec<f64> {
        self.data
            .into_iter()
            .map(|x| f64::from_bits(x.into_inner()))
            .collect()
    }
}

/// Greedy longest-match conversion of a token sequence into vocabulary unit
/// indices.
pub fn unit_stream(tokens: &[String], vocab: &Vocabulary) -> Vec<usize> {
    let max_n = vocab.max_ngram_len();
    let mut units = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut matched = false;
        for n in (2..=max_n.min(tokens.len() - i)).rev() {
            let candidate = tokens[i..i + n].join("_");
            if let Some(idx) = vocab.index_of(&candidate) {
                units.push(idx);
                i += n;
                matched = true;
                break;
            }
        }
        if !matched {
            if let Some(idx) = vocab.index_of(&tokens[i]) {
                units.push(idx);
            }
            i += 1;
        }
    }
    units
}

struct Schedule {
    initial: f64,
    min: f64,
    total: u64,
    done: AtomicU64,
}

impl Schedule {
    /// Learning rate for the next update, advancing the shared counter.
    fn next_rate(&self) -> f64 {
        let t = self.done.fetch_add(1, Ordering::Relaxed);
        let frac = if self.total == 0 {
            0.0
        } else {
            t as f64 / self.total as f64
        };
        (self.initial - (self.initial - self.min) * frac).max(self.min)
    }
}

fn train_shard(
    streams: &[Vec<usize>],
    shard: usize,
    workers: usize,
    input: &SharedMatrix,
    output: &SharedMatrix,
    noise: &NoiseTable,
    schedule: &Schedule,
    config: &TrainConfig,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(
        config.seed ^ (shard as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let dim = config.dimension;
    let window = config.window;
    let mut context_buf: Vec<usize> = Vec::with_capacity(2 * window);
    let mut negatives: Vec<usize> = Vec::with_capacity(config.negatives);
    let mut snapshot = EmbeddingMatrix::zeros(0, 0);

    for _epoch in 0..config.epochs {
        for units in streams.iter().skip(shard).step_by(workers) {
            if units.len() < 2 {
                continue;
            }
            for t in 0..units.len() {
                let target = units[t];
                context_buf.clear();
                let lo = t.saturating_sub(window);
                let hi = (t + window + 1).min(units.len());
                context_buf.extend_from_slice(&units[lo..t]);
                context_buf.extend_from_slice(&units[t + 1..hi]);
                if context_buf.is_empty() {
                    continue;
                }
                if config.pair_mode {
                    for ci in 0..context_buf.len() {
                        let single = [context_buf[ci]];
                        sgd_step(
                            &single,
                            target,
                            input,
                            output,
                            noise,
                            schedule,
                            config,
                            &mut rng,
                            &mut negatives,
                            &mut snapshot,
                            dim,
                        );
                    }
                } else {
                    let context = std::mem::take(&mut context_buf);
                    sgd_step(
                        &context,
                        target,
                        input,
                        output,
                        noise,
                        schedule,
                        config,
                        &mut rng,
                        &mut negatives,
                        &mut snapshot,
                        dim,
                    );
                    context_buf = context;
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sgd_step(
    context: &[usize],
    target: usize,
    input: &SharedMatrix,
    output: &SharedMatrix,
    noise: &NoiseTable,
    schedule: &Schedule,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
    negatives: &mut Vec<usize>,
    snapshot: &mut EmbeddingMatrix,
    dim: usize,
) {
    negatives.clear();
    for _ in 0..config.negatives {
        for _attempt in 0..10 {
            let candidate = noise.sample(rng);
            if candidate != target {
                negatives.push(candidate);
                break;
            }
        }
    }

    // Work on a local snapshot of the touched rows so one update sees a
    // consistent view even while other workers write.
    let rows = context.len() + negatives.len() + 1;
    if snapshot.rows() < rows || snapshot.dimension() != dim {
        *snapshot = EmbeddingMatrix::zeros(rows.max(8), dim);
    }
    let mut local_context = Vec::with_capacity(context.len());
    for (slot, &c) in context.iter().enumerate() {
        input.read_row(c, snapshot.input_row_mut(slot));
        local_context.push(slot);
    }
    let target_slot = context.len();
    output.read_row(target, snapshot.output_row_mut(target_slot));
    let mut local_negatives = Vec::with_capacity(negatives.len());
    for (offset, &n) in negatives.iter().enumerate() {
        let slot = target_slot + 1 + offset;
        output.read_row(n, snapshot.output_row_mut(slot));
        local_negatives.push(slot);
    }

    let grads = ns_loss_and_grads(&local_context, target_slot, &local_negatives, snapshot)
        .expect("local snapshot indices are in range");

    let rate = schedule.next_rate();
    output.add_scaled(target, &grads.target_grad, -rate);
    for (g, &n) in grads.negative_grads.iter().zip(negatives.iter()) {
        output.add_scaled(n, g, -rate);
    }
    for &c in context {
        input.add_scaled(c, &grads.context_grad, -rate);
    }
}

/// Trains embedding matrices over the corpus.
///
/// Input vectors start uniform in `[-0.5/v, 0.5/v]`, output vectors at zero.
/// The learning rate decays linearly across all scheduled updates. With
/// `workers == 1` and a fixed seed the result is bit-reproducible.
pub fn train(
    corpus: &Corpus,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<EmbeddingMatrix, EmbeddingError> {
    config.validate()?;
    if vocab.is_empty() {
        return Err(EmbeddingError::EmptyVocabulary);
    }

    let n = vocab.len();
    let v = config.dimension;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = 0.5 / v as f64;
    let input_init: Vec<f64> = (0..n * v).map(|_| rng.random_range(-bound..bound)).collect();
    let input = SharedMatrix::from_values(input_init, v);
    let output = SharedMatrix::from_values(vec![0.0; n * v], v);

    let streams: Vec<Vec<usize>> = corpus
        .messages
        .iter()
        .map(|m| unit_stream(&m.tokens, vocab))
        .collect();

    let updates_per_pass: u64 = streams
        .iter()
        .filter(|u| u.len() >= 2)
        .map(|u| {
            if config.pair_mode {
                let len = u.len();
                (0..len)
                    .map(|t| {
                        let lo = t.saturating_sub(config.window);
                        let hi = (t + config.window + 1).min(len);
                        (hi - lo - 1) as u64
                    })
                    .sum()
            } else {
                u.len() as u64
            }
        })
        .sum();
    let schedule = Schedule {
        initial: config.learning_rate,
        min: config.min_learning_rate,
        total: updates_per_pass * config.epochs as u64,
        done: AtomicU64::new(0),
    };

    let noise = NoiseTable::build(vocab, config.noise_power)?;

    let workers = config.workers.min(streams.len().max(1));
    if workers <= 1 {
        train_shard(&streams, 0, 1, &input, &output, &noise, &schedule, config);
    } else {
        std::thread::scope(|scope| {
            for shard in 0..workers {
                let input = &input;
                let output = &output;
                let noise = &noise;
                let schedule = &schedule;
                let streams = &streams;
                scope.spawn(move || {
                    train_shard(streams, shard, workers, input, output, noise, schedule, config);
                });
            }
        });
    }

    let matrices = EmbeddingMatrix::from_raw(input.into_values(), output.into_values(), n, v);
    if !matrices.is_finite() {
        return Err(EmbeddingError::NonFinite);
    }
    Ok(matrices)
}
