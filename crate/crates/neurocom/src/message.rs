//! Message vectors: the arithmetic mean of a message's in-vocabulary n-gram
//! vectors.
//!
//! By default the mean is multiplicity-weighted — an n-gram occurring twice
//! contributes twice to the sum and to the denominator. A set-semantics mode
//! (each distinct n-gram counted once) is available as well.
//! Out-of-vocabulary n-grams take part in neither the sum nor the
//! denominator, so the result is always a true mean of known vectors.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::corpus::{extract_ngrams, Corpus, Message, Vocabulary};
use crate::embedding::EmbeddingMatrix;
use crate::error::{EmbedMessageError, EmbeddingError};

/// How repeated n-grams enter the mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionMode {
    /// Count every occurrence (the default).
    #[default]
    Multiset,
    /// Count each distinct n-gram once.
    Set,
}

/// A composed message vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageVector {
    pub message_id: String,
    pub vector: Vec<f64>,
    /// Number of in-vocabulary n-grams that entered the mean.
    pub used_ngrams: usize,
}

/// Composes one message vector.
pub fn embed_message(
    message: &Message,
    vocab: &Vocabulary,
    matrices: &EmbeddingMatrix,
    n_max: usize,
    mode: CompositionMode,
) -> Result<MessageVector, EmbedMessageError> {
    let ngrams = extract_ngrams(&message.tokens, n_max);
    let indices: Vec<usize> = match mode {
        CompositionMode::Multiset => ngrams
            .iter()
            .filter_map(|g| vocab.index_of(g))
            .collect(),
        CompositionMode::Set => ngrams.indicator(vocab),
    };
    if indices.is_empty() {
        return Err(EmbedMessageError::NotEmbeddable {
            id: message.message_id.clone(),
        });
    }
    let dim = matrices.dimension();
    let mut vector = vec![0.0; dim];
    for &i in &indices {
        for (acc, x) in vector.iter_mut().zip(matrices.input_row(i)) {
            *acc += x;
        }
    }
    let inv = 1.0 / indices.len() as f64;
    for x in &mut vector {
        *x *= inv;
    }
    Ok(MessageVector {
        message_id: message.message_id.clone(),
        vector,
        used_ngrams: indices.len(),
    })
}

/// Composes the whole corpus, preserving input order.
///
/// Messages with no in-vocabulary n-gram are not failures; their ids are
/// returned in the skipped list.
pub fn embed_corpus(
    corpus: &Corpus,
    vocab: &Vocabulary,
    matrices: &EmbeddingMatrix,
    n_max: usize,
    mode: CompositionMode,
) -> (Vec<MessageVector>, Vec<String>) {
    let mut vectors = Vec::with_capacity(corpus.len());
    let mut skipped = Vec::new();
    for message in &corpus.messages {
        match embed_message(message, vocab, matrices, n_max, mode) {
            Ok(v) => vectors.push(v),
            Err(EmbedMessageError::NotEmbeddable { id }) => skipped.push(id),
        }
    }
    (vectors, skipped)
}

const MAGIC: &[u8; 4] = b"NCM1";

/// Writes message vectors in the `NCM1` binary layout: magic, u64 count,
/// u64 dimension, then per record a u32 id length, the UTF-8 id, and the
/// vector as little-endian 32-bit floats.
pub fn save_message_vectors(vectors: &[MessageVector], path: &Path) -> Result<(), EmbeddingError> {
    let dim = vectors.first().map_or(0, |v| v.vector.len());
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&(vectors.len() as u64).to_le_bytes())?;
    out.write_all(&(dim as u64).to_le_bytes())?;
    for v in vectors {
        if v.vector.len() != dim {
            return Err(EmbeddingError::DimensionMismatch {
                expected: dim,
                got: v.vector.len(),
            });
        }
        out.write_all(&(v.message_id.len() as u32).to_le_bytes())?;
        out.write_all(v.message_id.as_bytes())?;
        for &x in &v.vector {
            out.write_all(&(x as f32).to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads vectors written by [`save_message_vectors`].
pub fn load_message_vectors(path: &Path) -> Result<Vec<MessageVector>, EmbeddingError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    reader.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(EmbeddingError::Format(format!(
            "bad magic {magic:?}, expected {MAGIC:?}"
        )));
    }
    let mut u64buf = [0u8; 8];
    reader.read_exact(&mut u64buf)?;
    let count = u64::from_le_bytes(u64buf) as usize;
    reader.read_exact(&mut u64buf)?;
    let dim = u64::from_le_bytes(u64buf) as usize;
    let mut vectors = Vec::with_capacity(count);
    for _ in 0..count {
        let mut u32buf = [0u8; 4];
        reader.read_exact(&mut u32buf)?;
        let id_len = u32::from_le_bytes(u32buf) as usize;
        let mut id = vec![0u8; id_len];
        reader.read_exact(&mut id)?;
        let message_id = String::from_utf8(id)
            .map_err(|e| EmbeddingError::Format(format!("bad id: {e}")))?;
        let mut vector = Vec::with_capacity(dim);
        let mut f32buf = [0u8; 4];
        for _ in 0..dim {
            reader.read_exact(&mut f32buf)?;
            vector.push(f32::from_le_bytes(f32buf) as f64);
        }
        vectors.push(MessageVector {
            message_id,
            vector,
            used_ngrams: 0,
        });
    }
    Ok(vectors)
}
