//! Embedding persistence.
//!
//! Text: a `N v` header line, then one line per n-gram with its input-side
//! vector. Binary: magic `NCV1`, little-endian u64 N and v, then the input
//! matrix followed by the output matrix as little-endian 32-bit floats.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::corpus::Vocabulary;
use crate::error::EmbeddingError;

use super::EmbeddingMatrix;

const MAGIC: &[u8; 4] = b"NCV1";

impl EmbeddingMatrix {
    /// Writes the input-side vectors as text, one n-gram per line.
    pub fn save_text(&self, vocab: &Vocabulary, path: &Path) -> Result<(), EmbeddingError> {
        self.check_vocab(vocab)?;
        let mut out = BufWriter::new(File::create(path)?);
        write!(out, "{} {}\n", self.rows(), self.dimension())?;
        for i in 0..self.rows() {
            write!(out, "{}", vocab.ngram(i))?;
            for x in self.input_row(i) {
                write!(out, " {}", *x as f32)?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes both matrices in the `NCV1` binary layout.
    pub fn save_binary(&self, path: &Path) -> Result<(), EmbeddingError> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(MAGIC)?;
        out.write_all(&(self.rows() as u64).to_le_bytes())?;
        out.write_all(&(self.dimension() as u64).to_le_bytes())?;
        for side in [&self.input, &self.output] {
            for &x in side {
                out.write_all(&(x as f32).to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a matrix written by [`EmbeddingMatrix::save_binary`].
    pub fn load_binary(path: &Path) -> Result<Self, EmbeddingError> {
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
        let rows = u64::from_le_bytes(u64buf) as usize;
        reader.read_exact(&mut u64buf)?;
        let dimension = u64::from_le_bytes(u64buf) as usize;
        let mut read_side = |len: usize| -> Result<Vec<f64>, EmbeddingError> {
            let mut values = Vec::with_capacity(len);
            let mut f32buf = [0u8; 4];
            for _ in 0..len {
                reader.read_exact(&mut f32buf)?;
                values.push(f32::from_le_bytes(f32buf) as f64);
            }
            Ok(values)
        };
        let input = read_side(rows * dimension)?;
        let output = read_side(rows * dimension)?;
        Ok(EmbeddingMatrix::from_raw(input, output, rows, dimension))
    }

    /// Reads the text format back (input side only, output side zero).
    pub fn load_text(path: &Path) -> Result<(Vec<String>, Self), EmbeddingError> {
        let mut reader = BufReader::new(File::open(path)?);
        let mut header = String::new();
        reader.read_line(&mut header)?;
        let mut parts = header.split_whitespace();
        let (Some(n), Some(v)) = (parts.next(), parts.next()) else {
            return Err(EmbeddingError::Format("missing `N v` header".into()));
        };
        let rows: usize = n
            .parse()
            .map_err(|_| EmbeddingError::Format(format!("bad row count {n:?}")))?;
        let dimension: usize = v
            .parse()
            .map_err(|_| EmbeddingError::Format(format!("bad dimension {v:?}")))?;
        let mut ngrams = Vec::with_capacity(rows);
        let mut input = Vec::with_capacity(rows * dimension);
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(' ');
            let Some(ngram) = fields.next() else {
                return Err(EmbeddingError::Format(format!("empty record at line {}", i + 2)));
            };
            ngrams.push(ngram.to_string());
            let before = input.len();
            for f in fields {
                let x: f32 = f.parse().map_err(|_| {
                    EmbeddingError::Format(format!("bad float {f:?} at line {}", i + 2))
                })?;
                input.push(x as f64);
            }
            if input.len() - before != dimension {
                return Err(EmbeddingError::Format(format!(
                    "expected {dimension} floats at line {}, got {}",
                    i + 2,
                    input.len() - before
                )));
            }
        }
        if ngrams.len() != rows {
            return Err(EmbeddingError::Format(format!(
                "expected {rows} records, got {}",
                ngrams.len()
            )));
        }
        let output = vec![0.0; rows * dimension];
        Ok((ngrams, EmbeddingMatrix::from_raw(input, output, rows, dimension)))
    }

    fn check_vocab(&self, vocab: &Vocabulary) -> Result<(), EmbeddingError> {
        if vocab.len() != self.rows() {
            return Err(EmbeddingError::DimensionMismatch {
                expected: vocab.len(),
                got: self.rows(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocabulary, Corpus, Message};
    use proptest::prelude::*;

    #[test]
    fn binary_round_trip_preserves_f32_values() {
        let m = EmbeddingMatrix::from_input_rows(vec![
            vec![0.25, -1.5, 3.0],
            vec![0.1, 0.2, 0.3],
        ]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.bin");
        m.save_binary(&path).unwrap();
        let loaded = EmbeddingMatrix::load_binary(&path).unwrap();
        assert_eq!(loaded.rows(), 2);
        assert_eq!(loaded.dimension(), 3);
        // Exactly representable values survive unchanged.
        assert_eq!(loaded.input_row(0), &[0.25, -1.5, 3.0]);
    }

    #[test]
    fn binary_rejects_wrong_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.bin");
        std::fs::write(&path, b"XXXX0000").unwrap();
        assert!(matches!(
            EmbeddingMatrix::load_binary(&path),
            Err(EmbeddingError::Format(_))
        ));
    }

    #[test]
    fn text_round_trip_keeps_ngram_order() {
        let corpus = Corpus::from_messages([Message::new("m", "u", "b b a")]).unwrap();
        let vocab = build_vocabulary(&corpus, 1, 1).unwrap();
        let m = EmbeddingMatrix::from_input_rows(vec![vec![1.0, 2.0], vec![-3.5, 0.5]]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        m.save_text(&vocab, &path).unwrap();
        let (ngrams, loaded) = EmbeddingMatrix::load_text(&path).unwrap();
        assert_eq!(ngrams, vec!["b".to_string(), "a".to_string()]);
        assert_eq!(loaded.input_row(1), &[-3.5, 0.5]);
    }

    proptest! {
        #[test]
        fn binary_round_trip_is_lossless_for_f32(values in proptest::collection::vec(-1e3f32..1e3, 1..24)) {
            let dim = values.len();
            let m = EmbeddingMatrix::from_input_rows(vec![values.iter().map(|&x| x as f64).collect()]);
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("emb.bin");
            m.save_binary(&path).unwrap();
            let loaded = EmbeddingMatrix::load_binary(&path).unwrap();
            prop_assert_eq!(loaded.dimension(), dim);
            for (a, b) in loaded.input_row(0).iter().zip(values.iter()) {
                prop_assert_eq!(*a as f32, *b);
            }
        }
    }
}
