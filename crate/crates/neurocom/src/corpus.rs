//! Corpus ingestion: tokenization, n-gram extraction, and vocabulary
//! construction.
//!
//! The input format is JSON Lines, one message object per line with the
//! string fields `message_id`, `user_id` and `text` (unknown fields are
//! ignored). Tokenization normalizes the usual social-media noise: URLs
//! become `<url>`, `@`-mentions become `<mention>`, the `#` is stripped from
//! hashtags, and everything else is reduced to lowercase alphanumeric runs.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::CorpusError;

/// Sentinel token substituted for URLs.
pub const URL_TOKEN: &str = "<url>";
/// Sentinel token substituted for `@user` mentions.
pub const MENTION_TOKEN: &str = "<mention>";

/// A single message with its derived token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub message_id: String,
    pub user_id: String,
    pub text: String,
    pub tokens: Vec<String>,
}

impl Message {
    /// Builds a message, deriving `tokens` from `text` via [`tokenize`].
    pub fn new(
        message_id: impl Into<String>,
        user_id: impl Into<String>,
        text: impl Into<String>,
    ) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Message {
            message_id: message_id.into(),
            user_id: user_id.into(),
            text,
            tokens,
        }
    }
}

/// An ordered collection of messages plus the set of posting users.
///
/// Iteration order is the input order; `users` holds user ids in order of
/// first appearance so that downstream per-user matrices are reproducible.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub messages: Vec<Message>,
    users: Vec<String>,
    user_index: HashMap<String, usize>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a message, registering its user on first sight.
    ///
    /// Returns an error if the message id is already present.
    pub fn push(&mut self, message: Message) -> Result<(), CorpusError> {
        if self.messages.iter().any(|m| m.message_id == message.message_id) {
            return Err(CorpusError::DuplicateId {
                id: message.message_id,
            });
        }
        self.push_unchecked(message);
        Ok(())
    }

    fn push_unchecked(&mut self, message: Message) {
        if !self.user_index.contains_key(&message.user_id) {
            self.user_index
                .insert(message.user_id.clone(), self.users.len());
            self.users.push(message.user_id.clone());
        }
        self.messages.push(message);
    }

    /// User ids in order of first appearance.
    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn user_position(&self, user_id: &str) -> Option<usize> {
        self.user_index.get(user_id).copied()
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Convenience constructor for tests and examples.
    pub fn from_messages<I>(messages: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = Message>,
    {
        let mut corpus = Corpus::new();
        for m in messages {
            corpus.push(m)?;
        }
        Ok(corpus)
    }
}

/// Lowercases and splits text into tokens.
///
/// Rules, applied per whitespace-delimited chunk of the lowercased text:
/// chunks carrying a `http://`/`https://` scheme or a `www.` prefix collapse
/// to [`URL_TOKEN`]; chunks of the form `@word` collapse to
/// [`MENTION_TOKEN`]; every other chunk is split into its Unicode
/// alphanumeric runs (which also strips `#` from hashtags). Remaining
/// punctuation is dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    for chunk in lowered.split_whitespace() {
        if chunk.contains("http://") || chunk.contains("https://") || chunk.starts_with("www.") {
            tokens.push(URL_TOKEN.to_string());
            continue;
        }
        if let Some(rest) = chunk.strip_prefix('@') {
            if rest.chars().any(|c| c.is_alphanumeric()) {
                tokens.push(MENTION_TOKEN.to_string());
                continue;
            }
        }
        let mut run = String::new();
        for c in chunk.chars() {
            if c.is_alphanumeric() {
                run.push(c);
            } else if !run.is_empty() {
                tokens.push(std::mem::take(&mut run));
            }
        }
        if !run.is_empty() {
            tokens.push(run);
        }
    }
    tokens
}

/// The multiset of contiguous n-grams of one message, n = 1..=n_max.
///
/// N-grams are the tokens joined with a single `_`. Duplicates are kept; the
/// indicator against a vocabulary (the set of in-vocabulary indices) is
/// derived on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramSet {
    ngrams: Vec<String>,
}

impl NgramSet {
    pub fn ngrams(&self) -> &[String] {
        &self.ngrams
    }

    /// Multiset size, duplicates included.
    pub fn len(&self) -> usize {
        self.ngrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ngrams.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.ngrams.iter().map(String::as_str)
    }

    /// Sorted, deduplicated vocabulary indices of the in-vocabulary n-grams.
    /// Out-of-vocabulary n-grams are dropped.
    pub fn indicator(&self, vocab: &Vocabulary) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .ngrams
            .iter()
            .filter_map(|g| vocab.index_of(g))
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }
}

/// Extracts all contiguous n-grams for n = 1..=n_max, in positional order.
pub fn extract_ngrams(tokens: &[String], n_max: usize) -> NgramSet {
    assert!(n_max >= 1, "n_max must be at least 1");
    let mut ngrams = Vec::new();
    for n in 1..=n_max.min(tokens.len()) {
        for window in tokens.windows(n) {
            ngrams.push(window.join("_"));
        }
    }
    NgramSet { ngrams }
}

/// N-gram vocabulary: entries sorted by descending count (ties broken
/// lexicographically) so indices are reproducible across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, usize>,
    max_ngram_len: usize,
}

impl Vocabulary {
    fn from_entries(entries: Vec<(String, u64)>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (g, _))| (g.clone(), i))
            .collect();
        let max_ngram_len = entries
            .iter()
            .map(|(g, _)| g.matches('_').count() + 1)
            .max()
            .unwrap_or(1);
        Vocabulary {
            entries,
            index,
            max_ngram_len,
        }
    }

    /// Number of vocabulary entries (N).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, ngram: &str) -> Option<usize> {
        self.index.get(ngram).copied()
    }

    pub fn ngram(&self, index: usize) -> &str {
        &self.entries[index].0
    }

    pub fn count(&self, index: usize) -> u64 {
        self.entries[index].1
    }

    /// `(ngram, count)` pairs in index order.
    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    /// Longest n present among the entries (1 for a unigram-only vocabulary).
    pub fn max_ngram_len(&self) -> usize {
        self.max_ngram_len
    }

    /// Writes the vocabulary as TSV: `ngram<TAB>count<TAB>index`, LF endings.
    pub fn save_tsv(&self, path: &Path) -> Result<(), CorpusError> {
        let mut out = BufWriter::new(File::create(path)?);
        for (i, (ngram, count)) in self.entries.iter().enumerate() {
            write!(out, "{ngram}\t{count}\t{i}\n")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a vocabulary written by [`Vocabulary::save_tsv`].
    pub fn load_tsv(path: &Path) -> Result<Self, CorpusError> {
        let reader = BufReader::new(File::open(path)?);
        let mut entries = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| CorpusError::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(ngram), Some(count), Some(idx)) =
                (fields.next(), fields.next(), fields.next())
            else {
                return Err(CorpusError::Parse {
                    line: lineno + 1,
                    message: "expected ngram<TAB>count<TAB>index".into(),
                });
            };
            let count: u64 = count.parse().map_err(|_| CorpusError::Parse {
                line: lineno + 1,
                message: format!("bad count {count:?}"),
            })?;
            let idx: usize = idx.parse().map_err(|_| CorpusError::Parse {
                line: lineno + 1,
                message: format!("bad index {idx:?}"),
            })?;
            if idx != entries.len() {
                return Err(CorpusError::Parse {
                    line: lineno + 1,
                    message: format!("out-of-order index {idx}, expected {}", entries.len()),
                });
            }
            entries.push((ngram.to_string(), count));
        }
        if entries.is_empty() {
            return Err(CorpusError::EmptyVocabulary);
        }
        Ok(Vocabulary::from_entries(entries))
    }
}

/// Counts every n-gram of the corpus and keeps those with frequency at least
/// `min_count`.
pub fn build_vocabulary(
    corpus: &Corpus,
    n_max: usize,
    min_count: u64,
) -> Result<Vocabulary, CorpusError> {
    assert!(min_count >= 1, "min_count must be at least 1");
    let mut counts: HashMap<String, u64> = HashMap::new();
    for message in &corpus.messages {
        for ngram in extract_ngrams(&message.tokens, n_max).iter() {
            *counts.entry(ngram.to_string()).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(String, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .collect();
    if entries.is_empty() {
        return Err(CorpusError::EmptyVocabulary);
    }
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(Vocabulary::from_entries(entries))
}

#[derive(Deserialize)]
struct RawMessage {
    message_id: String,
    user_id: String,
    text: String,
}

/// Loads a JSON Lines corpus. Blank lines are skipped; malformed lines and
/// repeated message ids are reported with their line number.
pub fn load_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let reader = BufReader::new(File::open(path)?);
    let mut corpus = Corpus::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CorpusError::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawMessage = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        if seen.insert(raw.message_id.clone(), lineno + 1).is_some() {
            return Err(CorpusError::DuplicateId { id: raw.message_id });
        }
        corpus.push_unchecked(Message::new(raw.message_id, raw.user_id, raw.text));
    }
    Ok(corpus)
}

/// Writes a corpus back out as JSON Lines (the inverse of [`load_corpus`]).
pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let mut out = BufWriter::new(File::create(path)?);
    for m in &corpus.messages {
        let value = serde_json::json!({
            "message_id": m.message_id,
            "user_id": m.user_id,
            "text": m.text,
        });
        serde_json::to_writer(&mut out, &value).map_err(|e| CorpusError::Parse {
            line: 0,
            message: e.to_string(),
        })?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
