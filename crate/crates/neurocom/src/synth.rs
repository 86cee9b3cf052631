//! Seeded synthetic corpora with planted topics.
//!
//! Each topic owns a lexicon partitioned into synonym pools. A message picks
//! distinct pools and one synonym from each, so words of one topic co-occur
//! across messages while two messages of the same topic share few surface
//! forms. A configurable fraction of token slots draws from a topic-neutral
//! shared lexicon instead. Every user posts within a single topic, which
//! becomes their reference label.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SynthError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Number of planted topics (at least 2).
    pub topics: usize,
    pub messages_per_topic: usize,
    /// Words per topic lexicon.
    pub lexicon_size: usize,
    /// Probability that a token slot draws from the shared lexicon.
    pub shared_fraction: f64,
    pub min_len: usize,
    pub max_len: usize,
    /// Synonym pool size within a topic lexicon.
    pub synonym_pool: usize,
    /// Users attached to each topic.
    pub users_per_topic: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            topics: 5,
            messages_per_topic: 200,
            lexicon_size: 50,
            shared_fraction: 0.1,
            min_len: 6,
            max_len: 12,
            synonym_pool: 5,
            users_per_topic: 50,
            seed: 42,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |m: &str| Err(SynthError::InvalidSpec(m.to_string()));
        if self.topics < 2 {
            return fail("need at least 2 topics");
        }
        if self.messages_per_topic == 0
            || self.lexicon_size == 0
            || self.synonym_pool == 0
            || self.users_per_topic == 0
            || self.min_len == 0
        {
            return fail("all sizes must be positive");
        }
        if self.max_len < self.min_len {
            return fail("max_len must be at least min_len");
        }
        if !(0.0..=1.0).contains(&self.shared_fraction) {
            return fail("shared_fraction must lie in [0, 1]");
        }
        Ok(())
    }
}

/// A generated corpus plus its planted reference labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    /// `(message_id, user_id, text)` in output order.
    pub messages: Vec<(String, String, String)>,
    pub message_labels: Vec<(String, i64)>,
    pub user_labels: Vec<(String, i64)>,
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let pool_count = spec.lexicon_size.div_ceil(spec.synonym_pool);
    let topic_word = |topic: usize, word: usize| {
        let pool = word / spec.synonym_pool;
        format!("t{topic:02}p{pool:02}w{}", word % spec.synonym_pool)
    };
    let shared_word = |word: usize| format!("shw{word:02}");

    // Shuffled topic sequence with exactly messages_per_topic entries each.
    let mut topic_of: Vec<usize> = (0..spec.topics)
        .flat_map(|t| std::iter::repeat_n(t, spec.messages_per_topic))
        .collect();
    topic_of.shuffle(&mut rng);

    let mut messages = Vec::with_capacity(topic_of.len());
    let mut message_labels = Vec::with_capacity(topic_of.len());
    let mut pool_order: Vec<usize> = (0..pool_count).collect();
    for (i, &topic) in topic_of.iter().enumerate() {
        let len = rng.random_range(spec.min_len..=spec.max_len);
        pool_order.shuffle(&mut rng);
        let mut tokens = Vec::with_capacity(len);
        let mut next_pool = 0usize;
        for _ in 0..len {
            if rng.random::<f64>() < spec.shared_fraction {
                tokens.push(shared_word(rng.random_range(0..spec.lexicon_size)));
            } else {
                // Walk the shuffled pool order so one message covers many
                // distinct pools before reusing any.
                let pool = pool_order[next_pool % pool_order.len()];
                next_pool += 1;
                let base = pool * spec.synonym_pool;
                let width = spec.synonym_pool.min(spec.lexicon_size - base);
                tokens.push(topic_word(topic, base + rng.random_range(0..width)));
            }
        }
        let message_id = format!("m{i:06}");
        let user_id = format!("u{topic:02}x{:03}", rng.random_range(0..spec.users_per_topic));
        messages.push((message_id.clone(), user_id, tokens.join(" ")));
        message_labels.push((message_id, topic as i64));
    }

    let user_labels = (0..spec.topics)
        .flat_map(|t| {
            (0..spec.users_per_topic).map(move |j| (format!("u{t:02}x{j:03}"), t as i64))
        })
        .collect();

    Ok(SyntheticCorpus {
        messages,
        message_labels,
        user_labels,
    })
}

impl SyntheticCorpus {
    /// Writes the corpus as JSON Lines.
    pub fn save_jsonl(&self, path: &Path) -> Result<(), SynthError> {
        let mut out = BufWriter::new(File::create(path)?);
        for (id, user, text) in &self.messages {
            let value = serde_json::json!({
                "message_id": id,
                "user_id": user,
                "text": text,
            });
            writeln!(out, "{value}")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes both reference labelings as `kind,id,label` CSV: one `message`
    /// row per message and one `user` row per user.
    pub fn save_reference_csv(&self, path: &Path) -> Result<(), SynthError> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(b"kind,id,label\n")?;
        for (id, label) in &self.message_labels {
            writeln!(out, "message,{id},{label}")?;
        }
        for (id, label) in &self.user_labels {
            writeln!(out, "user,{id},{label}")?;
        }
        out.flush()?;
        Ok(())
    }
}
