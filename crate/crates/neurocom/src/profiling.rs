//! Community profiles: centroids, the user-affiliation matrix H, top
//! descriptive n-grams, and the multi-membership histogram.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clustering::ClusterAssignment;
use crate::corpus::{extract_ngrams, Corpus, Vocabulary};
use crate::embedding::{cosine, EmbeddingMatrix};
use crate::error::PipelineError;
use crate::message::MessageVector;

/// Mean member vector per community, noise excluded. Index = community id.
pub fn community_centroids(
    assignment: &ClusterAssignment,
    message_vectors: &[MessageVector],
) -> Vec<Vec<f64>> {
    debug_assert_eq!(assignment.labels.len(), message_vectors.len());
    let dim = message_vectors.first().map_or(0, |v| v.vector.len());
    let mut sums = vec![vec![0.0; dim]; assignment.k];
    let mut counts = vec![0usize; assignment.k];
    for (mv, &label) in message_vectors.iter().zip(&assignment.labels) {
        if label >= 0 {
            let c = label as usize;
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(&mv.vector) {
                *s += x;
            }
        }
    }
    for (sum, &count) in sums.iter_mut().zip(&counts) {
        if count > 0 {
            for x in sum.iter_mut() {
                *x /= count as f64;
            }
        }
    }
    sums
}

/// Row-stochastic user-by-community affiliation.
///
/// `counts[i][j]` is the number of user i's messages in community j (noise
/// excluded); `h` is `counts` row-normalized. Users whose clustered messages
/// are all noise — or who have no clustered message at all — get no row and
/// are listed in `unaffiliated`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffiliationMatrix {
    pub users: Vec<String>,
    pub counts: Vec<Vec<u64>>,
    pub h: Vec<Vec<f64>>,
    pub k: usize,
    pub unaffiliated: Vec<String>,
    user_index: HashMap<String, usize>,
}

impl AffiliationMatrix {
    pub fn user_row(&self, user_id: &str) -> Option<&[f64]> {
        self.user_index.get(user_id).map(|&i| self.h[i].as_slice())
    }

    /// Writes `user_id,c0,...` CSV.
    pub fn save_csv(&self, path: &Path) -> Result<(), PipelineError> {
        let mut out = BufWriter::new(File::create(path)?);
        write!(out, "user_id")?;
        for j in 0..self.k {
            write!(out, ",c{j}")?;
        }
        out.write_all(b"\n")?;
        for (user, row) in self.users.iter().zip(&self.h) {
            // Synthetic and social ids are plain strings; quote defensively
            // only when needed.
            if user.contains(',') || user.contains('"') {
                write!(out, "\"{}\"", user.replace('"', "\"\""))?;
            } else {
                write!(out, "{user}")?;
            }
            for x in row {
                write!(out, ",{x}")?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Counts non-noise messages per (user, community) and row-normalizes.
pub fn affiliation(
    assignment: &ClusterAssignment,
    corpus: &Corpus,
) -> Result<AffiliationMatrix, PipelineError> {
    let user_of: HashMap<&str, &str> = corpus
        .messages
        .iter()
        .map(|m| (m.message_id.as_str(), m.user_id.as_str()))
        .collect();
    let mut per_user: HashMap<&str, Vec<u64>> = HashMap::new();
    for (id, &label) in assignment.point_ids.iter().zip(&assignment.labels) {
        let Some(&user) = user_of.get(id.as_str()) else {
            return Err(PipelineError::UnknownId(id.clone()));
        };
        if label >= 0 {
            per_user.entry(user).or_insert_with(|| vec![0; assignment.k])[label as usize] += 1;
        }
    }

    let mut users = Vec::new();
    let mut counts = Vec::new();
    let mut h = Vec::new();
    let mut unaffiliated = Vec::new();
    for user in corpus.users() {
        match per_user.get(user.as_str()) {
            Some(row) if row.iter().any(|&c| c > 0) => {
                let total: u64 = row.iter().sum();
                h.push(row.iter().map(|&c| c as f64 / total as f64).collect());
                counts.push(row.clone());
                users.push(user.clone());
            }
            _ => unaffiliated.push(user.clone()),
        }
    }
    let user_index = users
        .iter()
        .enumerate()
        .map(|(i, u)| (u.clone(), i))
        .collect();
    Ok(AffiliationMatrix {
        users,
        counts,
        h,
        k: assignment.k,
        unaffiliated,
        user_index,
    })
}

/// The `n` vocabulary n-grams most cosine-similar to a centroid, stopwords
/// excluded, ties broken by vocabulary index.
pub fn top_words(
    centroid: &[f64],
    vocab: &Vocabulary,
    matrices: &EmbeddingMatrix,
    n: usize,
    stopwords: &HashSet<String>,
) -> Vec<(String, f64)> {
    let mut scored: Vec<(usize, f64)> = (0..vocab.len())
        .filter(|&i| !stopwords.contains(vocab.ngram(i)))
        .map(|i| (i, cosine(centroid, matrices.input_row(i))))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("cosine is not NaN").then(a.0.cmp(&b.0)));
    scored
        .into_iter()
        .take(n)
        .map(|(i, score)| (vocab.ngram(i).to_string(), score))
        .collect()
}

/// Alternative top-word ranking: TF-IDF over communities, each community's
/// member messages concatenated into one document.
pub fn top_words_tfidf(
    assignment: &ClusterAssignment,
    corpus: &Corpus,
    n_max: usize,
    n: usize,
    stopwords: &HashSet<String>,
) -> Vec<Vec<(String, f64)>> {
    let label_of: HashMap<&str, i64> = assignment
        .point_ids
        .iter()
        .zip(&assignment.labels)
        .map(|(id, &l)| (id.as_str(), l))
        .collect();
    let mut docs: Vec<HashMap<String, u64>> = vec![HashMap::new(); assignment.k];
    for message in &corpus.messages {
        let Some(&label) = label_of.get(message.message_id.as_str()) else {
            continue;
        };
        if label < 0 {
            continue;
        }
        let doc = &mut docs[label as usize];
        for g in extract_ngrams(&message.tokens, n_max).iter() {
            if !stopwords.contains(g) {
                *doc.entry(g.to_string()).or_insert(0) += 1;
            }
        }
    }
    let mut df: HashMap<&str, u64> = HashMap::new();
    for doc in &docs {
        for term in doc.keys() {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let k = assignment.k as f64;
    docs.iter()
        .map(|doc| {
            let mut ranked: Vec<(String, f64)> = doc
                .iter()
                .map(|(term, &tf)| {
                    let idf = ((1.0 + k) / (1.0 + df[term.as_str()] as f64)).ln() + 1.0;
                    (term.clone(), tf as f64 * idf)
                })
                .collect();
            ranked.sort_by(|a, b| {
                b.1.partial_cmp(&a.1).expect("weights are not NaN").then(a.0.cmp(&b.0))
            });
            ranked.truncate(n);
            ranked
        })
        .collect()
}

/// Fractions of affiliated users present in exactly 1, 2, 3 or 4-plus
/// communities (presence = at least one message there).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipHistogram {
    #[serde(rename = "1")]
    pub one: f64,
    #[serde(rename = "2")]
    pub two: f64,
    #[serde(rename = "3")]
    pub three: f64,
    #[serde(rename = "4+")]
    pub four_plus: f64,
}

pub fn membership_histogram(affiliation: &AffiliationMatrix) -> MembershipHistogram {
    let mut buckets = [0usize; 4];
    for row in &affiliation.counts {
        let communities = row.iter().filter(|&&c| c >= 1).count();
        match communities {
            0 => {}
            1 => buckets[0] += 1,
            2 => buckets[1] += 1,
            3 => buckets[2] += 1,
            _ => buckets[3] += 1,
        }
    }
    let total: usize = buckets.iter().sum();
    let frac = |b: usize| {
        if total == 0 {
            0.0
        } else {
            b as f64 / total as f64
        }
    };
    MembershipHistogram {
        one: frac(buckets[0]),
        two: frac(buckets[1]),
        three: frac(buckets[2]),
        four_plus: frac(buckets[3]),
    }
}

/// One entry of the profiles JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommunityProfile {
    pub community_id: usize,
    pub size: usize,
    pub user_count: usize,
    pub top_words: Vec<TopWord>,
    #[serde(skip)]
    pub centroid: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopWord {
    pub ngram: String,
    pub score: f64,
}

/// How profile top words are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopWordsMode {
    /// Nearest vocabulary n-grams to the community centroid (the default).
    #[default]
    Centroid,
    /// Highest TF-IDF n-grams of the community's concatenated messages.
    Tfidf,
}

/// Assembles the per-community profiles.
pub fn build_profiles(
    assignment: &ClusterAssignment,
    message_vectors: &[MessageVector],
    corpus: &Corpus,
    vocab: &Vocabulary,
    matrices: &EmbeddingMatrix,
    top_n: usize,
    stopwords: &HashSet<String>,
    mode: TopWordsMode,
) -> Result<Vec<CommunityProfile>, PipelineError> {
    let centroids = community_centroids(assignment, message_vectors);
    let affil = affiliation(assignment, corpus)?;

    let mut sizes = vec![0usize; assignment.k];
    for &l in &assignment.labels {
        if l >= 0 {
            sizes[l as usize] += 1;
        }
    }
    let mut user_counts = vec![0usize; assignment.k];
    for row in &affil.counts {
        for (j, &c) in row.iter().enumerate() {
            if c >= 1 {
                user_counts[j] += 1;
            }
        }
    }

    let mut ranked: Vec<Vec<(String, f64)>> = match mode {
        TopWordsMode::Centroid => centroids
            .iter()
            .map(|c| top_words(c, vocab, matrices, top_n, stopwords))
            .collect(),
        TopWordsMode::Tfidf => {
            top_words_tfidf(assignment, corpus, vocab.max_ngram_len(), top_n, stopwords)
        }
    };

    Ok(centroids
        .into_iter()
        .enumerate()
        .map(|(j, centroid)| {
            let words = std::mem::take(&mut ranked[j])
                .into_iter()
                .map(|(ngram, score)| TopWord { ngram, score })
                .collect();
            CommunityProfile {
                community_id: j,
                size: sizes[j],
                user_count: user_counts[j],
                top_words: words,
                centroid,
            }
        })
        .collect())
}
