//! TF-IDF user vectors, the surface-form baseline representation.
//!
//! One document per user (all their messages' tokens concatenated),
//! tf = raw count, idf = ln((1 + U)/(1 + df)) + 1, rows L2-normalized so
//! cosine similarity is a plain dot product.

use std::collections::HashMap;

use crate::corpus::Corpus;

/// Sparse user-by-term weight matrix. Terms are indexed in lexicographic
/// order, users in first-appearance order; both maps are reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfUserMatrix {
    pub users: Vec<String>,
    pub terms: Vec<String>,
    /// Per user: `(term index, weight)` sorted by term index.
    pub rows: Vec<Vec<(usize, f64)>>,
    user_index: HashMap<String, usize>,
    term_index: HashMap<String, usize>,
}

impl TfidfUserMatrix {
    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn user_row(&self, user_id: &str) -> Option<&[(usize, f64)]> {
        self.user_index.get(user_id).map(|&i| self.rows[i].as_slice())
    }

    pub fn term_position(&self, term: &str) -> Option<usize> {
        self.term_index.get(term).copied()
    }

    /// Dense row-major copy for the clusterers.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; self.terms.len()];
                for &(t, w) in row {
                    dense[t] = w;
                }
                dense
            })
            .collect()
    }
}

/// Builds the TF-IDF matrix over all users with at least one token.
pub fn tfidf_user_vectors(corpus: &Corpus) -> TfidfUserMatrix {
    // Per-user token counts, users kept in first-appearance order.
    let mut doc_counts: HashMap<&str, HashMap<&str, u64>> = HashMap::new();
    for message in &corpus.messages {
        let doc = doc_counts.entry(message.user_id.as_str()).or_default();
        for token in &message.tokens {
            *doc.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    let users: Vec<String> = corpus
        .users()
        .iter()
        .filter(|u| doc_counts.get(u.as_str()).is_some_and(|d| !d.is_empty()))
        .cloned()
        .collect();

    let mut terms: Vec<String> = users
        .iter()
        .flat_map(|u| doc_counts[u.as_str()].keys().map(|t| t.to_string()))
        .collect();
    terms.sort_unstable();
    terms.dedup();
    let term_index: HashMap<String, usize> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();

    let mut df = vec![0u64; terms.len()];
    for user in &users {
        for term in doc_counts[user.as_str()].keys() {
            df[term_index[*term]] += 1;
        }
    }
    let user_total = users.len() as f64;
    let idf: Vec<f64> = df
        .iter()
        .map(|&d| ((1.0 + user_total) / (1.0 + d as f64)).ln() + 1.0)
        .collect();

    let rows: Vec<Vec<(usize, f64)>> = users
        .iter()
        .map(|user| {
            let mut row: Vec<(usize, f64)> = doc_counts[user.as_str()]
                .iter()
                .map(|(term, &tf)| {
                    let t = term_index[*term];
                    (t, tf as f64 * idf[t])
                })
                .collect();
            row.sort_unstable_by_key(|&(t, _)| t);
            let norm: f64 = row.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (_, w) in row.iter_mut() {
                    *w /= norm;
                }
            }
            row
        })
        .collect();

    let user_index = users
        .iter()
        .enumerate()
        .map(|(i, u)| (u.clone(), i))
        .collect();
    TfidfUserMatrix {
        users,
        terms,
        rows,
        user_index,
        term_index,
    }
}
