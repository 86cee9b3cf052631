//! Clustering of points in the latent space: DBSCAN for community discovery
//! plus the k-means baselines (TF-IDF user vectors and latent message
//! vectors).

mod dbscan;
mod eps;
mod kmeans;
mod tfidf;

pub use dbscan::{dbscan, DbscanParams};
pub use eps::{estimate_eps, EpsEstimate};
pub use kmeans::{inertia, kmeans, kmeans_lat};
pub use tfidf::{tfidf_user_vectors, TfidfUserMatrix};

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::ClusterError;

/// Distance used by the clusterers and by silhouette.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    /// 1 − cosine similarity. Zero-norm vectors are at distance 1 from
    /// everything except another zero-norm vector.
    #[default]
    Cosine,
}

impl Metric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Cosine => {
                let mut dot = 0.0;
                let mut na = 0.0;
                let mut nb = 0.0;
                for (x, y) in a.iter().zip(b) {
                    dot += x * y;
                    na += x * x;
                    nb += y * y;
                }
                if na == 0.0 && nb == 0.0 {
                    0.0
                } else if na == 0.0 || nb == 0.0 {
                    1.0
                } else {
                    // Rounding can push the ratio past 1 for near-parallel
                    // vectors; distances must not go negative.
                    (1.0 - dot / (na.sqrt() * nb.sqrt())).max(0.0)
                }
            }
        }
    }
}

/// Noise label used in assignments.
pub const NOISE: i64 = -1;

/// Per-point community labels: −1 for noise, otherwise a dense range
/// 0..k, numbered by first appearance in scan order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub labels: Vec<i64>,
    pub k: usize,
    /// Ids aligned with `labels`; attached via [`ClusterAssignment::with_ids`]
    /// (clusterers that only see raw points leave it empty).
    pub point_ids: Vec<String>,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<i64>, k: usize) -> Self {
        debug_assert!(labels.iter().all(|&l| l == NOISE || (l as usize) < k));
        ClusterAssignment {
            labels,
            k,
            point_ids: Vec::new(),
        }
    }

    /// Attaches the aligned id list.
    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self, ClusterError> {
        if ids.len() != self.labels.len() {
            return Err(ClusterError::Format(format!(
                "{} ids for {} labels",
                ids.len(),
                self.labels.len()
            )));
        }
        self.point_ids = ids;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Fraction of points labeled noise.
    pub fn noise_fraction(&self) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            self.labels.iter().filter(|&&l| l == NOISE).count() as f64 / self.labels.len() as f64
        }
    }

    /// Writes `id,label` CSV with a header row.
    pub fn save_csv(&self, path: &Path, id_column: &str) -> Result<(), ClusterError> {
        if self.point_ids.len() != self.labels.len() {
            return Err(ClusterError::Format(
                "assignment has no ids attached".into(),
            ));
        }
        let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
        writer
            .write_record([id_column, "label"])
            .map_err(|e| ClusterError::Format(e.to_string()))?;
        for (id, label) in self.point_ids.iter().zip(&self.labels) {
            writer
                .write_record([id.as_str(), &label.to_string()])
                .map_err(|e| ClusterError::Format(e.to_string()))?;
        }
        writer
            .flush()
            .map_err(|e| ClusterError::Format(e.to_string()))?;
        Ok(())
    }

    /// Reads an assignment CSV written by [`ClusterAssignment::save_csv`].
    pub fn load_csv(path: &Path) -> Result<Self, ClusterError> {
        let mut reader = csv::Reader::from_reader(BufReader::new(File::open(path)?));
        let mut labels = Vec::new();
        let mut ids = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| ClusterError::Format(e.to_string()))?;
            let (Some(id), Some(label)) = (record.get(0), record.get(1)) else {
                return Err(ClusterError::Format("expected two columns".into()));
            };
            let label: i64 = label
                .parse()
                .map_err(|_| ClusterError::Format(format!("bad label {label:?}")))?;
            ids.push(id.to_string());
            labels.push(label);
        }
        let k = labels
            .iter()
            .filter(|&&l| l != NOISE)
            .map(|&l| l as usize + 1)
            .max()
            .unwrap_or(0);
        ClusterAssignment::new(labels, k).with_ids(ids)
    }
}

/// L2-normalizes each vector; zero vectors pass through unchanged.
pub fn normalize_rows(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            let norm: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                p.clone()
            } else {
                p.iter().map(|x| x / norm).collect()
            }
        })
        .collect()
}

pub(crate) fn check_dimensions(points: &[Vec<f64>]) -> Result<usize, ClusterError> {
    let dim = points.first().map_or(0, Vec::len);
    for (index, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(ClusterError::DimensionMismatch {
                index,
                expected: dim,
                got: p.len(),
            });
        }
    }
    Ok(dim)
}
