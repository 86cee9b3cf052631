//! Clustering-quality metrics: mean silhouette coefficient and normalized
//! mutual information. Noise labels (−1) are excluded — per point for
//! silhouette, pairwise for NMI.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::clustering::Metric;
use crate::error::MetricsError;

/// Mean silhouette over non-noise points.
///
/// For each point, a is the mean distance to the rest of its own cluster
/// (zero for singletons), b the smallest mean distance to another cluster,
/// and the score is (b − a)/max(a, b) — or zero when both a and b vanish.
pub fn silhouette(
    points: &[Vec<f64>],
    labels: &[i64],
    metric: Metric,
) -> Result<f64, MetricsError> {
    if points.len() != labels.len() {
        return Err(MetricsError::LengthMismatch {
            a: points.len(),
            b: labels.len(),
        });
    }
    let mut cluster_sizes: HashMap<i64, usize> = HashMap::new();
    for &l in labels.iter().filter(|&&l| l >= 0) {
        *cluster_sizes.entry(l).or_insert(0) += 1;
    }
    if cluster_sizes.len() < 2 {
        return Err(MetricsError::DegenerateClustering);
    }

    let mut total = 0.0;
    let mut counted = 0usize;
    let mut sums: HashMap<i64, f64> = HashMap::new();
    for (i, (p, &own)) in points.iter().zip(labels).enumerate() {
        if own < 0 {
            continue;
        }
        sums.clear();
        for (j, (q, &other)) in points.iter().zip(labels).enumerate() {
            if other < 0 || i == j {
                continue;
            }
            *sums.entry(other).or_insert(0.0) += metric.distance(p, q);
        }
        let own_size = cluster_sizes[&own];
        let a = if own_size <= 1 {
            0.0
        } else {
            sums.get(&own).copied().unwrap_or(0.0) / (own_size - 1) as f64
        };
        let b = cluster_sizes
            .iter()
            .filter(|&(&l, _)| l != own)
            .map(|(&l, &size)| sums.get(&l).copied().unwrap_or(0.0) / size as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        total += if denom == 0.0 { 0.0 } else { (b - a) / denom };
        counted += 1;
    }
    Ok(total / counted as f64)
}

/// NMI between two labelings, with a degenerate flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmiOutcome {
    pub value: f64,
    /// Set when either partition carries no information (a single cluster, or
    /// nothing left after noise exclusion); the value is then 0 by convention.
    pub degenerate: bool,
}

/// Normalized mutual information, I(A;B) / sqrt(H(A) · H(B)), with
/// natural-log entropies over the joint contingency table. Pairs where
/// either side is noise are excluded.
pub fn nmi(labels_a: &[i64], labels_b: &[i64]) -> Result<NmiOutcome, MetricsError> {
    if labels_a.len() != labels_b.len() {
        return Err(MetricsError::LengthMismatch {
            a: labels_a.len(),
            b: labels_b.len(),
        });
    }
    let mut joint: HashMap<(i64, i64), u64> = HashMap::new();
    let mut count_a: HashMap<i64, u64> = HashMap::new();
    let mut count_b: HashMap<i64, u64> = HashMap::new();
    let mut n = 0u64;
    for (&a, &b) in labels_a.iter().zip(labels_b) {
        if a < 0 || b < 0 {
            continue;
        }
        *joint.entry((a, b)).or_insert(0) += 1;
        *count_a.entry(a).or_insert(0) += 1;
        *count_b.entry(b).or_insert(0) += 1;
        n += 1;
    }
    if n == 0 {
        return Ok(NmiOutcome {
            value: 0.0,
            degenerate: true,
        });
    }
    let n = n as f64;
    let entropy = |counts: &HashMap<i64, u64>| -> f64 {
        counts
            .values()
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_a = entropy(&count_a);
    let h_b = entropy(&count_b);
    if h_a == 0.0 || h_b == 0.0 {
        return Ok(NmiOutcome {
            value: 0.0,
            degenerate: true,
        });
    }
    let mut information = 0.0;
    for (&(a, b), &c) in &joint {
        let p = c as f64 / n;
        let pa = count_a[&a] as f64 / n;
        let pb = count_b[&b] as f64 / n;
        information += p * (p / (pa * pb)).ln();
    }
    Ok(NmiOutcome {
        value: (information / (h_a * h_b).sqrt()).clamp(0.0, 1.0),
        degenerate: false,
    })
}

/// One evaluation record, serialized as the metrics report JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub method: String,
    pub silhouette: Option<f64>,
    pub nmi: Option<f64>,
    pub k: usize,
    pub noise_fraction: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub nmi_degenerate: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub silhouette_degenerate: bool,
}
