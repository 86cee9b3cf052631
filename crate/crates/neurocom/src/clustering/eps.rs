//! Radius selection from the k-distance curve.
//!
//! Every point contributes the distance to its k-th nearest neighbor. A
//! human would eyeball the sorted curve for its elbow; for reproducibility
//! we pin eps at a fixed quantile instead: the k-distance exceeded by only
//! 5% of points.

use crate::error::ClusterError;

use super::{check_dimensions, Metric};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsEstimate {
    pub eps: f64,
    /// Set when the estimate collapsed to zero (e.g. all points identical).
    pub degenerate: bool,
}

/// Estimates a DBSCAN radius as the 95th-percentile k-th-neighbor distance.
pub fn estimate_eps(
    points: &[Vec<f64>],
    k: usize,
    metric: Metric,
) -> Result<EpsEstimate, ClusterError> {
    if k < 1 {
        return Err(ClusterError::InvalidParams("k must be at least 1".into()));
    }
    if points.len() < k + 1 {
        return Err(ClusterError::TooFewPoints {
            needed: k + 1,
            got: points.len(),
        });
    }
    check_dimensions(points)?;

    let mut kth_distances = Vec::with_capacity(points.len());
    let mut row = Vec::with_capacity(points.len() - 1);
    for (i, p) in points.iter().enumerate() {
        row.clear();
        for (j, q) in points.iter().enumerate() {
            if i != j {
                row.push(metric.distance(p, q));
            }
        }
        row.sort_by(|a, b| a.partial_cmp(b).expect("distances are not NaN"));
        kth_distances.push(row[k - 1]);
    }
    kth_distances.sort_by(|a, b| a.partial_cmp(b).expect("distances are not NaN"));
    let idx = ((kth_distances.len() - 1) as f64 * 0.95).floor() as usize;
    let eps = kth_distances[idx];
    Ok(EpsEstimate {
        eps,
        degenerate: eps <= 0.0,
    })
}
