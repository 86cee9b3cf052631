//! DBSCAN with deterministic scan order.
//!
//! A point is core when at least `min_pts` points (itself included) lie
//! within `eps`. Clusters are maximal density-connected sets, expanded
//! breadth-first from core points in input order, so border points attach to
//! the first core point that reaches them and labels come out dense in
//! first-appearance order.

use crate::error::ClusterError;

use super::{check_dimensions, ClusterAssignment, Metric, NOISE};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DbscanParams {
    /// Neighborhood radius in the chosen metric (inclusive).
    pub eps: f64,
    /// Minimum neighborhood size (self included) for a core point.
    pub min_pts: usize,
    pub metric: Metric,
}

impl DbscanParams {
    pub fn new(eps: f64, min_pts: usize, metric: Metric) -> Result<Self, ClusterError> {
        if !(eps > 0.0) {
            return Err(ClusterError::InvalidParams(format!(
                "eps must be positive, got {eps}"
            )));
        }
        if min_pts < 1 {
            return Err(ClusterError::InvalidParams("min_pts must be at least 1".into()));
        }
        Ok(DbscanParams {
            eps,
            min_pts,
            metric,
        })
    }
}

pub fn dbscan(points: &[Vec<f64>], params: &DbscanParams) -> Result<ClusterAssignment, ClusterError> {
    check_dimensions(points)?;
    let n = points.len();

    let neighbors = |i: usize| -> Vec<usize> {
        (0..n)
            .filter(|&j| params.metric.distance(&points[i], &points[j]) <= params.eps)
            .collect()
    };

    const UNVISITED: i64 = -2;
    let mut labels = vec![UNVISITED; n];
    let mut k: usize = 0;

    for start in 0..n {
        if labels[start] != UNVISITED {
            continue;
        }
        let seed_neighbors = neighbors(start);
        if seed_neighbors.len() < params.min_pts {
            labels[start] = NOISE;
            continue;
        }
        let cluster = k as i64;
        k += 1;
        labels[start] = cluster;
        let mut queue: std::collections::VecDeque<usize> = seed_neighbors.into();
        while let Some(q) = queue.pop_front() {
            if labels[q] == NOISE {
                // Border point previously set aside: claimed by the first
                // cluster that reaches it.
                labels[q] = cluster;
                continue;
            }
            if labels[q] != UNVISITED {
                continue;
            }
            labels[q] = cluster;
            let q_neighbors = neighbors(q);
            if q_neighbors.len() >= params.min_pts {
                queue.extend(q_neighbors);
            }
        }
    }

    Ok(ClusterAssignment::new(labels, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(center: &[f64], count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| center.to_vec()).collect()
    }

    #[test]
    fn two_tight_groups_form_two_clusters() {
        let mut points = blob(&[0.0, 0.0], 5);
        points.extend(blob(&[10.0, 0.0], 5));
        let params = DbscanParams::new(1.0, 3, Metric::Euclidean).unwrap();
        let assignment = dbscan(&points, &params).unwrap();
        assert_eq!(assignment.k, 2);
        assert_eq!(assignment.noise_fraction(), 0.0);
        assert!(assignment.labels[..5].iter().all(|&l| l == 0));
        assert!(assignment.labels[5..].iter().all(|&l| l == 1));
    }

    #[test]
    fn far_apart_points_are_all_noise() {
        let points: Vec<Vec<f64>> = (0..6).map(|i| vec![100.0 * i as f64]).collect();
        let params = DbscanParams::new(1.0, 2, Metric::Euclidean).unwrap();
        let assignment = dbscan(&points, &params).unwrap();
        assert_eq!(assignment.k, 0);
        assert!(assignment.labels.iter().all(|&l| l == NOISE));
    }

    #[test]
    fn single_point_with_min_pts_one_is_its_own_cluster() {
        let params = DbscanParams::new(0.5, 1, Metric::Euclidean).unwrap();
        let assignment = dbscan(&[vec![3.0, 4.0]], &params).unwrap();
        assert_eq!(assignment.k, 1);
        assert_eq!(assignment.labels, vec![0]);
    }

    #[test]
    fn border_point_goes_to_first_reaching_cluster() {
        // The point at x=2 has only 3 neighbors (itself, 1.0 and 3.0), so
        // with min_pts = 4 it is a border point within eps of cores in both
        // groups; the group at 0..=1 is scanned first and claims it.
        let points = vec![
            vec![0.0],
            vec![0.2],
            vec![0.4],
            vec![1.0],
            vec![3.0],
            vec![3.8],
            vec![3.9],
            vec![4.0],
            vec![2.0],
        ];
        let params = DbscanParams::new(1.0, 4, Metric::Euclidean).unwrap();
        let assignment = dbscan(&points, &params).unwrap();
        assert_eq!(assignment.k, 2);
        assert_eq!(assignment.labels[8], 0);
        assert!(assignment.labels[4..8].iter().all(|&l| l == 1));
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let params = DbscanParams::new(1.0, 2, Metric::Euclidean).unwrap();
        let err = dbscan(&[vec![0.0, 1.0], vec![0.0]], &params).unwrap_err();
        assert!(matches!(err, ClusterError::DimensionMismatch { .. }));
    }

    #[test]
    fn rejects_nonpositive_eps() {
        assert!(DbscanParams::new(0.0, 2, Metric::Euclidean).is_err());
    }

    #[test]
    fn cosine_equals_euclidean_on_normalized_with_chord_mapping() {
        use super::super::normalize_rows;
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.random_range(5..60);
            let d = rng.random_range(2..6);
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let eps_cos = rng.random_range(0.05..0.8);
            let min_pts = rng.random_range(2..5);

            let cos =
                dbscan(&points, &DbscanParams::new(eps_cos, min_pts, Metric::Cosine).unwrap())
                    .unwrap();
            // Chord relation on unit vectors: d_euc^2 = 2 * d_cos.
            let euc = dbscan(
                &normalize_rows(&points),
                &DbscanParams::new((2.0 * eps_cos).sqrt(), min_pts, Metric::Euclidean).unwrap(),
            )
            .unwrap();
            assert_eq!(cos.labels, euc.labels);
        }
    }

    #[test]
    fn core_co_membership_is_permutation_invariant() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 40;
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random_range(0.0..4.0), rng.random_range(0.0..4.0)])
            .collect();
        let params = DbscanParams::new(0.7, 3, Metric::Euclidean).unwrap();
        let base = dbscan(&points, &params).unwrap();

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let shuffled: Vec<Vec<f64>> = order.iter().map(|&i| points[i].clone()).collect();
        let perm = dbscan(&shuffled, &params).unwrap();

        let is_core = |pts: &[Vec<f64>], i: usize| {
            pts.iter()
                .filter(|p| params.metric.distance(&pts[i], p) <= params.eps)
                .count()
                >= params.min_pts
        };
        for a in 0..n {
            for b in 0..n {
                if is_core(&points, order[a]) && is_core(&points, order[b]) {
                    let together_base = base.labels[order[a]] == base.labels[order[b]];
                    let together_perm = perm.labels[a] == perm.labels[b];
                    assert_eq!(together_base, together_perm);
                }
                // Noise status never depends on order.
                assert_eq!(base.labels[order[a]] == NOISE, perm.labels[a] == NOISE);
            }
        }
    }
}
