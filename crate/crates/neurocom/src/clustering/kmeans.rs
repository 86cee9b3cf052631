//! Lloyd's algorithm with k-means++ seeding and deterministic tie-breaking.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::ClusterError;
use crate::message::MessageVector;

use super::{check_dimensions, normalize_rows, ClusterAssignment};

fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: first center uniform, the rest proportional to the
/// squared distance to the nearest chosen center.
fn seed_centers(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(points[rng.random_range(0..points.len())].clone());
    let mut dist2: Vec<f64> = points
        .iter()
        .map(|p| squared_euclidean(p, &centers[0]))
        .collect();
    while centers.len() < k {
        let total: f64 = dist2.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = dist2.len() - 1;
            for (i, &d) in dist2.iter().enumerate() {
                if u < d {
                    chosen = i;
                    break;
                }
                u -= d;
            }
            chosen
        } else {
            // All remaining mass at distance zero: fall back to uniform.
            rng.random_range(0..points.len())
        };
        centers.push(points[next].clone());
        for (d, p) in dist2.iter_mut().zip(points) {
            *d = d.min(squared_euclidean(p, centers.last().unwrap()));
        }
    }
    centers
}

fn nearest_center(point: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centers.iter().enumerate() {
        let d = squared_euclidean(point, c);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Sum of squared distances from each point to its assigned centroid, with
/// centroids recomputed from the assignment.
pub fn inertia(points: &[Vec<f64>], assignment: &ClusterAssignment) -> f64 {
    let dim = points.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; assignment.k];
    let mut counts = vec![0usize; assignment.k];
    for (p, &l) in points.iter().zip(&assignment.labels) {
        if l >= 0 {
            let l = l as usize;
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            for x in s.iter_mut() {
                *x /= c as f64;
            }
        }
    }
    points
        .iter()
        .zip(&assignment.labels)
        .filter(|&(_, &l)| l >= 0)
        .map(|(p, &l)| squared_euclidean(p, &sums[l as usize]))
        .sum()
}

/// Lloyd's algorithm. Converges when assignments stop changing or after
/// `max_iter` passes; empty clusters are repaired by moving the farthest
/// point out of the largest cluster. Same seed, same result.
pub fn kmeans(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterAssignment, ClusterError> {
    if k < 1 {
        return Err(ClusterError::InvalidParams("k must be at least 1".into()));
    }
    if k > points.len() {
        return Err(ClusterError::KTooLarge {
            k,
            points: points.len(),
        });
    }
    let dim = check_dimensions(points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = seed_centers(points, k, &mut rng);
    let mut labels: Vec<usize> = points.iter().map(|p| nearest_center(p, &centers)).collect();

    for _ in 0..max_iter {
        repair_empty_clusters(points, &mut labels, k);

        // Recompute centroids.
        let mut counts = vec![0usize; k];
        for c in centers.iter_mut() {
            c.iter_mut().for_each(|x| *x = 0.0);
        }
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in centers[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for (c, &count) in centers.iter_mut().zip(&counts) {
            debug_assert!(count > 0, "empty cluster after repair");
            for x in c.iter_mut() {
                *x /= count as f64;
            }
        }

        let next: Vec<usize> = points.iter().map(|p| nearest_center(p, &centers)).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    repair_empty_clusters(points, &mut labels, k);

    let _ = dim;
    Ok(ClusterAssignment::new(
        labels.into_iter().map(|l| l as i64).collect(),
        k,
    ))
}

/// Moves the point farthest from the largest cluster's centroid into each
/// empty cluster (largest cluster and farthest point chosen by lowest index
/// on ties).
fn repair_empty_clusters(points: &[Vec<f64>], labels: &mut [usize], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let largest = counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .expect("at least one cluster");
        let dim = points.first().map_or(0, Vec::len);
        let mut centroid = vec![0.0; dim];
        for (p, &l) in points.iter().zip(labels.iter()) {
            if l == largest {
                for (s, x) in centroid.iter_mut().zip(p) {
                    *s += x;
                }
            }
        }
        for x in centroid.iter_mut() {
            *x /= counts[largest] as f64;
        }
        let farthest = points
            .iter()
            .zip(labels.iter())
            .enumerate()
            .filter(|(_, (_, &l))| l == largest)
            .max_by(|(ai, (a, _)), (bi, (b, _))| {
                squared_euclidean(a, &centroid)
                    .partial_cmp(&squared_euclidean(b, &centroid))
                    .expect("distances are not NaN")
                    .then(bi.cmp(ai))
            })
            .map(|(i, _)| i)
            .expect("largest cluster is non-empty");
        labels[farthest] = empty;
    }
}

/// K-means in the latent space: message vectors are L2-normalized first so
/// euclidean distance tracks the angular similarity the space is built on.
pub fn kmeans_lat(
    message_vectors: &[MessageVector],
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterAssignment, ClusterError> {
    let points: Vec<Vec<f64>> = message_vectors.iter().map(|m| m.vector.clone()).collect();
    let normalized = normalize_rows(&points);
    kmeans(&normalized, k, seed, max_iter)?.with_ids(
        message_vectors
            .iter()
            .map(|m| m.message_id.clone())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_blobs() -> Vec<Vec<f64>> {
        let mut points = Vec::new();
        for i in 0..5 {
            points.push(vec![0.0 + 0.01 * i as f64, 0.0]);
        }
        for i in 0..5 {
            points.push(vec![10.0 + 0.01 * i as f64, 0.0]);
        }
        points
    }

    #[test]
    fn k_equal_to_point_count_gives_singletons() {
        let points: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 * 2.0]).collect();
        let assignment = kmeans(&points, 6, 1, 50).unwrap();
        let mut seen: Vec<i64> = assignment.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 6);
        assert!(inertia(&points, &assignment) < 1e-12);
    }

    #[test]
    fn separated_blobs_are_split_on_blob_lines() {
        let points = two_blobs();
        let assignment = kmeans(&points, 2, 7, 100).unwrap();
        let first = assignment.labels[0];
        assert!(assignment.labels[..5].iter().all(|&l| l == first));
        assert!(assignment.labels[5..].iter().all(|&l| l != first));
    }

    #[test]
    fn same_seed_same_assignment() {
        let points = two_blobs();
        let a = kmeans(&points, 3, 99, 100).unwrap();
        let b = kmeans(&points, 3, 99, 100).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn k_larger_than_points_is_rejected() {
        let points = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            kmeans(&points, 3, 0, 10),
            Err(ClusterError::KTooLarge { .. })
        ));
    }

    #[test]
    fn inertia_non_increasing_over_iterations() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let points: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)])
            .collect();
        let mut previous = f64::INFINITY;
        for iters in 1..12 {
            let assignment = kmeans(&points, 4, 11, iters).unwrap();
            let value = inertia(&points, &assignment);
            assert!(
                value <= previous + 1e-9,
                "inertia rose from {previous} to {value} at {iters} iterations"
            );
            previous = value;
        }
    }

    #[test]
    fn kmeans_lat_is_scale_invariant() {
        let vectors: Vec<MessageVector> = two_blobs()
            .into_iter()
            .enumerate()
            .map(|(i, mut v)| {
                v[0] += 1.0; // keep vectors away from the origin
                MessageVector {
                    message_id: format!("m{i}"),
                    vector: v,
                    used_ngrams: 1,
                }
            })
            .collect();
        let scaled: Vec<MessageVector> = vectors
            .iter()
            .map(|m| MessageVector {
                message_id: m.message_id.clone(),
                vector: m.vector.iter().map(|x| 3.5 * x).collect(),
                used_ngrams: m.used_ngrams,
            })
            .collect();
        let a = kmeans_lat(&vectors, 2, 5, 100).unwrap();
        let b = kmeans_lat(&scaled, 2, 5, 100).unwrap();
        assert_eq!(a, b);
    }
}
