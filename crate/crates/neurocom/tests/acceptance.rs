//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! and enforcing its runtime budget. Run with
//! `cargo test -p neurocom --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::collections::{HashMap, HashSet};
use std::panic::{catch_unwind, UnwindSafe};
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use neurocom::clustering::{dbscan, DbscanParams, Metric, NOISE};
use neurocom::corpus::{build_vocabulary, extract_ngrams, Corpus, Message};
use neurocom::embedding::{cosine, ns_loss_and_grads, train, EmbeddingMatrix, TrainConfig};
use neurocom::message::{embed_message, CompositionMode};
use neurocom::metrics::{nmi, silhouette};
use neurocom::pipeline::{
    artifacts, run_pipeline, run_synth, Baseline, PipelineConfig, ReferenceLabels,
};
use neurocom::profiling::{affiliation, membership_histogram};
use neurocom::synth::SyntheticSpec;
use neurocom::ClusterAssignment;

fn criterion<F>(number: u8, name: &str, budget: Duration, body: F)
where
    F: FnOnce() + UnwindSafe,
{
    let start = Instant::now();
    let outcome = catch_unwind(body);
    let elapsed = start.elapsed();
    let ok = outcome.is_ok() && elapsed <= budget;
    println!(
        "[acceptance] criterion {number} — {name}: {} ({:.2}s of {:.0}s budget)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
    );
    if let Err(panic) = outcome {
        std::panic::resume_unwind(panic);
    }
    assert!(
        elapsed <= budget,
        "criterion {number} exceeded its budget: {elapsed:?} > {budget:?}"
    );
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness against central finite differences.
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_gradient_correctness() {
    criterion(1, "negative-sampling gradients", Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let step = 1e-5;
        for _instance in 0..120 {
            let rows = rng.random_range(4..20);
            let dim = rng.random_range(1..=16);
            let mut matrices = EmbeddingMatrix::zeros(rows, dim);
            for r in 0..rows {
                for x in matrices.input_row_mut(r) {
                    *x = rng.random_range(-0.8..0.8);
                }
                for x in matrices.output_row_mut(r) {
                    *x = rng.random_range(-0.8..0.8);
                }
            }
            let context: Vec<usize> = (0..rng.random_range(1..6))
                .map(|_| rng.random_range(0..rows))
                .collect();
            let target = rng.random_range(0..rows);
            let negatives: Vec<usize> = (0..rng.random_range(1..=5))
                .map(|_| rng.random_range(0..rows))
                .collect();

            let grads = ns_loss_and_grads(&context, target, &negatives, &matrices).unwrap();
            assert!(grads.loss > 0.0);

            // Accumulate per (side, row) so duplicate indices compare against
            // the total derivative the way finite differences see it.
            let mut accumulated: HashMap<(bool, usize), Vec<f64>> = HashMap::new();
            let mut add = |key: (bool, usize), grad: &[f64]| {
                let slot = accumulated.entry(key).or_insert_with(|| vec![0.0; dim]);
                for (s, g) in slot.iter_mut().zip(grad) {
                    *s += g;
                }
            };
            add((true, target), &grads.target_grad);
            for (&n, g) in negatives.iter().zip(&grads.negative_grads) {
                add((true, n), g);
            }
            for &c in &context {
                add((false, c), &grads.context_grad);
            }

            for ((output_side, row), analytic) in accumulated {
                for d in 0..dim {
                    let mut plus = matrices.clone();
                    let mut minus = matrices.clone();
                    {
                        let (p, m) = if output_side {
                            (plus.output_row_mut(row), minus.output_row_mut(row))
                        } else {
                            (plus.input_row_mut(row), minus.input_row_mut(row))
                        };
                        p[d] += step;
                        m[d] -= step;
                    }
                    let lp = ns_loss_and_grads(&context, target, &negatives, &plus)
                        .unwrap()
                        .loss;
                    let lm = ns_loss_and_grads(&context, target, &negatives, &minus)
                        .unwrap()
                        .loss;
                    let fd = (lp - lm) / (2.0 * step);
                    let a = analytic[d];
                    let scale = fd.abs().max(a.abs()).max(1e-4);
                    assert!(
                        (fd - a).abs() <= 1e-4 * scale,
                        "gradient mismatch: finite-difference {fd} vs analytic {a}"
                    );
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 2. Message composition equals an independent mean oracle.
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_message_mean_exactness() {
    criterion(2, "message-vector composition", Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(202);

        // A vocabulary over a fixed token pool, with bigrams.
        let pool: Vec<String> = (0..40).map(|i| format!("w{i}")).collect();
        let mut seed_messages = Vec::new();
        for i in 0..200 {
            let len = rng.random_range(2..10);
            let text: Vec<&str> = (0..len)
                .map(|_| pool[rng.random_range(0..pool.len())].as_str())
                .collect();
            seed_messages.push(Message::new(format!("s{i}"), "u", text.join(" ")));
        }
        let corpus = Corpus::from_messages(seed_messages).unwrap();
        let vocab = build_vocabulary(&corpus, 2, 2).unwrap();
        let dim = 12;
        let mut matrices = EmbeddingMatrix::zeros(vocab.len(), dim);
        for r in 0..vocab.len() {
            for x in matrices.input_row_mut(r) {
                *x = rng.random_range(-2.0..2.0);
            }
        }

        for i in 0..1200 {
            let len = rng.random_range(1..12);
            let tokens: Vec<String> = (0..len)
                .map(|_| {
                    if rng.random::<f64>() < 0.15 {
                        format!("oov{}", rng.random_range(0..5))
                    } else {
                        pool[rng.random_range(0..pool.len())].clone()
                    }
                })
                .collect();
            let message = Message::new(format!("m{i}"), "u", tokens.join(" "));
            let n_max = rng.random_range(1..=2);

            // Oracle: explicit sum over the in-vocabulary n-grams.
            let mut total = vec![0.0; dim];
            let mut used = 0usize;
            for g in extract_ngrams(&message.tokens, n_max).iter() {
                if let Some(idx) = vocab.index_of(g) {
                    used += 1;
                    for (t, x) in total.iter_mut().zip(matrices.input_row(idx)) {
                        *t += x;
                    }
                }
            }

            match embed_message(&message, &vocab, &matrices, n_max, CompositionMode::Multiset) {
                Ok(got) => {
                    assert!(used >= 1);
                    assert_eq!(got.used_ngrams, used);
                    for (g, t) in got.vector.iter().zip(&total) {
                        let expected = t / used as f64;
                        assert!(
                            (g - expected).abs() <= 1e-6 * expected.abs().max(1e-9),
                            "component mismatch: {g} vs {expected}"
                        );
                    }
                }
                Err(_) => assert_eq!(used, 0, "oracle found usable n-grams but embed refused"),
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 3. DBSCAN equals a naive reference implementation.
// ---------------------------------------------------------------------------

/// Textbook reference DBSCAN built on union-find over core points — a
/// different algorithmic route than the production breadth-first scan.
mod reference_dbscan {
    pub struct Outcome {
        pub core: Vec<bool>,
        /// Cluster representative per point; usize::MAX marks noise.
        pub component: Vec<usize>,
    }

    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }

    pub fn run(points: &[Vec<f64>], eps: f64, min_pts: usize) -> Outcome {
        let n = points.len();
        let distance = |a: &[f64], b: &[f64]| -> f64 {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        };
        let neighborhoods: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| distance(&points[i], &points[j]) <= eps)
                    .collect()
            })
            .collect();
        let core: Vec<bool> = neighborhoods.iter().map(|nb| nb.len() >= min_pts).collect();

        // Union density-connected core points.
        let mut parent: Vec<usize> = (0..n).collect();
        for i in 0..n {
            if !core[i] {
                continue;
            }
            for &j in &neighborhoods[i] {
                if core[j] {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }

        // Border points join the first core neighbor in index order; points
        // with no core neighbor are noise.
        let mut component = vec![usize::MAX; n];
        for i in 0..n {
            if core[i] {
                component[i] = find(&mut parent, i);
            } else if let Some(&c) = neighborhoods[i].iter().find(|&&j| core[j]) {
                component[i] = find(&mut parent, c);
            }
        }
        Outcome { core, component }
    }
}

#[test]
fn criterion_3_dbscan_oracle_equivalence() {
    criterion(3, "DBSCAN reference equivalence", Duration::from_secs(30), || {
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        for _instance in 0..50 {
            let n = rng.random_range(20..=300);
            let d = rng.random_range(1..=8);
            // A few Gaussian-ish blobs plus uniform background noise.
            let blob_count = rng.random_range(1..5);
            let centers: Vec<Vec<f64>> = (0..blob_count)
                .map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect())
                .collect();
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    if rng.random::<f64>() < 0.15 {
                        (0..d).map(|_| rng.random_range(-6.0..6.0)).collect()
                    } else {
                        let c = &centers[rng.random_range(0..blob_count)];
                        c.iter()
                            .map(|x| x + rng.random_range(-0.4..0.4))
                            .collect()
                    }
                })
                .collect();
            let eps = rng.random_range(0.3..1.2);
            let min_pts = rng.random_range(2..8);

            let produced = dbscan(
                &points,
                &DbscanParams::new(eps, min_pts, Metric::Euclidean).unwrap(),
            )
            .unwrap();
            let reference = reference_dbscan::run(&points, eps, min_pts);

            // Noise sets identical.
            for i in 0..n {
                assert_eq!(
                    produced.labels[i] == NOISE,
                    reference.component[i] == usize::MAX,
                    "noise status differs at point {i}"
                );
            }
            // Pairwise co-membership of core points identical.
            let cores: Vec<usize> = (0..n).filter(|&i| reference.core[i]).collect();
            for (a, &i) in cores.iter().enumerate() {
                for &j in &cores[a + 1..] {
                    let same_prod = produced.labels[i] == produced.labels[j];
                    let same_ref = reference.component[i] == reference.component[j];
                    assert_eq!(same_prod, same_ref, "core co-membership differs for ({i},{j})");
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 4. Metric oracles: silhouette by definition, NMI contract cases.
// ---------------------------------------------------------------------------

/// Silhouette straight from its definition, coded independently.
fn silhouette_oracle(points: &[Vec<f64>], labels: &[i64], metric: Metric) -> f64 {
    let ids: Vec<usize> = (0..points.len()).filter(|&i| labels[i] >= 0).collect();
    let clusters: HashSet<i64> = ids.iter().map(|&i| labels[i]).collect();
    let mut total = 0.0;
    for &i in &ids {
        let mean_to = |cluster: i64, exclude_self: bool| -> f64 {
            let members: Vec<usize> = ids
                .iter()
                .copied()
                .filter(|&j| labels[j] == cluster && (!exclude_self || j != i))
                .collect();
            if members.is_empty() {
                return 0.0;
            }
            members
                .iter()
                .map(|&j| metric.distance(&points[i], &points[j]))
                .sum::<f64>()
                / members.len() as f64
        };
        let a = mean_to(labels[i], true);
        let b = clusters
            .iter()
            .filter(|&&c| c != labels[i])
            .map(|&c| mean_to(c, false))
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        total += if denom == 0.0 { 0.0 } else { (b - a) / denom };
    }
    total / ids.len() as f64
}

#[test]
fn criterion_4_metric_oracles() {
    criterion(4, "silhouette and NMI oracles", Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        for _instance in 0..30 {
            let n = rng.random_range(10..=200);
            let d = rng.random_range(1..5);
            let k = rng.random_range(2..6);
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect())
                .collect();
            let labels: Vec<i64> = (0..n)
                .map(|_| {
                    if rng.random::<f64>() < 0.1 {
                        NOISE
                    } else {
                        rng.random_range(0..k) as i64
                    }
                })
                .collect();
            let distinct: HashSet<i64> = labels.iter().copied().filter(|&l| l >= 0).collect();
            if distinct.len() < 2 {
                continue;
            }
            let metric = if rng.random::<bool>() {
                Metric::Euclidean
            } else {
                Metric::Cosine
            };
            let got = silhouette(&points, &labels, metric).unwrap();
            let want = silhouette_oracle(&points, &labels, metric);
            assert!(
                (got - want).abs() <= 1e-9,
                "silhouette {got} differs from definition {want}"
            );
        }

        // NMI contract cases.
        let a = vec![0, 0, 1, 1, 2, 2, 0, 1];
        assert!((nmi(&a, &a).unwrap().value - 1.0).abs() <= 1e-12);
        let renamed: Vec<i64> = a.iter().map(|&l| 41 - 7 * l).collect();
        assert!((nmi(&a, &renamed).unwrap().value - 1.0).abs() <= 1e-12);
        let left = vec![0, 0, 1, 1];
        let right = vec![0, 1, 0, 1];
        assert!(nmi(&left, &right).unwrap().value.abs() <= 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(405);
        for _ in 0..200 {
            let n = rng.random_range(2..80);
            let xs: Vec<i64> = (0..n).map(|_| rng.random_range(-1..5)).collect();
            let ys: Vec<i64> = (0..n).map(|_| rng.random_range(-1..5)).collect();
            let ab = nmi(&xs, &ys).unwrap().value;
            let ba = nmi(&ys, &xs).unwrap().value;
            assert!((ab - ba).abs() <= 1e-12, "nmi asymmetric: {ab} vs {ba}");
        }
    });
}

// ---------------------------------------------------------------------------
// 5. Affiliation rows are stochastic; histogram matches a direct recount.
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_affiliation_contract() {
    criterion(5, "affiliation matrix contract", Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        for _instance in 0..40 {
            let users = rng.random_range(1..30);
            let messages = rng.random_range(1..300);
            let k = rng.random_range(1..8);

            let raw: Vec<(usize, i64)> = (0..messages)
                .map(|_| {
                    let user = rng.random_range(0..users);
                    let label = if rng.random::<f64>() < 0.2 {
                        NOISE
                    } else {
                        rng.random_range(0..k) as i64
                    };
                    (user, label)
                })
                .collect();

            let corpus = Corpus::from_messages(raw.iter().enumerate().map(|(i, &(u, _))| {
                Message::new(format!("m{i}"), format!("u{u}"), "token")
            }))
            .unwrap();
            let assignment = ClusterAssignment::new(raw.iter().map(|&(_, l)| l).collect(), k)
                .with_ids((0..messages).map(|i| format!("m{i}")).collect())
                .unwrap();
            let affil = affiliation(&assignment, &corpus).unwrap();

            for row in &affil.h {
                let sum: f64 = row.iter().sum();
                assert!((sum - 1.0).abs() <= 1e-9, "H row sums to {sum}");
                assert!(row.iter().all(|&x| (0.0..=1.0).contains(&x)));
            }

            // Direct recount of the membership histogram.
            let mut per_user: HashMap<usize, HashSet<i64>> = HashMap::new();
            for &(u, l) in &raw {
                if l >= 0 {
                    per_user.entry(u).or_default().insert(l);
                }
            }
            let mut buckets = [0usize; 4];
            for set in per_user.values() {
                match set.len() {
                    0 => {}
                    1 => buckets[0] += 1,
                    2 => buckets[1] += 1,
                    3 => buckets[2] += 1,
                    _ => buckets[3] += 1,
                }
            }
            let affiliated: usize = buckets.iter().sum();
            let hist = membership_histogram(&affil);
            if affiliated > 0 {
                assert_eq!(hist.one, buckets[0] as f64 / affiliated as f64);
                assert_eq!(hist.two, buckets[1] as f64 / affiliated as f64);
                assert_eq!(hist.three, buckets[2] as f64 / affiliated as f64);
                assert_eq!(hist.four_plus, buckets[3] as f64 / affiliated as f64);
            } else {
                assert_eq!(hist.one + hist.two + hist.three + hist.four_plus, 0.0);
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 6. Relative-ordering reproduction on the seeded synthetic benchmark.
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_pipeline_beats_tfidf_baseline() {
    criterion(6, "pipeline beats TF-IDF baseline", Duration::from_secs(300), || {
        let dir = tempfile::tempdir().unwrap();
        let spec = SyntheticSpec {
            topics: 5,
            messages_per_topic: 200,
            lexicon_size: 50,
            shared_fraction: 0.10,
            min_len: 6,
            max_len: 12,
            synonym_pool: 5,
            users_per_topic: 50,
            seed: 1717,
        };
        let (input, reference) = run_synth(&spec, dir.path()).unwrap();

        let mut cfg = PipelineConfig::new(input, dir.path().join("out"));
        cfg.reference = Some(reference);
        cfg.baselines = vec![Baseline::KmeansTfidf];
        cfg.seed = 20;
        let report = run_pipeline(&cfg).unwrap();

        let pipeline_nmi = report.metrics.nmi.expect("reference supplied");
        let baseline_nmi = report.baseline_metrics[0].nmi.expect("reference supplied");
        println!(
            "[acceptance]   pipeline nmi {pipeline_nmi:.3} (k={}, noise {:.2}) vs tf-idf k-means nmi {baseline_nmi:.3} (k={})",
            report.metrics.k, report.metrics.noise_fraction, report.baseline_metrics[0].k
        );
        assert!(
            pipeline_nmi >= 0.70,
            "pipeline nmi {pipeline_nmi} below 0.70"
        );
        assert!(
            pipeline_nmi >= baseline_nmi,
            "pipeline nmi {pipeline_nmi} below tf-idf baseline {baseline_nmi}"
        );
    });
}

// ---------------------------------------------------------------------------
// 7. Semantic separation on the two-block co-occurrence corpus.
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_semantic_separation() {
    criterion(7, "semantic separation", Duration::from_secs(60), || {
        let topic_a = ["pump", "basal", "bolus", "sensor"];
        let topic_b = ["recipe", "lunch", "salad", "oven"];
        let mut rng = ChaCha8Rng::seed_from_u64(707);
        let mut messages = Vec::new();
        for i in 0..150 {
            let words: Vec<&str> = (0..8)
                .map(|_| topic_a[rng.random_range(0..topic_a.len())])
                .collect();
            messages.push(Message::new(format!("a{i}"), "u1", words.join(" ")));
            let words: Vec<&str> = (0..8)
                .map(|_| topic_b[rng.random_range(0..topic_b.len())])
                .collect();
            messages.push(Message::new(format!("b{i}"), "u2", words.join(" ")));
        }
        let corpus = Corpus::from_messages(messages).unwrap();
        let vocab = build_vocabulary(&corpus, 1, 1).unwrap();
        let config = TrainConfig {
            dimension: 32,
            window: 4,
            epochs: 10,
            seed: 7,
            ..TrainConfig::default()
        };
        let matrices = train(&corpus, &vocab, &config).unwrap();

        let vector = |w: &str| matrices.input_row(vocab.index_of(w).unwrap());
        let mean_cos = |pairs: &[(&str, &str)]| -> f64 {
            pairs
                .iter()
                .map(|&(x, y)| cosine(vector(x), vector(y)))
                .sum::<f64>()
                / pairs.len() as f64
        };

        let mut intra = Vec::new();
        let mut inter = Vec::new();
        for (i, &x) in topic_a.iter().enumerate() {
            for &y in &topic_a[i + 1..] {
                intra.push((x, y));
            }
            for &y in &topic_b {
                inter.push((x, y));
            }
        }
        for (i, &x) in topic_b.iter().enumerate() {
            for &y in &topic_b[i + 1..] {
                intra.push((x, y));
            }
        }
        let intra_mean = mean_cos(&intra);
        let inter_mean = mean_cos(&inter);
        println!(
            "[acceptance]   intra-topic cosine {intra_mean:.3}, inter-topic {inter_mean:.3}"
        );
        assert!(
            intra_mean - inter_mean >= 0.2,
            "separation {:.3} below 0.2",
            intra_mean - inter_mean
        );
    });
}

// ---------------------------------------------------------------------------
// 8. Single-worker determinism of the full pipeline.
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_pipeline_determinism() {
    criterion(8, "single-worker determinism", Duration::from_secs(120), || {
        let dir = tempfile::tempdir().unwrap();
        let spec = SyntheticSpec {
            topics: 3,
            messages_per_topic: 80,
            lexicon_size: 20,
            shared_fraction: 0.1,
            min_len: 5,
            max_len: 10,
            synonym_pool: 4,
            users_per_topic: 10,
            seed: 88,
        };
        let (input, reference) = run_synth(&spec, dir.path()).unwrap();

        let mut cfg = PipelineConfig::new(input, dir.path().join("run1"));
        cfg.min_count = 3;
        cfg.train.dimension = 32;
        cfg.train.workers = 1;
        cfg.min_pts = 5;
        cfg.reference = Some(reference);
        cfg.seed = 4242;
        run_pipeline(&cfg).unwrap();

        let mut cfg2 = cfg.clone();
        cfg2.out_dir = dir.path().join("run2");
        run_pipeline(&cfg2).unwrap();

        for name in [artifacts::ASSIGNMENTS, artifacts::AFFILIATION] {
            let a = std::fs::read(cfg.out_dir.join(name)).unwrap();
            let b = std::fs::read(cfg2.out_dir.join(name)).unwrap();
            assert!(!a.is_empty());
            assert_eq!(a, b, "{name} differs between identical runs");
        }
    });
}

// ---------------------------------------------------------------------------
// Sanity check for the harness itself: the reference loader round-trips the
// synthetic labels used by criteria 6 and 8.
// ---------------------------------------------------------------------------

#[test]
fn reference_labels_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SyntheticSpec {
        topics: 2,
        messages_per_topic: 10,
        lexicon_size: 8,
        shared_fraction: 0.0,
        min_len: 3,
        max_len: 5,
        synonym_pool: 2,
        users_per_topic: 3,
        seed: 1,
    };
    let (_, reference) = run_synth(&spec, dir.path()).unwrap();
    let labels = ReferenceLabels::load(&reference).unwrap();
    assert_eq!(labels.messages.len(), 20);
    assert_eq!(labels.users.len(), 6);
    assert!(labels.messages.values().all(|&l| l == 0 || l == 1));
}
