//! End-to-end orchestration with on-disk handoff between stages.
//!
//! Every stage reads only files earlier stages produced and writes its own
//! artifacts through a `.partial` rename, so an interrupted run leaves
//! partials behind instead of truncated artifacts. The manifest echoes the
//! full configuration; replaying it reproduces the run.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::clustering::{
    dbscan, estimate_eps, kmeans, kmeans_lat, tfidf_user_vectors, ClusterAssignment, DbscanParams,
    Metric,
};
use crate::corpus::{build_vocabulary, load_corpus, Corpus};
use crate::embedding::{train, TrainConfig};
use crate::error::{MetricsError, PipelineError};
use crate::message::{embed_corpus, save_message_vectors, CompositionMode, MessageVector};
use crate::metrics::{nmi, silhouette, MetricsReport};
use crate::profiling::{affiliation, build_profiles, membership_histogram, TopWordsMode};
use crate::synth::{generate_synthetic, SyntheticSpec};

/// Artifact file names inside the output directory.
pub mod artifacts {
    pub const VOCABULARY: &str = "vocab.tsv";
    pub const EMBEDDINGS: &str = "embeddings.bin";
    pub const MESSAGE_VECTORS: &str = "message_vectors.bin";
    pub const ASSIGNMENTS: &str = "assignments.csv";
    pub const PROFILES: &str = "profiles.json";
    pub const AFFILIATION: &str = "affiliation.csv";
    pub const HISTOGRAM: &str = "histogram.json";
    pub const METRICS: &str = "metrics.json";
    pub const MANIFEST: &str = "manifest.json";
}

/// Baseline clusterers that can run next to the main pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    /// K-means over TF-IDF user vectors (cosine via normalized rows).
    KmeansTfidf,
    /// K-means over the latent message vectors.
    KmeansLat,
}

impl Baseline {
    pub fn slug(&self) -> &'static str {
        match self {
            Baseline::KmeansTfidf => "kmeans_tfidf",
            Baseline::KmeansLat => "kmeans_lat",
        }
    }
}

impl std::str::FromStr for Baseline {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kmeans-tfidf" => Ok(Baseline::KmeansTfidf),
            "kmeans-lat" => Ok(Baseline::KmeansLat),
            other => Err(format!(
                "unknown baseline {other:?} (expected kmeans-tfidf or kmeans-lat)"
            )),
        }
    }
}

/// Full pipeline configuration. `seed` overrides the seeds of every
/// stochastic stage, training included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub n_max: usize,
    pub min_count: u64,
    pub train: TrainConfig,
    pub composition: CompositionMode,
    /// Metric for DBSCAN in the latent space.
    pub metric: Metric,
    /// Fixed radius; when absent it is estimated from the k-distance curve.
    pub eps: Option<f64>,
    pub min_pts: usize,
    /// Neighbor rank for the radius estimate (default `min_pts - 1`).
    pub auto_eps_k: Option<usize>,
    /// Overrides the metric used by silhouette (defaults to cosine).
    pub silhouette_metric: Option<Metric>,
    pub baselines: Vec<Baseline>,
    /// Candidate cluster counts for the baselines' silhouette grid search.
    pub k_grid: Vec<usize>,
    /// Fixed baseline cluster count, bypassing the grid search.
    pub baseline_k: Option<usize>,
    pub kmeans_max_iter: usize,
    pub top_words: usize,
    pub top_words_mode: TopWordsMode,
    /// Extra stopwords, one per line, added to the built-in list.
    pub stopword_file: Option<PathBuf>,
    /// Reference labels (`kind,id,label` CSV) for NMI.
    pub reference: Option<PathBuf>,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            input: input.into(),
            out_dir: out_dir.into(),
            n_max: 2,
            min_count: 5,
            train: TrainConfig::default(),
            composition: CompositionMode::Multiset,
            metric: Metric::Cosine,
            eps: None,
            min_pts: 8,
            auto_eps_k: None,
            silhouette_metric: None,
            baselines: Vec::new(),
            k_grid: (10..=50).step_by(5).collect(),
            baseline_k: None,
            kmeans_max_iter: 100,
            top_words: 10,
            top_words_mode: TopWordsMode::Centroid,
            stopword_file: None,
            reference: None,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.n_max < 1 {
            return Err(PipelineError::Config("n_max must be at least 1".into()));
        }
        if self.min_count < 1 {
            return Err(PipelineError::Config("min_count must be at least 1".into()));
        }
        if self.min_pts < 1 {
            return Err(PipelineError::Config("min_pts must be at least 1".into()));
        }
        if let Some(eps) = self.eps {
            if !(eps > 0.0) {
                return Err(PipelineError::Config(format!(
                    "eps must be positive, got {eps}"
                )));
            }
        }
        self.train
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(())
    }

    /// Reads the `config` object back out of a run manifest.
    pub fn from_manifest(path: &Path) -> Result<Self, PipelineError> {
        let manifest: Manifest = serde_json::from_reader(BufReader::new(File::open(path)?))
            .map_err(|e| PipelineError::Config(format!("bad manifest: {e}")))?;
        Ok(manifest.config)
    }
}

/// Run manifest: configuration echo, versions, and per-stage wall-clock.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: PipelineConfig,
    pub version: String,
    pub formats: HashMap<String, String>,
    pub stages: Vec<StageRecord>,
    pub artifacts: Vec<String>,
    pub skipped_messages: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub seconds: f64,
}

/// Summary returned by [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub out_dir: PathBuf,
    pub metrics: MetricsReport,
    pub baseline_metrics: Vec<MetricsReport>,
    pub skipped_messages: usize,
    pub stages: Vec<StageRecord>,
    /// Set when any stage produced a degenerate result (collapsed radius,
    /// fewer than two clusters, or an uninformative NMI).
    pub degenerate: bool,
}

/// Reference labelings keyed by id, split by granularity.
#[derive(Debug, Clone, Default)]
pub struct ReferenceLabels {
    pub messages: HashMap<String, i64>,
    pub users: HashMap<String, i64>,
}

impl ReferenceLabels {
    /// Loads `kind,id,label` CSV; a two-column `id,label` file is accepted
    /// and treated as message labels.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let mut reader = csv::Reader::from_reader(BufReader::new(File::open(path)?));
        let headers = reader
            .headers()
            .map_err(|e| PipelineError::Config(format!("bad reference file: {e}")))?
            .clone();
        let three_column = headers.len() >= 3;
        let mut labels = ReferenceLabels::default();
        for record in reader.records() {
            let record =
                record.map_err(|e| PipelineError::Config(format!("bad reference file: {e}")))?;
            let (kind, id, label) = if three_column {
                (
                    record.get(0).unwrap_or(""),
                    record.get(1).unwrap_or(""),
                    record.get(2).unwrap_or(""),
                )
            } else {
                ("message", record.get(0).unwrap_or(""), record.get(1).unwrap_or(""))
            };
            let label: i64 = label.parse().map_err(|_| {
                PipelineError::Config(format!("bad reference label {label:?} for id {id:?}"))
            })?;
            match kind {
                "message" => {
                    labels.messages.insert(id.to_string(), label);
                }
                "user" => {
                    labels.users.insert(id.to_string(), label);
                }
                other => {
                    return Err(PipelineError::Config(format!(
                        "unknown reference kind {other:?}"
                    )))
                }
            }
        }
        Ok(labels)
    }
}

/// Computes NMI against a reference labeling (and silhouette when points are
/// supplied) for an assignment.
pub fn evaluate_against(
    assignment: &ClusterAssignment,
    reference: &HashMap<String, i64>,
    points: Option<&[Vec<f64>]>,
    metric: Metric,
    method: &str,
) -> Result<MetricsReport, PipelineError> {
    if assignment.point_ids.len() != assignment.labels.len() {
        return Err(PipelineError::LengthMismatch {
            a: assignment.point_ids.len(),
            b: assignment.labels.len(),
        });
    }
    let mut reference_labels = Vec::with_capacity(assignment.len());
    for id in &assignment.point_ids {
        let Some(&label) = reference.get(id) else {
            return Err(PipelineError::UnknownId(id.clone()));
        };
        reference_labels.push(label);
    }
    let outcome = nmi(&assignment.labels, &reference_labels)
        .map_err(|e| PipelineError::Config(e.to_string()))?;

    let (sil, sil_degenerate) = match points {
        Some(points) => {
            if points.len() != assignment.labels.len() {
                return Err(PipelineError::LengthMismatch {
                    a: assignment.labels.len(),
                    b: points.len(),
                });
            }
            match silhouette(points, &assignment.labels, metric) {
                Ok(s) => (Some(s), false),
                Err(MetricsError::DegenerateClustering) => (None, true),
                Err(e) => return Err(PipelineError::Config(e.to_string())),
            }
        }
        None => (None, false),
    };

    Ok(MetricsReport {
        method: method.to_string(),
        silhouette: sil,
        nmi: Some(outcome.value),
        k: assignment.k,
        noise_fraction: assignment.noise_fraction(),
        nmi_degenerate: outcome.degenerate,
        silhouette_degenerate: sil_degenerate,
    })
}

/// Built-in stopword list: English function words plus the tokenizer
/// sentinels. A stopword file extends it.
pub fn default_stopwords() -> HashSet<String> {
    const WORDS: &[&str] = &[
        "<url>", "<mention>", "a", "about", "after", "all", "also", "am", "an", "and", "any",
        "are", "as", "at", "be", "because", "been", "but", "by", "can", "could", "did", "do",
        "does", "for", "from", "had", "has", "have", "he", "her", "him", "his", "how", "i", "if",
        "in", "into", "is", "it", "its", "just", "me", "my", "no", "not", "of", "on", "or", "our",
        "out", "she", "so", "some", "than", "that", "the", "their", "them", "then", "there",
        "these", "they", "this", "to", "up", "was", "we", "were", "what", "when", "which", "who",
        "will", "with", "would", "you", "your",
    ];
    WORDS.iter().map(|w| w.to_string()).collect()
}

/// Loads the effective stopword set: built-ins plus the optional file.
pub fn load_stopwords(extra: Option<&Path>) -> Result<HashSet<String>, PipelineError> {
    let mut words = default_stopwords();
    if let Some(path) = extra {
        let text = std::fs::read_to_string(path)?;
        words.extend(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string),
        );
    }
    Ok(words)
}

/// Writes through a `.partial` path and renames on success, so failures
/// leave a partial file rather than a truncated artifact.
fn write_artifact<F>(path: &Path, write: F) -> Result<(), PipelineError>
where
    F: FnOnce(&Path) -> Result<(), PipelineError>,
{
    let partial = PathBuf::from(format!("{}.partial", path.display()));
    write(&partial)?;
    std::fs::rename(&partial, path)?;
    Ok(())
}

struct StageClock {
    records: Vec<StageRecord>,
}

impl StageClock {
    fn run<T, F>(&mut self, name: &'static str, f: F) -> Result<T, PipelineError>
    where
        F: FnOnce() -> Result<T, PipelineError>,
    {
        let start = Instant::now();
        let value = f()?;
        self.records.push(StageRecord {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        Ok(value)
    }
}

/// Silhouette-guided grid search for the baseline cluster count.
///
/// Returns the assignment with the best silhouette over the feasible grid
/// (ties to the smaller K). Falls back to K = 2 when the grid is empty after
/// bounding by the point count.
pub fn grid_search_kmeans(
    points: &[Vec<f64>],
    grid: &[usize],
    seed: u64,
    max_iter: usize,
    metric: Metric,
) -> Result<(ClusterAssignment, f64), PipelineError> {
    if points.len() < 2 {
        return Err(PipelineError::Degenerate(
            "need at least 2 points to cluster".into(),
        ));
    }
    let mut candidates: Vec<usize> = grid
        .iter()
        .copied()
        .filter(|&k| k >= 2 && k <= points.len())
        .collect();
    if candidates.is_empty() {
        candidates.push(2);
    }
    let mut best: Option<(ClusterAssignment, f64, usize)> = None;
    for &k in &candidates {
        let assignment =
            kmeans(points, k, seed, max_iter).map_err(|e| PipelineError::Config(e.to_string()))?;
        let score = silhouette(points, &assignment.labels, metric)
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        let better = match &best {
            None => true,
            Some((_, best_score, best_k)) => {
                score > *best_score || (score == *best_score && k < *best_k)
            }
        };
        if better {
            best = Some((assignment, score, k));
        }
    }
    let (assignment, score, _) = best.expect("candidate list is non-empty");
    Ok((assignment, score))
}

fn run_baseline(
    baseline: Baseline,
    corpus: &Corpus,
    message_vectors: &[MessageVector],
    reference: Option<&ReferenceLabels>,
    cfg: &PipelineConfig,
) -> Result<(ClusterAssignment, MetricsReport, Vec<Vec<f64>>), PipelineError> {
    let sil_metric = cfg.silhouette_metric.unwrap_or(Metric::Cosine);
    match baseline {
        Baseline::KmeansTfidf => {
            let matrix = tfidf_user_vectors(corpus);
            let points = matrix.to_dense();
            let assignment = match cfg.baseline_k {
                Some(k) => kmeans(&points, k, cfg.seed, cfg.kmeans_max_iter)
                    .map_err(|e| PipelineError::Config(e.to_string()))?,
                None => {
                    grid_search_kmeans(&points, &cfg.k_grid, cfg.seed, cfg.kmeans_max_iter, sil_metric)?.0
                }
            };
            let assignment = assignment
                .with_ids(matrix.users.clone())
                .map_err(|e| PipelineError::Config(e.to_string()))?;
            let report = match reference {
                Some(r) if !r.users.is_empty() => evaluate_against(
                    &assignment,
                    &r.users,
                    Some(&points),
                    sil_metric,
                    "kmeans-tfidf",
                )?,
                _ => report_without_reference(&assignment, &points, sil_metric, "kmeans-tfidf"),
            };
            Ok((assignment, report, points))
        }
        Baseline::KmeansLat => {
            let points: Vec<Vec<f64>> =
                message_vectors.iter().map(|m| m.vector.clone()).collect();
            let assignment = match cfg.baseline_k {
                Some(k) => kmeans_lat(message_vectors, k, cfg.seed, cfg.kmeans_max_iter)
                    .map_err(|e| PipelineError::Config(e.to_string()))?,
                None => {
                    let normalized = crate::clustering::normalize_rows(&points);
                    let (assignment, _) = grid_search_kmeans(
                        &normalized,
                        &cfg.k_grid,
                        cfg.seed,
                        cfg.kmeans_max_iter,
                        sil_metric,
                    )?;
                    assignment
                        .with_ids(message_vectors.iter().map(|m| m.message_id.clone()).collect())
                        .map_err(|e| PipelineError::Config(e.to_string()))?
                }
            };
            let report = match reference {
                Some(r) if !r.messages.is_empty() => evaluate_against(
                    &assignment,
                    &r.messages,
                    Some(&points),
                    sil_metric,
                    "kmeans-lat",
                )?,
                _ => report_without_reference(&assignment, &points, sil_metric, "kmeans-lat"),
            };
            Ok((assignment, report, points))
        }
    }
}

fn report_without_reference(
    assignment: &ClusterAssignment,
    points: &[Vec<f64>],
    metric: Metric,
    method: &str,
) -> MetricsReport {
    let (sil, degenerate) = match silhouette(points, &assignment.labels, metric) {
        Ok(s) => (Some(s), false),
        Err(_) => (None, true),
    };
    MetricsReport {
        method: method.to_string(),
        silhouette: sil,
        nmi: None,
        k: assignment.k,
        noise_fraction: assignment.noise_fraction(),
        nmi_degenerate: false,
        silhouette_degenerate: degenerate,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, value)
        .map_err(|e| PipelineError::Config(format!("serialization failed: {e}")))?;
    use std::io::Write as _;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

/// Runs ingest → vocabulary → train → embed → cluster → profile → evaluate,
/// leaving all artifacts in the output directory.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport, PipelineError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = |name: &str| cfg.out_dir.join(name);
    let mut clock = StageClock { records: Vec::new() };
    let mut degenerate = false;

    // Seed propagation: one seed drives every stochastic stage.
    let mut train_cfg = cfg.train.clone();
    train_cfg.seed = cfg.seed;

    let reference = match &cfg.reference {
        Some(p) => Some(ReferenceLabels::load(p)?),
        None => None,
    };
    let stopwords = load_stopwords(cfg.stopword_file.as_deref())?;

    let corpus = clock.run("ingest", || {
        let corpus = load_corpus(&cfg.input).map_err(PipelineError::stage("ingest"))?;
        if corpus.is_empty() {
            return Err(PipelineError::Stage {
                stage: "ingest",
                source: "corpus is empty".into(),
            });
        }
        Ok(corpus)
    })?;

    let vocab = clock.run("vocabulary", || {
        let vocab = build_vocabulary(&corpus, cfg.n_max, cfg.min_count)
            .map_err(PipelineError::stage("vocabulary"))?;
        write_artifact(&path(artifacts::VOCABULARY), |p| {
            vocab.save_tsv(p).map_err(PipelineError::stage("vocabulary"))
        })?;
        Ok(vocab)
    })?;

    let matrices = clock.run("train", || {
        let matrices = train(&corpus, &vocab, &train_cfg).map_err(PipelineError::stage("train"))?;
        write_artifact(&path(artifacts::EMBEDDINGS), |p| {
            matrices.save_binary(p).map_err(PipelineError::stage("train"))
        })?;
        Ok(matrices)
    })?;

    let (message_vectors, skipped) = clock.run("embed", || {
        let (vectors, skipped) =
            embed_corpus(&corpus, &vocab, &matrices, cfg.n_max, cfg.composition);
        if vectors.is_empty() {
            return Err(PipelineError::Stage {
                stage: "embed",
                source: "no message could be embedded".into(),
            });
        }
        write_artifact(&path(artifacts::MESSAGE_VECTORS), |p| {
            save_message_vectors(&vectors, p).map_err(PipelineError::stage("embed"))
        })?;
        Ok((vectors, skipped))
    })?;

    let points: Vec<Vec<f64>> = message_vectors.iter().map(|m| m.vector.clone()).collect();
    let assignment = clock.run("cluster", || {
        let eps = match cfg.eps {
            Some(eps) => eps,
            None => {
                let k = cfg.auto_eps_k.unwrap_or(cfg.min_pts.saturating_sub(1)).max(1);
                let estimate =
                    estimate_eps(&points, k, cfg.metric).map_err(PipelineError::stage("cluster"))?;
                if estimate.degenerate {
                    return Err(PipelineError::Degenerate(
                        "radius estimate collapsed to zero".into(),
                    ));
                }
                estimate.eps
            }
        };
        let params =
            DbscanParams::new(eps, cfg.min_pts, cfg.metric).map_err(PipelineError::stage("cluster"))?;
        let assignment = dbscan(&points, &params)
            .map_err(PipelineError::stage("cluster"))?
            .with_ids(message_vectors.iter().map(|m| m.message_id.clone()).collect())
            .map_err(PipelineError::stage("cluster"))?;
        write_artifact(&path(artifacts::ASSIGNMENTS), |p| {
            assignment
                .save_csv(p, "message_id")
                .map_err(PipelineError::stage("cluster"))
        })?;
        Ok(assignment)
    })?;
    if assignment.k < 2 {
        degenerate = true;
    }

    clock.run("profile", || {
        let profiles = build_profiles(
            &assignment,
            &message_vectors,
            &corpus,
            &vocab,
            &matrices,
            cfg.top_words,
            &stopwords,
            cfg.top_words_mode,
        )?;
        write_artifact(&path(artifacts::PROFILES), |p| write_json(p, &profiles))?;
        let affil = affiliation(&assignment, &corpus)?;
        write_artifact(&path(artifacts::AFFILIATION), |p| affil.save_csv(p))?;
        let histogram = membership_histogram(&affil);
        write_artifact(&path(artifacts::HISTOGRAM), |p| write_json(p, &histogram))?;
        Ok(())
    })?;

    let metrics = clock.run("evaluate", || {
        let sil_metric = cfg.silhouette_metric.unwrap_or(Metric::Cosine);
        let report = match reference.as_ref().filter(|r| !r.messages.is_empty()) {
            Some(r) => {
                evaluate_against(&assignment, &r.messages, Some(&points), sil_metric, "dbscan")?
            }
            None => report_without_reference(&assignment, &points, sil_metric, "dbscan"),
        };
        write_artifact(&path(artifacts::METRICS), |p| write_json(p, &report))?;
        Ok::<_, PipelineError>(report)
    })?;
    if metrics.nmi_degenerate || metrics.silhouette_degenerate {
        degenerate = true;
    }

    let mut baseline_metrics = Vec::new();
    for &baseline in &cfg.baselines {
        let slug = baseline.slug();
        let (b_assignment, b_report, _) = clock.run("baseline", || {
            run_baseline(baseline, &corpus, &message_vectors, reference.as_ref(), cfg)
        })?;
        let id_column = match baseline {
            Baseline::KmeansTfidf => "user_id",
            Baseline::KmeansLat => "message_id",
        };
        write_artifact(&path(&format!("assignments_{slug}.csv")), |p| {
            b_assignment
                .save_csv(p, id_column)
                .map_err(|e| PipelineError::Config(e.to_string()))
        })?;
        write_artifact(&path(&format!("metrics_{slug}.json")), |p| {
            write_json(p, &b_report)
        })?;
        if b_report.nmi_degenerate || b_report.silhouette_degenerate {
            degenerate = true;
        }
        baseline_metrics.push(b_report);
    }

    let manifest = Manifest {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        formats: [
            ("embeddings".to_string(), "NCV1".to_string()),
            ("message_vectors".to_string(), "NCM1".to_string()),
        ]
        .into_iter()
        .collect(),
        stages: clock.records.clone(),
        artifacts: {
            let mut names = vec![
                artifacts::VOCABULARY.to_string(),
                artifacts::EMBEDDINGS.to_string(),
                artifacts::MESSAGE_VECTORS.to_string(),
                artifacts::ASSIGNMENTS.to_string(),
                artifacts::PROFILES.to_string(),
                artifacts::AFFILIATION.to_string(),
                artifacts::HISTOGRAM.to_string(),
                artifacts::METRICS.to_string(),
            ];
            for b in &cfg.baselines {
                names.push(format!("assignments_{}.csv", b.slug()));
                names.push(format!("metrics_{}.json", b.slug()));
            }
            names
        },
        skipped_messages: skipped.len(),
    };
    write_artifact(&path(artifacts::MANIFEST), |p| write_json(p, &manifest))?;

    Ok(PipelineReport {
        out_dir: cfg.out_dir.clone(),
        metrics,
        baseline_metrics,
        skipped_messages: skipped.len(),
        stages: clock.records,
        degenerate,
    })
}

/// Generates a synthetic corpus and reference file under `out_dir`.
pub fn run_synth(spec: &SyntheticSpec, out_dir: &Path) -> Result<(PathBuf, PathBuf), PipelineError> {
    std::fs::create_dir_all(out_dir)?;
    let corpus = generate_synthetic(spec).map_err(PipelineError::stage("synth"))?;
    let corpus_path = out_dir.join("corpus.jsonl");
    let reference_path = out_dir.join("reference.csv");
    write_artifact(&corpus_path, |p| {
        corpus.save_jsonl(p).map_err(PipelineError::stage("synth"))
    })?;
    write_artifact(&reference_path, |p| {
        corpus
            .save_reference_csv(p)
            .map_err(PipelineError::stage("synth"))
    })?;
    Ok((corpus_path, reference_path))
}
