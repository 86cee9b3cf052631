//! `neurocom` — community detection from message content.
//!
//! Subcommands mirror the pipeline stages (ingest, train, embed, cluster,
//! profile, evaluate), plus `baseline`, `synth` and the all-in-one
//! `pipeline`. Exit codes: 0 success, 2 configuration error, 3 data error,
//! 4 degenerate result under `--deny-degenerate`.

mod config;

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use neurocom::clustering::{
    dbscan, estimate_eps, ClusterAssignment, DbscanParams, Metric,
};
use neurocom::corpus::{build_vocabulary, load_corpus, Vocabulary};
use neurocom::embedding::{train, EmbeddingMatrix};
use neurocom::error::PipelineError;
use neurocom::message::{
    embed_corpus, load_message_vectors, save_message_vectors, CompositionMode,
};
use neurocom::pipeline::{
    evaluate_against, grid_search_kmeans, load_stopwords, run_pipeline, run_synth, Baseline,
    PipelineConfig, ReferenceLabels,
};
use neurocom::profiling::{
    affiliation, build_profiles, membership_histogram, TopWordsMode,
};
use neurocom::synth::SyntheticSpec;
use neurocom::TrainConfig;

#[derive(Parser)]
#[command(name = "neurocom", version, about = "Topical community detection from short messages")]
struct Cli {
    /// Seed for every stochastic stage.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Training worker threads (results are bit-reproducible only with 1).
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Output directory for commands that emit multiple artifacts.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Treat degenerate results (single cluster, collapsed radius,
    /// uninformative NMI) as an error with exit code 4.
    #[arg(long, global = true)]
    deny_degenerate: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Cosine,
    Euclidean,
}

impl From<MetricArg> for Metric {
    fn from(value: MetricArg) -> Self {
        match value {
            MetricArg::Cosine => Metric::Cosine,
            MetricArg::Euclidean => Metric::Euclidean,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Message,
    User,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopWordsArg {
    Centroid,
    Tfidf,
}

impl From<TopWordsArg> for TopWordsMode {
    fn from(value: TopWordsArg) -> Self {
        match value {
            TopWordsArg::Centroid => TopWordsMode::Centroid,
            TopWordsArg::Tfidf => TopWordsMode::Tfidf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    KmeansTfidf,
    KmeansLat,
}

impl From<BaselineArg> for Baseline {
    fn from(value: BaselineArg) -> Self {
        match value {
            BaselineArg::KmeansTfidf => Baseline::KmeansTfidf,
            BaselineArg::KmeansLat => Baseline::KmeansLat,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Embedding dimension.
    #[arg(long, default_value_t = 100)]
    dim: usize,
    /// Window radius in units.
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Negative samples per positive.
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    learning_rate: f64,
    #[arg(long, default_value_t = 1e-4)]
    min_learning_rate: f64,
    /// Noise-distribution exponent.
    #[arg(long, default_value_t = 0.75)]
    noise_power: f64,
    /// One averaged-context update per target instead of the default
    /// pairwise (context unit, target) updates.
    #[arg(long)]
    averaged_context: bool,
}

impl TrainArgs {
    fn to_config(&self, seed: u64, workers: usize) -> TrainConfig {
        TrainConfig {
            dimension: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            min_learning_rate: self.min_learning_rate,
            noise_power: self.noise_power,
            pair_mode: !self.averaged_context,
            seed,
            workers,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Load a JSONL corpus and write the n-gram vocabulary (vocab.tsv).
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        #[arg(long, default_value_t = 5)]
        min_count: u64,
    },
    /// Train n-gram embeddings and write them in the NCV1 binary format.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the text format (one n-gram and vector per line).
        #[arg(long)]
        text_out: Option<PathBuf>,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Compose message vectors (NCM1) from trained embeddings.
    Embed {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        /// Count each distinct n-gram once instead of per occurrence.
        #[arg(long)]
        set_semantics: bool,
        /// Write ids of messages with no in-vocabulary n-gram here.
        #[arg(long)]
        skipped_out: Option<PathBuf>,
    },
    /// Cluster message vectors with DBSCAN and write `message_id,label` CSV.
    Cluster {
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Neighborhood radius; estimated from the k-distance curve when
        /// absent.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 8)]
        min_pts: usize,
        /// Neighbor rank for the radius estimate (default min_pts - 1).
        #[arg(long)]
        auto_eps_k: Option<usize>,
        #[arg(long, value_enum, default_value_t = MetricArg::Cosine)]
        metric: MetricArg,
    },
    /// Build community profiles, the affiliation matrix, and the
    /// multi-membership histogram.
    Profile {
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long, default_value_t = 10)]
        top_words: usize,
        #[arg(long, value_enum, default_value_t = TopWordsArg::Centroid)]
        top_words_mode: TopWordsArg,
        /// Extra stopwords file (one per line) on top of the built-ins.
        #[arg(long)]
        stopwords: Option<PathBuf>,
    },
    /// Score an assignment against reference labels (and points, if given).
    Evaluate {
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Message)]
        kind: KindArg,
        /// Message vectors for the silhouette score.
        #[arg(long)]
        vectors: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MetricArg::Cosine)]
        metric: MetricArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "dbscan")]
        method: String,
    },
    /// Run a k-means baseline (TF-IDF user vectors or latent vectors).
    Baseline {
        #[arg(long, value_enum)]
        which: BaselineArg,
        #[arg(long)]
        input: PathBuf,
        /// Message vectors; required for kmeans-lat.
        #[arg(long)]
        vectors: Option<PathBuf>,
        /// Fixed cluster count; a silhouette grid search picks it otherwise.
        #[arg(long)]
        k: Option<usize>,
        /// Grid-search candidates.
        #[arg(long, value_delimiter = ',')]
        k_grid: Option<Vec<usize>>,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Generate a seeded synthetic corpus with planted topics.
    Synth {
        #[arg(long, default_value_t = 5)]
        topics: usize,
        #[arg(long, default_value_t = 200)]
        messages_per_topic: usize,
        #[arg(long, default_value_t = 50)]
        lexicon: usize,
        #[arg(long, default_value_t = 0.1)]
        shared: f64,
        #[arg(long, default_value_t = 6)]
        min_len: usize,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 5)]
        pool: usize,
        #[arg(long, default_value_t = 50)]
        users_per_topic: usize,
    },
    /// Run the whole pipeline: ingest, train, embed, cluster, profile,
    /// evaluate, plus any requested baselines.
    Pipeline {
        #[arg(long, required_unless_present = "replay")]
        input: Option<PathBuf>,
        /// Flat key=value configuration file; flags override its entries.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Re-run the configuration echoed in a manifest.json.
        #[arg(long, conflicts_with = "config")]
        replay: Option<PathBuf>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        min_count: Option<u64>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        negatives: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        averaged_context: bool,
        #[arg(long)]
        set_semantics: bool,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        min_pts: Option<usize>,
        #[arg(long)]
        auto_eps_k: Option<usize>,
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        /// Baselines to run next to the pipeline (repeatable).
        #[arg(long = "baseline", value_enum)]
        baselines: Vec<BaselineArg>,
        #[arg(long)]
        baseline_k: Option<usize>,
        #[arg(long)]
        top_words: Option<usize>,
        #[arg(long, value_enum)]
        top_words_mode: Option<TopWordsArg>,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        reference: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &PipelineError) -> ExitCode {
    match err {
        PipelineError::Config(_) => ExitCode::from(2),
        PipelineError::Degenerate(_) => ExitCode::from(4),
        _ => ExitCode::from(3),
    }
}

fn require_out_dir(out_dir: &Option<PathBuf>) -> Result<PathBuf, PipelineError> {
    out_dir
        .clone()
        .ok_or_else(|| PipelineError::Config("--out-dir is required for this command".into()))
}

fn run(cli: Cli) -> Result<ExitCode, PipelineError> {
    match cli.command {
        Command::Ingest {
            input,
            n_max,
            min_count,
        } => {
            let out_dir = require_out_dir(&cli.out_dir)?;
            std::fs::create_dir_all(&out_dir)?;
            let corpus = load_corpus(&input).map_err(PipelineError::stage("ingest"))?;
            let vocab = build_vocabulary(&corpus, n_max, min_count)
                .map_err(PipelineError::stage("vocabulary"))?;
            vocab
                .save_tsv(&out_dir.join("vocab.tsv"))
                .map_err(PipelineError::stage("vocabulary"))?;
            println!(
                "ingested {} messages from {} users; vocabulary size {}",
                corpus.len(),
                corpus.users().len(),
                vocab.len()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Train {
            input,
            vocab,
            out,
            text_out,
            train: args,
        } => {
            let corpus = load_corpus(&input).map_err(PipelineError::stage("ingest"))?;
            let vocab = Vocabulary::load_tsv(&vocab).map_err(PipelineError::stage("vocabulary"))?;
            let config = args.to_config(cli.seed, cli.workers);
            let matrices = train(&corpus, &vocab, &config).map_err(PipelineError::stage("train"))?;
            matrices
                .save_binary(&out)
                .map_err(PipelineError::stage("train"))?;
            if let Some(text) = text_out {
                matrices
                    .save_text(&vocab, &text)
                    .map_err(PipelineError::stage("train"))?;
            }
            println!(
                "trained {} x {} embeddings over {} messages",
                matrices.rows(),
                matrices.dimension(),
                corpus.len()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Embed {
            input,
            vocab,
            embeddings,
            out,
            n_max,
            set_semantics,
            skipped_out,
        } => {
            let corpus = load_corpus(&input).map_err(PipelineError::stage("ingest"))?;
            let vocab = Vocabulary::load_tsv(&vocab).map_err(PipelineError::stage("vocabulary"))?;
            let matrices =
                EmbeddingMatrix::load_binary(&embeddings).map_err(PipelineError::stage("embed"))?;
            let mode = if set_semantics {
                CompositionMode::Set
            } else {
                CompositionMode::Multiset
            };
            let (vectors, skipped) = embed_corpus(&corpus, &vocab, &matrices, n_max, mode);
            save_message_vectors(&vectors, &out).map_err(PipelineError::stage("embed"))?;
            if let Some(path) = skipped_out {
                std::fs::write(&path, skipped.join("\n") + "\n")?;
            }
            println!("embedded {} messages, skipped {}", vectors.len(), skipped.len());
            Ok(ExitCode::SUCCESS)
        }

        Command::Cluster {
            vectors,
            out,
            eps,
            min_pts,
            auto_eps_k,
            metric,
        } => {
            let vectors = load_message_vectors(&vectors).map_err(PipelineError::stage("cluster"))?;
            let points: Vec<Vec<f64>> = vectors.iter().map(|v| v.vector.clone()).collect();
            let metric: Metric = metric.into();
            let eps = match eps {
                Some(e) => e,
                None => {
                    let k = auto_eps_k.unwrap_or(min_pts.saturating_sub(1)).max(1);
                    let estimate =
                        estimate_eps(&points, k, metric).map_err(PipelineError::stage("cluster"))?;
                    if estimate.degenerate {
                        return Err(PipelineError::Degenerate(
                            "radius estimate collapsed to zero".into(),
                        ));
                    }
                    println!("estimated eps = {}", estimate.eps);
                    estimate.eps
                }
            };
            let params = DbscanParams::new(eps, min_pts, metric)
                .map_err(PipelineError::stage("cluster"))?;
            let assignment = dbscan(&points, &params)
                .map_err(PipelineError::stage("cluster"))?
                .with_ids(vectors.iter().map(|v| v.message_id.clone()).collect())
                .map_err(PipelineError::stage("cluster"))?;
            assignment
                .save_csv(&out, "message_id")
                .map_err(PipelineError::stage("cluster"))?;
            println!(
                "found {} communities, noise fraction {:.3}",
                assignment.k,
                assignment.noise_fraction()
            );
            degenerate_exit(cli.deny_degenerate, assignment.k < 2, "fewer than 2 clusters")
        }

        Command::Profile {
            assignments,
            vectors,
            input,
            vocab,
            embeddings,
            top_words,
            top_words_mode,
            stopwords,
        } => {
            let out_dir = require_out_dir(&cli.out_dir)?;
            std::fs::create_dir_all(&out_dir)?;
            let assignment =
                ClusterAssignment::load_csv(&assignments).map_err(PipelineError::stage("profile"))?;
            let vectors = load_message_vectors(&vectors).map_err(PipelineError::stage("profile"))?;
            if vectors.len() != assignment.len() {
                return Err(PipelineError::LengthMismatch {
                    a: assignment.len(),
                    b: vectors.len(),
                });
            }
            let corpus = load_corpus(&input).map_err(PipelineError::stage("ingest"))?;
            let vocab = Vocabulary::load_tsv(&vocab).map_err(PipelineError::stage("vocabulary"))?;
            let matrices =
                EmbeddingMatrix::load_binary(&embeddings).map_err(PipelineError::stage("profile"))?;
            let stopwords = load_stopwords(stopwords.as_deref())?;
            let profiles = build_profiles(
                &assignment,
                &vectors,
                &corpus,
                &vocab,
                &matrices,
                top_words,
                &stopwords,
                top_words_mode.into(),
            )?;
            write_json(&out_dir.join("profiles.json"), &profiles)?;
            let affil = affiliation(&assignment, &corpus)?;
            affil.save_csv(&out_dir.join("affiliation.csv"))?;
            let histogram = membership_histogram(&affil);
            write_json(&out_dir.join("histogram.json"), &histogram)?;
            println!(
                "profiled {} communities over {} affiliated users ({} unaffiliated)",
                assignment.k,
                affil.users.len(),
                affil.unaffiliated.len()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Evaluate {
            assignments,
            reference,
            kind,
            vectors,
            metric,
            out,
            method,
        } => {
            let assignment =
                ClusterAssignment::load_csv(&assignments).map_err(PipelineError::stage("evaluate"))?;
            let labels = ReferenceLabels::load(&reference)?;
            let reference_map: &HashMap<String, i64> = match kind {
                KindArg::Message => &labels.messages,
                KindArg::User => &labels.users,
            };
            let points: Option<Vec<Vec<f64>>> = match vectors {
                Some(path) => Some(
                    load_message_vectors(&path)
                        .map_err(PipelineError::stage("evaluate"))?
                        .into_iter()
                        .map(|v| v.vector)
                        .collect(),
                ),
                None => None,
            };
            let report = evaluate_against(
                &assignment,
                reference_map,
                points.as_deref(),
                metric.into(),
                &method,
            )?;
            write_json(&out, &report)?;
            println!(
                "{}: nmi {:?}, silhouette {:?}, k {}, noise {:.3}",
                report.method, report.nmi, report.silhouette, report.k, report.noise_fraction
            );
            degenerate_exit(
                cli.deny_degenerate,
                report.nmi_degenerate || report.silhouette_degenerate,
                "degenerate metric",
            )
        }

        Command::Baseline {
            which,
            input,
            vectors,
            k,
            k_grid,
            max_iter,
            reference,
        } => {
            let out_dir = require_out_dir(&cli.out_dir)?;
            std::fs::create_dir_all(&out_dir)?;
            let corpus = load_corpus(&input).map_err(PipelineError::stage("ingest"))?;
            let labels = match reference {
                Some(path) => Some(ReferenceLabels::load(&path)?),
                None => None,
            };
            let grid = k_grid.unwrap_or_else(|| (10..=50).step_by(5).collect());
            let which: Baseline = which.into();

            let (assignment, id_column, points, reference_map, method) = match which {
                Baseline::KmeansTfidf => {
                    let matrix = neurocom::clustering::tfidf_user_vectors(&corpus);
                    let points = matrix.to_dense();
                    let assignment = fixed_or_grid(&points, k, &grid, cli.seed, max_iter)?
                        .with_ids(matrix.users.clone())
                        .map_err(PipelineError::stage("baseline"))?;
                    let map = labels.as_ref().map(|l| l.users.clone());
                    (assignment, "user_id", points, map, "kmeans-tfidf")
                }
                Baseline::KmeansLat => {
                    let path = vectors.ok_or_else(|| {
                        PipelineError::Config("--vectors is required for kmeans-lat".into())
                    })?;
                    let vectors =
                        load_message_vectors(&path).map_err(PipelineError::stage("baseline"))?;
                    let points: Vec<Vec<f64>> =
                        vectors.iter().map(|v| v.vector.clone()).collect();
                    let normalized = neurocom::clustering::normalize_rows(&points);
                    let assignment = fixed_or_grid(&normalized, k, &grid, cli.seed, max_iter)?
                        .with_ids(vectors.iter().map(|v| v.message_id.clone()).collect())
                        .map_err(PipelineError::stage("baseline"))?;
                    let map = labels.as_ref().map(|l| l.messages.clone());
                    (assignment, "message_id", points, map, "kmeans-lat")
                }
            };

            let slug = which.slug();
            assignment
                .save_csv(&out_dir.join(format!("assignments_{slug}.csv")), id_column)
                .map_err(PipelineError::stage("baseline"))?;
            let report = match reference_map {
                Some(map) => {
                    evaluate_against(&assignment, &map, Some(&points), Metric::Cosine, method)?
                }
                None => neurocom::MetricsReport {
                    method: method.to_string(),
                    silhouette: neurocom::metrics::silhouette(
                        &points,
                        &assignment.labels,
                        Metric::Cosine,
                    )
                    .ok(),
                    nmi: None,
                    k: assignment.k,
                    noise_fraction: assignment.noise_fraction(),
                    nmi_degenerate: false,
                    silhouette_degenerate: false,
                },
            };
            write_json(&out_dir.join(format!("metrics_{slug}.json")), &report)?;
            println!(
                "{slug}: k {}, nmi {:?}, silhouette {:?}",
                report.k, report.nmi, report.silhouette
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Synth {
            topics,
            messages_per_topic,
            lexicon,
            shared,
            min_len,
            max_len,
            pool,
            users_per_topic,
        } => {
            let out_dir = require_out_dir(&cli.out_dir)?;
            let spec = SyntheticSpec {
                topics,
                messages_per_topic,
                lexicon_size: lexicon,
                shared_fraction: shared,
                min_len,
                max_len,
                synonym_pool: pool,
                users_per_topic,
                seed: cli.seed,
            };
            spec.validate()
                .map_err(|e| PipelineError::Config(e.to_string()))?;
            let (corpus_path, reference_path) = run_synth(&spec, &out_dir)?;
            println!(
                "wrote {} and {}",
                corpus_path.display(),
                reference_path.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Pipeline {
            input,
            config,
            replay,
            n_max,
            min_count,
            dim,
            window,
            negatives,
            epochs,
            learning_rate,
            averaged_context,
            set_semantics,
            eps,
            min_pts,
            auto_eps_k,
            metric,
            baselines,
            baseline_k,
            top_words,
            top_words_mode,
            stopwords,
            reference,
        } => {
            let mut cfg = match &replay {
                Some(manifest) => PipelineConfig::from_manifest(manifest)?,
                None => {
                    let input = input.clone().expect("clap enforces input unless replaying");
                    let out_dir = require_out_dir(&cli.out_dir)?;
                    let mut cfg = PipelineConfig::new(input, out_dir);
                    cfg.seed = cli.seed;
                    cfg.train.workers = cli.workers;
                    if let Some(path) = &config {
                        config::apply_file(&mut cfg, path)?;
                    }
                    cfg
                }
            };
            // Flags override the config file (and the replayed manifest).
            if replay.is_some() {
                if let Some(dir) = &cli.out_dir {
                    cfg.out_dir = dir.clone();
                }
                if let Some(path) = input {
                    cfg.input = path;
                }
            }
            if let Some(v) = n_max {
                cfg.n_max = v;
            }
            if let Some(v) = min_count {
                cfg.min_count = v;
            }
            if let Some(v) = dim {
                cfg.train.dimension = v;
            }
            if let Some(v) = window {
                cfg.train.window = v;
            }
            if let Some(v) = negatives {
                cfg.train.negatives = v;
            }
            if let Some(v) = epochs {
                cfg.train.epochs = v;
            }
            if let Some(v) = learning_rate {
                cfg.train.learning_rate = v;
            }
            if averaged_context {
                cfg.train.pair_mode = false;
            }
            if set_semantics {
                cfg.composition = CompositionMode::Set;
            }
            if let Some(v) = eps {
                cfg.eps = Some(v);
            }
            if let Some(v) = min_pts {
                cfg.min_pts = v;
            }
            if let Some(v) = auto_eps_k {
                cfg.auto_eps_k = Some(v);
            }
            if let Some(m) = metric {
                cfg.metric = m.into();
            }
            if !baselines.is_empty() {
                cfg.baselines = baselines.into_iter().map(Baseline::from).collect();
            }
            if let Some(v) = baseline_k {
                cfg.baseline_k = Some(v);
            }
            if let Some(v) = top_words {
                cfg.top_words = v;
            }
            if let Some(m) = top_words_mode {
                cfg.top_words_mode = m.into();
            }
            if let Some(path) = stopwords {
                cfg.stopword_file = Some(path);
            }
            if let Some(path) = reference {
                cfg.reference = Some(path);
            }

            let report = run_pipeline(&cfg)?;
            for stage in &report.stages {
                println!("stage {:<12} {:.3}s", stage.name, stage.seconds);
            }
            println!(
                "pipeline done: k {}, noise {:.3}, nmi {:?}, silhouette {:?} -> {}",
                report.metrics.k,
                report.metrics.noise_fraction,
                report.metrics.nmi,
                report.metrics.silhouette,
                report.out_dir.display()
            );
            for b in &report.baseline_metrics {
                println!(
                    "baseline {}: k {}, nmi {:?}, silhouette {:?}",
                    b.method, b.k, b.nmi, b.silhouette
                );
            }
            degenerate_exit(cli.deny_degenerate, report.degenerate, "degenerate pipeline result")
        }
    }
}

fn fixed_or_grid(
    points: &[Vec<f64>],
    k: Option<usize>,
    grid: &[usize],
    seed: u64,
    max_iter: usize,
) -> Result<ClusterAssignment, PipelineError> {
    match k {
        Some(k) => neurocom::clustering::kmeans(points, k, seed, max_iter)
            .map_err(|e| PipelineError::Config(e.to_string())),
        None => Ok(grid_search_kmeans(points, grid, seed, max_iter, Metric::Cosine)?.0),
    }
}

fn degenerate_exit(
    deny: bool,
    degenerate: bool,
    what: &str,
) -> Result<ExitCode, PipelineError> {
    if degenerate {
        eprintln!("warning: {what}");
        if deny {
            return Ok(ExitCode::from(4));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_json<T: serde::Serialize>(path: &std::path::Path, value: &T) -> Result<(), PipelineError> {
    let json = serde_json::to_string_pretty(value)
        .map_err(|e| PipelineError::Config(format!("serialization failed: {e}")))?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}
