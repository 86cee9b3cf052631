//! Flat key=value configuration files for the `pipeline` subcommand.
//!
//! One `key = value` entry per line; `#` starts a comment. Keys mirror the
//! pipeline flags (see the README for the full table). Values given on the
//! command line override the file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use neurocom::clustering::Metric;
use neurocom::error::PipelineError;
use neurocom::message::CompositionMode;
use neurocom::pipeline::{Baseline, PipelineConfig};
use neurocom::profiling::TopWordsMode;

fn bad(key: &str, value: &str) -> PipelineError {
    PipelineError::Config(format!("bad value {value:?} for config key {key:?}"))
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, PipelineError> {
    value.parse().map_err(|_| bad(key, value))
}

fn parse_metric(key: &str, value: &str) -> Result<Metric, PipelineError> {
    match value {
        "cosine" => Ok(Metric::Cosine),
        "euclidean" => Ok(Metric::Euclidean),
        _ => Err(bad(key, value)),
    }
}

/// Applies every entry of the file onto `cfg`.
pub fn apply_file(cfg: &mut PipelineConfig, path: &Path) -> Result<(), PipelineError> {
    let text = std::fs::read_to_string(path)?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(PipelineError::Config(format!(
                "{}:{}: expected key = value, got {raw:?}",
                path.display(),
                lineno + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        apply_entry(cfg, key, value)?;
    }
    Ok(())
}

fn apply_entry(cfg: &mut PipelineConfig, key: &str, value: &str) -> Result<(), PipelineError> {
    match key {
        "input" => cfg.input = PathBuf::from(value),
        "out_dir" => cfg.out_dir = PathBuf::from(value),
        "n_max" => cfg.n_max = parse(key, value)?,
        "min_count" => cfg.min_count = parse(key, value)?,
        "dim" => cfg.train.dimension = parse(key, value)?,
        "window" => cfg.train.window = parse(key, value)?,
        "negatives" => cfg.train.negatives = parse(key, value)?,
        "epochs" => cfg.train.epochs = parse(key, value)?,
        "learning_rate" => cfg.train.learning_rate = parse(key, value)?,
        "min_learning_rate" => cfg.train.min_learning_rate = parse(key, value)?,
        "noise_power" => cfg.train.noise_power = parse(key, value)?,
        "pair_mode" => cfg.train.pair_mode = parse(key, value)?,
        "workers" => cfg.train.workers = parse(key, value)?,
        "composition" => {
            cfg.composition = match value {
                "multiset" => CompositionMode::Multiset,
                "set" => CompositionMode::Set,
                _ => return Err(bad(key, value)),
            }
        }
        "metric" => cfg.metric = parse_metric(key, value)?,
        "eps" => cfg.eps = Some(parse(key, value)?),
        "min_pts" => cfg.min_pts = parse(key, value)?,
        "auto_eps_k" => cfg.auto_eps_k = Some(parse(key, value)?),
        "silhouette_metric" => cfg.silhouette_metric = Some(parse_metric(key, value)?),
        "baselines" => {
            cfg.baselines = value
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| Baseline::from_str(s.trim()).map_err(PipelineError::Config))
                .collect::<Result<_, _>>()?;
        }
        "k_grid" => {
            cfg.k_grid = value
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse::<usize>(key, s.trim()))
                .collect::<Result<_, _>>()?;
        }
        "baseline_k" => cfg.baseline_k = Some(parse(key, value)?),
        "kmeans_max_iter" => cfg.kmeans_max_iter = parse(key, value)?,
        "top_words" => cfg.top_words = parse(key, value)?,
        "top_words_mode" => {
            cfg.top_words_mode = match value {
                "centroid" => TopWordsMode::Centroid,
                "tfidf" => TopWordsMode::Tfidf,
                _ => return Err(bad(key, value)),
            }
        }
        "stopwords" => cfg.stopword_file = Some(PathBuf::from(value)),
        "reference" => cfg.reference = Some(PathBuf::from(value)),
        "seed" => cfg.seed = parse(key, value)?,
        _ => {
            return Err(PipelineError::Config(format!(
                "unknown config key {key:?}"
            )))
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn file_entries_land_in_the_config() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# corpus options").unwrap();
        writeln!(file, "n_max = 1").unwrap();
        writeln!(file, "min_count = 3  # inline comment").unwrap();
        writeln!(file, "dim = 64").unwrap();
        writeln!(file, "metric = euclidean").unwrap();
        writeln!(file, "baselines = kmeans-tfidf, kmeans-lat").unwrap();
        writeln!(file, "k_grid = 4,6,8").unwrap();
        writeln!(file, "eps = 0.25").unwrap();
        let mut cfg = PipelineConfig::new("in.jsonl", "out");
        apply_file(&mut cfg, file.path()).unwrap();
        assert_eq!(cfg.n_max, 1);
        assert_eq!(cfg.min_count, 3);
        assert_eq!(cfg.train.dimension, 64);
        assert_eq!(cfg.metric, Metric::Euclidean);
        assert_eq!(cfg.baselines, vec![Baseline::KmeansTfidf, Baseline::KmeansLat]);
        assert_eq!(cfg.k_grid, vec![4, 6, 8]);
        assert_eq!(cfg.eps, Some(0.25));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        let mut cfg = PipelineConfig::new("in.jsonl", "out");
        assert!(matches!(
            apply_entry(&mut cfg, "frobnicate", "1"),
            Err(PipelineError::Config(_))
        ));
        assert!(matches!(
            apply_entry(&mut cfg, "epochs", "many"),
            Err(PipelineError::Config(_))
        ));
    }
}
