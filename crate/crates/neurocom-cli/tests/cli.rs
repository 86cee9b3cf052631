//! End-to-end tests of the `neurocom` binary: the staged workflow, the
//! one-shot pipeline, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

fn neurocom(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neurocom"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn staged_workflow_matches_pipeline_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    // Small synthetic corpus.
    assert_success(&neurocom(
        &[
            "--seed", "9", "--out-dir", "data", "synth", "--topics", "3",
            "--messages-per-topic", "60", "--lexicon", "15", "--pool", "3",
            "--users-per-topic", "6", "--min-len", "5", "--max-len", "9",
        ],
        root,
    ));
    assert!(root.join("data/corpus.jsonl").exists());
    assert!(root.join("data/reference.csv").exists());

    // Stage by stage.
    assert_success(&neurocom(
        &[
            "--out-dir", "staged", "ingest", "--input", "data/corpus.jsonl",
            "--min-count", "3",
        ],
        root,
    ));
    assert_success(&neurocom(
        &[
            "--seed", "9", "train", "--input", "data/corpus.jsonl", "--vocab",
            "staged/vocab.tsv", "--out", "staged/embeddings.bin", "--dim", "32",
            "--text-out", "staged/embeddings.txt",
        ],
        root,
    ));
    assert_success(&neurocom(
        &[
            "embed", "--input", "data/corpus.jsonl", "--vocab", "staged/vocab.tsv",
            "--embeddings", "staged/embeddings.bin", "--out", "staged/message_vectors.bin",
        ],
        root,
    ));
    assert_success(&neurocom(
        &[
            "cluster", "--vectors", "staged/message_vectors.bin", "--out",
            "staged/assignments.csv", "--min-pts", "5",
        ],
        root,
    ));
    assert_success(&neurocom(
        &[
            "--out-dir", "staged", "profile", "--assignments", "staged/assignments.csv",
            "--vectors", "staged/message_vectors.bin", "--input", "data/corpus.jsonl",
            "--vocab", "staged/vocab.tsv", "--embeddings", "staged/embeddings.bin",
        ],
        root,
    ));
    assert_success(&neurocom(
        &[
            "evaluate", "--assignments", "staged/assignments.csv", "--reference",
            "data/reference.csv", "--vectors", "staged/message_vectors.bin", "--out",
            "staged/metrics.json",
        ],
        root,
    ));

    // The same corpus through the one-shot pipeline with the same seed.
    assert_success(&neurocom(
        &[
            "--seed", "9", "--out-dir", "piped", "pipeline", "--input",
            "data/corpus.jsonl", "--min-count", "3", "--dim", "32", "--min-pts", "5",
            "--reference", "data/reference.csv",
        ],
        root,
    ));

    for name in ["vocab.tsv", "assignments.csv", "affiliation.csv"] {
        let staged = std::fs::read(root.join("staged").join(name)).unwrap_or_default();
        let piped = std::fs::read(root.join("piped").join(name)).unwrap();
        if !staged.is_empty() {
            assert_eq!(staged, piped, "{name} differs between staged and one-shot runs");
        }
    }
    let metrics = std::fs::read_to_string(root.join("piped/metrics.json")).unwrap();
    assert!(metrics.contains("\"method\""));
    assert!(metrics.contains("\"noise_fraction\""));
}

#[test]
fn baseline_subcommand_writes_its_reports() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert_success(&neurocom(
        &[
            "--seed", "4", "--out-dir", "data", "synth", "--topics", "2",
            "--messages-per-topic", "40", "--lexicon", "12", "--pool", "3",
            "--users-per-topic", "8", "--min-len", "4", "--max-len", "8",
        ],
        root,
    ));
    assert_success(&neurocom(
        &[
            "--out-dir", "base", "baseline", "--which", "kmeans-tfidf", "--input",
            "data/corpus.jsonl", "--k-grid", "2,3,4", "--reference", "data/reference.csv",
        ],
        root,
    ));
    assert!(root.join("base/assignments_kmeans_tfidf.csv").exists());
    let report = std::fs::read_to_string(root.join("base/metrics_kmeans_tfidf.json")).unwrap();
    assert!(report.contains("\"nmi\""));
}

#[test]
fn config_file_drives_the_pipeline_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert_success(&neurocom(
        &[
            "--seed", "11", "--out-dir", "data", "synth", "--topics", "2",
            "--messages-per-topic", "50", "--lexicon", "12", "--pool", "3",
            "--users-per-topic", "5", "--min-len", "5", "--max-len", "8",
        ],
        root,
    ));
    std::fs::write(
        root.join("run.conf"),
        "min_count = 3\ndim = 16\nmin_pts = 5\nepochs = 40\n",
    )
    .unwrap();
    // --epochs overrides the config file's 40.
    assert_success(&neurocom(
        &[
            "--seed", "11", "--out-dir", "out", "pipeline", "--input", "data/corpus.jsonl",
            "--config", "run.conf", "--epochs", "6",
        ],
        root,
    ));
    let manifest = std::fs::read_to_string(root.join("out/manifest.json")).unwrap();
    assert!(manifest.contains("\"epochs\": 6"));
    assert!(manifest.contains("\"dimension\": 16"));
}

#[test]
fn replay_reproduces_assignments() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert_success(&neurocom(
        &[
            "--seed", "2", "--out-dir", "data", "synth", "--topics", "2",
            "--messages-per-topic", "50", "--lexicon", "12", "--pool", "3",
            "--users-per-topic", "5", "--min-len", "5", "--max-len", "8",
        ],
        root,
    ));
    assert_success(&neurocom(
        &[
            "--seed", "2", "--out-dir", "first", "pipeline", "--input",
            "data/corpus.jsonl", "--min-count", "3", "--dim", "16", "--min-pts", "5",
        ],
        root,
    ));
    assert_success(&neurocom(
        &[
            "--out-dir", "second", "pipeline", "--replay", "first/manifest.json",
        ],
        root,
    ));
    let a = std::fs::read(root.join("first/assignments.csv")).unwrap();
    let b = std::fs::read(root.join("second/assignments.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    // Missing --out-dir: configuration error (2).
    let out = neurocom(&["ingest", "--input", "nothing.jsonl"], root);
    assert_eq!(out.status.code(), Some(2));

    // Unreadable input: data error (3).
    let out = neurocom(
        &["--out-dir", "x", "ingest", "--input", "nothing.jsonl"],
        root,
    );
    assert_eq!(out.status.code(), Some(3));

    // Malformed corpus line: data error (3) naming the line.
    std::fs::write(root.join("bad.jsonl"), "{\"message_id\": \"m1\"}\n").unwrap();
    let out = neurocom(&["--out-dir", "x", "ingest", "--input", "bad.jsonl"], root);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 1"), "stderr: {stderr}");

    // Bad config key: configuration error (2).
    std::fs::write(root.join("ok.jsonl"), "{\"message_id\":\"m\",\"user_id\":\"u\",\"text\":\"a b\"}\n").unwrap();
    std::fs::write(root.join("bad.conf"), "no_such_key = 1\n").unwrap();
    let out = neurocom(
        &[
            "--out-dir", "y", "pipeline", "--input", "ok.jsonl", "--config", "bad.conf",
        ],
        root,
    );
    assert_eq!(out.status.code(), Some(2));

    // Degenerate estimate under --deny-degenerate: exit 4. All message
    // vectors identical makes every k-distance zero.
    std::fs::write(
        root.join("flat.jsonl"),
        (0..20)
            .map(|i| format!("{{\"message_id\":\"m{i}\",\"user_id\":\"u\",\"text\":\"same words here\"}}"))
            .collect::<Vec<_>>()
            .join("\n"),
    )
    .unwrap();
    let out = neurocom(
        &[
            "--deny-degenerate", "--out-dir", "z", "pipeline", "--input", "flat.jsonl",
            "--min-count", "1", "--dim", "8", "--min-pts", "3",
        ],
        root,
    );
    assert_eq!(out.status.code(), Some(4), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
