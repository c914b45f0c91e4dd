mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::data_path;
use forest_rules::artifact::{self, SubsetDocument};
use forest_rules::prelude::*;

fn run(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_forest-rules"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(path: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn train_select_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_path("breast-cancer.csv");
    let data = data.to_str().unwrap();
    run(dir.path(), &["train", "--data", data, "--trees", "20", "--seed", "3", "--out", "forest.json"]);
    let forest = artifact::load_forest(dir.path().join("forest.json")).unwrap();
    assert_eq!(forest.n_trees(), 20);

    run(
        dir.path(),
        &["select", "--forest", "forest.json", "--data", data, "--heuristic", "recall", "-n", "12", "--out", "subset"],
    );
    let doc: SubsetDocument = artifact::read_json(dir.path().join("subset.json"), artifact::RULE_SUBSET).unwrap();
    assert_eq!(doc.selected.len(), 12);
    assert_eq!(doc.total_rules, forest.n_leaves());
    let text = String::from_utf8(read(dir.path().join("subset.txt"))).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.lines().all(|l| l.starts_with("IF ") && l.contains(" THEN class=")));

    // Same selection through the library.
    let loaded = load_csv(data_path("breast-cancer.csv"), None).unwrap();
    let ruleset = extract_rules(&forest);
    let direct = select_weighted_covering(&ruleset, &loaded, Heuristic::Recall, 12).unwrap();
    assert_eq!(doc.selected, direct.selected);

    let out = run(
        dir.path(),
        &["evaluate", "--forest", "forest.json", "--subset", "subset.json", "--data", data, "--out", "eval.json"],
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("accuracy:") && stdout.contains("uncovered:"), "{stdout}");
    let report: serde_json::Value = artifact::read_json(dir.path().join("eval.json"), artifact::EVALUATION).unwrap();
    let expected = VotePredictor::from_indices(&ruleset, doc.selected.clone()).unwrap().accuracy(&loaded).unwrap();
    assert_eq!(report["accuracy"].as_f64().unwrap(), expected);
}

#[test]
fn experiment_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_path("iris.csv");
    let data = data.to_str().unwrap();
    let args = |threads: &'static str, out: &'static str| {
        vec![
            "--threads", threads, "experiment", "--data", data, "--folds", "2", "--trees", "15", "--n-max", "40",
            "--seed", "4", "--out", out,
        ]
    };
    run(dir.path(), &args("1", "a"));
    run(dir.path(), &args("3", "b"));
    assert_eq!(read(dir.path().join("a.csv")), read(dir.path().join("b.csv")));
    assert_eq!(read(dir.path().join("a.json")), read(dir.path().join("b.json")));

    let csv = String::from_utf8(read(dir.path().join("a.csv"))).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "fold,strategy,heuristic,n,accuracy,uncovered");
    // 3 strategies x 3 heuristics, random trees once: 7 curves x 40 points
    // for each of 2 folds plus the mean.
    assert_eq!(csv.lines().count(), 1 + 7 * 40 * 3);
    let result: ExperimentResult = artifact::read_json(dir.path().join("a.json"), artifact::EXPERIMENT).unwrap();
    assert_eq!(result.folds.len(), 2);
}

#[test]
fn synthesize_defaults_and_rectangles() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["synthesize"]);
    let data = load_csv(dir.path().join("synthetic.csv"), None).unwrap();
    assert_eq!(data.n_rows(), 1000);
    assert_eq!(data.class_counts(), vec![800, 200]);
    let first = read(dir.path().join("synthetic.csv"));
    run(dir.path(), &["synthesize", "--out", "again.csv"]);
    assert_eq!(first, read(dir.path().join("again.csv")));

    run(
        dir.path(),
        &["synthesize", "--trees", "20", "--strategy", "weighted-covering", "-n", "10", "--grid", "20", "--rects", "r.json"],
    );
    let dump: serde_json::Value = artifact::read_json(dir.path().join("r.json"), artifact::RECTANGLES).unwrap();
    assert_eq!(dump["rectangles"].as_array().unwrap().len(), 10);
    assert_eq!(dump["net_votes"].as_array().unwrap().len(), 20);
}

#[test]
fn bad_input_exits_with_one_line_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ragged.csv"), "a,b,class\n1,2,x\n3,y\n").unwrap();
    for args in [
        vec!["train", "--data", "missing.csv"],
        vec!["train", "--data", "ragged.csv"],
        vec!["select", "--forest", "ragged.csv", "--data", "ragged.csv"],
    ] {
        let out = Command::new(env!("CARGO_BIN_EXE_forest-rules"))
            .current_dir(dir.path())
            .args(&args)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert!(stderr.starts_with("error: "), "{stderr}");
        assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
    }
}
