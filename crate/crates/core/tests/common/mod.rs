//! Corpus loaders and brute-force oracles shared by the integration tests.
//! The oracles re-derive everything from first principles and never call the
//! code paths they check.
#![allow(dead_code)]

use std::path::PathBuf;

use forest_rules::dataset::{read_csv, Column, ColumnKind, Dataset, FeatureValue, Instance, Schema};
use forest_rules::forest::{DecisionTree, Node, SplitTest};
use forest_rules::prelude::*;
use forest_rules::rules::{Condition, Relation, RuleOrigin};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn breast_cancer() -> Dataset {
    load_csv(data_path("breast-cancer.csv"), None).expect("breast-cancer.csv")
}

/// Noisy XOR on two numeric features.
pub fn xor(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::from("a,b,class\n");
    for _ in 0..n {
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        let label = if (a > 0.5) ^ (b > 0.5) { "odd" } else { "even" };
        text += &format!("{a},{b},{label}\n");
    }
    read_csv(text.as_bytes(), None).unwrap()
}

/// Three classes over numeric and categorical columns.
pub fn mixed(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let colours = ["red", "green", "blue", "grey"];
    let mut text = String::from("size,colour,shape,weight,class\n");
    for _ in 0..n {
        let size: f64 = rng.gen_range(0.0..10.0);
        let colour = colours[rng.gen_range(0..4)];
        let shape = if rng.gen_bool(0.5) { "round" } else { "square" };
        let weight = (rng.gen_range(0.0..5.0f64) * 4.0).round() / 4.0;
        let class = match (size > 5.0, colour) {
            (true, "red") | (true, "green") => "big-warm",
            (false, _) if shape == "round" => "small-round",
            _ if weight > 3.0 => "big-warm",
            _ => "other",
        };
        text += &format!("{size},{colour},{shape},{weight},{class}\n");
    }
    read_csv(text.as_bytes(), None).unwrap()
}

/// Breast-cancer, five small toys and the synthetic problem.
pub fn corpus() -> Vec<(&'static str, Dataset)> {
    vec![
        ("breast-cancer", breast_cancer()),
        ("iris", load_csv(data_path("iris.csv"), None).unwrap()),
        ("wine", load_csv(data_path("wine.csv"), None).unwrap()),
        ("weather", load_csv(data_path("weather.csv"), None).unwrap()),
        ("xor", xor(120, 5)),
        ("mixed", mixed(150, 6)),
        ("synthetic", generate_synthetic(800, 200, 0.05, 0).unwrap()),
    ]
}

/// Coverage test written independently of the library's rule evaluation.
pub fn oracle_covers(body: &[Condition], row: &Instance) -> bool {
    for c in body {
        let ok = match (c.relation, row.values()[c.column]) {
            (Relation::Le { threshold }, FeatureValue::Numeric(v)) => v <= threshold,
            (Relation::Gt { threshold }, FeatureValue::Numeric(v)) => v > threshold,
            (Relation::Eq { category }, FeatureValue::Category(v)) => v == category,
            (Relation::Ne { category }, FeatureValue::Category(v)) => v != category,
            _ => panic!("condition does not fit column"),
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Leaf reached by replaying an instance through a tree, step by step.
pub fn oracle_leaf(tree: &DecisionTree, row: &Instance) -> usize {
    let mut id = tree.root;
    while let Node::Internal {
        condition,
        left,
        right,
    } = &tree.nodes[id]
    {
        let goes_left = match (condition.test, row.values()[condition.column]) {
            (SplitTest::NumericLe { threshold }, FeatureValue::Numeric(v)) => v <= threshold,
            (SplitTest::CategoricalEq { category }, FeatureValue::Category(v)) => v == category,
            _ => panic!("bad split"),
        };
        id = if goes_left { *left } else { *right };
    }
    id
}

/// `(tp, fp, tn, fn)` by direct enumeration.
pub fn oracle_counts(body: &[Condition], head: usize, data: &Dataset, weights: &[f64]) -> [f64; 4] {
    let mut c = [0.0; 4];
    for (j, &w) in weights.iter().enumerate() {
        let covered = oracle_covers(body, data.row(j));
        let positive = data.labels()[j] == head;
        let slot = match (covered, positive) {
            (true, true) => 0,
            (true, false) => 1,
            (false, false) => 2,
            (false, true) => 3,
        };
        c[slot] += w;
    }
    c
}

/// Heuristic values from the textbook formulas.
pub fn oracle_heuristic(kind: &str, tp: f64, fp: f64, fn_: f64, m: f64, prior: f64) -> f64 {
    match kind {
        "precision" => {
            if tp + fp == 0.0 {
                0.0
            } else {
                tp / (tp + fp)
            }
        }
        "recall" => {
            if tp + fn_ == 0.0 {
                0.0
            } else {
                tp / (tp + fn_)
            }
        }
        "m-estimate" => {
            if tp + fp + m == 0.0 {
                prior
            } else {
                (tp + m * prior) / (tp + fp + m)
            }
        }
        _ => unreachable!(),
    }
}

pub fn heuristic_kind(h: Heuristic) -> (&'static str, f64) {
    match h {
        Heuristic::Precision => ("precision", 0.0),
        Heuristic::Recall => ("recall", 0.0),
        Heuristic::MEstimate { m } => ("m-estimate", m),
    }
}

/// Naive weighted covering: every round re-tallies every unselected rule
/// from scratch under the current weights.
pub fn oracle_weighted_covering(rules: &[Rule], data: &Dataset, h: Heuristic, n: usize) -> Vec<usize> {
    let (kind, m) = heuristic_kind(h);
    let mut weights = vec![1.0; data.n_rows()];
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < n.min(rules.len()) {
        let mut best: Option<(f64, usize, usize)> = None;
        for (r, rule) in rules.iter().enumerate() {
            if chosen.contains(&r) {
                continue;
            }
            let [tp, fp, tn, fn_] = oracle_counts(&rule.body, rule.head, data, &weights);
            let prior = (tp + fn_) / (tp + fp + tn + fn_);
            let score = oracle_heuristic(kind, tp, fp, fn_, m, prior);
            let better = match best {
                None => true,
                Some((s, len, _)) => score > s || (score == s && rule.body.len() < len),
            };
            if better {
                best = Some((score, rule.body.len(), r));
            }
        }
        let (_, _, r) = best.unwrap();
        chosen.push(r);
        for (j, w) in weights.iter_mut().enumerate() {
            if oracle_covers(&rules[r].body, data.row(j)) {
                *w /= 2.0;
            }
        }
    }
    chosen
}

/// Random dataset with `n` rows, a numeric and a categorical column and
/// `k` classes.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Dataset {
    let schema = Schema {
        columns: vec![
            Column::numeric("x"),
            Column::categorical("c", vec!["p".into(), "q".into(), "r".into()]),
            Column::numeric("z"),
        ],
        label: "y".into(),
        class_names: (0..k).map(|c| format!("k{c}")).collect(),
    };
    let rows = (0..n)
        .map(|_| {
            Instance::new(vec![
                FeatureValue::Numeric((rng.gen_range(0..20) as f64) / 4.0),
                FeatureValue::Category(rng.gen_range(0..3)),
                FeatureValue::Numeric(rng.gen_range(-1.0..1.0)),
            ])
        })
        .collect();
    let labels = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Dataset::new(schema, rows, labels, None).unwrap()
}

/// Random rule over the columns of [`random_dataset`].
pub fn random_rule(rng: &mut ChaCha8Rng, schema: &Schema, index: usize) -> Rule {
    let len = rng.gen_range(0..4);
    let body = (0..len)
        .map(|_| {
            let column = rng.gen_range(0..schema.n_columns());
            let relation = match &schema.columns[column].kind {
                ColumnKind::Numeric => {
                    let t = if column == 0 {
                        rng.gen_range(0..20) as f64 / 4.0
                    } else {
                        rng.gen_range(-1.0..1.0)
                    };
                    if rng.gen_bool(0.5) {
                        Relation::Le { threshold: t }
                    } else {
                        Relation::Gt { threshold: t }
                    }
                }
                ColumnKind::Categorical { categories } => {
                    let category = rng.gen_range(0..categories.len() as u32);
                    if rng.gen_bool(0.5) {
                        Relation::Eq { category }
                    } else {
                        Relation::Ne { category }
                    }
                }
            };
            Condition { column, relation }
        })
        .collect();
    Rule {
        body,
        head: rng.gen_range(0..schema.n_classes()),
        origin: RuleOrigin { tree: index, leaf: 0 },
    }
}

/// A rule set wrapping arbitrary rules (priors from `data`).
pub fn ruleset_of(rules: Vec<Rule>, data: &Dataset) -> RuleSet {
    let priors = data.class_priors();
    let mut majority = 0;
    for c in 1..priors.len() {
        if priors[c] > priors[majority] {
            majority = c;
        }
    }
    RuleSet {
        n_trees: rules.iter().map(|r| r.origin.tree + 1).max().unwrap_or(0),
        rules,
        class_priors: priors,
        majority_class: majority,
        schema: data.schema().clone(),
    }
}
