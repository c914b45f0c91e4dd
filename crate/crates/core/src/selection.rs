//! Choosing small ordered rule subsets: best-n by heuristic, weighted
//! covering, and whole random trees.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::{ClassId, Dataset};
use crate::error::{Error, Result};
use crate::heuristics::Heuristic;
use crate::rules::{coverage_matrix, CoverageMatrix, RuleSet};
use crate::seeding::{self, stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    BestN,
    WeightedCovering,
    RandomTrees,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::BestN => "best",
            Strategy::WeightedCovering => "weighted-covering",
            Strategy::RandomTrees => "random-trees",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "best" | "best-n" | "best-rules" => Ok(Strategy::BestN),
            "weighted-covering" | "covering" | "wc" => Ok(Strategy::WeightedCovering),
            "random-trees" | "random" => Ok(Strategy::RandomTrees),
            other => Err(Error::InvalidParameter(format!(
                "unknown strategy '{other}' (expected best, weighted-covering or random-trees)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub strategy: Strategy,
    pub heuristic: Heuristic,
    pub n: usize,
    /// Only used by [`Strategy::RandomTrees`].
    pub seed: u64,
    /// Floor for instance weights under weighted covering.
    pub min_weight: f64,
}

impl SelectionConfig {
    pub fn new(strategy: Strategy, heuristic: Heuristic, n: usize) -> Self {
        SelectionConfig {
            strategy,
            heuristic,
            n,
            seed: 0,
            min_weight: 0.0,
        }
    }
}

/// An ordered selection of rule indices. `scores` holds each rule's heuristic
/// value at the moment it was picked; random-tree selections carry none.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSubset {
    pub selected: Vec<usize>,
    pub scores: Option<Vec<f64>>,
}

impl RuleSubset {
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }
}

/// Total order used to pick rules: higher score, then shorter body, then
/// lower index. `Ordering::Less` means `a` ranks first.
pub fn rank_order(a: (f64, usize, usize), b: (f64, usize, usize)) -> Ordering {
    b.0.total_cmp(&a.0)
        .then(a.1.cmp(&b.1))
        .then(a.2.cmp(&b.2))
}

fn clamp_budget(n: usize, d: usize) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidParameter("at least one rule must be selected".into()));
    }
    if n > d {
        log::warn!("requested {n} rules but only {d} exist; selecting all of them");
        return Ok(d);
    }
    Ok(n)
}

/// Weighted tp/fp bookkeeping for every rule against one training set.
///
/// The m-estimate is anchored on the head class's share of the current
/// instance weight, which on unit weights is the training class frequency.
struct Tallies<'a> {
    ruleset: &'a RuleSet,
    heuristic: Heuristic,
    tp: Vec<f64>,
    fp: Vec<f64>,
    positives: Vec<f64>,
    total: f64,
}

impl<'a> Tallies<'a> {
    fn new(
        ruleset: &'a RuleSet,
        coverage: &CoverageMatrix,
        labels: &[ClassId],
        heuristic: Heuristic,
        weights: &[f64],
    ) -> Self {
        let mut tp = vec![0.0; ruleset.len()];
        let mut fp = vec![0.0; ruleset.len()];
        for (r, rule) in ruleset.rules.iter().enumerate() {
            for &j in coverage.covered(r) {
                let j = j as usize;
                if labels[j] == rule.head {
                    tp[r] += weights[j];
                } else {
                    fp[r] += weights[j];
                }
            }
        }
        let mut positives = vec![0.0; ruleset.schema.n_classes()];
        for (&l, &w) in labels.iter().zip(weights) {
            positives[l] += w;
        }
        Tallies {
            ruleset,
            heuristic,
            tp,
            fp,
            total: positives.iter().sum(),
            positives,
        }
    }

    #[inline]
    fn score(&self, r: usize) -> f64 {
        let head = self.ruleset.rules[r].head;
        self.heuristic.value(
            self.tp[r],
            self.fp[r],
            self.positives[head],
            self.positives[head] / self.total,
        )
    }

    #[inline]
    fn key(&self, r: usize) -> (f64, usize, usize) {
        (self.score(r), self.ruleset.rules[r].len(), r)
    }
}

fn check_inputs(ruleset: &RuleSet, coverage: &CoverageMatrix, labels: &[ClassId]) -> Result<()> {
    if coverage.n_rules() != ruleset.len() || coverage.n_instances() != labels.len() {
        return Err(Error::InvalidParameter(
            "coverage matrix does not match rule set and data".into(),
        ));
    }
    if labels.is_empty() {
        return Err(Error::InvalidParameter("selection data is empty".into()));
    }
    Ok(())
}

/// The `n` rules with the highest heuristic value on unit-weighted data.
pub fn select_best_n(ruleset: &RuleSet, data: &Dataset, heuristic: Heuristic, n: usize) -> Result<RuleSubset> {
    let coverage = coverage_matrix(ruleset, data)?;
    best_n_with_coverage(ruleset, &coverage, data.labels(), heuristic, n)
}

/// [`select_best_n`] on a precomputed coverage matrix.
pub fn best_n_with_coverage(
    ruleset: &RuleSet,
    coverage: &CoverageMatrix,
    labels: &[ClassId],
    heuristic: Heuristic,
    n: usize,
) -> Result<RuleSubset> {
    check_inputs(ruleset, coverage, labels)?;
    let n = clamp_budget(n, ruleset.len())?;
    let weights = vec![1.0; labels.len()];
    let tallies = Tallies::new(ruleset, coverage, labels, heuristic, &weights);
    let mut keys: Vec<(f64, usize, usize)> = (0..ruleset.len()).map(|r| tallies.key(r)).collect();
    keys.sort_by(|a, b| rank_order(*a, *b));
    keys.truncate(n);
    Ok(RuleSubset {
        selected: keys.iter().map(|k| k.2).collect(),
        scores: Some(keys.iter().map(|k| k.0).collect()),
    })
}

/// Greedy weighted covering: repeatedly picks the best unselected rule under
/// the current instance weights, then halves the weight of every instance it
/// covers (never below `min_weight`).
pub fn select_weighted_covering(
    ruleset: &RuleSet,
    data: &Dataset,
    heuristic: Heuristic,
    n: usize,
) -> Result<RuleSubset> {
    let coverage = coverage_matrix(ruleset, data)?;
    weighted_covering_with_coverage(ruleset, &coverage, data.labels(), heuristic, n, 0.0)
}

/// [`select_weighted_covering`] on a precomputed coverage matrix.
///
/// tp/fp of every rule are kept up to date by subtracting the weight lost by
/// each re-weighted instance from the rules covering it, instead of
/// re-tallying all rules each round; every round still rescans the whole
/// unselected pool for the maximum.
pub fn weighted_covering_with_coverage(
    ruleset: &RuleSet,
    coverage: &CoverageMatrix,
    labels: &[ClassId],
    heuristic: Heuristic,
    n: usize,
    min_weight: f64,
) -> Result<RuleSubset> {
    check_inputs(ruleset, coverage, labels)?;
    if min_weight.is_nan() || min_weight < 0.0 {
        return Err(Error::InvalidParameter(format!("min_weight must be non-negative, got {min_weight}")));
    }
    let n = clamp_budget(n, ruleset.len())?;
    let mut weights = vec![1.0; labels.len()];
    let mut tallies = Tallies::new(ruleset, coverage, labels, heuristic, &weights);
    let rules_of = coverage.rules_per_instance();
    let mut pool: Vec<usize> = (0..ruleset.len()).collect();
    let mut selected = Vec::with_capacity(n);
    let mut scores = Vec::with_capacity(n);

    for _ in 0..n {
        let (slot, best_key) = pool
            .iter()
            .enumerate()
            .map(|(slot, &r)| (slot, tallies.key(r)))
            .min_by(|a, b| rank_order(a.1, b.1))
            .expect("budget never exceeds pool size");
        let best = pool.swap_remove(slot);
        selected.push(best);
        scores.push(best_key.0);

        for &j in coverage.covered(best) {
            let j = j as usize;
            let old = weights[j];
            let new = (old * 0.5).max(min_weight).min(old);
            let delta = old - new;
            if delta == 0.0 {
                continue;
            }
            weights[j] = new;
            tallies.positives[labels[j]] -= delta;
            tallies.total -= delta;
            for &r in &rules_of[j] {
                let r = r as usize;
                if ruleset.rules[r].head == labels[j] {
                    tallies.tp[r] -= delta;
                } else {
                    tallies.fp[r] -= delta;
                }
            }
        }
    }
    Ok(RuleSubset {
        selected,
        scores: Some(scores),
    })
}

/// Order in which [`select_random_trees`] visits the trees.
pub fn random_tree_order(n_trees: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n_trees).collect();
    order.shuffle(&mut seeding::rng_for(seed, stream::RANDOM_TREES, 0));
    order
}

/// Adds all rules of randomly ordered trees, one whole tree at a time, until
/// the next tree would push the total past `max_rules`.
pub fn select_random_trees(ruleset: &RuleSet, max_rules: usize, seed: u64) -> Result<RuleSubset> {
    if max_rules < 1 {
        return Err(Error::InvalidParameter("max_rules must be at least 1".into()));
    }
    let mut selected = Vec::new();
    for tree in random_tree_order(ruleset.n_trees, seed) {
        let block = ruleset.tree_range(tree);
        if selected.len() + block.len() > max_rules {
            break;
        }
        selected.extend(block);
    }
    Ok(RuleSubset {
        selected,
        scores: None,
    })
}

/// Runs the configured strategy on `data`.
pub fn select(ruleset: &RuleSet, data: &Dataset, config: &SelectionConfig) -> Result<RuleSubset> {
    let coverage = match config.strategy {
        Strategy::RandomTrees => None,
        _ => Some(coverage_matrix(ruleset, data)?),
    };
    select_with_coverage(ruleset, coverage.as_ref(), data.labels(), config)
}

/// [`select`] with a precomputed coverage matrix (unused by random trees).
pub fn select_with_coverage(
    ruleset: &RuleSet,
    coverage: Option<&CoverageMatrix>,
    labels: &[ClassId],
    config: &SelectionConfig,
) -> Result<RuleSubset> {
    let need = || Error::InvalidParameter("coverage matrix required".into());
    match config.strategy {
        Strategy::BestN => best_n_with_coverage(ruleset, coverage.ok_or_else(need)?, labels, config.heuristic, config.n),
        Strategy::WeightedCovering => weighted_covering_with_coverage(
            ruleset,
            coverage.ok_or_else(need)?,
            labels,
            config.heuristic,
            config.n,
            config.min_weight,
        ),
        Strategy::RandomTrees => select_random_trees(ruleset, config.n, config.seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Column, Instance, Schema};
    use crate::rules::{Condition, Relation, Rule, RuleOrigin};

    fn toy() -> (RuleSet, Dataset) {
        let schema = Schema {
            columns: vec![Column::numeric("x")],
            label: "c".into(),
            class_names: vec!["A".into(), "B".into()],
        };
        let data = Dataset::new(
            schema.clone(),
            (0..4).map(|i| Instance::numeric(&[i as f64])).collect(),
            vec![0, 0, 1, 1],
            None,
        )
        .unwrap();
        let bound = |relation| Condition { column: 0, relation };
        let rule = |body, head, tree| Rule {
            body,
            head,
            origin: RuleOrigin { tree, leaf: 0 },
        };
        let rules = vec![
            // covers {0, 1}
            rule(vec![bound(Relation::Le { threshold: 1.5 })], 0, 0),
            // covers {2, 3}
            rule(vec![bound(Relation::Gt { threshold: 1.5 })], 1, 0),
            // covers {0}, three conditions
            rule(
                vec![
                    bound(Relation::Le { threshold: 0.5 }),
                    bound(Relation::Gt { threshold: -1.0 }),
                    bound(Relation::Le { threshold: 0.7 }),
                ],
                0,
                1,
            ),
            // covers {1}
            rule(vec![bound(Relation::Gt { threshold: 0.5 }), bound(Relation::Le { threshold: 1.5 })], 0, 1),
            // covers {2, 3}
            rule(vec![bound(Relation::Gt { threshold: 1.5 })], 1, 1),
        ];
        let rs = RuleSet {
            rules,
            n_trees: 2,
            class_priors: vec![0.5, 0.5],
            majority_class: 0,
            schema,
        };
        (rs, data)
    }

    #[test]
    fn best_n_sorts_with_tie_breaks() {
        let (rs, d) = toy();
        let all = select_best_n(&rs, &d, Heuristic::Precision, 5).unwrap();
        // All precisions are 1: shorter bodies first, then index.
        assert_eq!(all.selected, vec![0, 1, 4, 3, 2]);
        let recall = select_best_n(&rs, &d, Heuristic::Recall, 5).unwrap();
        assert_eq!(recall.selected, vec![0, 1, 4, 3, 2]);
        assert_eq!(recall.scores.unwrap(), vec![1.0, 1.0, 1.0, 0.5, 0.5]);
        assert!(select_best_n(&rs, &d, Heuristic::Recall, 0).is_err());
        assert_eq!(select_best_n(&rs, &d, Heuristic::Recall, 50).unwrap().len(), 5);
    }

    #[test]
    fn covering_halves_weights() {
        let (rs, d) = toy();
        let s = select_weighted_covering(&rs, &d, Heuristic::Recall, 3).unwrap();
        // Recall is relative to the remaining class weight, so rule 4 still
        // scores 1 after rule 1 halved instances 2 and 3.
        assert_eq!(s.selected, vec![0, 1, 4]);
        assert_eq!(s.scores.unwrap(), vec![1.0, 1.0, 1.0]);
        let p = select_weighted_covering(&rs, &d, Heuristic::Precision, 5).unwrap();
        assert_eq!(p.selected, vec![0, 1, 4, 3, 2]);
        let first = select_best_n(&rs, &d, Heuristic::Recall, 1).unwrap();
        let wc = select_weighted_covering(&rs, &d, Heuristic::Recall, 1).unwrap();
        assert_eq!(first, wc);
    }

    #[test]
    fn random_trees_blocks() {
        let (rs, _) = toy();
        let order = random_tree_order(2, 7);
        let s = select_random_trees(&rs, 5, 7).unwrap();
        let expected: Vec<usize> = order.iter().flat_map(|&t| rs.tree_range(t)).collect();
        assert_eq!(s.selected, expected);
        // Tree 0 has 2 rules, tree 1 has 3.
        let s = select_random_trees(&rs, 2, 7).unwrap();
        if order[0] == 0 {
            assert_eq!(s.selected, vec![0, 1]);
        } else {
            assert!(s.selected.is_empty());
        }
        assert_eq!(select_random_trees(&rs, 5, 7).unwrap(), select_random_trees(&rs, 5, 7).unwrap());
        assert!(select_random_trees(&rs, 0, 7).is_err());
    }

    #[test]
    fn rank_order_is_total() {
        assert_eq!(rank_order((0.5, 1, 3), (0.4, 1, 1)), Ordering::Less);
        assert_eq!(rank_order((0.5, 2, 0), (0.5, 1, 9)), Ordering::Greater);
        assert_eq!(rank_order((0.5, 1, 0), (0.5, 1, 9)), Ordering::Less);
    }

    #[test]
    fn strategy_names() {
        for s in [Strategy::BestN, Strategy::WeightedCovering, Strategy::RandomTrees] {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("foo".parse::<Strategy>().is_err());
    }
}
