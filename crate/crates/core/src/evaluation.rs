//! Voting with rule subsets, accuracy/coverage curves and the
//! cross-validated experiment driver.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{stratified_kfold, ClassId, Dataset, FoldSplit, Instance};
use crate::error::{Error, Result};
use crate::forest::{plurality, train_forest_with, ForestConfig};
use crate::heuristics::Heuristic;
use crate::rules::{coverage_matrix, coverage_of, extract_rules, CoverageMatrix, RuleSet};
use crate::seeding::{derive_seed, stream};
use crate::selection::{select_with_coverage, RuleSubset, SelectionConfig, Strategy};

/// How instances that no selected rule covers are scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UncoveredMode {
    /// Predict the training majority class.
    #[default]
    DefaultClass,
    /// Count them as misclassified.
    Error,
}

impl FromStr for UncoveredMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default-class" | "default" => Ok(UncoveredMode::DefaultClass),
            "error" => Ok(UncoveredMode::Error),
            other => Err(Error::InvalidParameter(format!(
                "unknown uncovered mode '{other}' (expected default-class or error)"
            ))),
        }
    }
}

impl fmt::Display for UncoveredMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UncoveredMode::DefaultClass => "default-class",
            UncoveredMode::Error => "error",
        })
    }
}

/// Unweighted vote among the selected rules that cover an instance.
#[derive(Clone, Debug)]
pub struct VotePredictor<'a> {
    ruleset: &'a RuleSet,
    selected: Vec<usize>,
    pub default_class: ClassId,
    pub uncovered: UncoveredMode,
}

impl<'a> VotePredictor<'a> {
    pub fn new(ruleset: &'a RuleSet, subset: &RuleSubset) -> Result<Self> {
        Self::from_indices(ruleset, subset.selected.clone())
    }

    pub fn from_indices(ruleset: &'a RuleSet, selected: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = selected.iter().find(|&&i| i >= ruleset.len()) {
            return Err(Error::InvalidParameter(format!(
                "rule index {bad} out of range for {} rules",
                ruleset.len()
            )));
        }
        Ok(VotePredictor {
            ruleset,
            selected,
            default_class: ruleset.majority_class,
            uncovered: UncoveredMode::DefaultClass,
        })
    }

    /// Every rule of the set.
    pub fn full(ruleset: &'a RuleSet) -> Self {
        Self::from_indices(ruleset, (0..ruleset.len()).collect()).expect("indices in range")
    }

    pub fn with_uncovered(mut self, mode: UncoveredMode) -> Self {
        self.uncovered = mode;
        self
    }

    pub fn votes(&self, instance: &Instance) -> Result<Vec<usize>> {
        self.ruleset.check_arity(instance)?;
        let mut votes = vec![0usize; self.ruleset.schema.n_classes()];
        for &r in &self.selected {
            let rule = &self.ruleset.rules[r];
            if rule.covers_unchecked(instance) {
                votes[rule.head] += 1;
            }
        }
        Ok(votes)
    }

    /// Predicted class and whether any selected rule covered the instance.
    pub fn predict_vote(&self, instance: &Instance) -> Result<(ClassId, bool)> {
        let votes = self.votes(instance)?;
        if votes.iter().all(|&v| v == 0) {
            return Ok((self.default_class, false));
        }
        Ok((plurality(&votes, &self.ruleset.class_priors), true))
    }

    pub fn accuracy(&self, test: &Dataset) -> Result<f64> {
        non_empty(test)?;
        let mut correct = 0usize;
        for (row, &label) in test.rows().iter().zip(test.labels()) {
            let (class, covered) = self.predict_vote(row)?;
            if class == label && (covered || self.uncovered == UncoveredMode::DefaultClass) {
                correct += 1;
            }
        }
        Ok(correct as f64 / test.n_rows() as f64)
    }

    pub fn uncovered_fraction(&self, test: &Dataset) -> Result<f64> {
        non_empty(test)?;
        let mut uncovered = 0usize;
        for row in test.rows() {
            if !self.predict_vote(row)?.1 {
                uncovered += 1;
            }
        }
        Ok(uncovered as f64 / test.n_rows() as f64)
    }
}

fn non_empty(test: &Dataset) -> Result<()> {
    if test.n_rows() == 0 {
        return Err(Error::InvalidParameter("test set is empty".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n_rules: usize,
    pub accuracy: f64,
    pub uncovered_fraction: f64,
}

/// Tracks votes, predictions and correctness of a test set while rules are
/// added one at a time.
struct IncrementalVote<'a> {
    labels: &'a [ClassId],
    priors: &'a [f64],
    default_class: ClassId,
    mode: UncoveredMode,
    votes: Vec<Vec<u32>>,
    prediction: Vec<Option<ClassId>>,
    correct: usize,
    covered: usize,
}

impl<'a> IncrementalVote<'a> {
    fn new(ruleset: &'a RuleSet, labels: &'a [ClassId], mode: UncoveredMode) -> Self {
        let default_class = ruleset.majority_class;
        let correct = match mode {
            UncoveredMode::DefaultClass => labels.iter().filter(|&&l| l == default_class).count(),
            UncoveredMode::Error => 0,
        };
        IncrementalVote {
            labels,
            priors: &ruleset.class_priors,
            default_class,
            mode,
            votes: vec![vec![0; ruleset.schema.n_classes()]; labels.len()],
            prediction: vec![None; labels.len()],
            correct,
            covered: 0,
        }
    }

    fn is_correct(&self, j: usize) -> bool {
        match (self.prediction[j], self.mode) {
            (Some(c), _) => c == self.labels[j],
            (None, UncoveredMode::DefaultClass) => self.default_class == self.labels[j],
            (None, UncoveredMode::Error) => false,
        }
    }

    fn add(&mut self, head: ClassId, covered: &[u32]) {
        for &j in covered {
            let j = j as usize;
            let before = self.is_correct(j);
            if self.prediction[j].is_none() {
                self.covered += 1;
            }
            self.votes[j][head] += 1;
            self.prediction[j] = Some(plurality(&self.votes[j], self.priors));
            match (before, self.is_correct(j)) {
                (false, true) => self.correct += 1,
                (true, false) => self.correct -= 1,
                _ => {}
            }
        }
    }

    fn point(&self, n_rules: usize) -> CurvePoint {
        let n = self.labels.len() as f64;
        CurvePoint {
            n_rules,
            accuracy: self.correct as f64 / n,
            uncovered_fraction: (self.labels.len() - self.covered) as f64 / n,
        }
    }
}

/// Accuracy and uncovered fraction for every budget `1..=n_max`, from one
/// selection run of length `n_max` on `train`.
pub fn accuracy_curve(
    ruleset: &RuleSet,
    config: &SelectionConfig,
    train: &Dataset,
    test: &Dataset,
    n_max: usize,
    mode: UncoveredMode,
) -> Result<Vec<CurvePoint>> {
    let train_coverage = match config.strategy {
        Strategy::RandomTrees => None,
        _ => Some(coverage_matrix(ruleset, train)?),
    };
    let test_coverage = coverage_matrix(ruleset, test)?;
    curve_with_coverage(
        ruleset,
        config,
        train_coverage.as_ref(),
        train.labels(),
        &test_coverage,
        test.labels(),
        n_max,
        mode,
    )
}

#[allow(clippy::too_many_arguments)]
fn curve_with_coverage(
    ruleset: &RuleSet,
    config: &SelectionConfig,
    train_coverage: Option<&CoverageMatrix>,
    train_labels: &[ClassId],
    test_coverage: &CoverageMatrix,
    test_labels: &[ClassId],
    n_max: usize,
    mode: UncoveredMode,
) -> Result<Vec<CurvePoint>> {
    if n_max < 1 || n_max > ruleset.len() {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} must lie in 1..={}",
            ruleset.len()
        )));
    }
    if test_labels.is_empty() {
        return Err(Error::InvalidParameter("test set is empty".into()));
    }
    let config = SelectionConfig {
        n: n_max,
        ..config.clone()
    };
    let subset = select_with_coverage(ruleset, train_coverage, train_labels, &config)?;
    let sequence = &subset.selected;

    // Random trees only admit whole trees within the budget: the number of
    // rules usable at budget n is the last tree boundary not above n.
    let usable: Box<dyn Fn(usize) -> usize> = match config.strategy {
        Strategy::RandomTrees => {
            let mut boundaries = vec![0];
            let mut end = 0;
            for &r in sequence {
                end += 1;
                let tree = ruleset.rules[r].origin.tree;
                if sequence.get(end).is_none_or(|&next| ruleset.rules[next].origin.tree != tree) {
                    boundaries.push(end);
                }
            }
            Box::new(move |n| boundaries[boundaries.partition_point(|&b| b <= n) - 1])
        }
        _ => Box::new(|n: usize| n.min(sequence.len())),
    };

    let mut state = IncrementalVote::new(ruleset, test_labels, mode);
    let mut added = 0;
    let mut points = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let target = usable(n);
        while added < target {
            let r = sequence[added];
            state.add(ruleset.rules[r].head, test_coverage.covered(r));
            added += 1;
        }
        points.push(state.point(n));
    }
    Ok(points)
}

/// One strategy/heuristic combination of an experiment. The heuristic is
/// ignored by random trees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub strategy: Strategy,
    pub heuristic: Heuristic,
}

impl CurveSpec {
    pub fn new(strategy: Strategy, heuristic: Heuristic) -> Self {
        CurveSpec { strategy, heuristic }
    }

    /// Heuristic label used in reports (`none` for random trees).
    pub fn heuristic_label(&self) -> &'static str {
        match self.strategy {
            Strategy::RandomTrees => "none",
            _ => self.heuristic.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k_folds: usize,
    pub n_trees: usize,
    pub max_features: Option<usize>,
    pub curves: Vec<CurveSpec>,
    /// Longest budget evaluated; `None` means every rule of each fold.
    pub n_max: Option<usize>,
    pub seed: u64,
    pub min_weight: f64,
    pub uncovered: UncoveredMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k_folds: 10,
            n_trees: 100,
            max_features: None,
            curves: Vec::new(),
            n_max: None,
            seed: 0,
            min_weight: 0.0,
            uncovered: UncoveredMode::DefaultClass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub strategy: Strategy,
    pub heuristic: String,
    pub points: Vec<CurvePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Rules extracted from this fold's forest.
    pub n_rules: usize,
    pub baseline_accuracy: f64,
    pub curves: Vec<Curve>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub folds: Vec<FoldResult>,
    /// Pointwise means over folds, up to the shortest fold curve.
    pub mean_curves: Vec<Curve>,
    /// Mean full-forest test accuracy over folds.
    pub baseline_accuracy: f64,
}

/// Forest, rules and coverage of one cross-validation fold.
pub struct FoldModel {
    pub ruleset: RuleSet,
    pub train_coverage: CoverageMatrix,
    pub test_coverage: CoverageMatrix,
    pub baseline_accuracy: f64,
}

/// Trains the fold's forest (seeded from `(seed, fold)`) and extracts its rules.
pub fn fit_fold(split: &FoldSplit, config: &ExperimentConfig) -> Result<FoldModel> {
    let forest = train_forest_with(
        &split.train,
        &ForestConfig {
            n_trees: config.n_trees,
            seed: derive_seed(config.seed, stream::FOLD_FOREST, split.fold_index as u64),
            max_features: config.max_features,
        },
    )?;
    let ruleset = extract_rules(&forest);
    Ok(FoldModel {
        train_coverage: coverage_matrix(&ruleset, &split.train)?,
        test_coverage: coverage_matrix(&ruleset, &split.test)?,
        baseline_accuracy: forest.accuracy(&split.test)?,
        ruleset,
    })
}

fn run_fold(split: &FoldSplit, config: &ExperimentConfig) -> Result<FoldResult> {
    let model = fit_fold(split, config)?;
    let d = model.ruleset.len();
    let n_max = config.n_max.map_or(d, |n| n.min(d));
    let curves = config
        .curves
        .par_iter()
        .map(|spec| {
            let selection = SelectionConfig {
                strategy: spec.strategy,
                heuristic: spec.heuristic,
                n: n_max,
                seed: derive_seed(config.seed, stream::RANDOM_TREES, split.fold_index as u64),
                min_weight: config.min_weight,
            };
            let points = curve_with_coverage(
                &model.ruleset,
                &selection,
                Some(&model.train_coverage),
                split.train.labels(),
                &model.test_coverage,
                split.test.labels(),
                n_max,
                config.uncovered,
            )?;
            Ok(Curve {
                strategy: spec.strategy,
                heuristic: spec.heuristic_label().to_string(),
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FoldResult {
        fold: split.fold_index,
        n_train: split.train.n_rows(),
        n_test: split.test.n_rows(),
        n_rules: d,
        baseline_accuracy: model.baseline_accuracy,
        curves,
    })
}

/// Cross-validated curves for every configured strategy/heuristic pair plus
/// the full-forest baseline. Results do not depend on the rayon pool size.
pub fn run_experiment(data: &Dataset, config: &ExperimentConfig) -> Result<ExperimentResult> {
    if config.n_trees == 0 {
        return Err(Error::InvalidParameter("n_trees must be at least 1".into()));
    }
    if config.n_max == Some(0) {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let splits = stratified_kfold(data, config.k_folds, config.seed)?;
    let folds = splits
        .par_iter()
        .map(|split| run_fold(split, config))
        .collect::<Result<Vec<_>>>()?;

    let mean_curves = (0..config.curves.len())
        .map(|c| {
            let len = folds.iter().map(|f| f.curves[c].points.len()).min().unwrap_or(0);
            let k = folds.len() as f64;
            let points = (0..len)
                .map(|i| {
                    let (acc, unc) = folds.iter().fold((0.0, 0.0), |(a, u), f| {
                        let p = &f.curves[c].points[i];
                        (a + p.accuracy, u + p.uncovered_fraction)
                    });
                    CurvePoint {
                        n_rules: i + 1,
                        accuracy: acc / k,
                        uncovered_fraction: unc / k,
                    }
                })
                .collect();
            Curve {
                strategy: folds[0].curves[c].strategy,
                heuristic: folds[0].curves[c].heuristic.clone(),
                points,
            }
        })
        .collect();
    let baseline_accuracy = folds.iter().map(|f| f.baseline_accuracy).sum::<f64>() / folds.len() as f64;
    Ok(ExperimentResult {
        config: config.clone(),
        folds,
        mean_curves,
        baseline_accuracy,
    })
}

fn thin(points: &[CurvePoint], stride: usize) -> Vec<CurvePoint> {
    let last = points.len().saturating_sub(1);
    points
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == last)
        .map(|(_, p)| *p)
        .collect()
}

impl ExperimentResult {
    /// Keeps every `stride`-th point of each curve (plus the last one).
    pub fn thinned(&self, stride: usize) -> ExperimentResult {
        let stride = stride.max(1);
        let mut out = self.clone();
        for curve in out
            .folds
            .iter_mut()
            .flat_map(|f| f.curves.iter_mut())
            .chain(out.mean_curves.iter_mut())
        {
            curve.points = thin(&curve.points, stride);
        }
        out
    }

    /// Long-format CSV `fold,strategy,heuristic,n,accuracy,uncovered`; the
    /// fold means use `mean` in the fold column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["fold", "strategy", "heuristic", "n", "accuracy", "uncovered"])?;
        let rows = self
            .folds
            .iter()
            .flat_map(|f| f.curves.iter().map(move |c| (f.fold.to_string(), c)))
            .chain(self.mean_curves.iter().map(|c| ("mean".to_string(), c)));
        for (fold, curve) in rows {
            for p in &curve.points {
                out.write_record([
                    fold.as_str(),
                    curve.strategy.name(),
                    curve.heuristic.as_str(),
                    &p.n_rules.to_string(),
                    &p.accuracy.to_string(),
                    &p.uncovered_fraction.to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Axis-aligned box of a rule over two numeric columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleRectangle {
    pub rule: usize,
    pub head: String,
    /// +1 for a vote on the positive (second) class, -1 otherwise.
    pub vote: i32,
    pub x: [f64; 2],
    pub y: [f64; 2],
}

/// Rectangles of selected rules on a two-feature problem, plus the net vote
/// (positive-class votes minus negative-class votes) at the centre of every
/// cell of a square grid over `[0, 1]²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleDump {
    pub rectangles: Vec<RuleRectangle>,
    pub grid_resolution: usize,
    /// Row-major, `net_votes[iy][ix]`.
    pub net_votes: Vec<Vec<i32>>,
    pub grid_coverage: f64,
}

/// Fraction of the centres of a `resolution²` grid over the unit square that
/// at least one selected rule covers.
pub fn grid_coverage(ruleset: &RuleSet, selected: &[usize], resolution: usize) -> Result<f64> {
    Ok(rule_rectangles(ruleset, selected, resolution)?.grid_coverage)
}

pub fn rule_rectangles(ruleset: &RuleSet, selected: &[usize], resolution: usize) -> Result<RectangleDump> {
    if ruleset.schema.n_columns() != 2 || !ruleset.schema.columns.iter().all(|c| c.is_numeric()) {
        return Err(Error::InvalidParameter(
            "rule rectangles need exactly two numeric columns".into(),
        ));
    }
    if ruleset.schema.n_classes() != 2 || resolution == 0 {
        return Err(Error::InvalidParameter("rule rectangles need two classes and a non-empty grid".into()));
    }
    let rules: Vec<_> = selected
        .iter()
        .map(|&r| {
            ruleset
                .rules
                .get(r)
                .cloned()
                .ok_or_else(|| Error::InvalidParameter(format!("rule index {r} out of range")))
        })
        .collect::<Result<_>>()?;
    let rectangles = selected
        .iter()
        .zip(&rules)
        .map(|(&r, rule)| {
            let (x0, x1) = rule.numeric_bounds(0, 0.0, 1.0);
            let (y0, y1) = rule.numeric_bounds(1, 0.0, 1.0);
            RuleRectangle {
                rule: r,
                head: ruleset.schema.class_names[rule.head].clone(),
                vote: if rule.head == 1 { 1 } else { -1 },
                x: [x0.clamp(0.0, 1.0), x1.clamp(0.0, 1.0)],
                y: [y0.clamp(0.0, 1.0), y1.clamp(0.0, 1.0)],
            }
        })
        .collect();

    let centre = |i: usize| (i as f64 + 0.5) / resolution as f64;
    let grid: Vec<Instance> = (0..resolution)
        .flat_map(|iy| (0..resolution).map(move |ix| Instance::numeric(&[centre(ix), centre(iy)])))
        .collect();
    let mut net_votes = vec![vec![0i32; resolution]; resolution];
    let mut covered = 0usize;
    for (cell, point) in grid.iter().enumerate() {
        let mut hit = false;
        let mut net = 0;
        for rule in &rules {
            if rule.covers_unchecked(point) {
                hit = true;
                net += if rule.head == 1 { 1 } else { -1 };
            }
        }
        covered += hit as usize;
        net_votes[cell / resolution][cell % resolution] = net;
    }
    Ok(RectangleDump {
        rectangles,
        grid_resolution: resolution,
        net_votes,
        grid_coverage: covered as f64 / grid.len() as f64,
    })
}

/// Coverage of only the listed rules (in list order) on `data`.
pub fn subset_coverage(ruleset: &RuleSet, selected: &[usize], data: &Dataset) -> Result<CoverageMatrix> {
    let rules: Vec<_> = selected.iter().map(|&r| ruleset.rules[r].clone()).collect();
    coverage_of(&rules, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Column, Schema};
    use crate::rules::{Condition, Relation, Rule, RuleOrigin};

    fn setup() -> (RuleSet, Dataset) {
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
        let c = |relation| Condition { column: 0, relation };
        let rule = |body, head, tree| Rule {
            body,
            head,
            origin: RuleOrigin { tree, leaf: 0 },
        };
        let rules = vec![
            rule(vec![c(Relation::Le { threshold: 1.5 })], 0, 0),
            rule(vec![c(Relation::Gt { threshold: 1.5 })], 1, 0),
            rule(vec![c(Relation::Le { threshold: 2.5 })], 1, 1),
            rule(vec![c(Relation::Gt { threshold: 2.5 })], 0, 1),
            rule(vec![c(Relation::Gt { threshold: 9.0 })], 1, 2),
            rule(vec![c(Relation::Le { threshold: 9.0 })], 0, 2),
        ];
        let rs = RuleSet {
            rules,
            n_trees: 3,
            class_priors: vec![0.5, 0.5],
            majority_class: 0,
            schema,
        };
        (rs, data)
    }

    #[test]
    fn uncovered_falls_back_to_majority() {
        let (rs, d) = setup();
        let p = VotePredictor::from_indices(&rs, vec![4]).unwrap();
        assert_eq!(p.predict_vote(d.row(3)).unwrap(), (0, false));
        assert_eq!(p.uncovered_fraction(&d).unwrap(), 1.0);
        assert_eq!(p.accuracy(&d).unwrap(), 0.5);
        let strict = p.clone().with_uncovered(UncoveredMode::Error);
        assert_eq!(strict.accuracy(&d).unwrap(), 0.0);
    }

    #[test]
    fn majority_among_covering() {
        let (rs, d) = setup();
        // Instance 0 is covered by rules 0 (A), 2 (B), 5 (A).
        let p = VotePredictor::full(&rs);
        assert_eq!(p.predict_vote(d.row(0)).unwrap(), (0, true));
        assert_eq!(p.uncovered_fraction(&d).unwrap(), 0.0);
        // Instance 2: rule 1 (B), rule 2 (B), rule 5 (A).
        assert_eq!(p.predict_vote(d.row(2)).unwrap(), (1, true));
        assert!(p.predict_vote(&Instance::numeric(&[1.0, 2.0])).is_err());
        assert!(VotePredictor::from_indices(&rs, vec![6]).is_err());
    }

    #[test]
    fn incremental_curve_matches_recomputation() {
        let (rs, d) = setup();
        for strategy in [Strategy::BestN, Strategy::WeightedCovering, Strategy::RandomTrees] {
            for mode in [UncoveredMode::DefaultClass, UncoveredMode::Error] {
                let cfg = SelectionConfig::new(strategy, Heuristic::Recall, rs.len());
                let curve = accuracy_curve(&rs, &cfg, &d, &d, rs.len(), mode).unwrap();
                assert_eq!(curve.len(), rs.len());
                for p in &curve {
                    let subset = crate::selection::select(&rs, &d, &SelectionConfig { n: p.n_rules, ..cfg.clone() }).unwrap();
                    let pred = VotePredictor::new(&rs, &subset).unwrap().with_uncovered(mode);
                    assert_eq!(p.accuracy, pred.accuracy(&d).unwrap(), "{strategy} n={}", p.n_rules);
                    assert_eq!(p.uncovered_fraction, pred.uncovered_fraction(&d).unwrap());
                }
            }
        }
    }

    #[test]
    fn curve_rejects_bad_budget() {
        let (rs, d) = setup();
        let cfg = SelectionConfig::new(Strategy::BestN, Heuristic::Recall, 1);
        assert!(accuracy_curve(&rs, &cfg, &d, &d, 0, UncoveredMode::DefaultClass).is_err());
        assert!(accuracy_curve(&rs, &cfg, &d, &d, 7, UncoveredMode::DefaultClass).is_err());
    }

    #[test]
    fn thinning_keeps_last() {
        let pts: Vec<CurvePoint> = (1..=10)
            .map(|n| CurvePoint {
                n_rules: n,
                accuracy: 0.0,
                uncovered_fraction: 0.0,
            })
            .collect();
        let kept: Vec<usize> = thin(&pts, 4).iter().map(|p| p.n_rules).collect();
        assert_eq!(kept, vec![1, 5, 9, 10]);
    }
}
