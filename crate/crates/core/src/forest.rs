//! Random forests of unpruned CART trees with Gini splits.
//!
//! Each tree is grown on a bootstrap sample and draws a fresh random subset of
//! candidate columns at every node. Trees branch left when their node
//! condition holds (`value <= threshold` or `value == category`) and right
//! otherwise; rule extraction relies on exactly this orientation.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{bootstrap_indices, ClassId, ColumnKind, Dataset, FeatureValue, Instance, Schema};
use crate::error::{Error, Result};
use crate::seeding::{self, stream};

pub type NodeId = usize;

/// Gains at or below this are treated as zero.
const MIN_GAIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "snake_case")]
pub enum SplitTest {
    NumericLe { threshold: f64 },
    CategoricalEq { category: u32 },
}

/// The test at an internal node. Instances satisfying it go left.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitCondition {
    pub column: usize,
    #[serde(flatten)]
    pub test: SplitTest,
}

impl SplitCondition {
    #[inline]
    pub fn holds(&self, instance: &Instance) -> bool {
        match (self.test, instance.get(self.column)) {
            (SplitTest::NumericLe { threshold }, FeatureValue::Numeric(v)) => v <= threshold,
            (SplitTest::CategoricalEq { category }, FeatureValue::Category(c)) => c == category,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Internal {
        condition: SplitCondition,
        left: NodeId,
        right: NodeId,
    },
    Leaf {
        class: ClassId,
    },
}

/// A binary decision tree stored as a node arena in pre-order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub root: NodeId,
}

impl DecisionTree {
    /// The leaf an instance is routed to.
    pub fn leaf_of(&self, instance: &Instance) -> NodeId {
        let mut id = self.root;
        loop {
            match &self.nodes[id] {
                Node::Leaf { .. } => return id,
                Node::Internal {
                    condition,
                    left,
                    right,
                } => id = if condition.holds(instance) { *left } else { *right },
            }
        }
    }

    pub fn predict(&self, instance: &Instance) -> ClassId {
        match self.nodes[self.leaf_of(instance)] {
            Node::Leaf { class } => class,
            Node::Internal { .. } => unreachable!("leaf_of returns leaves"),
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(tree: &DecisionTree, id: NodeId) -> usize {
            match &tree.nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Internal { left, right, .. } => 1 + walk(tree, *left).max(walk(tree, *right)),
            }
        }
        walk(self, self.root)
    }

    /// Visits every root-to-leaf path in depth-first, left-first order. The
    /// callback receives the leaf id, its class and the path as
    /// `(condition, went_left)` pairs.
    pub fn for_each_path<F>(&self, mut f: F)
    where
        F: FnMut(NodeId, ClassId, &[(SplitCondition, bool)]),
    {
        let mut path = Vec::new();
        self.visit(self.root, &mut path, &mut f);
    }

    fn visit<F>(&self, id: NodeId, path: &mut Vec<(SplitCondition, bool)>, f: &mut F)
    where
        F: FnMut(NodeId, ClassId, &[(SplitCondition, bool)]),
    {
        match &self.nodes[id] {
            Node::Leaf { class } => f(id, *class, path),
            Node::Internal {
                condition,
                left,
                right,
            } => {
                path.push((*condition, true));
                self.visit(*left, path, f);
                path.pop();
                path.push((*condition, false));
                self.visit(*right, path, f);
                path.pop();
            }
        }
    }

    fn validate(&self, schema: &Schema) -> Result<()> {
        let bad = |msg: String| Err(Error::Format(msg));
        if self.nodes.is_empty() || self.root >= self.nodes.len() {
            return bad("tree has no root".into());
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if id >= self.nodes.len() || seen[id] {
                return bad(format!("node {id} is out of range or reachable twice"));
            }
            seen[id] = true;
            match &self.nodes[id] {
                Node::Leaf { class } if *class >= schema.n_classes() => {
                    return bad(format!("leaf {id} predicts unknown class {class}"))
                }
                Node::Leaf { .. } => {}
                Node::Internal {
                    condition,
                    left,
                    right,
                } => {
                    let column = schema
                        .columns
                        .get(condition.column)
                        .ok_or_else(|| Error::Format(format!("node {id} tests unknown column")))?;
                    let fits = match (condition.test, &column.kind) {
                        (SplitTest::NumericLe { threshold }, ColumnKind::Numeric) => threshold.is_finite(),
                        (SplitTest::CategoricalEq { category }, ColumnKind::Categorical { categories }) => {
                            (category as usize) < categories.len()
                        }
                        _ => false,
                    };
                    if !fits {
                        return bad(format!("node {id} condition does not fit its column"));
                    }
                    stack.push(*left);
                    stack.push(*right);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("tree contains unreachable nodes".into());
        }
        Ok(())
    }
}

/// Winner of a plurality vote. Ties go to the class with the higher prior,
/// then to the lower class id.
pub(crate) fn plurality<T: PartialOrd + Copy>(votes: &[T], priors: &[f64]) -> ClassId {
    let mut best = 0;
    for class in 1..votes.len() {
        let better = votes[class] > votes[best]
            || (votes[class] == votes[best] && priors[class] > priors[best]);
        if better {
            best = class;
        }
    }
    best
}

fn gini(counts: &[f64], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|&c| (c / total) * (c / total)).sum::<f64>()
}

struct SplitSearch<'a> {
    data: &'a Dataset,
    rows: &'a [usize],
    parent_counts: Vec<f64>,
    parent_gini: f64,
    n: f64,
}

impl<'a> SplitSearch<'a> {
    fn new(data: &'a Dataset, rows: &'a [usize]) -> Self {
        let mut parent_counts = vec![0.0; data.n_classes()];
        for &r in rows {
            parent_counts[data.labels()[r]] += 1.0;
        }
        let n = rows.len() as f64;
        SplitSearch {
            parent_gini: gini(&parent_counts, n),
            parent_counts,
            data,
            rows,
            n,
        }
    }

    fn decrease(&self, left: &[f64], n_left: f64) -> f64 {
        let n_right = self.n - n_left;
        let right: Vec<f64> = self
            .parent_counts
            .iter()
            .zip(left)
            .map(|(p, l)| p - l)
            .collect();
        self.parent_gini
            - (n_left / self.n) * gini(left, n_left)
            - (n_right / self.n) * gini(&right, n_right)
    }

    /// Best separating condition on `columns` (both children non-empty),
    /// with its impurity decrease. Earlier candidates win exact ties.
    fn best(&self, columns: &[usize]) -> Option<(SplitCondition, f64)> {
        let mut best: Option<(SplitCondition, f64)> = None;
        let mut offer = |cond: SplitCondition, gain: f64| {
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((cond, gain));
            }
        };
        let labels = self.data.labels();
        let k = self.data.n_classes();
        for &column in columns {
            match &self.data.schema().columns[column].kind {
                ColumnKind::Numeric => {
                    let mut values: Vec<(f64, ClassId)> = self
                        .rows
                        .iter()
                        .map(|&r| {
                            let v = self.data.row(r).get(column).as_numeric().expect("numeric column");
                            (v, labels[r])
                        })
                        .collect();
                    values.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let mut left = vec![0.0; k];
                    for i in 0..values.len() - 1 {
                        left[values[i].1] += 1.0;
                        let (a, b) = (values[i].0, values[i + 1].0);
                        if a < b {
                            let mut threshold = a + (b - a) / 2.0;
                            if threshold >= b {
                                threshold = a;
                            }
                            let gain = self.decrease(&left, (i + 1) as f64);
                            offer(
                                SplitCondition {
                                    column,
                                    test: SplitTest::NumericLe { threshold },
                                },
                                gain,
                            );
                        }
                    }
                }
                ColumnKind::Categorical { categories } => {
                    let mut per_category = vec![vec![0.0; k]; categories.len()];
                    let mut sizes = vec![0.0; categories.len()];
                    for &r in self.rows {
                        let c = self.data.row(r).get(column).as_category().expect("categorical column");
                        per_category[c as usize][labels[r]] += 1.0;
                        sizes[c as usize] += 1.0;
                    }
                    for (category, counts) in per_category.iter().enumerate() {
                        let size = sizes[category];
                        if size > 0.0 && size < self.n {
                            let gain = self.decrease(counts, size);
                            offer(
                                SplitCondition {
                                    column,
                                    test: SplitTest::CategoricalEq {
                                        category: category as u32,
                                    },
                                },
                                gain,
                            );
                        }
                    }
                }
            }
        }
        best
    }
}

/// The split over `candidate_columns` with the largest Gini impurity decrease
/// on all rows of `data`, or `None` when no split decreases impurity.
pub fn best_split(data: &Dataset, candidate_columns: &[usize]) -> Option<(SplitCondition, f64)> {
    let rows: Vec<usize> = (0..data.n_rows()).collect();
    best_split_rows(data, &rows, candidate_columns)
}

/// [`best_split`] restricted to a multiset of rows.
pub fn best_split_rows(
    data: &Dataset,
    rows: &[usize],
    candidate_columns: &[usize],
) -> Option<(SplitCondition, f64)> {
    if rows.len() < 2 {
        return None;
    }
    SplitSearch::new(data, rows)
        .best(candidate_columns)
        .filter(|&(_, gain)| gain > MIN_GAIN)
}

struct Grower<'a, R> {
    data: &'a Dataset,
    n_candidates: usize,
    priors: &'a [f64],
    rng: &'a mut R,
    nodes: Vec<Node>,
}

impl<R: Rng> Grower<'_, R> {
    fn grow(&mut self, rows: Vec<usize>) -> NodeId {
        let mut counts = vec![0usize; self.data.n_classes()];
        for &r in &rows {
            counts[self.data.labels()[r]] += 1;
        }
        let id = self.nodes.len();
        let majority = plurality(&counts, self.priors);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || rows.len() < 2 {
            self.nodes.push(Node::Leaf { class: majority });
            return id;
        }
        let Some(condition) = self.choose(&rows) else {
            self.nodes.push(Node::Leaf { class: majority });
            return id;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| condition.holds(self.data.row(r)));
        self.nodes.push(Node::Leaf { class: majority });
        let left = self.grow(left_rows);
        let right = self.grow(right_rows);
        self.nodes[id] = Node::Internal {
            condition,
            left,
            right,
        };
        id
    }

    fn choose(&mut self, rows: &[usize]) -> Option<SplitCondition> {
        let p = self.data.n_columns();
        let mut drawn = index::sample(self.rng, p, self.n_candidates).into_vec();
        drawn.sort_unstable();
        let search = SplitSearch::new(self.data, rows);
        let positive = |cols: &[usize]| search.best(cols).filter(|&(_, g)| g > MIN_GAIN);
        if let Some((c, _)) = positive(&drawn) {
            return Some(c);
        }
        // The drawn columns are useless here: widen to the rest, and as a last
        // resort accept any split that separates the rows so that trees fit
        // their sample (XOR-like nodes have zero Gini gain everywhere).
        let rest: Vec<usize> = (0..p).filter(|c| drawn.binary_search(c).is_err()).collect();
        if let Some((c, _)) = positive(&rest) {
            return Some(c);
        }
        let all: Vec<usize> = (0..p).collect();
        search.best(&all).map(|(c, _)| c)
    }
}

fn grow_tree<R: Rng>(
    data: &Dataset,
    rows: Vec<usize>,
    n_candidates: usize,
    priors: &[f64],
    rng: &mut R,
) -> DecisionTree {
    let mut grower = Grower {
        data,
        n_candidates,
        priors,
        rng,
        nodes: Vec::new(),
    };
    let root = grower.grow(rows);
    DecisionTree {
        nodes: grower.nodes,
        root,
    }
}

/// Grows one unpruned tree on all rows of `data`, considering
/// `n_candidate_features` random columns per node.
pub fn train_tree<R: Rng>(data: &Dataset, n_candidate_features: usize, rng: &mut R) -> Result<DecisionTree> {
    check_candidates(data, n_candidate_features)?;
    let rows = (0..data.n_rows()).collect();
    Ok(grow_tree(data, rows, n_candidate_features, &data.class_priors(), rng))
}

fn check_candidates(data: &Dataset, n: usize) -> Result<()> {
    if n == 0 || n > data.n_columns() {
        return Err(Error::InvalidParameter(format!(
            "candidate feature count {n} must lie in 1..={}",
            data.n_columns()
        )));
    }
    Ok(())
}

/// `ceil(sqrt(n_columns))`.
pub fn default_candidate_features(n_columns: usize) -> usize {
    let mut m = (n_columns as f64).sqrt().ceil() as usize;
    while m * m < n_columns {
        m += 1;
    }
    m.clamp(1, n_columns.max(1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub seed: u64,
    /// Candidate columns per node; `None` means `ceil(sqrt(columns))`.
    pub max_features: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            seed: 0,
            max_features: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
    pub class_priors: Vec<f64>,
    pub majority_class: ClassId,
    pub seed: u64,
    pub n_candidate_features: usize,
    pub schema: Schema,
}

/// Trains `n_trees` trees with the default number of candidate features.
pub fn train_forest(data: &Dataset, n_trees: usize, seed: u64) -> Result<Forest> {
    train_forest_with(
        data,
        &ForestConfig {
            n_trees,
            seed,
            max_features: None,
        },
    )
}

/// Trains a forest. Tree `t` uses its own random stream derived from
/// `(seed, t)`, so the result does not depend on the rayon thread count.
pub fn train_forest_with(data: &Dataset, config: &ForestConfig) -> Result<Forest> {
    if config.n_trees == 0 {
        return Err(Error::InvalidParameter("a forest needs at least one tree".into()));
    }
    let n_candidates = config
        .max_features
        .unwrap_or_else(|| default_candidate_features(data.n_columns()));
    check_candidates(data, n_candidates)?;
    let priors = data.class_priors();
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeding::rng_for(config.seed, stream::TREE, t as u64);
            let rows = bootstrap_indices(data.n_rows(), &mut rng);
            grow_tree(data, rows, n_candidates, &priors, &mut rng)
        })
        .collect();
    let counts = data.class_counts();
    Ok(Forest {
        trees,
        majority_class: plurality(&counts, &priors),
        class_priors: priors,
        seed: config.seed,
        n_candidate_features: n_candidates,
        schema: data.schema().clone(),
    })
}

impl Forest {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn n_leaves(&self) -> usize {
        self.trees.iter().map(DecisionTree::n_leaves).sum()
    }

    fn check_arity(&self, instance: &Instance) -> Result<()> {
        if instance.len() != self.schema.n_columns() {
            return Err(Error::ArityMismatch {
                expected: self.schema.n_columns(),
                found: instance.len(),
            });
        }
        Ok(())
    }

    /// Per-class tree votes for an instance.
    pub fn votes(&self, instance: &Instance) -> Result<Vec<usize>> {
        self.check_arity(instance)?;
        let mut votes = vec![0usize; self.schema.n_classes()];
        for tree in &self.trees {
            votes[tree.predict(instance)] += 1;
        }
        Ok(votes)
    }

    /// Majority vote of the trees.
    pub fn predict(&self, instance: &Instance) -> Result<ClassId> {
        Ok(plurality(&self.votes(instance)?, &self.class_priors))
    }

    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        let mut correct = 0usize;
        for (row, &label) in data.rows().iter().zip(data.labels()) {
            if self.predict(row)? == label {
                correct += 1;
            }
        }
        Ok(correct as f64 / data.n_rows() as f64)
    }

    /// Structural checks for forests read from disk.
    pub fn validate(&self) -> Result<()> {
        if self.trees.is_empty() {
            return Err(Error::Format("forest has no trees".into()));
        }
        if self.class_priors.len() != self.schema.n_classes() {
            return Err(Error::Format("class prior count does not match classes".into()));
        }
        let sum: f64 = self.class_priors.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Format(format!("class priors sum to {sum}")));
        }
        if self.majority_class != plurality(&self.class_priors, &self.class_priors) {
            return Err(Error::Format("majority class disagrees with priors".into()));
        }
        self.trees.iter().try_for_each(|t| t.validate(&self.schema))
    }
}

/// Free-function form of [`Forest::predict`].
pub fn predict_forest(forest: &Forest, instance: &Instance) -> Result<ClassId> {
    forest.predict(instance)
}
