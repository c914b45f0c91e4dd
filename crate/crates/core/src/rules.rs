//! Decomposition of a forest into propositional rules `head <- body`, one per
//! leaf, and coverage queries over them.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{ClassId, Dataset, FeatureValue, Instance, Schema};
use crate::error::{Error, Result};
use crate::forest::{Forest, NodeId, SplitCondition, SplitTest};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Relation {
    Le { threshold: f64 },
    Gt { threshold: f64 },
    Eq { category: u32 },
    Ne { category: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub column: usize,
    #[serde(flatten)]
    pub relation: Relation,
}

impl Condition {
    /// The condition a branch imposes: the split test itself on the left
    /// branch, its negation on the right.
    pub fn from_branch(split: &SplitCondition, went_left: bool) -> Self {
        let relation = match (split.test, went_left) {
            (SplitTest::NumericLe { threshold }, true) => Relation::Le { threshold },
            (SplitTest::NumericLe { threshold }, false) => Relation::Gt { threshold },
            (SplitTest::CategoricalEq { category }, true) => Relation::Eq { category },
            (SplitTest::CategoricalEq { category }, false) => Relation::Ne { category },
        };
        Condition {
            column: split.column,
            relation,
        }
    }

    #[inline]
    pub fn holds(&self, instance: &Instance) -> bool {
        match (self.relation, instance.get(self.column)) {
            (Relation::Le { threshold }, FeatureValue::Numeric(v)) => v <= threshold,
            (Relation::Gt { threshold }, FeatureValue::Numeric(v)) => v > threshold,
            (Relation::Eq { category }, FeatureValue::Category(c)) => c == category,
            (Relation::Ne { category }, FeatureValue::Category(c)) => c != category,
            _ => false,
        }
    }
}

/// Where a rule came from: its tree and leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleOrigin {
    pub tree: usize,
    pub leaf: NodeId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub body: Vec<Condition>,
    pub head: ClassId,
    pub origin: RuleOrigin,
}

impl Rule {
    /// Coverage test without the arity check; see [`covers`].
    #[inline]
    pub fn covers_unchecked(&self, instance: &Instance) -> bool {
        self.body.iter().all(|c| c.holds(instance))
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    /// Human-readable form, e.g. `IF x3 ≤ 0.25 AND x7 = blue THEN class=recurrence`.
    pub fn display<'a>(&'a self, schema: &'a Schema) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, schema }
    }

    /// Closed bounds `[lower, upper]` the body imposes on a numeric column,
    /// starting from `(lower, upper)`.
    pub fn numeric_bounds(&self, column: usize, lower: f64, upper: f64) -> (f64, f64) {
        self.body
            .iter()
            .filter(|c| c.column == column)
            .fold((lower, upper), |(lo, hi), c| match c.relation {
                Relation::Le { threshold } => (lo, hi.min(threshold)),
                Relation::Gt { threshold } => (lo.max(threshold), hi),
                _ => (lo, hi),
            })
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a Rule,
    schema: &'a Schema,
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("IF ")?;
        if self.rule.body.is_empty() {
            f.write_str("TRUE")?;
        }
        for (i, cond) in self.rule.body.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            let column = &self.schema.columns[cond.column];
            let category = |c: u32| column.category_name(c).unwrap_or("?");
            match cond.relation {
                Relation::Le { threshold } => write!(f, "{} ≤ {}", column.name, threshold)?,
                Relation::Gt { threshold } => write!(f, "{} > {}", column.name, threshold)?,
                Relation::Eq { category: c } => write!(f, "{} = {}", column.name, category(c))?,
                Relation::Ne { category: c } => write!(f, "{} ≠ {}", column.name, category(c))?,
            }
        }
        write!(
            f,
            " THEN {}={}",
            self.schema.label, self.schema.class_names[self.rule.head]
        )
    }
}

/// Converts a root-to-leaf path into a rule body. With `merge`, repeated
/// bounds on one numeric column collapse to the tightest one (the smallest
/// `≤` and the largest `>`), kept at the position of their first occurrence.
pub fn path_to_body(path: &[(SplitCondition, bool)], merge: bool) -> Vec<Condition> {
    let mut body: Vec<Condition> = Vec::with_capacity(path.len());
    for (split, went_left) in path {
        let cond = Condition::from_branch(split, *went_left);
        if merge {
            let slot = body.iter_mut().find(|c| {
                c.column == cond.column
                    && matches!(
                        (c.relation, cond.relation),
                        (Relation::Le { .. }, Relation::Le { .. }) | (Relation::Gt { .. }, Relation::Gt { .. })
                    )
            });
            if let Some(existing) = slot {
                match (&mut existing.relation, cond.relation) {
                    (Relation::Le { threshold: old }, Relation::Le { threshold }) => *old = old.min(threshold),
                    (Relation::Gt { threshold: old }, Relation::Gt { threshold }) => *old = old.max(threshold),
                    _ => unreachable!(),
                }
                continue;
            }
        }
        body.push(cond);
    }
    body
}

/// All rules of a forest in tree order, then depth-first leaf order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub n_trees: usize,
    pub class_priors: Vec<f64>,
    pub majority_class: ClassId,
    pub schema: Schema,
}

impl RuleSet {
    /// Number of rules, `d`.
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Index range of the rules extracted from tree `tree`.
    pub fn tree_range(&self, tree: usize) -> Range<usize> {
        let start = self.rules.partition_point(|r| r.origin.tree < tree);
        let end = self.rules.partition_point(|r| r.origin.tree <= tree);
        start..end
    }

    pub fn check_arity(&self, instance: &Instance) -> Result<()> {
        if instance.len() != self.schema.n_columns() {
            return Err(Error::ArityMismatch {
                expected: self.schema.n_columns(),
                found: instance.len(),
            });
        }
        Ok(())
    }

    /// Writes one rule per line in set order.
    pub fn to_text(&self, indices: impl IntoIterator<Item = usize>) -> String {
        let mut out = String::new();
        for i in indices {
            out += &self.rules[i].display(&self.schema).to_string();
            out.push('\n');
        }
        out
    }
}

/// One rule per leaf of every tree.
pub fn extract_rules(forest: &Forest) -> RuleSet {
    let mut rules = Vec::with_capacity(forest.n_leaves());
    for (t, tree) in forest.trees.iter().enumerate() {
        tree.for_each_path(|leaf, head, path| {
            rules.push(Rule {
                body: path_to_body(path, true),
                head,
                origin: RuleOrigin { tree: t, leaf },
            });
        });
    }
    RuleSet {
        rules,
        n_trees: forest.n_trees(),
        class_priors: forest.class_priors.clone(),
        majority_class: forest.majority_class,
        schema: forest.schema.clone(),
    }
}

/// Whether every body condition of `rule` holds for `instance`.
pub fn covers(rule: &Rule, instance: &Instance, schema: &Schema) -> Result<bool> {
    if instance.len() != schema.n_columns() {
        return Err(Error::ArityMismatch {
            expected: schema.n_columns(),
            found: instance.len(),
        });
    }
    Ok(rule.covers_unchecked(instance))
}

/// Sparse rule-by-instance coverage: for every rule, the sorted indices of
/// the instances it covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageMatrix {
    n_instances: usize,
    per_rule: Vec<Vec<u32>>,
}

impl CoverageMatrix {
    pub fn covered(&self, rule: usize) -> &[u32] {
        &self.per_rule[rule]
    }

    pub fn n_rules(&self) -> usize {
        self.per_rule.len()
    }

    pub fn n_instances(&self) -> usize {
        self.n_instances
    }

    /// For every instance, the number of rules covering it.
    pub fn instance_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_instances];
        for list in &self.per_rule {
            for &j in list {
                counts[j as usize] += 1;
            }
        }
        counts
    }

    /// Transposed view: for every instance, the rules covering it.
    pub fn rules_per_instance(&self) -> Vec<Vec<u32>> {
        let mut by_instance = vec![Vec::new(); self.n_instances];
        for (r, list) in self.per_rule.iter().enumerate() {
            for &j in list {
                by_instance[j as usize].push(r as u32);
            }
        }
        by_instance
    }
}

/// Coverage of every rule of `ruleset` over the rows of `data`.
pub fn coverage_matrix(ruleset: &RuleSet, data: &Dataset) -> Result<CoverageMatrix> {
    coverage_of(&ruleset.rules, data)
}

/// Coverage of an arbitrary rule list.
pub fn coverage_of(rules: &[Rule], data: &Dataset) -> Result<CoverageMatrix> {
    if let Some(row) = data.rows().first() {
        let expected = data.n_columns();
        if row.len() != expected {
            return Err(Error::ArityMismatch {
                expected,
                found: row.len(),
            });
        }
    }
    if let Some(bad) = rules
        .iter()
        .flat_map(|r| &r.body)
        .find(|c| c.column >= data.n_columns())
    {
        return Err(Error::ArityMismatch {
            expected: bad.column + 1,
            found: data.n_columns(),
        });
    }
    let per_rule = rules
        .par_iter()
        .map(|rule| {
            data.rows()
                .iter()
                .enumerate()
                .filter(|(_, row)| rule.covers_unchecked(row))
                .map(|(j, _)| j as u32)
                .collect()
        })
        .collect();
    Ok(CoverageMatrix {
        n_instances: data.n_rows(),
        per_rule,
    })
}
