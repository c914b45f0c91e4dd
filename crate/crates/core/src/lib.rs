//! Simplifying random forests by rule subset selection.
//!
//! A forest of unpruned CART trees is decomposed into one propositional rule
//! per leaf. Voting over all of these rules reproduces the forest exactly;
//! voting over a small, well-chosen subset trades a little accuracy (or
//! sometimes none) for a model a person can read. Subsets are chosen by a
//! rule-learning heuristic (precision, recall or the m-estimate), either by
//! taking the best `n` rules outright or by weighted covering, which halves
//! the weight of already-covered training instances after every pick.
//!
//! ```
//! use forest_rules::prelude::*;
//!
//! # fn main() -> forest_rules::Result<()> {
//! let data = generate_synthetic(80, 20, 0.05, 1)?;
//! let forest = train_forest(&data, 10, 1)?;
//! let rules = extract_rules(&forest);
//! assert_eq!(rules.len(), forest.n_leaves());
//!
//! let subset = select_weighted_covering(&rules, &data, Heuristic::Recall, 5)?;
//! let predictor = VotePredictor::new(&rules, &subset)?;
//! let accuracy = predictor.accuracy(&data)?;
//! assert!((0.0..=1.0).contains(&accuracy));
//! # Ok(())
//! # }
//! ```
//!
//! The runnable programs under `examples/` walk through each stage; the
//! `forest-rules` binary exposes the same pipeline on CSV files.

pub mod artifact;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod forest;
pub mod heuristics;
pub mod rules;
pub mod seeding;
pub mod selection;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::dataset::{
        bootstrap_sample, generate_synthetic, load_csv, stratified_kfold, ClassId, Dataset, FeatureValue, Instance,
    };
    pub use crate::evaluation::{
        accuracy_curve, run_experiment, CurvePoint, CurveSpec, ExperimentConfig, ExperimentResult, UncoveredMode,
        VotePredictor,
    };
    pub use crate::forest::{predict_forest, train_forest, train_forest_with, Forest, ForestConfig};
    pub use crate::heuristics::{confusion_counts, ConfusionCounts, Heuristic, DEFAULT_M};
    pub use crate::rules::{coverage_matrix, covers, extract_rules, Rule, RuleSet};
    pub use crate::selection::{
        select, select_best_n, select_random_trees, select_weighted_covering, RuleSubset, SelectionConfig, Strategy,
    };
}
