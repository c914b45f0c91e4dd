//! Rule-learning heuristics over weighted confusion counts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rules::Rule;

/// Default `m` for the m-estimate, the value tuned in the rule-learning
/// heuristics literature.
pub const DEFAULT_M: f64 = 22.466;

/// Weighted one-vs-rest confusion counts of a rule with respect to its head.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: f64,
    pub fp: f64,
    pub tn: f64,
    pub fn_: f64,
}

impl ConfusionCounts {
    pub fn total(&self) -> f64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Tallies the confusion counts of `rule` on `data` under `weights`.
pub fn confusion_counts(rule: &Rule, data: &Dataset, weights: &[f64]) -> Result<ConfusionCounts> {
    if weights.len() != data.n_rows() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} rows",
            weights.len(),
            data.n_rows()
        )));
    }
    if let Some(w) = weights.iter().find(|w| w.is_nan() || **w < 0.0) {
        return Err(Error::InvalidParameter(format!("negative weight {w}")));
    }
    if let Some(c) = rule.body.iter().find(|c| c.column >= data.n_columns()) {
        return Err(Error::ArityMismatch {
            expected: c.column + 1,
            found: data.n_columns(),
        });
    }
    let mut counts = ConfusionCounts::default();
    for ((row, &label), &w) in data.rows().iter().zip(data.labels()).zip(weights) {
        let slot = match (rule.covers_unchecked(row), label == rule.head) {
            (true, true) => &mut counts.tp,
            (true, false) => &mut counts.fp,
            (false, true) => &mut counts.fn_,
            (false, false) => &mut counts.tn,
        };
        *slot += w;
    }
    Ok(counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Heuristic {
    Precision,
    Recall,
    MEstimate { m: f64 },
}

impl Heuristic {
    pub fn m_estimate(m: f64) -> Result<Self> {
        if !m.is_finite() || m < 0.0 {
            return Err(Error::InvalidParameter(format!("m must be non-negative, got {m}")));
        }
        Ok(Heuristic::MEstimate { m })
    }

    /// Heuristic value in `[0, 1]`. `head_prior` anchors the m-estimate; it is
    /// the head class's share of the instance weight the counts came from.
    ///
    /// Empty denominators give 0 for precision and recall, and the prior for
    /// the m-estimate.
    pub fn evaluate(&self, c: &ConfusionCounts, head_prior: f64) -> f64 {
        self.value(c.tp, c.fp, c.tp + c.fn_, head_prior)
    }

    /// Same as [`evaluate`](Self::evaluate) from `tp`, `fp` and the total
    /// weight of the head class (`tp + fn`).
    #[inline]
    pub fn value(&self, tp: f64, fp: f64, positives: f64, head_prior: f64) -> f64 {
        let v = match *self {
            Heuristic::Precision => ratio(tp, tp + fp),
            Heuristic::Recall => ratio(tp, positives),
            Heuristic::MEstimate { m } => {
                let denom = tp + fp + m;
                if denom > 0.0 {
                    (tp + m * head_prior) / denom
                } else {
                    head_prior
                }
            }
        };
        // Keeps -0.0 out of score comparisons.
        v + 0.0
    }

    pub fn name(&self) -> &'static str {
        match self {
            Heuristic::Precision => "precision",
            Heuristic::Recall => "recall",
            Heuristic::MEstimate { .. } => "m-estimate",
        }
    }
}

fn ratio(num: f64, denom: f64) -> f64 {
    if denom > 0.0 {
        num / denom
    } else {
        0.0
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `precision`, `recall` or `m-estimate` (with [`DEFAULT_M`]).
impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "precision" | "confidence" => Ok(Heuristic::Precision),
            "recall" => Ok(Heuristic::Recall),
            "m-estimate" | "mestimate" | "m_estimate" => Ok(Heuristic::MEstimate { m: DEFAULT_M }),
            other => Err(Error::InvalidParameter(format!(
                "unknown heuristic '{other}' (expected precision, recall or m-estimate)"
            ))),
        }
    }
}
