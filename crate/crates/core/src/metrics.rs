//! Evaluation machinery: confusion matrices, classification scores with
//! support-weighted averaging, annotator majority vote and Fleiss' kappa.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Label;

/// Counts with `Political` as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// Builds the confusion matrix of predictions against gold labels.
/// The two maps must cover exactly the same ids.
pub fn confusion(
    preds: &BTreeMap<String, Label>,
    gold: &BTreeMap<String, Label>,
) -> Result<ConfusionMatrix> {
    let only_preds = preds.keys().filter(|id| !gold.contains_key(*id)).count();
    let only_gold = gold.keys().filter(|id| !preds.contains_key(*id)).count();
    if only_preds > 0 || only_gold > 0 {
        return Err(Error::DomainMismatch {
            only_preds,
            only_gold,
        });
    }

    let mut cm = ConfusionMatrix {
        true_pos: 0,
        false_pos: 0,
        true_neg: 0,
        false_neg: 0,
    };
    for (id, pred) in preds {
        match (pred, gold[id]) {
            (Label::Political, Label::Political) => cm.true_pos += 1,
            (Label::Political, Label::NonPolitical) => cm.false_pos += 1,
            (Label::NonPolitical, Label::NonPolitical) => cm.true_neg += 1,
            (Label::NonPolitical, Label::Political) => cm.false_neg += 1,
        }
    }
    Ok(cm)
}

/// Accuracy, precision, recall and F1 for the positive class. Scores with an
/// empty denominator are reported as 0 and flagged undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    pub precision_defined: bool,
    pub recall_defined: bool,
}

pub fn scores(cm: &ConfusionMatrix) -> ScoreReport {
    let total = cm.total();
    assert!(total > 0, "confusion matrix is empty");
    let accuracy = (cm.true_pos + cm.true_neg) as f64 / total as f64;

    let p_den = cm.true_pos + cm.false_pos;
    let precision_defined = p_den > 0;
    let precision = if precision_defined {
        cm.true_pos as f64 / p_den as f64
    } else {
        0.0
    };

    let r_den = cm.true_pos + cm.false_neg;
    let recall_defined = r_den > 0;
    let recall = if recall_defined {
        cm.true_pos as f64 / r_den as f64
    } else {
        0.0
    };

    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };

    ScoreReport {
        accuracy,
        precision,
        recall,
        f1,
        support: total,
        precision_defined,
        recall_defined,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    /// Weight each report by its support.
    SupportWeighted,
    /// Plain mean over reports.
    Macro,
}

/// Averages reports, weighting by support by default (equal supports reduce
/// to the plain mean).
pub fn weighted_average(reports: &[ScoreReport], mode: Averaging) -> ScoreReport {
    assert!(!reports.is_empty(), "nothing to average");
    let weight = |r: &ScoreReport| match mode {
        Averaging::SupportWeighted => r.support as f64,
        Averaging::Macro => 1.0,
    };
    let total: f64 = reports.iter().map(weight).sum();
    assert!(total > 0.0, "zero total support");
    let mean = |f: fn(&ScoreReport) -> f64| {
        reports.iter().map(|r| weight(r) * f(r)).sum::<f64>() / total
    };
    ScoreReport {
        accuracy: mean(|r| r.accuracy),
        precision: mean(|r| r.precision),
        recall: mean(|r| r.recall),
        f1: mean(|r| r.f1),
        support: reports.iter().map(|r| r.support).sum(),
        precision_defined: reports.iter().all(|r| r.precision_defined),
        recall_defined: reports.iter().all(|r| r.recall_defined),
    }
}

/// Complete n-items-by-k-annotators label matrix.
#[derive(Debug, Clone)]
pub struct AnnotationMatrix {
    pub item_ids: Vec<String>,
    /// One row per item, one label per annotator; all rows the same length.
    pub labels: Vec<Vec<Label>>,
}

impl AnnotationMatrix {
    pub fn new(item_ids: Vec<String>, labels: Vec<Vec<Label>>) -> Self {
        assert_eq!(item_ids.len(), labels.len(), "one row per item");
        if let Some(k) = labels.first().map(Vec::len) {
            assert!(
                labels.iter().all(|row| row.len() == k),
                "annotator count must be constant"
            );
        }
        AnnotationMatrix { item_ids, labels }
    }

    pub fn items(&self) -> usize {
        self.labels.len()
    }

    pub fn annotators(&self) -> usize {
        self.labels.first().map_or(0, Vec::len)
    }
}

/// Per-item modal label. Ties (possible with an even annotator count) are an
/// error listing the first tied item.
pub fn majority_vote(matrix: &AnnotationMatrix) -> Result<BTreeMap<String, Label>> {
    let mut out = BTreeMap::new();
    let mut tied = Vec::new();
    for (id, row) in matrix.item_ids.iter().zip(&matrix.labels) {
        let pol = row.iter().filter(|l| **l == Label::Political).count();
        let non = row.len() - pol;
        if pol == non {
            tied.push(id.clone());
        } else if pol > non {
            out.insert(id.clone(), Label::Political);
        } else {
            out.insert(id.clone(), Label::NonPolitical);
        }
    }
    if let Some(first) = tied.first() {
        return Err(Error::TiedVote(tied.len(), first.clone()));
    }
    Ok(out)
}

/// Fleiss' kappa over the two label categories:
/// `kappa = (P_bar - P_e) / (1 - P_e)`.
pub fn fleiss_kappa(matrix: &AnnotationMatrix) -> Result<f64> {
    let n = matrix.items();
    let k = matrix.annotators();
    if n < 2 || k < 2 {
        return Err(Error::AnnotationMatrixTooSmall {
            min_items: 2,
            min_annotators: 2,
        });
    }

    let mut category_totals = [0usize; 2];
    let mut agreement_sum = 0.0;
    for row in &matrix.labels {
        let pol = row.iter().filter(|l| **l == Label::Political).count();
        let non = k - pol;
        category_totals[0] += pol;
        category_totals[1] += non;
        let pairs = (pol * pol.saturating_sub(1) + non * non.saturating_sub(1)) as f64;
        agreement_sum += pairs / (k * (k - 1)) as f64;
    }
    let observed = agreement_sum / n as f64;

    let total = (n * k) as f64;
    let expected: f64 = category_totals
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * p
        })
        .sum();

    if (1.0 - expected).abs() < 1e-15 {
        // Every annotator used a single category everywhere.
        if (observed - 1.0).abs() < 1e-15 {
            return Ok(1.0);
        }
        return Err(Error::KappaUndefined { observed });
    }
    Ok((observed - expected) / (1.0 - expected))
}
