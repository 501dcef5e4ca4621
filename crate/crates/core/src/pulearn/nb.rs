//! Multinomial Naive Bayes for the reliable-negative extraction step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textfeat::SparseVector;

const NB_FORMAT_VERSION: u32 = 1;

/// Two-class multinomial model (class 0 = positive, class 1 = unlabeled).
/// Token likelihoods use Laplace smoothing with `alpha`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    version: u32,
    log_prior: [f64; 2],
    /// Per vocabulary column: `[ln P(t|positive), ln P(t|unlabeled)]`.
    log_likelihood: Vec<[f64; 2]>,
    vocab_size: usize,
    pub alpha: f64,
}

impl NaiveBayesModel {
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn prior_positive(&self) -> f64 {
        self.log_prior[0].exp()
    }

    pub fn log_likelihood(&self, column: usize) -> [f64; 2] {
        self.log_likelihood[column]
    }

    /// Posterior probability of the positive class, computed in log space.
    /// A document with no in-vocabulary tokens scores the positive prior.
    pub fn posterior(&self, features: &SparseVector) -> f64 {
        let mut log_pos = self.log_prior[0];
        let mut log_neg = self.log_prior[1];
        for &(col, count) in &features.entries {
            debug_assert!(col < self.vocab_size, "feature column out of range");
            log_pos += count * self.log_likelihood[col][0];
            log_neg += count * self.log_likelihood[col][1];
        }
        // 1 / (1 + exp(log_neg - log_pos)) without overflow.
        let diff = log_neg - log_pos;
        if diff > 700.0 {
            0.0
        } else if diff < -700.0 {
            1.0
        } else {
            1.0 / (1.0 + diff.exp())
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: NaiveBayesModel =
            serde_json::from_str(s).map_err(|e| Error::BadModelFile(e.to_string()))?;
        if model.version != NB_FORMAT_VERSION {
            return Err(Error::BadModelFile(format!(
                "unsupported naive bayes format version {}",
                model.version
            )));
        }
        Ok(model)
    }
}

/// Trains the multinomial model from per-class term-count vectors sharing one
/// vocabulary. Class priors are document fractions; token likelihoods are
/// `(count + alpha) / (class_total + alpha * |V|)`.
pub fn train_nb(
    pos: &[SparseVector],
    unl: &[SparseVector],
    alpha: f64,
) -> Result<NaiveBayesModel> {
    if pos.is_empty() {
        return Err(Error::EmptyClass { class: "positive" });
    }
    if unl.is_empty() {
        return Err(Error::EmptyClass { class: "unlabeled" });
    }
    assert!(alpha > 0.0, "smoothing alpha must be positive");

    let vocab_size = pos
        .iter()
        .chain(unl.iter())
        .map(|v| v.dimension)
        .max()
        .unwrap_or(0);

    let mut counts = vec![[0.0f64; 2]; vocab_size];
    let mut totals = [0.0f64; 2];
    for (class, docs) in [(0usize, pos), (1usize, unl)] {
        for doc in docs {
            for &(col, count) in &doc.entries {
                counts[col][class] += count;
                totals[class] += count;
            }
        }
    }

    let n_docs = (pos.len() + unl.len()) as f64;
    let log_prior = [
        (pos.len() as f64 / n_docs).ln(),
        (unl.len() as f64 / n_docs).ln(),
    ];

    let log_likelihood = counts
        .iter()
        .map(|c| {
            [0, 1].map(|class| {
                ((c[class] + alpha) / (totals[class] + alpha * vocab_size as f64)).ln()
            })
        })
        .collect();

    Ok(NaiveBayesModel {
        version: NB_FORMAT_VERSION,
        log_prior,
        log_likelihood,
        vocab_size,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(dimension: usize, entries: &[(usize, f64)]) -> SparseVector {
        SparseVector {
            dimension,
            entries: entries.to_vec(),
        }
    }

    /// pos = ["a a"], unl = ["b b"], V = {a: 0, b: 1}.
    fn two_doc_model() -> NaiveBayesModel {
        let pos = vec![sv(2, &[(0, 2.0)])];
        let unl = vec![sv(2, &[(1, 2.0)])];
        train_nb(&pos, &unl, 1.0).unwrap()
    }

    #[test]
    fn smoothed_likelihood_hand_computed() {
        let model = two_doc_model();
        // P(a|pos) = (2 + 1) / (2 + 2) = 0.75
        assert!((model.log_likelihood(0)[0].exp() - 0.75).abs() < 1e-12);
        // P(b|pos) = (0 + 1) / (2 + 2) = 0.25
        assert!((model.log_likelihood(1)[0].exp() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn symmetric_data_gives_even_priors() {
        let model = two_doc_model();
        assert!((model.prior_positive() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unseen_token_keeps_positive_likelihood() {
        let model = two_doc_model();
        assert!(model.log_likelihood(1)[0].exp() > 0.0);
    }

    #[test]
    fn posterior_hand_computed() {
        let model = two_doc_model();
        // doc "a": 0.5 * 0.75 / (0.5 * 0.75 + 0.5 * 0.25) = 0.75
        let p = model.posterior(&sv(2, &[(0, 1.0)]));
        assert!((p - 0.75).abs() < 1e-12);
    }

    #[test]
    fn empty_doc_scores_the_prior() {
        let model = two_doc_model();
        let p = model.posterior(&SparseVector::zero(2));
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn posterior_monotone_in_evidence_count() {
        let model = two_doc_model();
        let mut last = 0.0;
        for count in 1..30 {
            let p = model.posterior(&sv(2, &[(0, count as f64)]));
            assert!(p > last);
            last = p;
        }
        assert!(last > 0.999);
    }

    #[test]
    fn empty_class_is_an_error() {
        assert!(train_nb(&[], &[sv(1, &[(0, 1.0)])], 1.0).is_err());
        assert!(train_nb(&[sv(1, &[(0, 1.0)])], &[], 1.0).is_err());
    }

    #[test]
    fn model_roundtrips_through_json() {
        let model = two_doc_model();
        let back = NaiveBayesModel::from_json(&model.to_json()).unwrap();
        let doc = sv(2, &[(0, 3.0), (1, 1.0)]);
        assert_eq!(model.posterior(&doc).to_bits(), back.posterior(&doc).to_bits());
    }
}
