//! Comparison models: keyword-only matching, boosted trees with unlabeled
//! treated as negative, and class-prior-calibrated PU.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::pulearn::{train_gbdt, GbdtConfig, GbdtModel};
use crate::seed::{match_keywords, split_pu, KeywordSet};
use crate::textfeat::{embed_corpus, EmbeddingTable};
use crate::Label;

/// Keyword baseline: political iff any token matches a seed keyword.
pub fn keyword_classify(doc: &[String], kw: &KeywordSet) -> Label {
    if match_keywords(doc, kw) {
        Label::Political
    } else {
        Label::NonPolitical
    }
}

/// Boosted trees trained with the whole unlabeled set as the negative class
/// (no reliable-negative extraction).
pub fn naive_negative_train(
    pos: &[Vec<f64>],
    unl: &[Vec<f64>],
    cfg: &GbdtConfig,
) -> Result<GbdtModel> {
    train_gbdt(pos, unl, cfg)
}

/// Holdout estimation of the labeling frequency `c` for prior calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorCalibration {
    pub holdout_fraction: f64,
    pub rng_seed: u64,
}

impl PriorCalibration {
    pub fn with_seed(rng_seed: u64) -> Self {
        PriorCalibration {
            holdout_fraction: 0.2,
            rng_seed,
        }
    }
}

/// Trains positive-vs-unlabeled trees on a positive subset and estimates
/// `c`, the labeling frequency, from the mean score over the held-out
/// positives. Training on only `1 - holdout_fraction` of the labeled set
/// deflates that mean to `(1-h)c / ((1-h)c + 1-c)`; the estimate inverts
/// this before clamping to `[1e-6, 1]`, so a perfectly calibrated model
/// recovers the true labeling frequency.
pub fn prior_calibrated_fit(
    pos: &[Vec<f64>],
    unl: &[Vec<f64>],
    cfg: &GbdtConfig,
    cal: &PriorCalibration,
) -> Result<(GbdtModel, f64)> {
    let mut order: Vec<usize> = (0..pos.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cal.rng_seed);
    order.shuffle(&mut rng);
    let n_holdout = ((cal.holdout_fraction * pos.len() as f64).round() as usize)
        .min(pos.len().saturating_sub(1));
    if n_holdout == 0 {
        return Err(Error::EmptyHoldout);
    }
    let (holdout_idx, fit_idx) = order.split_at(n_holdout);

    let fit_pos: Vec<Vec<f64>> = fit_idx.iter().map(|&i| pos[i].clone()).collect();
    let model = train_gbdt(&fit_pos, unl, cfg)?;

    let holdout: Vec<Vec<f64>> = holdout_idx.iter().map(|&i| pos[i].clone()).collect();
    let scores = model.predict_batch(&holdout)?;
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    let fit_fraction = fit_idx.len() as f64 / pos.len() as f64;
    let c = mean / (fit_fraction * (1.0 - mean) + mean);
    Ok((model, c.clamp(1e-6, 1.0)))
}

/// Elkan-Noto correction: `min(1, g(x) / c)`.
pub fn prior_calibrated_predict(g_of_x: f64, c: f64) -> f64 {
    assert!(c > 0.0 && c <= 1.0, "c must lie in (0, 1]");
    (g_of_x / c).min(1.0)
}

/// Which model a pipeline run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Keyword,
    Naive,
    Prior,
    TwoStep,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Keyword => "keyword",
            ModelKind::Naive => "naive",
            ModelKind::Prior => "prior",
            ModelKind::TwoStep => "two-step",
        }
    }

    pub fn parse(s: &str) -> Option<ModelKind> {
        match s {
            "keyword" => Some(ModelKind::Keyword),
            "naive" => Some(ModelKind::Naive),
            "prior" => Some(ModelKind::Prior),
            "two-step" => Some(ModelKind::TwoStep),
            _ => None,
        }
    }
}

/// Labels and scores for a whole corpus from one of the baseline models.
/// As in the two-step pipeline, keyword-seeded documents stay political
/// with probability 1.
pub struct BaselineOutcome {
    pub labels: BTreeMap<String, Label>,
    pub probabilities: BTreeMap<String, f64>,
    pub positive_count: usize,
    pub gbdt: Option<GbdtModel>,
    /// Estimated labeling frequency (prior model only).
    pub c: Option<f64>,
}

/// Runs the keyword baseline over a corpus.
pub fn run_keyword(corpus: &Corpus, kw: &KeywordSet) -> BaselineOutcome {
    let mut labels = BTreeMap::new();
    let mut probabilities = BTreeMap::new();
    let mut positive_count = 0usize;
    for doc in corpus.documents() {
        let label = keyword_classify(&doc.tokens(), kw);
        if label == Label::Political {
            positive_count += 1;
        }
        labels.insert(doc.id.clone(), label);
        probabilities.insert(
            doc.id.clone(),
            if label == Label::Political { 1.0 } else { 0.0 },
        );
    }
    BaselineOutcome {
        labels,
        probabilities,
        positive_count,
        gbdt: None,
        c: None,
    }
}

fn scored_outcome(
    corpus: &Corpus,
    positive: &std::collections::BTreeSet<String>,
    embeddings: &BTreeMap<String, crate::textfeat::DocEmbedding>,
    model: GbdtModel,
    c: Option<f64>,
    decision_threshold: f64,
) -> Result<BaselineOutcome> {
    let mut labels = BTreeMap::new();
    let mut probabilities = BTreeMap::new();
    for doc in corpus.documents() {
        let (label, p) = if positive.contains(&doc.id) {
            (Label::Political, 1.0)
        } else {
            let g = model.predict(&embeddings[&doc.id].vector)?;
            let p = match c {
                Some(c) => prior_calibrated_predict(g, c),
                None => g,
            };
            let label = if p >= decision_threshold {
                Label::Political
            } else {
                Label::NonPolitical
            };
            (label, p)
        };
        labels.insert(doc.id.clone(), label);
        probabilities.insert(doc.id.clone(), p);
    }
    Ok(BaselineOutcome {
        labels,
        probabilities,
        positive_count: positive.len(),
        gbdt: Some(model),
        c,
    })
}

/// Runs the unlabeled-as-negative baseline end to end.
pub fn run_naive(
    corpus: &Corpus,
    kw: &KeywordSet,
    table: &EmbeddingTable,
    cfg: &GbdtConfig,
    decision_threshold: f64,
) -> Result<BaselineOutcome> {
    let split = split_pu(corpus, kw)?;
    let embeddings = embed_corpus(corpus, table);
    let pos: Vec<Vec<f64>> = split
        .positive
        .iter()
        .map(|id| embeddings[id].vector.clone())
        .collect();
    let unl: Vec<Vec<f64>> = split
        .unlabeled
        .iter()
        .map(|id| embeddings[id].vector.clone())
        .collect();
    let model = naive_negative_train(&pos, &unl, cfg)?;
    scored_outcome(corpus, &split.positive, &embeddings, model, None, decision_threshold)
}

/// Runs the class-prior-calibrated baseline end to end.
pub fn run_prior(
    corpus: &Corpus,
    kw: &KeywordSet,
    table: &EmbeddingTable,
    cfg: &GbdtConfig,
    cal: &PriorCalibration,
    decision_threshold: f64,
) -> Result<BaselineOutcome> {
    let split = split_pu(corpus, kw)?;
    if split.positive.len() < 5 {
        return Err(Error::EmptyHoldout);
    }
    let embeddings = embed_corpus(corpus, table);
    let pos: Vec<Vec<f64>> = split
        .positive
        .iter()
        .map(|id| embeddings[id].vector.clone())
        .collect();
    let unl: Vec<Vec<f64>> = split
        .unlabeled
        .iter()
        .map(|id| embeddings[id].vector.clone())
        .collect();
    let (model, c) = prior_calibrated_fit(&pos, &unl, cfg, cal)?;
    scored_outcome(corpus, &split.positive, &embeddings, model, Some(c), decision_threshold)
}
