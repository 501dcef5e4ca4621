//! Two-step positive-unlabeled learning: spy-based reliable-negative
//! extraction with Naive Bayes, then a gradient-boosted-tree classifier over
//! averaged word embeddings.

mod gbdt;
mod nb;

pub use gbdt::{train_gbdt, GbdtConfig, GbdtModel};
pub use nb::{train_nb, NaiveBayesModel};

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::seed::{split_pu, KeywordSet};
use crate::textfeat::{
    self, embed_doc, fit_tfidf, transform_counts, transform_tfidf, EmbeddingTable, SparseVector,
    TfidfModel,
};
use crate::Label;

/// Spy sampling and threshold noise level for step 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpyConfig {
    /// Fraction of the positive set held out as spies.
    pub spy_fraction: f64,
    /// Fraction of spies allowed to fall below the threshold.
    pub noise_level: f64,
    pub rng_seed: u64,
}

impl SpyConfig {
    pub fn with_seed(rng_seed: u64) -> Self {
        SpyConfig {
            spy_fraction: 0.10,
            noise_level: 0.15,
            rng_seed,
        }
    }
}

/// Splits the positive set into spies and the rest. The spy count is
/// `spy_fraction * |P|` rounded half-up, sampled uniformly without
/// replacement.
pub fn sample_spies(
    positive: &BTreeSet<String>,
    cfg: &SpyConfig,
) -> Result<(BTreeSet<String>, BTreeSet<String>)> {
    let n = positive.len();
    let requested = (cfg.spy_fraction * n as f64 + 0.5).floor() as usize;
    if n < 2 || requested == 0 || requested >= n {
        return Err(Error::PositiveSetTooSmall {
            positives: n,
            requested,
        });
    }
    let ids: Vec<&String> = positive.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let chosen: BTreeSet<usize> = rand::seq::index::sample(&mut rng, n, requested)
        .into_iter()
        .collect();

    let mut spies = BTreeSet::new();
    let mut rest = BTreeSet::new();
    for (i, id) in ids.into_iter().enumerate() {
        if chosen.contains(&i) {
            spies.insert(id.clone());
        } else {
            rest.insert(id.clone());
        }
    }
    Ok((rest, spies))
}

/// Threshold below which unlabeled documents count as reliable negatives:
/// the `max(1, ceil(l * k))`-th smallest spy posterior. With `l = 0` this is
/// the minimum spy posterior.
pub fn estimate_spy_threshold(spy_posteriors: &[f64], noise_level: f64) -> f64 {
    assert!(!spy_posteriors.is_empty(), "need at least one spy");
    assert!(
        (0.0..1.0).contains(&noise_level),
        "noise level must lie in [0, 1)"
    );
    let mut sorted = spy_posteriors.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let k = sorted.len();
    let rank = ((noise_level * k as f64).ceil() as usize).max(1);
    sorted[rank - 1]
}

/// Step-1 output: the spies used, the threshold they produced and the
/// resulting partition of the unlabeled set.
#[derive(Debug, Clone)]
pub struct SpyResult {
    pub spies: BTreeSet<String>,
    pub threshold: f64,
    pub reliable_negatives: BTreeSet<String>,
    pub residual_unlabeled: BTreeSet<String>,
}

/// Splits U into reliable negatives (posterior strictly below `t`) and the
/// residual. An empty N is reported with a warning; the caller decides
/// whether that aborts the pipeline.
pub fn extract_reliable_negatives(
    unlabeled: &BTreeSet<String>,
    posteriors: &BTreeMap<String, f64>,
    threshold: f64,
) -> Result<(BTreeSet<String>, BTreeSet<String>)> {
    let mut negatives = BTreeSet::new();
    let mut residual = BTreeSet::new();
    for id in unlabeled {
        let p = posteriors
            .get(id)
            .ok_or_else(|| Error::MissingLabel(id.clone()))?;
        if *p < threshold {
            negatives.insert(id.clone());
        } else {
            residual.insert(id.clone());
        }
    }
    if negatives.is_empty() {
        log::warn!("no unlabeled document fell below the spy threshold {threshold}");
    }
    Ok((negatives, residual))
}

/// Which step-1 feature weights feed the Naive Bayes classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NbFeatureMode {
    /// Raw term counts over the TF-IDF vocabulary (default).
    Counts,
    /// L2-normalized TF-IDF weights.
    TfidfWeights,
}

/// Full two-step pipeline configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStepConfig {
    pub spy: SpyConfig,
    pub gbdt: GbdtConfig,
    pub min_df: usize,
    pub nb_alpha: f64,
    pub nb_features: NbFeatureMode,
    /// Probability above which a document is labeled positive.
    pub decision_threshold: f64,
}

impl TwoStepConfig {
    pub fn with_seeds(spy_seed: u64, gbdt_seed: u64) -> Self {
        TwoStepConfig {
            spy: SpyConfig::with_seed(spy_seed),
            gbdt: GbdtConfig::with_seed(gbdt_seed),
            min_df: textfeat::DEFAULT_MIN_DF,
            nb_alpha: 1.0,
            nb_features: NbFeatureMode::Counts,
            decision_threshold: 0.5,
        }
    }
}

/// Everything a two-step run produces: per-document labels and probabilities,
/// the step-1 partition and the fitted models.
pub struct TwoStepOutcome {
    pub labels: BTreeMap<String, Label>,
    pub probabilities: BTreeMap<String, f64>,
    pub spy_result: SpyResult,
    pub positive_count: usize,
    pub tfidf: TfidfModel,
    pub nb: NaiveBayesModel,
    pub gbdt: GbdtModel,
    /// Ids whose embedding had no in-table token (scored from the zero vector).
    pub featureless: Vec<String>,
}

fn nb_features_for(
    mode: NbFeatureMode,
    model: &TfidfModel,
    tokens: &[String],
) -> SparseVector {
    match mode {
        NbFeatureMode::Counts => transform_counts(model, tokens),
        NbFeatureMode::TfidfWeights => transform_tfidf(model, tokens),
    }
}

/// Runs the whole two-step pipeline over a prepared corpus: keyword split,
/// spy sampling, Naive Bayes posteriors, reliable-negative extraction, then
/// a boosted-tree classifier on embedding features. Members of the seeded
/// positive set keep label positive with probability 1; every other document
/// (reliable negative or residual) is scored by the step-2 model.
pub fn run_two_step(
    corpus: &Corpus,
    kw: &KeywordSet,
    table: &EmbeddingTable,
    cfg: &TwoStepConfig,
) -> Result<TwoStepOutcome> {
    let split = split_pu(corpus, kw)?;
    let (p_rest, spies) = sample_spies(&split.positive, &cfg.spy)?;

    let tokens: BTreeMap<&str, Vec<String>> = corpus
        .documents()
        .iter()
        .map(|d| (d.id.as_str(), d.tokens()))
        .collect();

    let all_token_lists: Vec<Vec<String>> = corpus
        .documents()
        .iter()
        .map(|d| tokens[d.id.as_str()].clone())
        .collect();
    let tfidf = fit_tfidf(&all_token_lists, cfg.min_df)?;

    let features = |id: &str| nb_features_for(cfg.nb_features, &tfidf, &tokens[id]);

    // Step 1: Naive Bayes on P \ S versus U + S, then the spy threshold.
    let pos_features: Vec<SparseVector> = p_rest.iter().map(|id| features(id)).collect();
    let unl_features: Vec<SparseVector> = split
        .unlabeled
        .iter()
        .chain(spies.iter())
        .map(|id| features(id))
        .collect();
    let nb = train_nb(&pos_features, &unl_features, cfg.nb_alpha)?;

    let spy_posteriors: Vec<f64> = spies
        .iter()
        .map(|id| nb.posterior(&features(id)))
        .collect();
    let threshold = estimate_spy_threshold(&spy_posteriors, cfg.spy.noise_level);

    let unl_posteriors: BTreeMap<String, f64> = split
        .unlabeled
        .iter()
        .map(|id| (id.clone(), nb.posterior(&features(id))))
        .collect();
    let (reliable_negatives, residual_unlabeled) =
        extract_reliable_negatives(&split.unlabeled, &unl_posteriors, threshold)?;

    if reliable_negatives.is_empty() {
        let mut sorted = spy_posteriors.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        return Err(Error::EmptyReliableNegatives {
            threshold,
            spy_min: sorted[0],
            spy_median: sorted[sorted.len() / 2],
            spy_max: sorted[sorted.len() - 1],
        });
    }

    // Step 2: boosted trees on embedding features, positives versus reliable
    // negatives. Residual unlabeled documents are excluded from training but
    // scored like everything else.
    let mut featureless = Vec::new();
    let mut embeddings: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for doc in corpus.documents() {
        let e = embed_doc(&tokens[doc.id.as_str()], table);
        if e.featureless {
            featureless.push(doc.id.clone());
        }
        embeddings.insert(doc.id.as_str(), e.vector);
    }
    featureless.sort();

    let pos_rows: Vec<Vec<f64>> = split
        .positive
        .iter()
        .map(|id| embeddings[id.as_str()].clone())
        .collect();
    let neg_rows: Vec<Vec<f64>> = reliable_negatives
        .iter()
        .map(|id| embeddings[id.as_str()].clone())
        .collect();
    let gbdt = train_gbdt(&pos_rows, &neg_rows, &cfg.gbdt)?;

    let mut labels = BTreeMap::new();
    let mut probabilities = BTreeMap::new();
    for doc in corpus.documents() {
        let id = doc.id.as_str();
        let (label, p) = if split.positive.contains(id) {
            (Label::Political, 1.0)
        } else {
            let p = gbdt.predict(&embeddings[id])?;
            let label = if p >= cfg.decision_threshold {
                Label::Political
            } else {
                Label::NonPolitical
            };
            (label, p)
        };
        labels.insert(id.to_string(), label);
        probabilities.insert(id.to_string(), p);
    }

    Ok(TwoStepOutcome {
        labels,
        probabilities,
        spy_result: SpyResult {
            spies,
            threshold,
            reliable_negatives,
            residual_unlabeled,
        },
        positive_count: split.positive.len(),
        tfidf,
        nb,
        gbdt,
        featureless,
    })
}

/// Inclusive parameter ranges for random hyper-parameter search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbdtSearchSpace {
    pub tree_count: (usize, usize),
    pub max_depth: (usize, usize),
    pub learning_rate: (f64, f64),
    pub row_subsample: (f64, f64),
    pub column_subsample: (f64, f64),
    pub min_samples_leaf: (usize, usize),
}

impl Default for GbdtSearchSpace {
    fn default() -> Self {
        GbdtSearchSpace {
            tree_count: (50, 300),
            max_depth: (3, 8),
            learning_rate: (0.03, 0.3),
            row_subsample: (0.6, 1.0),
            column_subsample: (0.6, 1.0),
            min_samples_leaf: (5, 30),
        }
    }
}

impl GbdtSearchSpace {
    fn sample(&self, rng: &mut ChaCha8Rng, rng_seed: u64) -> GbdtConfig {
        fn uniform_usize(rng: &mut ChaCha8Rng, (lo, hi): (usize, usize)) -> usize {
            if lo >= hi {
                lo
            } else {
                rng.gen_range(lo..=hi)
            }
        }
        fn uniform_f64(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
            if lo >= hi {
                lo
            } else {
                rng.gen_range(lo..=hi)
            }
        }
        GbdtConfig {
            tree_count: uniform_usize(rng, self.tree_count),
            max_depth: uniform_usize(rng, self.max_depth),
            learning_rate: uniform_f64(rng, self.learning_rate),
            row_subsample: uniform_f64(rng, self.row_subsample),
            column_subsample: uniform_f64(rng, self.column_subsample),
            min_samples_leaf: uniform_usize(rng, self.min_samples_leaf),
            lambda: 1.0,
            rng_seed,
        }
    }
}

fn f1_at_half(model: &GbdtModel, pos: &[Vec<f64>], neg: &[Vec<f64>]) -> Result<f64> {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for p in model.predict_batch(pos)? {
        if p >= 0.5 {
            tp += 1;
        } else {
            fn_ += 1;
        }
    }
    for p in model.predict_batch(neg)? {
        if p >= 0.5 {
            fp += 1;
        }
    }
    let denom = 2 * tp + fp + fn_;
    Ok(if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    })
}

/// Uniformly samples `trials` configs from the space, trains each on the
/// training portion and returns the config with the best validation F1
/// (ties keep the earlier trial).
pub fn random_search(
    space: &GbdtSearchSpace,
    trials: usize,
    validation_fraction: f64,
    rng_seed: u64,
    pos: &[Vec<f64>],
    neg: &[Vec<f64>],
) -> Result<(GbdtConfig, f64)> {
    assert!(trials >= 1, "need at least one trial");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);

    // Stratified split: shuffle each class, hold out the tail.
    let split_class = |rows: &[Vec<f64>], rng: &mut ChaCha8Rng| {
        let mut order: Vec<usize> = (0..rows.len()).collect();
        use rand::seq::SliceRandom;
        order.shuffle(rng);
        let n_val = ((validation_fraction * rows.len() as f64).round() as usize)
            .min(rows.len().saturating_sub(1));
        let (val_idx, train_idx) = order.split_at(n_val);
        let train: Vec<Vec<f64>> = train_idx.iter().map(|&i| rows[i].clone()).collect();
        let val: Vec<Vec<f64>> = val_idx.iter().map(|&i| rows[i].clone()).collect();
        (train, val)
    };
    let (pos_train, pos_val) = split_class(pos, &mut rng);
    let (neg_train, neg_val) = split_class(neg, &mut rng);
    if pos_val.is_empty() && neg_val.is_empty() {
        return Err(Error::EmptyValidationSplit {
            trainable: pos.len() + neg.len(),
            fraction: validation_fraction,
        });
    }

    let mut best: Option<(GbdtConfig, f64)> = None;
    for _ in 0..trials {
        let trial_seed = rng.gen::<u64>();
        let cfg = space.sample(&mut rng, trial_seed);
        let model = train_gbdt(&pos_train, &neg_train, &cfg)?;
        let f1 = f1_at_half(&model, &pos_val, &neg_val)?;
        if best.as_ref().is_none_or(|(_, b)| f1 > *b) {
            best = Some((cfg, f1));
        }
    }
    Ok(best.expect("at least one trial ran"))
}
