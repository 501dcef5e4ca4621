//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by corpus ingestion, feature extraction, model training
/// and the analytics operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate document id `{id}` at line {line_no}")]
    DuplicateId { id: String, line_no: usize },

    #[error("no training documents provided")]
    NoTrainingData,

    #[error("embedding file `{path}`: {reason}")]
    EmbeddingFile { path: String, reason: String },

    #[error("inconsistent embedding dimension at line {line_no}: expected {expected}, got {got}")]
    EmbeddingDimension {
        line_no: usize,
        expected: usize,
        got: usize,
    },

    #[error("keyword set `{name}` is unusable: {reason}")]
    BadKeywordSet { name: String, reason: String },

    #[error("seed matched no document; positive set is empty")]
    EmptyPositiveSet,

    #[error("positive set too small for spy sampling: |P| = {positives}, requested {requested} spies")]
    PositiveSetTooSmall { positives: usize, requested: usize },

    #[error("class `{class}` has no examples")]
    EmptyClass { class: &'static str },

    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "step 1 produced no reliable negatives (threshold t = {threshold}; \
         spy posteriors min = {spy_min}, median = {spy_median}, max = {spy_max})"
    )]
    EmptyReliableNegatives {
        threshold: f64,
        spy_min: f64,
        spy_median: f64,
        spy_max: f64,
    },

    #[error("validation split is empty ({trainable} trainable rows, fraction {fraction})")]
    EmptyValidationSplit { trainable: usize, fraction: f64 },

    #[error("holdout split of the positive set is empty")]
    EmptyHoldout,

    #[error("prediction and gold label domains differ: {only_preds} ids only in predictions, {only_gold} ids only in gold")]
    DomainMismatch { only_preds: usize, only_gold: usize },

    #[error("majority vote is tied on {0} item(s); first tied id: `{1}`")]
    TiedVote(usize, String),

    #[error("annotation matrix too small: need at least {min_items} items and {min_annotators} annotators")]
    AnnotationMatrixTooSmall {
        min_items: usize,
        min_annotators: usize,
    },

    #[error("expected agreement is 1 but observed agreement is {observed}; kappa undefined")]
    KappaUndefined { observed: f64 },

    #[error("missing label for document `{0}`")]
    MissingLabel(String),

    #[error("no threads remain after filtering by post class {0}")]
    EmptyThreadClass(String),

    #[error("need at least 2 samples per group for the rank test: got {first} and {second}")]
    InsufficientSamples { first: usize, second: usize },

    #[error("no post carries a topic tag; topic analytics require the topic column")]
    MissingTopics,

    #[error("invalid config: {0}")]
    BadConfig(String),

    #[error("invalid generator config: {0}")]
    BadSimConfig(String),

    #[error("model file is malformed: {0}")]
    BadModelFile(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
