//! Measuring politicization in threaded social-media conversations.
//!
//! The pipeline seeds a positive set from high-precision keywords, learns a
//! political/non-political classifier with two-step positive-unlabeled
//! learning (spy-based reliable negatives + gradient-boosted trees), and
//! quantifies politicization as topic shifts: political comments posted under
//! non-political posts.
//!
//! Modules follow the pipeline order:
//! - [`corpus`]: record ingestion, thread assembly, short-comment filter
//! - [`textfeat`]: tokenization, TF-IDF, averaged word embeddings
//! - [`seed`]: keyword seeding and prevalence tables
//! - [`pulearn`]: the two-step PU learner
//! - [`baselines`]: keyword-only, unlabeled-as-negative and class-prior models
//! - [`metrics`]: evaluation scores and annotator agreement
//! - [`shiftlab`]: topic-shift detection and politicization analytics
//! - [`simgen`]: synthetic ground-truth corpora for benchmarking

pub mod baselines;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod pulearn;
pub mod seed;
pub mod shiftlab;
pub mod simgen;
pub mod textfeat;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Binary document label. `Political` is the positive class of whichever
/// keyword seed drove the run (politics by default, a control topic such as
/// soccer when seeded accordingly).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Political,
    NonPolitical,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Political => "political",
            Label::NonPolitical => "non_political",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "political" => Some(Label::Political),
            "non_political" => Some(Label::NonPolitical),
            _ => None,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
