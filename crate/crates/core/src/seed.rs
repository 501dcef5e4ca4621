//! Keyword seeding: the positive/unlabeled split and the keyword-prevalence
//! tables it supports.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Platform, Thread};
use crate::error::{Error, Result};
use crate::textfeat::tokenize;

/// A named set of seed keywords. Keywords are stored lowercase and
/// diacritic-folded; each must survive tokenization as a single token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordSet {
    pub name: String,
    pub keywords: BTreeSet<String>,
}

impl KeywordSet {
    pub fn new(name: &str, raw: &[&str]) -> Result<Self> {
        Self::from_iter(name, raw.iter().map(|s| s.to_string()))
    }

    pub fn from_iter<I: IntoIterator<Item = String>>(name: &str, raw: I) -> Result<Self> {
        let mut keywords = BTreeSet::new();
        for kw in raw {
            let toks = tokenize(&kw);
            if toks.len() != 1 {
                return Err(Error::BadKeywordSet {
                    name: name.to_string(),
                    reason: format!("`{kw}` does not tokenize to a single token"),
                });
            }
            keywords.insert(toks.into_iter().next().expect("checked len"));
        }
        if keywords.is_empty() {
            return Err(Error::BadKeywordSet {
                name: name.to_string(),
                reason: "no keywords".to_string(),
            });
        }
        Ok(KeywordSet {
            name: name.to_string(),
            keywords,
        })
    }

    /// Reads one keyword per line; blank lines and `#`-only lines skipped.
    pub fn from_file(name: &str, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_iter(
            name,
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string),
        )
    }

    pub fn contains(&self, token: &str) -> bool {
        self.keywords.contains(token)
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }
}

/// The 2022-election keyword list, strongest first. Prefixes of this list
/// form the 3/6/11-keyword presets.
const POLITICS_KEYWORDS: [&str; 11] = [
    "#eleicoes2022",
    "lula",
    "bolsonaro",
    "partido",
    "presidencia",
    "candidatura",
    "eleicoes",
    "eleitoral",
    "presidente",
    "debate",
    "eleicao",
];

/// Resolves a named preset: `politics3`, `politics6` or `politics11`.
pub fn preset(name: &str) -> Option<KeywordSet> {
    let n = match name {
        "politics3" => 3,
        "politics6" => 6,
        "politics11" => 11,
        _ => return None,
    };
    Some(KeywordSet::new(name, &POLITICS_KEYWORDS[..n]).expect("presets are valid"))
}

/// True iff any token equals a keyword (exact token equality after folding).
pub fn match_keywords(doc: &[String], kw: &KeywordSet) -> bool {
    doc.iter().any(|t| kw.contains(t))
}

/// Partition of a corpus into keyword-seeded positives and the unlabeled rest.
#[derive(Debug, Clone)]
pub struct PuSplit {
    pub positive: BTreeSet<String>,
    pub unlabeled: BTreeSet<String>,
    pub keyword_set: KeywordSet,
}

/// Seeds the positive set from keyword matches over every document (posts and
/// comments alike). Errors when nothing matches; warns when everything does.
pub fn split_pu(corpus: &Corpus, kw: &KeywordSet) -> Result<PuSplit> {
    let mut positive = BTreeSet::new();
    let mut unlabeled = BTreeSet::new();
    for doc in corpus.documents() {
        if match_keywords(&doc.tokens(), kw) {
            positive.insert(doc.id.clone());
        } else {
            unlabeled.insert(doc.id.clone());
        }
    }
    if positive.is_empty() {
        return Err(Error::EmptyPositiveSet);
    }
    if unlabeled.is_empty() {
        log::warn!(
            "keyword set `{}` matches every document; the unlabeled set is empty",
            kw.name
        );
    }
    Ok(PuSplit {
        positive,
        unlabeled,
        keyword_set: kw.clone(),
    })
}

/// One per-platform row of the prevalence tables: the share of positive
/// posts, and comment-level prevalence split by the post's class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrevalenceRow {
    pub platform: Platform,
    pub posts: usize,
    /// Share of posts that are positive; `None` when the platform has no posts.
    pub positive_post_share: Option<f64>,
    pub comments_under_positive: usize,
    /// Among comments under positive posts, the positive share.
    pub positive_comment_share_under_positive: Option<f64>,
    /// Share of positive posts with at least one positive comment
    /// (comment-less posts count against it).
    pub at_least_one_under_positive: Option<f64>,
    pub comments_under_other: usize,
    pub positive_comment_share_under_other: Option<f64>,
    pub at_least_one_under_other: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrevalenceTable {
    pub rows: Vec<PrevalenceRow>,
}

/// Prevalence of a positive id set over threads, per platform, mirroring the
/// two-table layout: post share, then comment prevalence under positive and
/// under other posts. Undefined fractions (empty denominators) stay empty.
pub fn prevalence_from_positive_set(
    positive: &BTreeSet<String>,
    threads: &[Thread],
) -> PrevalenceTable {
    #[derive(Default)]
    struct Acc {
        posts: usize,
        positive_posts: usize,
        comments_under_positive: usize,
        positive_comments_under_positive: usize,
        positive_posts_with_hit: usize,
        comments_under_other: usize,
        positive_comments_under_other: usize,
        other_posts_with_hit: usize,
    }

    let mut accs: std::collections::BTreeMap<&'static str, (Platform, Acc)> =
        std::collections::BTreeMap::new();

    for thread in threads {
        let platform = thread.post.platform;
        let acc = &mut accs
            .entry(platform.as_str())
            .or_insert_with(|| (platform, Acc::default()))
            .1;
        let post_positive = positive.contains(&thread.post.id);
        acc.posts += 1;
        let hits = thread
            .comments
            .iter()
            .filter(|c| positive.contains(&c.id))
            .count();
        if post_positive {
            acc.positive_posts += 1;
            acc.comments_under_positive += thread.comments.len();
            acc.positive_comments_under_positive += hits;
            if hits > 0 {
                acc.positive_posts_with_hit += 1;
            }
        } else {
            acc.comments_under_other += thread.comments.len();
            acc.positive_comments_under_other += hits;
            if hits > 0 {
                acc.other_posts_with_hit += 1;
            }
        }
    }

    let frac = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };

    let rows = accs
        .into_values()
        .map(|(platform, a)| PrevalenceRow {
            platform,
            posts: a.posts,
            positive_post_share: frac(a.positive_posts, a.posts),
            comments_under_positive: a.comments_under_positive,
            positive_comment_share_under_positive: frac(
                a.positive_comments_under_positive,
                a.comments_under_positive,
            ),
            at_least_one_under_positive: frac(a.positive_posts_with_hit, a.positive_posts),
            comments_under_other: a.comments_under_other,
            positive_comment_share_under_other: frac(
                a.positive_comments_under_other,
                a.comments_under_other,
            ),
            at_least_one_under_other: frac(a.other_posts_with_hit, a.posts - a.positive_posts),
        })
        .collect();

    PrevalenceTable { rows }
}

/// Keyword-level prevalence over the threads of the split's corpus.
pub fn prevalence_report(split: &PuSplit, threads: &[Thread]) -> PrevalenceTable {
    prevalence_from_positive_set(&split.positive, threads)
}
