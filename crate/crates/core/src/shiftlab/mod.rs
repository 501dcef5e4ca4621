//! Politicization analytics over labeled threads: topic-shift detection,
//! stay/shift distributions, CDFs, weekly time series, gap statistics and
//! per-topic rankings.
//!
//! A *topic shift* is a comment whose label equals the target while its
//! post's label does not; it is the direct unit of politicization here.

pub mod stats;

use std::collections::BTreeMap;

use chrono::{DateTime, Datelike, Duration, NaiveDate, Utc};
use serde::Serialize;

use crate::corpus::Thread;
use crate::error::{Error, Result};
use crate::seed::{prevalence_from_positive_set, PrevalenceTable};
use crate::Label;
pub use stats::{mann_whitney_u, wilson_interval, EmpiricalCdf, MannWhitneyResult, Z_95};

pub type LabelMap = BTreeMap<String, Label>;

fn label_of(labels: &LabelMap, id: &str) -> Result<Label> {
    labels
        .get(id)
        .copied()
        .ok_or_else(|| Error::MissingLabel(id.to_string()))
}

/// One comment's shift status within its thread.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftRecord {
    pub thread_id: String,
    pub comment_id: String,
    /// 1-based index in thread order.
    pub position: usize,
    pub is_shift: bool,
    pub target: Label,
}

/// One record per comment; `is_shift` holds exactly when the post label
/// differs from `target` and the comment label equals it. Threads whose post
/// is already on target yield all-false records.
pub fn detect_shifts(thread: &Thread, labels: &LabelMap, target: Label) -> Result<Vec<ShiftRecord>> {
    let post_label = label_of(labels, &thread.post.id)?;
    let post_on_target = post_label == target;
    thread
        .comments
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let comment_label = label_of(labels, &c.id)?;
            Ok(ShiftRecord {
                thread_id: thread.post.id.clone(),
                comment_id: c.id.clone(),
                position: i + 1,
                is_shift: !post_on_target && comment_label == target,
                target,
            })
        })
        .collect()
}

/// Fixed-width histogram over `[0, 1]`; the last bin is right-closed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub counts: Vec<usize>,
    /// Counts normalized to total mass 1 (all zero for an empty histogram).
    pub masses: Vec<f64>,
    pub n_samples: usize,
}

impl Histogram {
    fn from_fractions(fractions: &[f64], bins: usize) -> Self {
        let mut counts = vec![0usize; bins];
        for &f in fractions {
            let bin = ((f * bins as f64) as usize).min(bins - 1);
            counts[bin] += 1;
        }
        let n = fractions.len();
        let masses = counts
            .iter()
            .map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
            .collect();
        Histogram {
            counts,
            masses,
            n_samples: n,
        }
    }
}

pub const DEFAULT_HISTOGRAM_BINS: usize = 20;

/// Distributions over per-thread comment fractions, skipping comment-less
/// threads: for on-target posts the fraction of comments staying on target,
/// for off-target posts the fraction shifting to it.
pub fn stay_and_shift_distributions(
    threads: &[Thread],
    labels: &LabelMap,
    target: Label,
    bins: usize,
) -> Result<(Histogram, Histogram)> {
    let mut stay = Vec::new();
    let mut shift = Vec::new();
    for thread in threads {
        if thread.comments.is_empty() {
            continue;
        }
        let post_label = label_of(labels, &thread.post.id)?;
        let mut on_target = 0usize;
        for c in &thread.comments {
            if label_of(labels, &c.id)? == target {
                on_target += 1;
            }
        }
        let fraction = on_target as f64 / thread.comments.len() as f64;
        if post_label == target {
            stay.push(fraction);
        } else {
            shift.push(fraction);
        }
    }
    Ok((
        Histogram::from_fractions(&stay, bins),
        Histogram::from_fractions(&shift, bins),
    ))
}

/// Which threads a CDF covers, by the post's relation to the target label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PostClass {
    Target,
    NonTarget,
}

/// Empirical CDF of the per-thread percentage (0..100) of comments whose
/// label differs from the post's label. Comment-less threads are skipped.
pub fn shift_cdf(
    threads: &[Thread],
    labels: &LabelMap,
    target: Label,
    post_class: PostClass,
) -> Result<EmpiricalCdf> {
    let mut percentages = Vec::new();
    for thread in threads {
        if thread.comments.is_empty() {
            continue;
        }
        let post_label = label_of(labels, &thread.post.id)?;
        let keep = match post_class {
            PostClass::Target => post_label == target,
            PostClass::NonTarget => post_label != target,
        };
        if !keep {
            continue;
        }
        let mut differing = 0usize;
        for c in &thread.comments {
            if label_of(labels, &c.id)? != post_label {
                differing += 1;
            }
        }
        percentages.push(100.0 * differing as f64 / thread.comments.len() as f64);
    }
    if percentages.is_empty() {
        return Err(Error::EmptyThreadClass(
            match post_class {
                PostClass::Target => "target",
                PostClass::NonTarget => "non-target",
            }
            .to_string(),
        ));
    }
    Ok(EmpiricalCdf::new(percentages))
}

/// One ISO-week bucket of the shift-ratio series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeekBucket {
    /// Monday of the ISO week, UTC.
    pub week_start: NaiveDate,
    pub n: usize,
    pub shifts: usize,
    pub ratio: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeeklySeries {
    pub buckets: Vec<WeekBucket>,
}

fn iso_week_start(timestamp: i64) -> NaiveDate {
    let date = DateTime::<Utc>::from_timestamp(timestamp, 0)
        .unwrap_or_else(|| DateTime::<Utc>::from_timestamp(0, 0).expect("epoch is valid"))
        .date_naive();
    date - Duration::days(date.weekday().num_days_from_monday() as i64)
}

/// Weekly ratio of shifting comments under off-target posts, with Wilson 95%
/// intervals. Weeks inside the covered range with no comments are emitted
/// with `n = 0` and undefined ratio.
pub fn weekly_shift_ratio(
    threads: &[Thread],
    labels: &LabelMap,
    target: Label,
) -> Result<WeeklySeries> {
    let mut per_week: BTreeMap<NaiveDate, (usize, usize)> = BTreeMap::new();
    for thread in threads {
        if label_of(labels, &thread.post.id)? == target {
            continue;
        }
        for c in &thread.comments {
            let week = iso_week_start(c.timestamp);
            let entry = per_week.entry(week).or_insert((0, 0));
            entry.0 += 1;
            if label_of(labels, &c.id)? == target {
                entry.1 += 1;
            }
        }
    }

    let mut buckets = Vec::new();
    if let (Some(&first), Some(&last)) =
        (per_week.keys().next(), per_week.keys().next_back())
    {
        let mut week = first;
        while week <= last {
            let (n, shifts) = per_week.get(&week).copied().unwrap_or((0, 0));
            let (ratio, ci_low, ci_high) = if n > 0 {
                let (lo, hi) = wilson_interval(shifts, n, Z_95);
                (Some(shifts as f64 / n as f64), Some(lo), Some(hi))
            } else {
                (None, None, None)
            };
            buckets.push(WeekBucket {
                week_start: week,
                n,
                shifts,
                ratio,
                ci_low,
                ci_high,
            });
            week += Duration::weeks(1);
        }
    }
    Ok(WeeklySeries { buckets })
}

/// Gap statistics over threads with off-target posts: the 1-based position
/// of the first shifting comment per thread, and position differences
/// between consecutive shifting comments. Threads (with at least one
/// comment) that never shift are excluded and counted as censored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSamples {
    pub first_gaps: Vec<usize>,
    pub inter_gaps: Vec<usize>,
    pub censored_threads: usize,
}

pub fn comment_gaps(threads: &[Thread], labels: &LabelMap, target: Label) -> Result<GapSamples> {
    let mut first_gaps = Vec::new();
    let mut inter_gaps = Vec::new();
    let mut censored = 0usize;
    for thread in threads {
        if label_of(labels, &thread.post.id)? == target || thread.comments.is_empty() {
            continue;
        }
        let mut last_shift: Option<usize> = None;
        for (i, c) in thread.comments.iter().enumerate() {
            if label_of(labels, &c.id)? != target {
                continue;
            }
            let position = i + 1;
            match last_shift {
                None => first_gaps.push(position),
                Some(prev) => inter_gaps.push(position - prev),
            }
            last_shift = Some(position);
        }
        if last_shift.is_none() {
            censored += 1;
        }
    }
    Ok(GapSamples {
        first_gaps,
        inter_gaps,
        censored_threads: censored,
    })
}

/// Two-sided Mann-Whitney p-value comparing first gaps against inter gaps
/// (the "does one shift accelerate the next" question).
pub fn compare_gap_distributions(first: &[usize], inter: &[usize]) -> Result<f64> {
    let a: Vec<f64> = first.iter().map(|&v| v as f64).collect();
    let b: Vec<f64> = inter.iter().map(|&v| v as f64).collect();
    Ok(mann_whitney_u(&a, &b)?.p_value)
}

/// Per-topic politicization: the share of on-target comments under posts of
/// that topic, ranked descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicRow {
    pub topic: String,
    pub n_posts: usize,
    pub n_comments: usize,
    pub target_comment_share: f64,
}

/// Ranks topics by their share of on-target comments. Posts without a topic
/// tag are skipped (it is an error if none carries one); topics with fewer
/// than `min_posts` posts or no comments are dropped; `excluded` removes
/// rows without renormalizing the rest.
pub fn topic_politicization(
    threads: &[Thread],
    labels: &LabelMap,
    target: Label,
    min_posts: usize,
    excluded: &[String],
) -> Result<Vec<TopicRow>> {
    let mut agg: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    let mut tagged_posts = 0usize;
    for thread in threads {
        let Some(topic) = thread.post.topic.as_deref() else {
            continue;
        };
        tagged_posts += 1;
        let entry = agg.entry(topic).or_insert((0, 0, 0));
        entry.0 += 1;
        for c in &thread.comments {
            entry.1 += 1;
            if label_of(labels, &c.id)? == target {
                entry.2 += 1;
            }
        }
    }
    if tagged_posts == 0 {
        return Err(Error::MissingTopics);
    }

    let mut rows: Vec<TopicRow> = agg
        .into_iter()
        .filter(|(topic, (posts, comments, _))| {
            *posts >= min_posts && *comments > 0 && !excluded.iter().any(|e| e == topic)
        })
        .map(|(topic, (posts, comments, hits))| TopicRow {
            topic: topic.to_string(),
            n_posts: posts,
            n_comments: comments,
            target_comment_share: hits as f64 / comments as f64,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.target_comment_share
            .total_cmp(&a.target_comment_share)
            .then_with(|| a.topic.cmp(&b.topic))
    });
    Ok(rows)
}

pub const DEFAULT_MIN_TOPIC_POSTS: usize = 100;

/// Per-thread summary plus the platform-level prevalence table computed from
/// predicted labels (the classifier-side analogue of the keyword tables).
#[derive(Debug, Clone, Serialize)]
pub struct ThreadShiftSummary {
    pub thread_id: String,
    pub post_label: Label,
    pub comments: usize,
    pub target_comments: usize,
    pub target_share: Option<f64>,
    pub at_least_one: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftReport {
    pub per_thread: Vec<ThreadShiftSummary>,
    pub prevalence: PrevalenceTable,
}

pub fn shift_report(threads: &[Thread], labels: &LabelMap, target: Label) -> Result<ShiftReport> {
    let mut per_thread = Vec::with_capacity(threads.len());
    for thread in threads {
        let post_label = label_of(labels, &thread.post.id)?;
        let mut hits = 0usize;
        for c in &thread.comments {
            if label_of(labels, &c.id)? == target {
                hits += 1;
            }
        }
        per_thread.push(ThreadShiftSummary {
            thread_id: thread.post.id.clone(),
            post_label,
            comments: thread.comments.len(),
            target_comments: hits,
            target_share: if thread.comments.is_empty() {
                None
            } else {
                Some(hits as f64 / thread.comments.len() as f64)
            },
            at_least_one: hits > 0,
        });
    }

    let positive: std::collections::BTreeSet<String> = labels
        .iter()
        .filter(|(_, l)| **l == target)
        .map(|(id, _)| id.clone())
        .collect();
    Ok(ShiftReport {
        per_thread,
        prevalence: prevalence_from_positive_set(&positive, threads),
    })
}
