use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::{Args, ValueEnum};
use politishift::corpus::{build_threads, filter_short_comments, Thread};
use politishift::seed::PrevalenceTable;
use politishift::shiftlab::{
    comment_gaps, compare_gap_distributions, detect_shifts, shift_cdf, shift_report,
    stay_and_shift_distributions, topic_politicization, weekly_shift_ratio, LabelMap, PostClass,
};
use politishift::Label;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::util::{
    apply_date_range, data, ensure_out_dir, load_corpus, read_labels_csv, resolve_keywords,
    usage, CmdResult,
};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeOp {
    Shifts,
    Cdf,
    Weekly,
    Gaps,
    Topics,
    Prevalence,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Which analysis to run.
    #[arg(value_enum)]
    op: AnalyzeOp,

    #[arg(long)]
    corpus: PathBuf,

    /// Labels file from `train`/`classify`. The positive class of that run
    /// is the shift target.
    #[arg(long)]
    labels: Option<PathBuf>,

    /// Alternative target: label documents by keyword match instead of a
    /// model, e.g. `keywords:preset:politics3` or `keywords:teams.txt`
    /// (the control-topic route).
    #[arg(long)]
    target: Option<String>,

    /// Restrict to `[start, end)` dates: `2022-08-26..2022-11-01`.
    #[arg(long)]
    date_range: Option<String>,

    #[arg(long, default_value_t = politishift::corpus::DEFAULT_MIN_COMMENT_TOKENS)]
    min_tokens: usize,

    /// Minimum posts per topic (topics op).
    #[arg(long, default_value_t = politishift::shiftlab::DEFAULT_MIN_TOPIC_POSTS)]
    min_posts: usize,

    /// Topics to exclude from the ranking, comma separated (topics op).
    #[arg(long, value_delimiter = ',')]
    exclude_topics: Vec<String>,

    /// Which post class the CDF covers (cdf op).
    #[arg(long, value_enum, default_value_t = CdfClass::Both)]
    post_class: CdfClass,

    /// Histogram bin count (shifts op).
    #[arg(long, default_value_t = politishift::shiftlab::DEFAULT_HISTOGRAM_BINS)]
    bins: usize,

    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CdfClass {
    Target,
    NonTarget,
    Both,
}

/// Resolves the label map: a labels file, or keyword matching when the
/// target is a keyword set.
fn resolve_labels(
    args: &AnalyzeArgs,
    threads: &[Thread],
    manifest: &mut RunManifest,
) -> CmdResult<LabelMap> {
    match (&args.labels, &args.target) {
        (Some(path), None) | (Some(path), Some(_)) if args.target.as_deref() == Some("political") || args.target.is_none() => {
            manifest.record_input(path);
            Ok(read_labels_csv(path)?.0)
        }
        (None, Some(spec)) => {
            let kw_spec = spec
                .strip_prefix("keywords:")
                .ok_or_else(|| usage(anyhow!("--target must be `political` or `keywords:<file|preset:NAME>`")))?;
            let kw = resolve_keywords(kw_spec)?;
            let mut labels = LabelMap::new();
            for thread in threads {
                for doc in std::iter::once(&thread.post).chain(thread.comments.iter()) {
                    let label = if politishift::seed::match_keywords(&doc.tokens(), &kw) {
                        Label::Political
                    } else {
                        Label::NonPolitical
                    };
                    labels.insert(doc.id.clone(), label);
                }
            }
            Ok(labels)
        }
        _ => Err(usage(anyhow!(
            "provide --labels <file> (model labels) or --target keywords:<spec>"
        ))),
    }
}

fn write_prevalence_csv(path: &Path, table: &PrevalenceTable) -> CmdResult {
    let mut w = csv::Writer::from_path(path).map_err(data)?;
    w.write_record([
        "platform",
        "posts",
        "positive_post_share",
        "comments_under_positive",
        "positive_comment_share_under_positive",
        "at_least_one_under_positive",
        "comments_under_other",
        "positive_comment_share_under_other",
        "at_least_one_under_other",
    ])
    .map_err(data)?;
    for row in &table.rows {
        w.write_record([
            row.platform.as_str().to_string(),
            row.posts.to_string(),
            crate::util::opt_cell(row.positive_post_share),
            row.comments_under_positive.to_string(),
            crate::util::opt_cell(row.positive_comment_share_under_positive),
            crate::util::opt_cell(row.at_least_one_under_positive),
            row.comments_under_other.to_string(),
            crate::util::opt_cell(row.positive_comment_share_under_other),
            crate::util::opt_cell(row.at_least_one_under_other),
        ])
        .map_err(data)?;
    }
    w.flush().map_err(data)?;
    Ok(())
}

pub fn run(args: AnalyzeArgs) -> CmdResult {
    let mut manifest = RunManifest::new("analyze");
    manifest.record_input(&args.corpus);
    ensure_out_dir(&args.out_dir)?;

    let corpus = filter_short_comments(&load_corpus(&args.corpus)?.corpus, args.min_tokens);
    let corpus = apply_date_range(corpus, args.date_range.as_deref())?;
    let thread_set = build_threads(&corpus);
    if !thread_set.orphans.is_empty() {
        log::warn!("{} orphan comment(s) excluded", thread_set.orphans.len());
    }
    let threads = thread_set.threads;
    let target = Label::Political;

    let labels = resolve_labels(&args, &threads, &mut manifest)?;

    match args.op {
        AnalyzeOp::Shifts => {
            let path = args.out_dir.join("shifts.csv");
            let mut w = csv::Writer::from_path(&path).map_err(data)?;
            w.write_record(["thread_id", "comment_id", "position", "is_shift"])
                .map_err(data)?;
            let mut total = 0usize;
            let mut shifting = 0usize;
            for thread in &threads {
                for record in detect_shifts(thread, &labels, target).map_err(data)? {
                    total += 1;
                    if record.is_shift {
                        shifting += 1;
                    }
                    w.write_record([
                        record.thread_id.as_str(),
                        record.comment_id.as_str(),
                        &record.position.to_string(),
                        &record.is_shift.to_string(),
                    ])
                    .map_err(data)?;
                }
            }
            w.flush().map_err(data)?;
            manifest.record_output(&path);

            let (stay, shift) =
                stay_and_shift_distributions(&threads, &labels, target, args.bins)
                    .map_err(data)?;
            let plot = args.out_dir.join("shifts_plot.json");
            std::fs::write(
                &plot,
                serde_json::to_string_pretty(&json!({
                    "bins": args.bins,
                    "stay_histogram": stay,
                    "shift_histogram": shift,
                }))
                .expect("plot serializes"),
            )
            .map_err(data)?;
            manifest.record_output(&plot);
            println!("{shifting} of {total} comments are shifts toward the target");
        }
        AnalyzeOp::Cdf => {
            let classes: Vec<(&str, PostClass)> = match args.post_class {
                CdfClass::Target => vec![("target", PostClass::Target)],
                CdfClass::NonTarget => vec![("non-target", PostClass::NonTarget)],
                CdfClass::Both => vec![
                    ("target", PostClass::Target),
                    ("non-target", PostClass::NonTarget),
                ],
            };
            let path = args.out_dir.join("cdf.csv");
            let mut w = csv::Writer::from_path(&path).map_err(data)?;
            w.write_record(["post_class", "pct", "cdf"]).map_err(data)?;
            let mut plot = serde_json::Map::new();
            for (name, class) in classes {
                let cdf = shift_cdf(&threads, &labels, target, class)?;
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                for &x in cdf.support() {
                    let y = cdf.eval(x);
                    if xs.last() == Some(&x) {
                        continue;
                    }
                    w.write_record([name, &format!("{x:.6}"), &format!("{y:.6}")])
                        .map_err(data)?;
                    xs.push(x);
                    ys.push(y);
                }
                plot.insert(name.to_string(), json!({ "pct": xs, "cdf": ys }));
            }
            w.flush().map_err(data)?;
            manifest.record_output(&path);
            let plot_path = args.out_dir.join("cdf_plot.json");
            std::fs::write(
                &plot_path,
                serde_json::to_string_pretty(&serde_json::Value::Object(plot))
                    .expect("plot serializes"),
            )
            .map_err(data)?;
            manifest.record_output(&plot_path);
        }
        AnalyzeOp::Weekly => {
            let series = weekly_shift_ratio(&threads, &labels, target).map_err(data)?;
            let path = args.out_dir.join("weekly.csv");
            let mut w = csv::Writer::from_path(&path).map_err(data)?;
            w.write_record(["week_start", "ratio", "ci_lo", "ci_hi", "n"])
                .map_err(data)?;
            for bucket in &series.buckets {
                w.write_record([
                    bucket.week_start.to_string(),
                    crate::util::opt_cell(bucket.ratio),
                    crate::util::opt_cell(bucket.ci_low),
                    crate::util::opt_cell(bucket.ci_high),
                    bucket.n.to_string(),
                ])
                .map_err(data)?;
            }
            w.flush().map_err(data)?;
            manifest.record_output(&path);
            let plot = args.out_dir.join("weekly_plot.json");
            std::fs::write(
                &plot,
                serde_json::to_string_pretty(&series).expect("series serializes"),
            )
            .map_err(data)?;
            manifest.record_output(&plot);
            println!("{} weekly bucket(s)", series.buckets.len());
        }
        AnalyzeOp::Gaps => {
            let gaps = comment_gaps(&threads, &labels, target).map_err(data)?;
            let path = args.out_dir.join("gaps.csv");
            let mut w = csv::Writer::from_path(&path).map_err(data)?;
            w.write_record(["kind", "gap"]).map_err(data)?;
            for g in &gaps.first_gaps {
                w.write_record(["first", &g.to_string()]).map_err(data)?;
            }
            for g in &gaps.inter_gaps {
                w.write_record(["inter", &g.to_string()]).map_err(data)?;
            }
            w.flush().map_err(data)?;
            manifest.record_output(&path);

            let mean = |v: &[usize]| {
                if v.is_empty() {
                    None
                } else {
                    Some(v.iter().sum::<usize>() as f64 / v.len() as f64)
                }
            };
            let p_value = compare_gap_distributions(&gaps.first_gaps, &gaps.inter_gaps).ok();
            let summary = json!({
                "first_gap_mean": mean(&gaps.first_gaps),
                "inter_gap_mean": mean(&gaps.inter_gaps),
                "first_gap_count": gaps.first_gaps.len(),
                "inter_gap_count": gaps.inter_gaps.len(),
                "censored_threads": gaps.censored_threads,
                "mann_whitney_p": p_value,
            });
            let summary_path = args.out_dir.join("gaps_summary.json");
            std::fs::write(
                &summary_path,
                serde_json::to_string_pretty(&summary).expect("summary serializes"),
            )
            .map_err(data)?;
            manifest.record_output(&summary_path);
            if let Some(p) = p_value {
                println!("first-vs-inter gap Mann-Whitney p = {p:.4}");
            }
        }
        AnalyzeOp::Topics => {
            let rows =
                topic_politicization(&threads, &labels, target, args.min_posts, &args.exclude_topics)?;
            let path = args.out_dir.join("topics.csv");
            let mut w = csv::Writer::from_path(&path).map_err(data)?;
            w.write_record(["topic", "n_posts", "pct_target_comments"])
                .map_err(data)?;
            for row in &rows {
                w.write_record([
                    row.topic.as_str(),
                    &row.n_posts.to_string(),
                    &format!("{:.6}", row.target_comment_share),
                ])
                .map_err(data)?;
            }
            w.flush().map_err(data)?;
            manifest.record_output(&path);
            let plot = args.out_dir.join("topics_plot.json");
            std::fs::write(
                &plot,
                serde_json::to_string_pretty(&rows).expect("rows serialize"),
            )
            .map_err(data)?;
            manifest.record_output(&plot);
            for row in rows.iter().take(10) {
                println!(
                    "{:<20} {:>6} posts  {:>6.1}% target comments",
                    row.topic,
                    row.n_posts,
                    100.0 * row.target_comment_share
                );
            }
        }
        AnalyzeOp::Prevalence => {
            let report = shift_report(&threads, &labels, target).map_err(data)?;
            let path = args.out_dir.join("prevalence.csv");
            write_prevalence_csv(&path, &report.prevalence)?;
            manifest.record_output(&path);
            let plot = args.out_dir.join("prevalence_plot.json");
            std::fs::write(
                &plot,
                serde_json::to_string_pretty(&report.prevalence).expect("table serializes"),
            )
            .map_err(data)?;
            manifest.record_output(&plot);
            for row in &report.prevalence.rows {
                println!(
                    "{}: {} posts, positive share {}",
                    row.platform.as_str(),
                    row.posts,
                    crate::util::opt_cell(row.positive_post_share)
                );
            }
        }
    }

    manifest.write(&args.out_dir)?;
    Ok(())
}
