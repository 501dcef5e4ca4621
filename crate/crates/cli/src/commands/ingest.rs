use std::path::PathBuf;

use clap::Args;
use politishift::corpus::{build_threads, filter_short_comments, write_records};
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::util::{data, ensure_out_dir, load_corpus, CmdResult};

#[derive(Args)]
pub struct IngestArgs {
    #[arg(long)]
    corpus: PathBuf,

    /// Drop comments with this many tokens or fewer.
    #[arg(long, default_value_t = politishift::corpus::DEFAULT_MIN_COMMENT_TOKENS)]
    min_tokens: usize,

    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Serialize)]
struct IngestStats {
    parsed_documents: usize,
    rejected_lines: usize,
    filtered_short_comments: usize,
    posts: usize,
    comments: usize,
    threads: usize,
    orphan_comments: usize,
}

pub fn run(args: IngestArgs) -> CmdResult {
    let mut manifest = RunManifest::new("ingest");
    manifest.record_input(&args.corpus);
    ensure_out_dir(&args.out_dir)?;

    let outcome = load_corpus(&args.corpus)?;
    let parsed = outcome.corpus.len();

    let report_path = args.out_dir.join("parse_report.csv");
    let mut w = csv::Writer::from_path(&report_path).map_err(data)?;
    w.write_record(["line_no", "reason"]).map_err(data)?;
    for reject in &outcome.rejects {
        w.write_record([reject.line_no.to_string(), reject.reason.clone()])
            .map_err(data)?;
    }
    w.flush().map_err(data)?;

    let filtered = filter_short_comments(&outcome.corpus, args.min_tokens);
    let thread_set = build_threads(&filtered);

    let stats = IngestStats {
        parsed_documents: parsed,
        rejected_lines: outcome.rejects.len(),
        filtered_short_comments: parsed - filtered.len(),
        posts: filtered.posts().count(),
        comments: filtered.comments().count(),
        threads: thread_set.threads.len(),
        orphan_comments: thread_set.orphans.len(),
    };

    let corpus_path = args.out_dir.join("corpus.jsonl");
    let mut buf = Vec::new();
    write_records(&filtered, &mut buf).map_err(data)?;
    std::fs::write(&corpus_path, buf).map_err(data)?;

    let orphans_path = args.out_dir.join("orphans.csv");
    let mut w = csv::Writer::from_path(&orphans_path).map_err(data)?;
    w.write_record(["comment_id"]).map_err(data)?;
    for id in &thread_set.orphans {
        w.write_record([id.as_str()]).map_err(data)?;
    }
    w.flush().map_err(data)?;

    let stats_path = args.out_dir.join("ingest_stats.json");
    std::fs::write(
        &stats_path,
        serde_json::to_string_pretty(&stats).expect("stats serialize"),
    )
    .map_err(data)?;

    for path in [&report_path, &corpus_path, &orphans_path, &stats_path] {
        manifest.record_output(path);
    }
    manifest.config = serde_json::to_value(&stats).expect("stats serialize");
    manifest.write(&args.out_dir)?;
    println!(
        "ingested {} documents ({} rejected, {} filtered, {} orphans)",
        filtered.len(),
        stats.rejected_lines,
        stats.filtered_short_comments,
        stats.orphan_comments
    );
    Ok(())
}
