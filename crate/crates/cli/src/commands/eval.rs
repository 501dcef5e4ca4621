use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::Args;
use politishift::baselines;
use politishift::corpus::{filter_short_comments, Corpus, DocKind};
use politishift::metrics::{confusion, scores, weighted_average, Averaging, ScoreReport};
use politishift::pulearn::{run_two_step, NbFeatureMode, SpyConfig, TwoStepConfig};
use politishift::Label;

use super::train::{load_table, GbdtFlags};
use crate::manifest::RunManifest;
use crate::util::{
    data, derive_seed, ensure_out_dir, load_corpus, read_gold, read_labels_csv,
    resolve_keywords, usage, CmdResult, Failure,
};

#[derive(Args)]
pub struct EvalArgs {
    /// Labels file(s) to evaluate, as `name=path` or a bare path.
    #[arg(long)]
    labels: Vec<String>,

    /// Gold labels, line-delimited `{"id", "label"}` records.
    #[arg(long)]
    gold: PathBuf,

    /// Corpus file; when given, scores split into post and comment rows plus
    /// their average.
    #[arg(long)]
    corpus: Option<PathBuf>,

    /// weighted | macro
    #[arg(long, default_value = "weighted")]
    averaging: String,

    /// Sweep mode: train keyword and two-step models per keyword set and
    /// emit a per-preset score table.
    #[arg(long, default_value_t = false)]
    sweep: bool,

    /// Keyword sets for --sweep (defaults to the 3/6/11 presets).
    #[arg(long)]
    keywords: Vec<String>,

    /// Embedding table for --sweep.
    #[arg(long)]
    embeddings: Option<PathBuf>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = politishift::corpus::DEFAULT_MIN_COMMENT_TOKENS)]
    min_tokens: usize,

    #[command(flatten)]
    gbdt: GbdtFlags,

    #[arg(long)]
    out_dir: PathBuf,
}

fn averaging_mode(name: &str) -> CmdResult<Averaging> {
    match name {
        "weighted" => Ok(Averaging::SupportWeighted),
        "macro" => Ok(Averaging::Macro),
        other => Err(usage(anyhow!("unknown averaging `{other}`"))),
    }
}

/// Restricts predictions to the gold domain; any gold id missing from the
/// predictions is a data error.
fn align_to_gold(
    preds: &BTreeMap<String, Label>,
    gold: &BTreeMap<String, Label>,
) -> CmdResult<BTreeMap<String, Label>> {
    let mut aligned = BTreeMap::new();
    let mut missing = 0usize;
    for id in gold.keys() {
        match preds.get(id) {
            Some(label) => {
                aligned.insert(id.clone(), *label);
            }
            None => missing += 1,
        }
    }
    if missing > 0 {
        return Err(Failure::Data(anyhow!(
            "{missing} gold id(s) missing from the labels file"
        )));
    }
    Ok(aligned)
}

struct ScoreRow {
    model: String,
    scope: String,
    report: ScoreReport,
}

fn evaluate_one(
    model: &str,
    preds: &BTreeMap<String, Label>,
    gold: &BTreeMap<String, Label>,
    corpus: Option<&Corpus>,
    mode: Averaging,
) -> CmdResult<Vec<ScoreRow>> {
    let aligned = align_to_gold(preds, gold)?;
    let mut rows = Vec::new();
    match corpus {
        None => {
            let report = scores(&confusion(&aligned, gold).map_err(data)?);
            rows.push(ScoreRow {
                model: model.to_string(),
                scope: "all".into(),
                report,
            });
        }
        Some(corpus) => {
            type KindSlot<'a> = (&'a str, BTreeMap<String, Label>, BTreeMap<String, Label>);
            let mut kinds: Vec<KindSlot> = vec![
                ("posts", BTreeMap::new(), BTreeMap::new()),
                ("comments", BTreeMap::new(), BTreeMap::new()),
            ];
            for (id, label) in &aligned {
                let doc = corpus
                    .get(id)
                    .ok_or_else(|| data(anyhow!("gold id `{id}` is not in the corpus")))?;
                let slot = if doc.kind == DocKind::Post { 0 } else { 1 };
                kinds[slot].1.insert(id.clone(), *label);
                kinds[slot].2.insert(id.clone(), gold[id]);
            }
            let mut reports = Vec::new();
            for (scope, preds, gold) in &kinds {
                if preds.is_empty() {
                    continue;
                }
                let report = scores(&confusion(preds, gold).map_err(data)?);
                reports.push(report);
                rows.push(ScoreRow {
                    model: model.to_string(),
                    scope: (*scope).into(),
                    report,
                });
            }
            if reports.len() > 1 {
                rows.push(ScoreRow {
                    model: model.to_string(),
                    scope: "average".into(),
                    report: weighted_average(&reports, mode),
                });
            }
        }
    }
    Ok(rows)
}

fn write_score_csv(path: &Path, rows: &[ScoreRow]) -> CmdResult {
    let mut w = csv::Writer::from_path(path).map_err(data)?;
    w.write_record(["model", "scope", "accuracy", "f1", "recall", "precision", "support"])
        .map_err(data)?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            row.model.as_str(),
            row.scope.as_str(),
            &format!("{:.6}", r.accuracy),
            &format!("{:.6}", r.f1),
            &format!("{:.6}", r.recall),
            &format!("{:.6}", r.precision),
            &r.support.to_string(),
        ])
        .map_err(data)?;
    }
    w.flush().map_err(data)?;
    Ok(())
}

pub fn run(args: EvalArgs) -> CmdResult {
    let mode = averaging_mode(&args.averaging)?;
    let mut manifest = RunManifest::new("eval");
    manifest.seed = Some(args.seed);
    manifest.record_input(&args.gold);
    ensure_out_dir(&args.out_dir)?;
    let gold = read_gold(&args.gold)?;
    if gold.is_empty() {
        return Err(Failure::Data(anyhow!("gold file has no records")));
    }

    let corpus = match &args.corpus {
        Some(path) => {
            manifest.record_input(path);
            Some(filter_short_comments(
                &load_corpus(path)?.corpus,
                args.min_tokens,
            ))
        }
        None => None,
    };

    // Plain mode: score the provided labels files.
    let mut rows = Vec::new();
    for spec in &args.labels {
        let (name, path) = match spec.split_once('=') {
            Some((name, path)) => (name.to_string(), PathBuf::from(path)),
            None => {
                let path = PathBuf::from(spec);
                let name = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("labels")
                    .to_string();
                (name, path)
            }
        };
        manifest.record_input(&path);
        let (preds, _) = read_labels_csv(&path)?;
        rows.extend(evaluate_one(&name, &preds, &gold, corpus.as_ref(), mode)?);
    }
    if !rows.is_empty() {
        let path = args.out_dir.join("scores.csv");
        write_score_csv(&path, &rows)?;
        manifest.record_output(&path);
        for row in &rows {
            println!(
                "{:<12} {:<9} accuracy {:.3} f1 {:.3} recall {:.3} precision {:.3}",
                row.model,
                row.scope,
                row.report.accuracy,
                row.report.f1,
                row.report.recall,
                row.report.precision
            );
        }
    } else if !args.sweep {
        return Err(usage(anyhow!("nothing to do: pass --labels or --sweep")));
    }

    // Sweep mode: retrain keyword + two-step models per keyword set.
    if args.sweep {
        let corpus = corpus
            .as_ref()
            .ok_or_else(|| usage(anyhow!("--sweep requires --corpus")))?;
        let emb_path = args
            .embeddings
            .as_ref()
            .ok_or_else(|| usage(anyhow!("--sweep requires --embeddings")))?;
        manifest.record_input(emb_path);
        let table = load_table(emb_path)?;

        let specs: Vec<String> = if args.keywords.is_empty() {
            vec![
                "preset:politics3".into(),
                "preset:politics6".into(),
                "preset:politics11".into(),
            ]
        } else {
            args.keywords.clone()
        };

        let mut w = csv::Writer::from_path(args.out_dir.join("keyword_sweep.csv")).map_err(data)?;
        w.write_record([
            "model", "keywords", "n_keywords", "accuracy", "f1", "recall", "precision",
        ])
        .map_err(data)?;
        for (i, spec) in specs.iter().enumerate() {
            let kw = resolve_keywords(spec)?;

            let keyword = baselines::run_keyword(corpus, &kw);
            let two_step = run_two_step(
                corpus,
                &kw,
                &table,
                &TwoStepConfig {
                    spy: SpyConfig {
                        spy_fraction: 0.10,
                        noise_level: 0.15,
                        rng_seed: derive_seed(args.seed, &format!("sweep-spy-{i}")),
                    },
                    gbdt: args
                        .gbdt
                        .to_config(derive_seed(args.seed, &format!("sweep-gbdt-{i}"))),
                    min_df: politishift::textfeat::DEFAULT_MIN_DF,
                    nb_alpha: 1.0,
                    nb_features: NbFeatureMode::Counts,
                    decision_threshold: 0.5,
                },
            )?;

            for (model, preds) in [("keyword", &keyword.labels), ("two-step", &two_step.labels)]
            {
                let sub_rows = evaluate_one(model, preds, &gold, Some(corpus), mode)?;
                let avg = sub_rows
                    .iter()
                    .find(|r| r.scope == "average")
                    .or_else(|| sub_rows.first())
                    .expect("at least one row");
                let r = &avg.report;
                w.write_record([
                    model,
                    kw.name.as_str(),
                    &kw.len().to_string(),
                    &format!("{:.6}", r.accuracy),
                    &format!("{:.6}", r.f1),
                    &format!("{:.6}", r.recall),
                    &format!("{:.6}", r.precision),
                ])
                .map_err(data)?;
                println!(
                    "sweep {:<9} {:<11} f1 {:.3} recall {:.3} precision {:.3}",
                    model, kw.name, r.f1, r.recall, r.precision
                );
            }
        }
        w.flush().map_err(data)?;
        manifest.record_output(&args.out_dir.join("keyword_sweep.csv"));
    }

    manifest.write(&args.out_dir)?;
    Ok(())
}
