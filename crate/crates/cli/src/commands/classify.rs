use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use politishift::baselines::{keyword_classify, prior_calibrated_predict, ModelKind};
use politishift::corpus::filter_short_comments;
use politishift::pulearn::GbdtModel;
use politishift::seed::KeywordSet;
use politishift::textfeat::embed_corpus;
use politishift::Label;

use super::train::{load_table, ModelMeta};
use crate::manifest::RunManifest;
use crate::util::{
    data, ensure_out_dir, load_corpus, read_input, usage, write_labels_csv, CmdResult,
};

#[derive(Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    corpus: PathBuf,

    /// `models/` directory written by a previous `train` run.
    #[arg(long)]
    models_dir: PathBuf,

    /// Embedding table (required for tree-backed models).
    #[arg(long)]
    embeddings: Option<PathBuf>,

    #[arg(long, default_value_t = politishift::corpus::DEFAULT_MIN_COMMENT_TOKENS)]
    min_tokens: usize,

    #[arg(long)]
    out_dir: PathBuf,
}

/// Applies a saved model to a new corpus. Unlike `train`, there is no
/// keyword-seeded positive set to pin: every document is scored by the model
/// (the keyword model scores by matching alone).
pub fn run(args: ClassifyArgs) -> CmdResult {
    let mut manifest = RunManifest::new("classify");
    manifest.record_input(&args.corpus);

    let meta_path = args.models_dir.join("model_meta.json");
    let meta: ModelMeta = serde_json::from_slice(&read_input(&meta_path)?)
        .with_context(|| format!("bad model meta {}", meta_path.display()))
        .map_err(data)?;
    manifest.record_input(&meta_path);

    ensure_out_dir(&args.out_dir)?;
    let corpus = filter_short_comments(&load_corpus(&args.corpus)?.corpus, args.min_tokens);

    let mut labels = BTreeMap::new();
    let mut probabilities = BTreeMap::new();

    match meta.model {
        ModelKind::Keyword => {
            let kw = KeywordSet::from_iter("saved", meta.keywords.iter().cloned())
                .map_err(data)?;
            for doc in corpus.documents() {
                let label = keyword_classify(&doc.tokens(), &kw);
                labels.insert(doc.id.clone(), label);
                probabilities.insert(
                    doc.id.clone(),
                    if label == Label::Political { 1.0 } else { 0.0 },
                );
            }
        }
        ModelKind::Naive | ModelKind::Prior | ModelKind::TwoStep => {
            let emb_path = args
                .embeddings
                .as_ref()
                .ok_or_else(|| usage(anyhow::anyhow!("--embeddings is required")))?;
            manifest.record_input(emb_path);
            let table = load_table(emb_path)?;

            let gbdt_path = args.models_dir.join("gbdt.json");
            let model = GbdtModel::from_json(
                std::str::from_utf8(&read_input(&gbdt_path)?).map_err(data)?,
            )
            .map_err(data)?;
            manifest.record_input(&gbdt_path);

            let embeddings = embed_corpus(&corpus, &table);
            for doc in corpus.documents() {
                let g = model.predict(&embeddings[&doc.id].vector).map_err(data)?;
                let p = match meta.prior_c {
                    Some(c) => prior_calibrated_predict(g, c),
                    None => g,
                };
                let label = if p >= meta.decision_threshold {
                    Label::Political
                } else {
                    Label::NonPolitical
                };
                labels.insert(doc.id.clone(), label);
                probabilities.insert(doc.id.clone(), p);
            }
        }
    }

    let labels_path = args.out_dir.join("labels.csv");
    write_labels_csv(&labels_path, &labels, &probabilities)?;
    manifest.record_output(&labels_path);
    manifest.write(&args.out_dir)?;
    println!(
        "classified {} documents with the saved {} model",
        labels.len(),
        meta.model.as_str()
    );
    Ok(())
}
