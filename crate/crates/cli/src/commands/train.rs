use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::Args;
use politishift::baselines::{self, ModelKind, PriorCalibration};
use politishift::corpus::{filter_short_comments, Corpus};
use politishift::pulearn::{
    run_two_step, GbdtConfig, NbFeatureMode, SpyConfig, TwoStepConfig,
};
use politishift::textfeat::{load_embeddings, EmbeddingTable};
use serde::{Deserialize, Serialize};

use crate::manifest::{RunManifest, SetSizes};
use crate::util::{
    data, derive_seed, ensure_out_dir, load_corpus, resolve_keywords, usage, write_labels_csv,
    CmdResult,
};

#[derive(Args, Clone)]
pub struct GbdtFlags {
    #[arg(long, default_value_t = 200)]
    pub trees: usize,
    #[arg(long, default_value_t = 6)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.8)]
    pub row_subsample: f64,
    #[arg(long, default_value_t = 0.8)]
    pub col_subsample: f64,
    #[arg(long, default_value_t = 10)]
    pub min_leaf: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
}

impl GbdtFlags {
    pub fn to_config(&self, rng_seed: u64) -> GbdtConfig {
        GbdtConfig {
            tree_count: self.trees,
            max_depth: self.max_depth,
            learning_rate: self.learning_rate,
            row_subsample: self.row_subsample,
            column_subsample: self.col_subsample,
            min_samples_leaf: self.min_leaf,
            lambda: self.lambda,
            rng_seed,
        }
    }
}

#[derive(Args)]
pub struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,

    /// Keyword file path or `preset:politics3|politics6|politics11`.
    #[arg(long)]
    keywords: String,

    /// Word-embedding table (required for every model except `keyword`).
    #[arg(long)]
    embeddings: Option<PathBuf>,

    /// keyword | naive | prior | two-step
    #[arg(long, default_value = "two-step")]
    model: String,

    /// Master seed, fanned out deterministically to all randomized stages.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = politishift::corpus::DEFAULT_MIN_COMMENT_TOKENS)]
    min_tokens: usize,

    #[command(flatten)]
    gbdt: GbdtFlags,

    #[arg(long, default_value_t = 0.10)]
    spy_fraction: f64,
    #[arg(long, default_value_t = 0.15)]
    noise_level: f64,
    #[arg(long, default_value_t = 1.0)]
    nb_alpha: f64,
    /// counts | tfidf-weights
    #[arg(long, default_value = "counts")]
    nb_features: String,
    #[arg(long, default_value_t = 0.5)]
    decision_threshold: f64,
    /// Positive-set holdout fraction for the prior baseline.
    #[arg(long, default_value_t = 0.2)]
    holdout_fraction: f64,

    #[arg(long)]
    out_dir: PathBuf,
}

/// Saved alongside the model files so `classify` can reapply the model.
#[derive(Serialize, Deserialize)]
pub struct ModelMeta {
    pub model: ModelKind,
    pub decision_threshold: f64,
    pub keywords: Vec<String>,
    pub prior_c: Option<f64>,
    pub spy_threshold: Option<f64>,
}

pub fn load_table(path: &Path) -> CmdResult<EmbeddingTable> {
    if !path.exists() {
        return Err(usage(anyhow!(
            "embedding file {} does not exist",
            path.display()
        )));
    }
    load_embeddings(path).map_err(data)
}

fn prepared_corpus(args: &TrainArgs) -> CmdResult<Corpus> {
    let outcome = load_corpus(&args.corpus)?;
    Ok(filter_short_comments(&outcome.corpus, args.min_tokens))
}

pub fn run(args: TrainArgs) -> CmdResult {
    let model_kind = ModelKind::parse(&args.model)
        .ok_or_else(|| usage(anyhow!("unknown model `{}`", args.model)))?;
    let nb_features = match args.nb_features.as_str() {
        "counts" => NbFeatureMode::Counts,
        "tfidf-weights" => NbFeatureMode::TfidfWeights,
        other => return Err(usage(anyhow!("unknown nb feature mode `{other}`"))),
    };

    let mut manifest = RunManifest::new("train");
    manifest.seed = Some(args.seed);
    manifest.record_input(&args.corpus);
    let kw = resolve_keywords(&args.keywords)?;

    ensure_out_dir(&args.out_dir)?;
    let models_dir = args.out_dir.join("models");
    ensure_out_dir(&models_dir)?;

    let corpus = prepared_corpus(&args)?;
    manifest.mark("load");

    let gbdt_seed = derive_seed(args.seed, "gbdt");
    let spy_seed = derive_seed(args.seed, "spy");
    let prior_seed = derive_seed(args.seed, "prior-holdout");
    manifest.sub_seeds.insert("gbdt".into(), gbdt_seed);
    manifest.sub_seeds.insert("spy".into(), spy_seed);
    manifest.sub_seeds.insert("prior-holdout".into(), prior_seed);

    let table = match (&args.embeddings, model_kind) {
        (_, ModelKind::Keyword) => None,
        (Some(path), _) => {
            manifest.record_input(path);
            Some(load_table(path)?)
        }
        (None, _) => {
            return Err(usage(anyhow!(
                "--embeddings is required for model `{}`",
                model_kind.as_str()
            )))
        }
    };

    let mut meta = ModelMeta {
        model: model_kind,
        decision_threshold: args.decision_threshold,
        keywords: kw.keywords.iter().cloned().collect(),
        prior_c: None,
        spy_threshold: None,
    };

    let (labels, probabilities) = match model_kind {
        ModelKind::Keyword => {
            let outcome = baselines::run_keyword(&corpus, &kw);
            (outcome.labels, outcome.probabilities)
        }
        ModelKind::Naive => {
            let cfg = args.gbdt.to_config(gbdt_seed);
            let outcome = baselines::run_naive(
                &corpus,
                &kw,
                table.as_ref().expect("checked above"),
                &cfg,
                args.decision_threshold,
            )?;
            let model = outcome.gbdt.expect("naive model trains trees");
            std::fs::write(models_dir.join("gbdt.json"), model.to_json()).map_err(data)?;
            (outcome.labels, outcome.probabilities)
        }
        ModelKind::Prior => {
            let cfg = args.gbdt.to_config(gbdt_seed);
            let cal = PriorCalibration {
                holdout_fraction: args.holdout_fraction,
                rng_seed: prior_seed,
            };
            let outcome = baselines::run_prior(
                &corpus,
                &kw,
                table.as_ref().expect("checked above"),
                &cfg,
                &cal,
                args.decision_threshold,
            )?;
            meta.prior_c = outcome.c;
            let model = outcome.gbdt.expect("prior model trains trees");
            std::fs::write(models_dir.join("gbdt.json"), model.to_json()).map_err(data)?;
            (outcome.labels, outcome.probabilities)
        }
        ModelKind::TwoStep => {
            let cfg = TwoStepConfig {
                spy: SpyConfig {
                    spy_fraction: args.spy_fraction,
                    noise_level: args.noise_level,
                    rng_seed: spy_seed,
                },
                gbdt: args.gbdt.to_config(gbdt_seed),
                min_df: politishift::textfeat::DEFAULT_MIN_DF,
                nb_alpha: args.nb_alpha,
                nb_features,
                decision_threshold: args.decision_threshold,
            };
            manifest.config = serde_json::to_value(&cfg).expect("config serializes");
            let outcome =
                run_two_step(&corpus, &kw, table.as_ref().expect("checked above"), &cfg)?;

            meta.spy_threshold = Some(outcome.spy_result.threshold);
            manifest.spy_threshold = Some(outcome.spy_result.threshold);
            manifest.set_sizes = Some(SetSizes {
                positives: outcome.positive_count,
                spies: outcome.spy_result.spies.len(),
                reliable_negatives: outcome.spy_result.reliable_negatives.len(),
                residual_unlabeled: outcome.spy_result.residual_unlabeled.len(),
            });
            if !outcome.featureless.is_empty() {
                log::warn!(
                    "{} document(s) had no embeddable token",
                    outcome.featureless.len()
                );
            }
            std::fs::write(models_dir.join("tfidf.json"), outcome.tfidf.to_json())
                .map_err(data)?;
            std::fs::write(models_dir.join("nb.json"), outcome.nb.to_json()).map_err(data)?;
            std::fs::write(models_dir.join("gbdt.json"), outcome.gbdt.to_json())
                .map_err(data)?;
            (outcome.labels, outcome.probabilities)
        }
    };
    manifest.mark("train");

    std::fs::write(
        models_dir.join("model_meta.json"),
        serde_json::to_string_pretty(&meta).expect("meta serializes"),
    )
    .map_err(data)?;

    let labels_path = args.out_dir.join("labels.csv");
    write_labels_csv(&labels_path, &labels, &probabilities)?;
    manifest.record_output(&labels_path);
    for name in ["tfidf.json", "nb.json", "gbdt.json", "model_meta.json"] {
        let path = models_dir.join(name);
        if path.exists() {
            manifest.record_output(&path);
        }
    }
    manifest.write(&args.out_dir)?;
    println!(
        "trained {} model; labeled {} documents ({} political)",
        model_kind.as_str(),
        labels.len(),
        labels
            .values()
            .filter(|l| **l == politishift::Label::Political)
            .count()
    );
    Ok(())
}
