use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use politishift::corpus::write_records;
use politishift::simgen::{self, SimConfig};

use crate::manifest::RunManifest;
use crate::util::{data, ensure_out_dir, usage, write_gold, CmdResult};

#[derive(Args)]
pub struct SimulateArgs {
    /// Generator config as JSON; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master RNG seed (overrides the config's rng_seed).
    #[arg(long)]
    seed: Option<u64>,

    /// Number of posts (overrides the config).
    #[arg(long)]
    posts: Option<usize>,

    /// Keyword coverage of political documents (overrides the config).
    #[arg(long)]
    coverage: Option<f64>,

    #[arg(long)]
    out_dir: PathBuf,
}

pub fn run(args: SimulateArgs) -> CmdResult {
    let mut manifest = RunManifest::new("simulate");
    let mut cfg = match &args.config {
        None => SimConfig::default(),
        Some(path) => {
            manifest.record_input(path);
            let bytes = crate::util::read_input(path)?;
            serde_json::from_slice(&bytes)
                .with_context(|| format!("bad generator config {}", path.display()))
                .map_err(usage)?
        }
    };
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    if let Some(posts) = args.posts {
        cfg.n_posts = posts;
    }
    if let Some(coverage) = args.coverage {
        cfg.keyword_coverage = coverage;
    }
    manifest.seed = Some(cfg.rng_seed);
    manifest.config = serde_json::to_value(&cfg).expect("config serializes");

    ensure_out_dir(&args.out_dir)?;
    let (corpus, truth) = simgen::generate(&cfg)?;
    manifest.mark("generate");

    let corpus_path = args.out_dir.join("corpus.jsonl");
    let mut buf = Vec::new();
    write_records(&corpus, &mut buf).map_err(data)?;
    std::fs::write(&corpus_path, buf).map_err(data)?;

    let emb_path = args.out_dir.join("embeddings.txt");
    let rows = simgen::embedding_rows(&cfg)?;
    let mut out = format!("{} {}\n", rows.len(), cfg.embedding.dimension);
    for (token, values) in rows {
        out.push_str(&token);
        for v in values {
            out.push(' ');
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    std::fs::write(&emb_path, out).map_err(data)?;

    let truth_path = args.out_dir.join("ground_truth.csv");
    let mut w = csv::Writer::from_path(&truth_path).map_err(data)?;
    w.write_record(["id", "true_label", "topic"]).map_err(data)?;
    for (id, label) in &truth.labels {
        let topic = truth.topics.get(id).and_then(|t| t.clone()).unwrap_or_default();
        w.write_record([id.as_str(), label.as_str(), topic.as_str()])
            .map_err(data)?;
    }
    w.flush().map_err(data)?;

    let gold_path = args.out_dir.join("gold.jsonl");
    write_gold(&gold_path, &truth.labels)?;

    let realized_path = args.out_dir.join("realized.json");
    std::fs::write(
        &realized_path,
        serde_json::to_string_pretty(&truth.realized).expect("rates serialize"),
    )
    .map_err(data)?;

    for path in [&corpus_path, &emb_path, &truth_path, &gold_path, &realized_path] {
        manifest.record_output(path);
    }
    manifest.write(&args.out_dir)?;
    println!(
        "generated {} documents ({} posts) into {}",
        corpus.len(),
        truth.realized.posts,
        args.out_dir.display()
    );
    Ok(())
}
