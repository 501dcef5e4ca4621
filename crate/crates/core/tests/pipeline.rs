//! Integration tests for pipeline-level behaviors whose expected values come
//! from generator ground truth or side-by-side comparisons.

use std::collections::BTreeSet;

use politishift::baselines::{naive_negative_train, run_naive};
use politishift::corpus::build_threads;
use politishift::pulearn::{random_search, train_gbdt, GbdtConfig, GbdtSearchSpace};
use politishift::seed::{prevalence_report, split_pu, KeywordSet};
use politishift::simgen::{self, SimConfig};
use politishift::textfeat::embed_corpus;
use politishift::Label;

fn politics_seed() -> KeywordSet {
    KeywordSet::new("politics3", &["lula", "bolsonaro", "#eleicoes2022"]).unwrap()
}

/// |P| over the true positives tracks the configured keyword coverage.
#[test]
fn seed_split_recovers_configured_coverage() {
    let cfg = SimConfig {
        n_posts: 1200,
        comments_per_post_mean: 7.0,
        rng_seed: 21,
        ..SimConfig::default()
    };
    let (corpus, truth) = simgen::generate(&cfg).unwrap();
    let split = split_pu(&corpus, &politics_seed()).unwrap();

    let true_positives = truth
        .labels
        .values()
        .filter(|l| **l == Label::Political)
        .count();
    let ratio = split.positive.len() as f64 / true_positives as f64;
    assert!(
        (ratio - 0.40).abs() <= 0.02,
        "|P| / true positives = {ratio}"
    );

    // Everything in P matches a keyword, and P u U covers the corpus.
    assert_eq!(split.positive.len() + split.unlabeled.len(), corpus.len());
    for id in &split.positive {
        assert!(politishift::seed::match_keywords(
            &corpus.get(id).unwrap().tokens(),
            &politics_seed()
        ));
    }
}

/// All six prevalence fractions equal an independent recount over raw
/// documents.
#[test]
fn prevalence_matches_independent_recount() {
    let cfg = SimConfig {
        n_posts: 400,
        comments_per_post_mean: 5.0,
        rng_seed: 22,
        ..SimConfig::default()
    };
    let (corpus, _) = simgen::generate(&cfg).unwrap();
    let split = split_pu(&corpus, &politics_seed()).unwrap();
    let threads = build_threads(&corpus).threads;
    let table = prevalence_report(&split, &threads);
    assert_eq!(table.rows.len(), 1);
    let row = &table.rows[0];

    // Brute-force recount straight from the documents.
    let positive: &BTreeSet<String> = &split.positive;
    let mut posts = 0usize;
    let mut pos_posts = 0usize;
    let mut c_under_pos = 0usize;
    let mut pc_under_pos = 0usize;
    let mut pos_posts_hit = 0usize;
    let mut c_under_other = 0usize;
    let mut pc_under_other = 0usize;
    let mut other_posts_hit = 0usize;
    for post in corpus.posts() {
        posts += 1;
        let post_positive = positive.contains(&post.id);
        if post_positive {
            pos_posts += 1;
        }
        let mut hits = 0usize;
        let mut count = 0usize;
        for c in corpus.comments() {
            if c.parent_id.as_deref() == Some(post.id.as_str()) {
                count += 1;
                if positive.contains(&c.id) {
                    hits += 1;
                }
            }
        }
        if post_positive {
            c_under_pos += count;
            pc_under_pos += hits;
            if hits > 0 {
                pos_posts_hit += 1;
            }
        } else {
            c_under_other += count;
            pc_under_other += hits;
            if hits > 0 {
                other_posts_hit += 1;
            }
        }
    }

    assert_eq!(row.posts, posts);
    assert_eq!(
        row.positive_post_share,
        Some(pos_posts as f64 / posts as f64)
    );
    assert_eq!(
        row.positive_comment_share_under_positive,
        Some(pc_under_pos as f64 / c_under_pos as f64)
    );
    assert_eq!(
        row.at_least_one_under_positive,
        Some(pos_posts_hit as f64 / pos_posts as f64)
    );
    assert_eq!(
        row.positive_comment_share_under_other,
        Some(pc_under_other as f64 / c_under_other as f64)
    );
    assert_eq!(
        row.at_least_one_under_other,
        Some(other_posts_hit as f64 / (posts - pos_posts) as f64)
    );
}

/// With full keyword coverage the unlabeled set contains no hidden
/// positives, so the naive baseline IS a fully supervised model.
#[test]
fn naive_with_clean_unlabeled_equals_supervised() {
    let cfg = SimConfig {
        n_posts: 500,
        comments_per_post_mean: 6.0,
        keyword_coverage: 1.0,
        keyword_bias: 0.0,
        rng_seed: 23,
        ..SimConfig::default()
    };
    let (corpus, truth) = simgen::generate(&cfg).unwrap();
    let table = simgen::embedding_table(&cfg).unwrap();
    let split = split_pu(&corpus, &politics_seed()).unwrap();

    // U really is free of positives.
    assert!(split
        .unlabeled
        .iter()
        .all(|id| truth.labels[id.as_str()] == Label::NonPolitical));

    let embeddings = embed_corpus(&corpus, &table);
    let ids_of = |set: &BTreeSet<String>| -> Vec<Vec<f64>> {
        set.iter().map(|id| embeddings[id].vector.clone()).collect()
    };
    let supervised_pos: Vec<Vec<f64>> = {
        let pos_ids: BTreeSet<String> = truth
            .labels
            .iter()
            .filter(|(_, l)| **l == Label::Political)
            .map(|(id, _)| id.clone())
            .collect();
        ids_of(&pos_ids)
    };
    let supervised_neg: Vec<Vec<f64>> = {
        let neg_ids: BTreeSet<String> = truth
            .labels
            .iter()
            .filter(|(_, l)| **l == Label::NonPolitical)
            .map(|(id, _)| id.clone())
            .collect();
        ids_of(&neg_ids)
    };

    let mut cfg_gbdt = GbdtConfig::with_seed(9);
    cfg_gbdt.tree_count = 60;
    cfg_gbdt.min_samples_leaf = 40;
    let naive = naive_negative_train(&ids_of(&split.positive), &ids_of(&split.unlabeled), &cfg_gbdt)
        .unwrap();
    let supervised = train_gbdt(&supervised_pos, &supervised_neg, &cfg_gbdt).unwrap();

    let f1 = |model: &politishift::pulearn::GbdtModel| -> f64 {
        let mut tp = 0;
        let mut fp = 0;
        let mut fn_ = 0;
        for doc in corpus.documents() {
            let p = model.predict(&embeddings[&doc.id].vector).unwrap();
            let predicted = p >= 0.5;
            let actual = truth.labels[&doc.id] == Label::Political;
            match (predicted, actual) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                _ => {}
            }
        }
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    };
    let diff = (f1(&naive) - f1(&supervised)).abs();
    assert!(diff <= 0.01, "naive vs supervised F1 differ by {diff}");
}

/// Random search over a sane space beats (or matches within a point) the
/// default configuration on held-out data.
#[test]
fn random_search_competes_with_the_default() {
    let cfg = SimConfig {
        n_posts: 260,
        comments_per_post_mean: 5.0,
        rng_seed: 24,
        ..SimConfig::default()
    };
    let (corpus, truth) = simgen::generate(&cfg).unwrap();
    let table = simgen::embedding_table(&cfg).unwrap();
    let embeddings = embed_corpus(&corpus, &table);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for doc in corpus.documents() {
        let row = embeddings[&doc.id].vector.clone();
        if truth.labels[&doc.id] == Label::Political {
            pos.push(row);
        } else {
            neg.push(row);
        }
    }

    let space = GbdtSearchSpace {
        tree_count: (30, 80),
        max_depth: (3, 6),
        learning_rate: (0.05, 0.3),
        row_subsample: (0.7, 1.0),
        column_subsample: (0.7, 1.0),
        min_samples_leaf: (10, 80),
    };
    let (best_cfg, best_f1) = random_search(&space, 10, 0.25, 2024, &pos, &neg).unwrap();
    assert!(space.tree_count.0 <= best_cfg.tree_count && best_cfg.tree_count <= space.tree_count.1);

    // Default config evaluated on the same split for comparison.
    let default_space = GbdtSearchSpace {
        tree_count: (200, 200),
        max_depth: (6, 6),
        learning_rate: (0.1, 0.1),
        row_subsample: (0.8, 0.8),
        column_subsample: (0.8, 0.8),
        min_samples_leaf: (10, 10),
    };
    let (_, default_f1) = random_search(&default_space, 1, 0.25, 2024, &pos, &neg).unwrap();
    assert!(
        best_f1 >= default_f1 - 0.01,
        "search best {best_f1} far below default {default_f1}"
    );
}

/// Determinism of the naive pipeline end to end (fixed seeds).
#[test]
fn naive_pipeline_is_deterministic() {
    let cfg = SimConfig {
        n_posts: 200,
        comments_per_post_mean: 4.0,
        rng_seed: 25,
        ..SimConfig::default()
    };
    let (corpus, _) = simgen::generate(&cfg).unwrap();
    let table = simgen::embedding_table(&cfg).unwrap();
    let mut gcfg = GbdtConfig::with_seed(5);
    gcfg.tree_count = 30;
    let a = run_naive(&corpus, &politics_seed(), &table, &gcfg, 0.5).unwrap();
    let b = run_naive(&corpus, &politics_seed(), &table, &gcfg, 0.5).unwrap();
    assert_eq!(a.labels, b.labels);
    assert_eq!(a.probabilities, b.probabilities);
}
