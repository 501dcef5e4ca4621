//! Gradient-boosted regression trees with binary logistic loss.
//!
//! Trees use exact greedy axis-aligned splits with Newton leaf values
//! (`-G / (H + lambda)`) and the split gain
//! `0.5 * (GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l))`.
//! Row and column subsampling are driven by the config seed; training is
//! deterministic for a fixed seed regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GBDT_FORMAT_VERSION: u32 = 1;

/// Row-count threshold below which per-node split search stays sequential.
const PARALLEL_SCAN_CELLS: usize = 16384;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtConfig {
    pub tree_count: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub row_subsample: f64,
    pub column_subsample: f64,
    pub min_samples_leaf: usize,
    pub lambda: f64,
    pub rng_seed: u64,
}

impl GbdtConfig {
    pub fn with_seed(rng_seed: u64) -> Self {
        GbdtConfig {
            tree_count: 200,
            max_depth: 6,
            learning_rate: 0.1,
            row_subsample: 0.8,
            column_subsample: 0.8,
            min_samples_leaf: 10,
            lambda: 1.0,
            rng_seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BadConfig(msg.to_string()));
        if self.tree_count == 0 {
            return bad("tree_count must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must lie in (0, 1]");
        }
        for (name, v) in [
            ("row_subsample", self.row_subsample),
            ("column_subsample", self.column_subsample),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return bad(&format!("{name} must lie in (0, 1]"));
            }
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be at least 1");
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return bad("lambda must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn value(&self, x: &[f64]) -> f64 {
        let mut i = 0usize;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[*feature] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }
}

/// A trained boosted-tree binary classifier. Prediction is
/// `sigmoid(base_score + sum(learning_rate * tree(x)))`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbdtModel {
    version: u32,
    pub config: GbdtConfig,
    pub base_score: f64,
    dimension: usize,
    trees: Vec<Tree>,
    /// Mean training logloss after each boosting round.
    pub train_loss: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl GbdtModel {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    fn raw_score(&self, x: &[f64]) -> f64 {
        let mut score = self.base_score;
        for tree in &self.trees {
            score += self.config.learning_rate * tree.value(x);
        }
        score
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(sigmoid(self.raw_score(x)))
    }

    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        if let Some(bad) = xs.iter().find(|x| x.len() != self.dimension) {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: bad.len(),
            });
        }
        if xs.len() >= 256 {
            Ok(xs
                .par_iter()
                .map(|x| sigmoid(self.raw_score(x)))
                .collect())
        } else {
            Ok(xs.iter().map(|x| sigmoid(self.raw_score(x))).collect())
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: GbdtModel =
            serde_json::from_str(s).map_err(|e| Error::BadModelFile(e.to_string()))?;
        if model.version != GBDT_FORMAT_VERSION {
            return Err(Error::BadModelFile(format!(
                "unsupported gbdt format version {}",
                model.version
            )));
        }
        Ok(model)
    }
}

struct SplitCandidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

struct TreeBuilder<'a> {
    rows: &'a [&'a [f64]],
    grad: &'a [f64],
    hess: &'a [f64],
    cols: &'a [usize],
    max_depth: usize,
    min_samples_leaf: usize,
    lambda: f64,
    nodes: Vec<Node>,
}

impl TreeBuilder<'_> {
    fn leaf(&mut self, g: f64, h: f64) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node::Leaf {
            value: -g / (h + self.lambda),
        });
        id
    }

    fn build(&mut self, idx: &mut [usize], depth: usize) -> u32 {
        let g: f64 = idx.iter().map(|&i| self.grad[i]).sum();
        let h: f64 = idx.iter().map(|&i| self.hess[i]).sum();

        if depth >= self.max_depth || idx.len() < 2 * self.min_samples_leaf {
            return self.leaf(g, h);
        }
        let Some(split) = self.best_split(idx, g, h) else {
            return self.leaf(g, h);
        };

        let mut left_rows = Vec::with_capacity(idx.len());
        let mut right_rows = Vec::new();
        for &i in idx.iter() {
            if self.rows[i][split.feature] <= split.threshold {
                left_rows.push(i);
            } else {
                right_rows.push(i);
            }
        }
        if left_rows.is_empty() || right_rows.is_empty() {
            return self.leaf(g, h);
        }
        let mid = left_rows.len();
        idx[..mid].copy_from_slice(&left_rows);
        idx[mid..].copy_from_slice(&right_rows);

        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0 });
        let (left_slice, right_slice) = idx.split_at_mut(mid);
        let left = self.build(left_slice, depth + 1);
        let right = self.build(right_slice, depth + 1);
        self.nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        slot as u32
    }

    fn best_split(&self, idx: &[usize], total_g: f64, total_h: f64) -> Option<SplitCandidate> {
        let scan = |&col: &usize| self.scan_column(idx, col, total_g, total_h);
        // Candidates are collected in column order and reduced sequentially,
        // so the result is identical for any thread count.
        let candidates: Vec<Option<SplitCandidate>> =
            if idx.len() * self.cols.len() >= PARALLEL_SCAN_CELLS {
                self.cols.par_iter().map(scan).collect()
            } else {
                self.cols.iter().map(scan).collect()
            };

        let mut best: Option<SplitCandidate> = None;
        for cand in candidates.into_iter().flatten() {
            if best.as_ref().is_none_or(|b| cand.gain > b.gain) {
                best = Some(cand);
            }
        }
        best
    }

    fn scan_column(
        &self,
        idx: &[usize],
        col: usize,
        total_g: f64,
        total_h: f64,
    ) -> Option<SplitCandidate> {
        let mut vals: Vec<(f64, f64, f64)> = idx
            .iter()
            .map(|&i| (self.rows[i][col], self.grad[i], self.hess[i]))
            .collect();
        vals.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let parent = total_g * total_g / (total_h + self.lambda);
        let mut gl = 0.0;
        let mut hl = 0.0;
        let mut best: Option<SplitCandidate> = None;
        for k in 0..vals.len() - 1 {
            gl += vals[k].1;
            hl += vals[k].2;
            let (a, b) = (vals[k].0, vals[k + 1].0);
            if a == b {
                continue;
            }
            let left_n = k + 1;
            if left_n < self.min_samples_leaf || vals.len() - left_n < self.min_samples_leaf {
                continue;
            }
            let gr = total_g - gl;
            let hr = total_h - hl;
            let gain = 0.5
                * (gl * gl / (hl + self.lambda) + gr * gr / (hr + self.lambda) - parent);
            if gain > 1e-12 && best.as_ref().is_none_or(|c| gain > c.gain) {
                let mut threshold = 0.5 * (a + b);
                if !(threshold >= a && threshold < b) {
                    threshold = a;
                }
                best = Some(SplitCandidate {
                    feature: col,
                    threshold,
                    gain,
                });
            }
        }
        best
    }
}

fn sample_sorted(rng: &mut ChaCha8Rng, n: usize, rate: f64) -> Vec<usize> {
    let k = ((rate * n as f64).round() as usize).clamp(1, n);
    if k == n {
        return (0..n).collect();
    }
    let mut picked = rand::seq::index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    picked
}

fn mean_logloss(margins: &[f64], labels: &[f64]) -> f64 {
    let total: f64 = margins
        .iter()
        .zip(labels)
        .map(|(&m, &y)| {
            let p = sigmoid(m).clamp(1e-15, 1.0 - 1e-15);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    total / margins.len() as f64
}

/// Trains the boosted classifier on positive and negative feature rows.
/// `base_score` is the log-odds of the positive class frequency.
pub fn train_gbdt(pos: &[Vec<f64>], neg: &[Vec<f64>], cfg: &GbdtConfig) -> Result<GbdtModel> {
    cfg.validate()?;
    if pos.is_empty() {
        return Err(Error::EmptyClass { class: "positive" });
    }
    if neg.is_empty() {
        return Err(Error::EmptyClass { class: "negative" });
    }
    let dimension = pos[0].len();
    for row in pos.iter().chain(neg.iter()) {
        if row.len() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                got: row.len(),
            });
        }
    }

    let rows: Vec<&[f64]> = pos
        .iter()
        .chain(neg.iter())
        .map(|r| r.as_slice())
        .collect();
    let labels: Vec<f64> = std::iter::repeat_n(1.0, pos.len())
        .chain(std::iter::repeat_n(0.0, neg.len()))
        .collect();
    let n = rows.len();

    let base_score = (pos.len() as f64 / neg.len() as f64).ln();
    let mut margins = vec![base_score; n];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut trees = Vec::with_capacity(cfg.tree_count);
    let mut train_loss = Vec::with_capacity(cfg.tree_count);

    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    for _ in 0..cfg.tree_count {
        for i in 0..n {
            let p = sigmoid(margins[i]);
            grad[i] = p - labels[i];
            hess[i] = (p * (1.0 - p)).max(1e-16);
        }
        let mut row_idx = sample_sorted(&mut rng, n, cfg.row_subsample);
        let cols = sample_sorted(&mut rng, dimension, cfg.column_subsample);

        let mut builder = TreeBuilder {
            rows: &rows,
            grad: &grad,
            hess: &hess,
            cols: &cols,
            max_depth: cfg.max_depth,
            min_samples_leaf: cfg.min_samples_leaf,
            lambda: cfg.lambda,
            nodes: Vec::new(),
        };
        let root = builder.build(&mut row_idx, 0);
        debug_assert_eq!(root, 0);
        let tree = Tree {
            nodes: builder.nodes,
        };

        for i in 0..n {
            margins[i] += cfg.learning_rate * tree.value(rows[i]);
        }
        train_loss.push(mean_logloss(&margins, &labels));
        trees.push(tree);
    }

    Ok(GbdtModel {
        version: GBDT_FORMAT_VERSION,
        config: cfg.clone(),
        base_score,
        dimension,
        trees,
        train_loss,
    })
}
