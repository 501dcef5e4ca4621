//! Synthetic threaded corpora with ground-truth labels.
//!
//! Documents are bags of tokens drawn from three vocabulary pools (political,
//! general, shared). Political and non-political documents each come in two
//! mixtures (hardcore/soft, clear/ambiguous) so that class overlap — and with
//! it attainable classifier quality — is tunable. Seed keywords are injected
//! only into political documents, which pins the keyword baseline's precision
//! at 1 on synthetic gold labels.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DocKind, Document, Platform};
use crate::error::{Error, Result};
use crate::textfeat::{tokenize, EmbeddingTable};
use crate::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSpec {
    pub name: String,
    pub weight: f64,
    /// Per-comment probability of a political comment under this topic's
    /// posts, before the regime multiplier.
    pub shift_rate: f64,
}

impl TopicSpec {
    pub fn new(name: &str, weight: f64, shift_rate: f64) -> Self {
        TopicSpec {
            name: name.to_string(),
            weight,
            shift_rate,
        }
    }
}

/// A date range (`[start, end)` epoch seconds) scaling all topic shift rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub start: i64,
    pub end: i64,
    pub shift_multiplier: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabSpec {
    pub political: usize,
    pub general: usize,
    pub shared: usize,
}

/// Document composition model. Every document draws a class-token rate from
/// a uniform range: political documents draw a political-token *intensity*
/// (hardcore or body), non-political ones a general-token *negativity*
/// (clear or ambiguous). Of the remaining probability mass, `cross_rate`
/// goes to the opposite class pool and the rest to the shared pool, so low
/// intensities and low negativities genuinely overlap. Keyword injection
/// concentrates on hardcore documents when `keyword_bias > 0`, making the
/// labeled sample easier than the hidden positives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    /// Share of political documents drawn from the hardcore intensity range.
    pub hardcore_fraction: f64,
    pub hardcore_intensity: (f64, f64),
    pub body_intensity: (f64, f64),
    /// Share of non-political documents drawn from the ambiguous range.
    pub ambiguous_fraction: f64,
    pub ambiguous_negativity: (f64, f64),
    pub clear_negativity: (f64, f64),
    /// Fraction of the non-class probability mass sent to the opposite pool.
    pub cross_rate: f64,
    /// Share of the political vocabulary reserved for election-specific
    /// tokens, which hardcore documents favor. Gives the keyword-dense
    /// subpopulation its own vocabulary cluster, the way election talk
    /// does in real corpora.
    pub election_vocab_fraction: f64,
    /// Probability a hardcore document's political token comes from the
    /// election sub-vocabulary.
    pub hardcore_election_rate: f64,
    /// Same for body documents (and political tokens in non-political text).
    pub body_election_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub dimension: usize,
    /// Distance between the political and general pool centers.
    pub class_separation: f64,
    /// Expected norm of each token's own offset from its pool center.
    pub token_noise: f64,
    /// Offset of the election sub-vocabulary's center from the political
    /// pool center, along a second random direction.
    pub election_offset: f64,
    /// Whether seed keywords get vectors of their own. With only a handful
    /// of keyword types, fixed vectors would make keyword presence — and
    /// hence the labeling itself — recoverable from mean-pooled features,
    /// which real embeddings over long documents do not allow. Off by
    /// default: keywords stay out-of-vocabulary for step-2 features.
    #[serde(default)]
    pub include_keywords: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub n_posts: usize,
    pub comments_per_post_mean: f64,
    pub political_post_rate: f64,
    /// Probability a comment under a political post is itself political.
    pub political_comment_rate_on_political: f64,
    pub topics: Vec<TopicSpec>,
    pub regimes: Vec<RegimeSpec>,
    /// Probability a political document carries a seed keyword.
    pub keyword_coverage: f64,
    /// How strongly keywords concentrate on hardcore documents (0 = uniform).
    pub keyword_bias: f64,
    pub seed_keywords: Vec<String>,
    pub vocab: VocabSpec,
    pub mixture: MixtureSpec,
    pub embedding: EmbeddingSpec,
    /// Inclusive token-count range per document.
    pub token_count_range: (usize, usize),
    pub rng_seed: u64,
}

// 2022-08-01 and 2022-11-28 UTC.
const DEFAULT_START: i64 = 1_659_312_000;
const DEFAULT_END: i64 = 1_669_593_600;

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_posts: 1000,
            comments_per_post_mean: 8.0,
            political_post_rate: 0.35,
            political_comment_rate_on_political: 0.70,
            topics: vec![
                TopicSpec::new("economy", 0.15, 0.54),
                TopicSpec::new("fuel", 0.10, 0.49),
                TopicSpec::new("crime", 0.15, 0.49),
                TopicSpec::new("drugs", 0.10, 0.45),
                TopicSpec::new("sports", 0.20, 0.05),
                TopicSpec::new("pets", 0.10, 0.19),
                TopicSpec::new("food", 0.10, 0.12),
                TopicSpec::new("celebrities", 0.10, 0.10),
            ],
            regimes: vec![RegimeSpec {
                start: DEFAULT_START,
                end: DEFAULT_END,
                shift_multiplier: 1.0,
            }],
            keyword_coverage: 0.40,
            keyword_bias: 0.50,
            seed_keywords: vec![
                "lula".to_string(),
                "bolsonaro".to_string(),
                "#eleicoes2022".to_string(),
            ],
            vocab: VocabSpec {
                political: 300,
                general: 500,
                shared: 400,
            },
            mixture: MixtureSpec {
                hardcore_fraction: 0.25,
                hardcore_intensity: (0.85, 0.97),
                body_intensity: (0.30, 0.70),
                ambiguous_fraction: 0.30,
                ambiguous_negativity: (0.25, 0.50),
                clear_negativity: (0.60, 0.95),
                cross_rate: 0.25,
                election_vocab_fraction: 0.30,
                hardcore_election_rate: 0.80,
                body_election_rate: 0.10,
            },
            embedding: EmbeddingSpec {
                dimension: 24,
                class_separation: 3.0,
                token_noise: 1.0,
                election_offset: 2.0,
                include_keywords: false,
            },
            token_count_range: (30, 60),
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    /// Keyword probability for hardcore political documents.
    pub fn hardcore_keyword_rate(&self) -> f64 {
        self.keyword_coverage + self.keyword_bias * (1.0 - self.keyword_coverage)
    }

    /// Keyword probability for body political documents, chosen so the
    /// mixture meets `keyword_coverage` in expectation.
    pub fn body_keyword_rate(&self) -> f64 {
        let h = self.mixture.hardcore_fraction;
        if h >= 1.0 {
            self.keyword_coverage
        } else {
            (self.keyword_coverage - h * self.hardcore_keyword_rate()) / (1.0 - h)
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::BadSimConfig(msg));
        if self.n_posts == 0 {
            return bad("n_posts must be at least 1".into());
        }
        if !self.comments_per_post_mean.is_finite() || self.comments_per_post_mean < 0.0 {
            return bad("comments_per_post_mean must be a finite non-negative number".into());
        }
        for (name, v) in [
            ("political_post_rate", self.political_post_rate),
            (
                "political_comment_rate_on_political",
                self.political_comment_rate_on_political,
            ),
            ("keyword_coverage", self.keyword_coverage),
            ("keyword_bias", self.keyword_bias),
            ("hardcore_fraction", self.mixture.hardcore_fraction),
            ("ambiguous_fraction", self.mixture.ambiguous_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if self.political_post_rate < 1.0 && self.topics.is_empty() {
            return bad("non-political posts need at least one topic".into());
        }
        for t in &self.topics {
            if t.weight.is_nan() || t.weight <= 0.0 {
                return bad(format!("topic `{}` weight must be positive", t.name));
            }
            if !(0.0..=1.0).contains(&t.shift_rate) {
                return bad(format!("topic `{}` shift_rate must lie in [0, 1]", t.name));
            }
        }
        if self.regimes.is_empty() {
            return bad("at least one regime is required".into());
        }
        let mut last_end = i64::MIN;
        for r in &self.regimes {
            if r.start >= r.end {
                return bad(format!("regime [{}, {}) is empty", r.start, r.end));
            }
            if r.start < last_end {
                return bad("regimes must be sorted and non-overlapping".into());
            }
            if r.shift_multiplier.is_nan() || r.shift_multiplier < 0.0 {
                return bad("regime shift_multiplier must be non-negative".into());
            }
            last_end = r.end;
        }
        let (lo, hi) = self.token_count_range;
        if lo == 0 || lo > hi {
            return bad(format!("token_count_range ({lo}, {hi}) is invalid"));
        }
        if self.vocab.political == 0 || self.vocab.general == 0 {
            return bad("political and general vocabularies must be nonempty".into());
        }
        for (name, v) in [
            ("cross_rate", self.mixture.cross_rate),
            ("election_vocab_fraction", self.mixture.election_vocab_fraction),
            ("hardcore_election_rate", self.mixture.hardcore_election_rate),
            ("body_election_rate", self.mixture.body_election_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        let n_election = self.election_vocab_size();
        if (self.mixture.hardcore_election_rate > 0.0 || self.mixture.body_election_rate > 0.0)
            && n_election == 0
        {
            return bad("election token rates are positive but the election sub-vocabulary is empty".into());
        }
        if n_election >= self.vocab.political
            && (self.mixture.hardcore_election_rate < 1.0 || self.mixture.body_election_rate < 1.0)
        {
            return bad("election sub-vocabulary swallows the whole political pool".into());
        }
        for (name, (lo, hi)) in [
            ("hardcore_intensity", self.mixture.hardcore_intensity),
            ("body_intensity", self.mixture.body_intensity),
            ("ambiguous_negativity", self.mixture.ambiguous_negativity),
            ("clear_negativity", self.mixture.clear_negativity),
        ] {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return bad(format!("{name} range ({lo}, {hi}) is invalid"));
            }
        }
        if self.vocab.shared == 0
            && (self.mixture.cross_rate < 1.0 - 1e-12
                && (self.mixture.body_intensity.0 < 1.0
                    || self.mixture.ambiguous_negativity.0 < 1.0))
        {
            return bad("token mixes use the shared pool but it is empty".into());
        }
        if self.keyword_coverage > 0.0 {
            if self.seed_keywords.is_empty() {
                return bad("keyword_coverage > 0 needs seed keywords".into());
            }
            if self.mixture.hardcore_fraction >= 1.0 && self.keyword_bias > 0.0 {
                return bad("keyword_bias needs body documents to shift coverage away from".into());
            }
            if self.body_keyword_rate() < -1e-12 {
                return bad(format!(
                    "keyword_bias {} is infeasible at coverage {}: body documents would need a negative keyword rate",
                    self.keyword_bias, self.keyword_coverage
                ));
            }
        }
        for kw in &self.seed_keywords {
            let toks = tokenize(kw);
            if toks.len() != 1 {
                return bad(format!("seed keyword `{kw}` is not a single token"));
            }
        }
        if self.embedding.dimension == 0 {
            return bad("embedding dimension must be at least 1".into());
        }
        Ok(())
    }

    /// Size of the election sub-pool: the leading slice of the political
    /// vocabulary.
    fn election_vocab_size(&self) -> usize {
        ((self.mixture.election_vocab_fraction * self.vocab.political as f64).round() as usize)
            .min(self.vocab.political)
    }

    fn vocab_names(&self) -> (Vec<String>, Vec<String>, Vec<String>) {
        let pol = (0..self.vocab.political)
            .map(|i| format!("pol{i:04}"))
            .collect();
        let gen = (0..self.vocab.general)
            .map(|i| format!("gen{i:04}"))
            .collect();
        let sha = (0..self.vocab.shared)
            .map(|i| format!("sha{i:04}"))
            .collect();
        (pol, gen, sha)
    }
}

/// Realized counts per topic (comments under non-political posts only).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TopicRealized {
    pub posts: usize,
    pub comments: usize,
    pub political_comments: usize,
}

impl TopicRealized {
    pub fn rate(&self) -> Option<f64> {
        if self.comments == 0 {
            None
        } else {
            Some(self.political_comments as f64 / self.comments as f64)
        }
    }
}

/// Realized generation statistics for oracle checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizedRates {
    pub posts: usize,
    pub political_posts: usize,
    pub documents: usize,
    pub political_documents: usize,
    pub keyword_bearing_political: usize,
    pub per_topic: BTreeMap<String, TopicRealized>,
    pub non_political_posts_with_shift: usize,
}

impl RealizedRates {
    pub fn keyword_coverage(&self) -> f64 {
        if self.political_documents == 0 {
            0.0
        } else {
            self.keyword_bearing_political as f64 / self.political_documents as f64
        }
    }

    /// Share of non-political posts with at least one political comment.
    pub fn at_least_one_shift_rate(&self) -> f64 {
        let non_political = self.posts - self.political_posts;
        if non_political == 0 {
            0.0
        } else {
            self.non_political_posts_with_shift as f64 / non_political as f64
        }
    }
}

/// True labels and generating topics for every generated document.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub labels: BTreeMap<String, Label>,
    /// Generating topic: the post's own topic, inherited by its comments.
    pub topics: BTreeMap<String, Option<String>>,
    pub realized: RealizedRates,
}

struct Pools {
    political: Vec<String>,
    general: Vec<String>,
    shared: Vec<String>,
}

struct Generator<'a> {
    cfg: &'a SimConfig,
    pools: Pools,
    n_election: usize,
    rng: ChaCha8Rng,
    hardcore_kw: f64,
    body_kw: f64,
}

fn pick<'p>(rng: &mut ChaCha8Rng, pool: &'p [String]) -> &'p str {
    &pool[rng.gen_range(0..pool.len())]
}

fn uniform_in(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo >= hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

impl Generator<'_> {
    /// Draws from the political pool, preferring the election sub-pool with
    /// probability `election_rate`.
    fn pick_political(&mut self, election_rate: f64) -> String {
        let pool = &self.pools.political;
        let slice = if self.n_election > 0
            && self.n_election < pool.len()
            && self.rng.gen_bool(election_rate)
        {
            &pool[..self.n_election]
        } else if self.n_election >= pool.len() {
            &pool[..]
        } else {
            &pool[self.n_election..]
        };
        slice[self.rng.gen_range(0..slice.len())].clone()
    }

    /// Samples a document's text. Returns the text and whether a keyword was
    /// injected (political documents only).
    fn doc_text(&mut self, political: bool) -> (String, bool) {
        let (lo, hi) = self.cfg.token_count_range;
        let n = self.rng.gen_range(lo..=hi);
        let mixture = &self.cfg.mixture;
        // Class-pool rate for this document, the keyword rate of its subtype
        // (political documents only) and its election sub-pool preference.
        let (class_rate, kw_rate, election_rate) = if political {
            if self.rng.gen_bool(mixture.hardcore_fraction) {
                (
                    uniform_in(&mut self.rng, mixture.hardcore_intensity),
                    self.hardcore_kw,
                    mixture.hardcore_election_rate,
                )
            } else {
                (
                    uniform_in(&mut self.rng, mixture.body_intensity),
                    self.body_kw,
                    mixture.body_election_rate,
                )
            }
        } else if self.rng.gen_bool(mixture.ambiguous_fraction) {
            (
                uniform_in(&mut self.rng, mixture.ambiguous_negativity),
                0.0,
                mixture.body_election_rate,
            )
        } else {
            (
                uniform_in(&mut self.rng, mixture.clear_negativity),
                0.0,
                mixture.body_election_rate,
            )
        };
        let cross = mixture.cross_rate * (1.0 - class_rate);

        let mut tokens: Vec<String> = (0..n)
            .map(|_| {
                let r: f64 = self.rng.gen();
                if r < class_rate {
                    if political {
                        self.pick_political(election_rate)
                    } else {
                        pick(&mut self.rng, &self.pools.general).to_string()
                    }
                } else if r < class_rate + cross {
                    if political {
                        pick(&mut self.rng, &self.pools.general).to_string()
                    } else {
                        self.pick_political(election_rate)
                    }
                } else {
                    pick(&mut self.rng, &self.pools.shared).to_string()
                }
            })
            .collect();

        let mut keyword_bearing = false;
        if political && kw_rate > 0.0 && self.rng.gen_bool(kw_rate.min(1.0)) {
            let slot = self.rng.gen_range(0..tokens.len());
            let kw = self.cfg.seed_keywords
                [self.rng.gen_range(0..self.cfg.seed_keywords.len())]
            .clone();
            tokens[slot] = kw;
            keyword_bearing = true;
        }
        (tokens.join(" "), keyword_bearing)
    }

    fn pick_topic(&mut self) -> usize {
        let total: f64 = self.cfg.topics.iter().map(|t| t.weight).sum();
        let mut roll = self.rng.gen_range(0.0..total);
        for (i, t) in self.cfg.topics.iter().enumerate() {
            if roll < t.weight {
                return i;
            }
            roll -= t.weight;
        }
        self.cfg.topics.len() - 1
    }

    fn pick_regime_and_time(&mut self) -> (usize, i64) {
        let total: i64 = self.cfg.regimes.iter().map(|r| r.end - r.start).sum();
        let mut offset = self.rng.gen_range(0..total);
        for (i, r) in self.cfg.regimes.iter().enumerate() {
            let span = r.end - r.start;
            if offset < span {
                return (i, r.start + offset);
            }
            offset -= span;
        }
        unreachable!("offset below total span")
    }

    fn multiplier_at(&self, ts: i64) -> f64 {
        self.cfg
            .regimes
            .iter()
            .find(|r| ts >= r.start && ts < r.end)
            .map_or(1.0, |r| r.shift_multiplier)
    }
}

/// Generates a corpus and its ground truth. Same config, same bytes.
pub fn generate(cfg: &SimConfig) -> Result<(Corpus, GroundTruth)> {
    cfg.validate()?;
    let (political, general, shared) = cfg.vocab_names();
    let name_clash = cfg.seed_keywords.iter().find(|kw| {
        political.contains(kw) || general.contains(kw) || shared.contains(kw)
    });
    if let Some(kw) = name_clash {
        return Err(Error::BadSimConfig(format!(
            "seed keyword `{kw}` collides with a generated vocabulary token"
        )));
    }

    let mut gen = Generator {
        hardcore_kw: cfg.hardcore_keyword_rate(),
        body_kw: cfg.body_keyword_rate().max(0.0),
        n_election: cfg.election_vocab_size(),
        cfg,
        pools: Pools {
            political,
            general,
            shared,
        },
        rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
    };

    let poisson = if cfg.comments_per_post_mean > 0.0 {
        Some(Poisson::new(cfg.comments_per_post_mean).expect("validated mean"))
    } else {
        None
    };

    let mut documents = Vec::new();
    let mut labels = BTreeMap::new();
    let mut topics = BTreeMap::new();
    let mut per_topic: BTreeMap<String, TopicRealized> = BTreeMap::new();
    let mut political_documents = 0usize;
    let mut keyword_bearing = 0usize;
    let mut political_posts = 0usize;
    let mut posts_with_shift = 0usize;
    let mut comment_counter = 0usize;

    let author_pool = cfg.n_posts.max(10) * 4;

    for post_i in 0..cfg.n_posts {
        let (regime_i, post_ts) = gen.pick_regime_and_time();
        let regime_end = cfg.regimes[regime_i].end;
        let post_political = gen.rng.gen_bool(cfg.political_post_rate);
        let topic_i = if post_political {
            None
        } else {
            Some(gen.pick_topic())
        };
        let topic_name = topic_i.map(|i| cfg.topics[i].name.clone());

        let post_id = format!("p{post_i:06}");
        let (text, bearing) = gen.doc_text(post_political);
        if post_political {
            political_posts += 1;
            political_documents += 1;
            if bearing {
                keyword_bearing += 1;
            }
        } else {
            let entry = per_topic
                .entry(topic_name.clone().expect("non-political posts carry a topic"))
                .or_default();
            entry.posts += 1;
        }
        let author = format!("a{:06}", gen.rng.gen_range(0..author_pool));
        documents.push(Document {
            id: post_id.clone(),
            platform: Platform::Synthetic,
            kind: DocKind::Post,
            parent_id: None,
            text,
            timestamp: post_ts,
            author_id: author,
            topic: topic_name.clone(),
        });
        labels.insert(
            post_id.clone(),
            if post_political {
                Label::Political
            } else {
                Label::NonPolitical
            },
        );
        topics.insert(post_id.clone(), topic_name.clone());

        let n_comments = match &poisson {
            Some(p) => p.sample(&mut gen.rng) as usize,
            None => 0,
        };
        let mut any_shift = false;
        for _ in 0..n_comments {
            let ts = gen.rng.gen_range(post_ts..regime_end);
            let comment_political = if post_political {
                gen.rng.gen_bool(cfg.political_comment_rate_on_political)
            } else {
                let base = cfg.topics[topic_i.expect("topic set")].shift_rate;
                let rate = (base * gen.multiplier_at(ts)).clamp(0.0, 1.0);
                gen.rng.gen_bool(rate)
            };
            let (text, bearing) = gen.doc_text(comment_political);
            if comment_political {
                political_documents += 1;
                if bearing {
                    keyword_bearing += 1;
                }
            }
            if !post_political {
                let entry = per_topic
                    .entry(topic_name.clone().expect("topic set"))
                    .or_default();
                entry.comments += 1;
                if comment_political {
                    entry.political_comments += 1;
                    any_shift = true;
                }
            }
            let comment_id = format!("c{comment_counter:08}");
            comment_counter += 1;
            let author = format!("a{:06}", gen.rng.gen_range(0..author_pool));
            documents.push(Document {
                id: comment_id.clone(),
                platform: Platform::Synthetic,
                kind: DocKind::Comment,
                parent_id: Some(post_id.clone()),
                text,
                timestamp: ts,
                author_id: author,
                topic: None,
            });
            labels.insert(
                comment_id.clone(),
                if comment_political {
                    Label::Political
                } else {
                    Label::NonPolitical
                },
            );
            topics.insert(comment_id, topic_name.clone());
        }
        if !post_political && any_shift {
            posts_with_shift += 1;
        }
    }

    let realized = RealizedRates {
        posts: cfg.n_posts,
        political_posts,
        documents: documents.len(),
        political_documents,
        keyword_bearing_political: keyword_bearing,
        per_topic,
        non_political_posts_with_shift: posts_with_shift,
    };

    let corpus = Corpus::from_documents(documents)?;
    Ok((
        corpus,
        GroundTruth {
            labels,
            topics,
            realized,
        },
    ))
}

/// Deterministic synthetic word vectors for the generator's vocabulary, in a
/// stable order suitable for writing to the embedding text format. Political
/// tokens (and the seed keywords) cluster around one center, general tokens
/// around the opposite one, shared tokens around the origin.
pub fn embedding_rows(cfg: &SimConfig) -> Result<Vec<(String, Vec<f64>)>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(1);
    let d = cfg.embedding.dimension;

    let unit = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        v.iter_mut().for_each(|x| *x /= norm);
        v
    };
    let class_axis = unit(&mut rng);
    let election_axis = unit(&mut rng);

    let noise_scale = cfg.embedding.token_noise / (d as f64).sqrt();
    let half_sep = cfg.embedding.class_separation / 2.0;
    let token_vector = |rng: &mut ChaCha8Rng, center: f64, election: f64| -> Vec<f64> {
        class_axis
            .iter()
            .zip(&election_axis)
            .map(|(&u, &w)| {
                center * half_sep * u
                    + election * cfg.embedding.election_offset * w
                    + noise_scale * rng.sample::<f64, _>(StandardNormal)
            })
            .collect()
    };

    let n_election = cfg.election_vocab_size();
    let (political, general, shared) = cfg.vocab_names();
    let mut rows = Vec::with_capacity(political.len() + general.len() + shared.len());
    for (i, token) in political.into_iter().enumerate() {
        let election = if i < n_election { 1.0 } else { 0.0 };
        let v = token_vector(&mut rng, 1.0, election);
        rows.push((token, v));
    }
    for token in general {
        let v = token_vector(&mut rng, -1.0, 0.0);
        rows.push((token, v));
    }
    for token in shared {
        let v = token_vector(&mut rng, 0.0, 0.0);
        rows.push((token, v));
    }
    if cfg.embedding.include_keywords {
        for kw in &cfg.seed_keywords {
            let folded = tokenize(kw).pop().expect("validated single token");
            let v = token_vector(&mut rng, 1.0, 1.0);
            rows.push((folded, v));
        }
    }
    Ok(rows)
}

/// The same vectors as [`embedding_rows`], as a lookup table.
pub fn embedding_table(cfg: &SimConfig) -> Result<EmbeddingTable> {
    let rows = embedding_rows(cfg)?;
    let dim = cfg.embedding.dimension;
    EmbeddingTable::new(rows.into_iter().collect(), dim)
}
