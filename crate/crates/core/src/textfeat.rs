//! Text features: tokenization, TF-IDF vectors for the step-1 classifier and
//! averaged word-embedding vectors for the step-2 classifier.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

pub type TokenList = Vec<String>;

/// Lowercases, folds diacritics to base letters and splits on anything that
/// is not alphanumeric. A `#` or `@` immediately followed by an alphanumeric
/// character starts a token and is kept as its prefix, so hashtags and user
/// mentions survive ("#Eleições2022" becomes "#eleicoes2022").
pub fn tokenize(text: &str) -> TokenList {
    let folded: String = text
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect();

    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut chars = folded.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_alphanumeric() {
            current.push(c);
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            if (c == '#' || c == '@') && chars.peek().is_some_and(|n| n.is_alphanumeric()) {
                current.push(c);
            }
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Sparse feature vector: strictly increasing column indices, nonzero weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub dimension: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn zero(dimension: usize) -> Self {
        SparseVector {
            dimension,
            entries: Vec::new(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, w)| w * w)
            .sum::<f64>()
            .sqrt()
    }
}

pub const DEFAULT_MIN_DF: usize = 2;

const TFIDF_FORMAT_VERSION: u32 = 1;

/// Fitted TF-IDF vocabulary and inverse document frequencies.
///
/// `idf[t] = ln((1 + n_docs) / (1 + df[t])) + 1`, which is always >= 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TfidfModel {
    version: u32,
    vocabulary: BTreeMap<String, usize>,
    idf: Vec<f64>,
    pub document_count: usize,
    pub min_df: usize,
}

impl TfidfModel {
    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn column(&self, token: &str) -> Option<usize> {
        self.vocabulary.get(token).copied()
    }

    pub fn idf(&self, column: usize) -> f64 {
        self.idf[column]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: TfidfModel =
            serde_json::from_str(s).map_err(|e| Error::BadModelFile(e.to_string()))?;
        if model.version != TFIDF_FORMAT_VERSION {
            return Err(Error::BadModelFile(format!(
                "unsupported tfidf format version {}",
                model.version
            )));
        }
        Ok(model)
    }
}

/// Builds the vocabulary (tokens appearing in at least `min_df` documents,
/// columns in lexicographic order) and the IDF table.
pub fn fit_tfidf(docs: &[TokenList], min_df: usize) -> Result<TfidfModel> {
    if docs.is_empty() {
        return Err(Error::NoTrainingData);
    }

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (doc_idx, doc) in docs.iter().enumerate() {
        for token in doc {
            if seen.insert(token.as_str(), doc_idx) != Some(doc_idx) {
                *df.entry(token.as_str()).or_insert(0) += 1;
            }
        }
    }

    let n = docs.len();
    let mut vocabulary = BTreeMap::new();
    let mut idf = Vec::new();
    for (token, count) in df {
        if count >= min_df {
            vocabulary.insert(token.to_string(), idf.len());
            idf.push(((1 + n) as f64 / (1 + count) as f64).ln() + 1.0);
        }
    }

    if vocabulary.is_empty() {
        log::warn!(
            "tfidf vocabulary is empty: no token reaches min_df = {min_df} over {n} documents"
        );
    }

    Ok(TfidfModel {
        version: TFIDF_FORMAT_VERSION,
        vocabulary,
        idf,
        document_count: n,
        min_df,
    })
}

/// Raw term counts over the fitted vocabulary. Out-of-vocabulary tokens are
/// ignored; an all-OOV document yields the zero vector.
pub fn transform_counts(model: &TfidfModel, doc: &[String]) -> SparseVector {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for token in doc {
        if let Some(col) = model.column(token) {
            *counts.entry(col).or_insert(0.0) += 1.0;
        }
    }
    SparseVector {
        dimension: model.vocab_size(),
        entries: counts.into_iter().collect(),
    }
}

/// TF-IDF weights (`count * idf`), L2-normalized. An all-OOV document yields
/// the zero vector.
pub fn transform_tfidf(model: &TfidfModel, doc: &[String]) -> SparseVector {
    let mut v = transform_counts(model, doc);
    for (col, w) in v.entries.iter_mut() {
        *w *= model.idf[*col];
    }
    let norm = v.l2_norm();
    if norm > 0.0 {
        for (_, w) in v.entries.iter_mut() {
            *w /= norm;
        }
    }
    v
}

/// Pre-trained word vectors loaded from a text file.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    vectors: HashMap<String, Vec<f64>>,
    pub dimension: usize,
}

impl EmbeddingTable {
    pub fn new(vectors: HashMap<String, Vec<f64>>, dimension: usize) -> Result<Self> {
        for (token, v) in &vectors {
            if v.len() != dimension {
                return Err(Error::EmbeddingFile {
                    path: String::new(),
                    reason: format!("token `{token}` has dimension {}", v.len()),
                });
            }
        }
        Ok(EmbeddingTable { vectors, dimension })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(|v| v.as_slice())
    }
}

/// Loads a word-embedding table from the text format `token v1 v2 ... vd`,
/// one token per line, with an optional leading `count dim` header line.
/// Duplicate tokens keep the last occurrence.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::EmbeddingFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let reader = std::io::BufReader::new(file);

    let mut vectors: HashMap<String, Vec<f64>> = HashMap::new();
    let mut dimension: Option<usize> = None;
    let mut duplicates = 0usize;

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        // A first line of exactly two integers is the "count dim" header.
        if line_no == 1 && fields.len() == 2 {
            if let (Ok(_), Ok(d)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                dimension = Some(d);
                continue;
            }
        }
        if fields.len() < 2 {
            return Err(Error::EmbeddingFile {
                path: path.display().to_string(),
                reason: format!("line {line_no}: expected `token v1 ... vd`"),
            });
        }
        let token = fields[0].to_string();
        let values: std::result::Result<Vec<f64>, _> =
            fields[1..].iter().map(|f| f.parse::<f64>()).collect();
        let values = values.map_err(|e| Error::EmbeddingFile {
            path: path.display().to_string(),
            reason: format!("line {line_no}: {e}"),
        })?;

        match dimension {
            None => dimension = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::EmbeddingDimension {
                    line_no,
                    expected: d,
                    got: values.len(),
                });
            }
            Some(_) => {}
        }
        if vectors.insert(token, values).is_some() {
            duplicates += 1;
        }
    }

    let dimension = dimension.ok_or_else(|| Error::EmbeddingFile {
        path: path.display().to_string(),
        reason: "file contains no vectors".to_string(),
    })?;
    if vectors.is_empty() {
        return Err(Error::EmbeddingFile {
            path: path.display().to_string(),
            reason: "file contains no vectors".to_string(),
        });
    }
    if duplicates > 0 {
        log::warn!(
            "{} duplicate token(s) in {}; kept the last occurrence of each",
            duplicates,
            path.display()
        );
    }

    Ok(EmbeddingTable { vectors, dimension })
}

/// Document embedding: mean of the vectors of in-table tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct DocEmbedding {
    pub vector: Vec<f64>,
    /// True when no token was found in the table (the vector is zero).
    pub featureless: bool,
}

/// Component-wise mean over the tokens present in the table; the zero vector
/// (flagged) when none is.
pub fn embed_doc(doc: &[String], table: &EmbeddingTable) -> DocEmbedding {
    let mut sum = vec![0.0; table.dimension];
    let mut hits = 0usize;
    for token in doc {
        if let Some(v) = table.get(token) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            hits += 1;
        }
    }
    if hits == 0 {
        return DocEmbedding {
            vector: sum,
            featureless: true,
        };
    }
    for s in sum.iter_mut() {
        *s /= hits as f64;
    }
    DocEmbedding {
        vector: sum,
        featureless: false,
    }
}

/// Embeds every document of a corpus, keyed by id.
pub fn embed_corpus(
    corpus: &crate::corpus::Corpus,
    table: &EmbeddingTable,
) -> BTreeMap<String, DocEmbedding> {
    corpus
        .documents()
        .iter()
        .map(|d| (d.id.clone(), embed_doc(&d.tokens(), table)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> TokenList {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn tokenize_plain_sentence() {
        assert_eq!(
            tokenize("Bolsonaro made Brasil worse."),
            toks(&["bolsonaro", "made", "brasil", "worse"])
        );
    }

    #[test]
    fn tokenize_folds_diacritics_and_keeps_hashtags() {
        assert_eq!(tokenize("#Eleições2022 já!"), toks(&["#eleicoes2022", "ja"]));
        assert_eq!(tokenize("eleição"), toks(&["eleicao"]));
    }

    #[test]
    fn tokenize_keeps_mentions_and_drops_bare_prefixes() {
        assert_eq!(tokenize("@folha disse # isso"), toks(&["@folha", "disse", "isso"]));
    }

    #[test]
    fn tokenize_empty() {
        assert_eq!(tokenize(""), Vec::<String>::new());
    }

    #[test]
    fn tfidf_hand_computed_idf() {
        let docs = vec![toks(&["a", "b"]), toks(&["a"])];
        let model = fit_tfidf(&docs, 1).unwrap();
        assert_eq!(model.vocab_size(), 2);
        let a = model.column("a").unwrap();
        let b = model.column("b").unwrap();
        assert!((model.idf(a) - 1.0).abs() < 1e-12);
        assert!((model.idf(b) - ((3.0f64 / 2.0).ln() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn tfidf_min_df_prunes_everything() {
        let docs = vec![toks(&["a"]), toks(&["b"])];
        let model = fit_tfidf(&docs, 2).unwrap();
        assert_eq!(model.vocab_size(), 0);
    }

    #[test]
    fn tfidf_empty_docs_is_error() {
        assert!(fit_tfidf(&[], 1).is_err());
    }

    #[test]
    fn transform_normalizes_single_token() {
        let docs = vec![toks(&["a", "a"]), toks(&["a"])];
        let model = fit_tfidf(&docs, 1).unwrap();
        let v = transform_tfidf(&model, &toks(&["a", "a"]));
        assert_eq!(v.entries.len(), 1);
        assert!((v.entries[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transform_hand_computed_weights() {
        // Build a model where idf(a)=1 and idf(b)=2 by direct construction.
        let mut vocabulary = BTreeMap::new();
        vocabulary.insert("a".to_string(), 0);
        vocabulary.insert("b".to_string(), 1);
        let model = TfidfModel {
            version: TFIDF_FORMAT_VERSION,
            vocabulary,
            idf: vec![1.0, 2.0],
            document_count: 2,
            min_df: 1,
        };
        let v = transform_tfidf(&model, &toks(&["a", "b"]));
        let norm = 5.0f64.sqrt();
        assert!((v.entries[0].1 - 1.0 / norm).abs() < 1e-12);
        assert!((v.entries[1].1 - 2.0 / norm).abs() < 1e-12);
    }

    #[test]
    fn transform_oov_gives_zero_vector() {
        let docs = vec![toks(&["a"]), toks(&["a"])];
        let model = fit_tfidf(&docs, 1).unwrap();
        let v = transform_tfidf(&model, &toks(&["zzz"]));
        assert!(v.entries.is_empty());
    }

    #[test]
    fn embeddings_minimal_table() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        std::fs::write(&path, "a 1 0\nb 0 1\n").unwrap();
        let table = load_embeddings(&path).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.dimension, 2);
    }

    #[test]
    fn embeddings_header_consumed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        std::fs::write(&path, "2 2\na 1 0\nb 0 1\n").unwrap();
        let table = load_embeddings(&path).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.dimension, 2);
    }

    #[test]
    fn embeddings_ragged_rows_fail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        std::fs::write(&path, "a 1 0\nb 0 1 2\n").unwrap();
        assert!(matches!(
            load_embeddings(&path),
            Err(Error::EmbeddingDimension { .. })
        ));
    }

    #[test]
    fn embed_doc_means_and_flags() {
        let mut vectors = HashMap::new();
        vectors.insert("a".to_string(), vec![1.0, 0.0]);
        vectors.insert("b".to_string(), vec![0.0, 1.0]);
        let table = EmbeddingTable::new(vectors, 2).unwrap();

        let e = embed_doc(&toks(&["a", "b"]), &table);
        assert_eq!(e.vector, vec![0.5, 0.5]);
        assert!(!e.featureless);

        let e = embed_doc(&toks(&["a", "a"]), &table);
        assert_eq!(e.vector, vec![1.0, 0.0]);

        let e = embed_doc(&toks(&["zzz"]), &table);
        assert_eq!(e.vector, vec![0.0, 0.0]);
        assert!(e.featureless);
    }

    #[test]
    fn tfidf_model_roundtrips_exactly() {
        let docs = vec![toks(&["a", "b", "c"]), toks(&["a", "b"]), toks(&["a"])];
        let model = fit_tfidf(&docs, 1).unwrap();
        let json = model.to_json();
        let back = TfidfModel::from_json(&json).unwrap();
        assert_eq!(model.vocabulary, back.vocabulary);
        assert_eq!(model.idf, back.idf);
    }
}
