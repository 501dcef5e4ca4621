//! Corpus ingestion: line-delimited post/comment records, thread assembly
//! and the short-comment filter.
//!
//! The record format is one JSON object per line with exactly the fields of
//! [`Document`]. Malformed lines are skipped and reported with their line
//! number; a duplicate id aborts the whole parse.

use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textfeat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Youtube,
    Twitter,
    Tiktok,
    Synthetic,
    Other,
}

impl Platform {
    pub fn as_str(&self) -> &'static str {
        match self {
            Platform::Youtube => "youtube",
            Platform::Twitter => "twitter",
            Platform::Tiktok => "tiktok",
            Platform::Synthetic => "synthetic",
            Platform::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocKind {
    Post,
    Comment,
}

/// One post or comment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub id: String,
    pub platform: Platform,
    pub kind: DocKind,
    pub parent_id: Option<String>,
    pub text: String,
    /// UTC seconds since epoch.
    pub timestamp: i64,
    pub author_id: String,
    /// External topic label (e.g. from a topic model run outside this crate).
    pub topic: Option<String>,
}

impl Document {
    pub fn tokens(&self) -> Vec<String> {
        textfeat::tokenize(&self.text)
    }
}

/// An immutable document collection with an id index.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    documents: Vec<Document>,
    index: HashMap<String, usize>,
}

impl Corpus {
    /// Builds a corpus from documents. Fails on duplicate ids.
    pub fn from_documents(documents: Vec<Document>) -> Result<Self> {
        let mut index = HashMap::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            if index.insert(doc.id.clone(), i).is_some() {
                return Err(Error::DuplicateId {
                    id: doc.id.clone(),
                    line_no: i + 1,
                });
            }
        }
        Ok(Corpus { documents, index })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.index.get(id).map(|&i| &self.documents[i])
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn posts(&self) -> impl Iterator<Item = &Document> {
        self.documents.iter().filter(|d| d.kind == DocKind::Post)
    }

    pub fn comments(&self) -> impl Iterator<Item = &Document> {
        self.documents.iter().filter(|d| d.kind == DocKind::Comment)
    }

    /// Keeps only documents whose timestamp lies in `[start, end)`.
    /// Comments whose post falls outside the range become orphans and are
    /// excluded by the subsequent thread build.
    pub fn restrict_dates(&self, start: i64, end: i64) -> Corpus {
        let kept: Vec<Document> = self
            .documents
            .iter()
            .filter(|d| d.timestamp >= start && d.timestamp < end)
            .cloned()
            .collect();
        Corpus::from_documents(kept).expect("subset of unique ids stays unique")
    }
}

/// A rejected input line and why it was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseReject {
    pub line_no: usize,
    pub reason: String,
}

/// Result of [`parse_records`]: the accepted documents plus a reject report.
#[derive(Debug)]
pub struct ParseOutcome {
    pub corpus: Corpus,
    pub rejects: Vec<ParseReject>,
}

/// Parses line-delimited records. Invalid lines are skipped and reported;
/// a duplicate id is fatal.
pub fn parse_records<R: BufRead>(reader: R) -> Result<ParseOutcome> {
    let mut documents = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut rejects = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = match serde_json::from_str(&line) {
            Ok(doc) => doc,
            Err(e) => {
                rejects.push(ParseReject {
                    line_no,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        match validate_record(&doc) {
            Ok(()) => {}
            Err(reason) => {
                rejects.push(ParseReject { line_no, reason });
                continue;
            }
        }
        if index.contains_key(&doc.id) {
            return Err(Error::DuplicateId {
                id: doc.id,
                line_no,
            });
        }
        index.insert(doc.id.clone(), documents.len());
        documents.push(doc);
    }

    Ok(ParseOutcome {
        corpus: Corpus { documents, index },
        rejects,
    })
}

fn validate_record(doc: &Document) -> std::result::Result<(), String> {
    match doc.kind {
        DocKind::Post => {
            if doc.parent_id.is_some() {
                return Err("post must not carry parent_id".to_string());
            }
        }
        DocKind::Comment => {
            if doc.parent_id.is_none() {
                return Err("comment requires parent_id".to_string());
            }
        }
    }
    if doc.id.is_empty() {
        return Err("empty id".to_string());
    }
    Ok(())
}

/// Serializes a corpus back to the line-delimited record format.
pub fn write_records<W: std::io::Write>(corpus: &Corpus, mut writer: W) -> Result<()> {
    for doc in corpus.documents() {
        serde_json::to_writer(&mut writer, doc).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Drops comments with `min_tokens` or fewer tokens. Posts are never removed;
/// the default keeps comments with strictly more than 5 tokens.
pub fn filter_short_comments(corpus: &Corpus, min_tokens: usize) -> Corpus {
    let kept: Vec<Document> = corpus
        .documents
        .iter()
        .filter(|d| d.kind == DocKind::Post || d.tokens().len() > min_tokens)
        .cloned()
        .collect();
    Corpus::from_documents(kept).expect("subset of unique ids stays unique")
}

pub const DEFAULT_MIN_COMMENT_TOKENS: usize = 5;

/// One post together with its comments, sorted by `(timestamp, id)`.
#[derive(Debug, Clone)]
pub struct Thread {
    pub post: Document,
    pub comments: Vec<Document>,
}

impl Thread {
    pub fn thread_id(&self) -> &str {
        &self.post.id
    }
}

/// Threads plus comments whose parent post is missing from the corpus.
#[derive(Debug)]
pub struct ThreadSet {
    pub threads: Vec<Thread>,
    pub orphans: Vec<String>,
}

/// Assembles one thread per post. Orphan comments are reported, not fatal.
/// Threads come out in post order; comments in `(timestamp, id)` order.
pub fn build_threads(corpus: &Corpus) -> ThreadSet {
    let mut by_post: HashMap<&str, Vec<&Document>> = HashMap::new();
    let mut orphans = Vec::new();

    for doc in corpus.comments() {
        let parent = doc.parent_id.as_deref().expect("validated at parse time");
        match corpus.get(parent) {
            Some(p) if p.kind == DocKind::Post => {
                by_post.entry(parent).or_default().push(doc);
            }
            _ => orphans.push(doc.id.clone()),
        }
    }

    let threads = corpus
        .posts()
        .map(|post| {
            let mut comments: Vec<Document> = by_post
                .remove(post.id.as_str())
                .unwrap_or_default()
                .into_iter()
                .cloned()
                .collect();
            comments.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
            Thread {
                post: post.clone(),
                comments,
            }
        })
        .collect();

    ThreadSet { threads, orphans }
}
