//! Shared command plumbing: failure classes mapped to exit codes, seed
//! derivation, digests and the common file formats.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use politishift::corpus::{self, Corpus};
use politishift::seed::KeywordSet;
use politishift::Label;
use sha2::{Digest, Sha256};

/// A command failure carrying its exit code: 1 usage, 2 data, 3 pipeline.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    Pipeline(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Pipeline(_) => 3,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Data(e) | Failure::Pipeline(e) => e,
        }
    }
}

impl From<politishift::Error> for Failure {
    fn from(e: politishift::Error) -> Self {
        match e {
            politishift::Error::EmptyReliableNegatives { .. } => Failure::Pipeline(e.into()),
            _ => Failure::Data(e.into()),
        }
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

pub fn data<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Data(e.into())
}

/// Deterministic sub-seed derivation from the master `--seed` value.
pub fn derive_seed(master: u64, stream: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(stream.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is long enough"))
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Opens an input file; a missing path is a usage error.
pub fn read_input(path: &Path) -> CmdResult<Vec<u8>> {
    std::fs::read(path)
        .with_context(|| format!("cannot read input file {}", path.display()))
        .map_err(usage)
}

/// Parses a corpus file, reporting rejected lines on stderr.
pub fn load_corpus(path: &Path) -> CmdResult<corpus::ParseOutcome> {
    let bytes = read_input(path)?;
    let outcome = corpus::parse_records(std::io::Cursor::new(bytes)).map_err(data)?;
    if !outcome.rejects.is_empty() {
        log::warn!(
            "{}: {} line(s) rejected during parsing",
            path.display(),
            outcome.rejects.len()
        );
    }
    Ok(outcome)
}

/// Resolves `preset:<name>` or a keyword file path.
pub fn resolve_keywords(spec: &str) -> CmdResult<KeywordSet> {
    if let Some(name) = spec.strip_prefix("preset:") {
        return politishift::seed::preset(name)
            .ok_or_else(|| usage(anyhow!("unknown keyword preset `{name}`")));
    }
    let path = PathBuf::from(spec);
    if !path.exists() {
        return Err(usage(anyhow!("keyword file {} does not exist", path.display())));
    }
    KeywordSet::from_file(
        path.file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("keywords"),
        &path,
    )
    .map_err(data)
}

/// `--date-range 2022-08-26..2022-11-01` as `[start, end)` epoch seconds.
pub fn parse_date_range(spec: &str) -> CmdResult<(i64, i64)> {
    let (a, b) = spec
        .split_once("..")
        .ok_or_else(|| usage(anyhow!("date range must look like YYYY-MM-DD..YYYY-MM-DD")))?;
    let parse = |s: &str| -> CmdResult<i64> {
        let date = s
            .parse::<chrono::NaiveDate>()
            .with_context(|| format!("bad date `{s}`"))
            .map_err(usage)?;
        Ok(date
            .and_hms_opt(0, 0, 0)
            .expect("midnight exists")
            .and_utc()
            .timestamp())
    };
    let (start, end) = (parse(a)?, parse(b)?);
    if start >= end {
        return Err(usage(anyhow!("empty date range {spec}")));
    }
    Ok((start, end))
}

/// Restricts a corpus to a date range when one is given.
pub fn apply_date_range(corpus: Corpus, range: Option<&str>) -> CmdResult<Corpus> {
    match range {
        None => Ok(corpus),
        Some(spec) => {
            let (start, end) = parse_date_range(spec)?;
            Ok(corpus.restrict_dates(start, end))
        }
    }
}

/// Writes `labels.csv` with full-precision probabilities, sorted by id.
pub fn write_labels_csv(
    path: &Path,
    labels: &BTreeMap<String, Label>,
    probabilities: &BTreeMap<String, f64>,
) -> CmdResult {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(data)?;
    w.write_record(["id", "label", "probability"]).map_err(data)?;
    for (id, label) in labels {
        let p = probabilities.get(id).copied().unwrap_or_default();
        w.write_record([id.as_str(), label.as_str(), &format!("{p}")])
            .map_err(data)?;
    }
    w.flush().map_err(data)?;
    Ok(())
}

/// Reads a labels CSV back into maps.
pub fn read_labels_csv(
    path: &Path,
) -> CmdResult<(BTreeMap<String, Label>, BTreeMap<String, f64>)> {
    let bytes = read_input(path)?;
    let mut reader = csv::Reader::from_reader(std::io::Cursor::new(bytes));
    let mut labels = BTreeMap::new();
    let mut probabilities = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(data)?;
        let id = record
            .get(0)
            .ok_or_else(|| data(anyhow!("labels file row without id")))?;
        let label = record
            .get(1)
            .and_then(Label::parse)
            .ok_or_else(|| data(anyhow!("bad label for id `{id}`")))?;
        let p: f64 = record
            .get(2)
            .unwrap_or("0")
            .parse()
            .map_err(|e| data(anyhow!("bad probability for id `{id}`: {e}")))?;
        labels.insert(id.to_string(), label);
        probabilities.insert(id.to_string(), p);
    }
    Ok((labels, probabilities))
}

#[derive(serde::Serialize, serde::Deserialize)]
struct GoldRecord {
    id: String,
    label: Label,
}

/// Gold labels: line-delimited `{"id": ..., "label": ...}` records.
pub fn read_gold(path: &Path) -> CmdResult<BTreeMap<String, Label>> {
    let bytes = read_input(path)?;
    let text = String::from_utf8(bytes).map_err(data)?;
    let mut gold = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: GoldRecord = serde_json::from_str(line)
            .map_err(|e| data(anyhow!("gold line {}: {e}", i + 1)))?;
        gold.insert(record.id, record.label);
    }
    Ok(gold)
}

pub fn write_gold(path: &Path, labels: &BTreeMap<String, Label>) -> CmdResult {
    let mut out = String::new();
    for (id, label) in labels {
        out.push_str(
            &serde_json::to_string(&GoldRecord {
                id: id.clone(),
                label: *label,
            })
            .expect("gold record serializes"),
        );
        out.push('\n');
    }
    std::fs::write(path, out).map_err(data)?;
    Ok(())
}

/// Formats an optional fraction; empty cell when undefined.
pub fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn ensure_out_dir(dir: &Path) -> CmdResult {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
        .map_err(usage)?;
    Ok(())
}
