//! JSON-lines artifacts and JSON documents on disk.
//!
//! Label files hold `{"sample_id", "annotator_id", "label"}` per line,
//! feature files `{"sample_id", "annotator_id", "vector"}` and attention
//! files `{"sample_id", "annotator_id", "weights"}`. Blank lines are
//! skipped. Written files list records in (annotator, sample) order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tendeval_core::{AnnotationSet, LabelDomain, LabelRecord, VectorKind, VectorRecord, VectorTable};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {source}", path.display())]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Invalid { path: PathBuf, source: tendeval_core::Error },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureLine {
    sample_id: String,
    annotator_id: String,
    vector: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttentionLine {
    sample_id: String,
    annotator_id: String,
    weights: Vec<f64>,
}

fn open(path: &Path) -> Result<BufReader<File>, IoError> {
    File::open(path).map(BufReader::new).map_err(|source| IoError::Read { path: path.to_owned(), source })
}

/// Parses every non-blank line of a JSON-lines file.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|source| IoError::Read { path: path.to_owned(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|source| IoError::Parse {
            path: path.to_owned(),
            line: i + 1,
            source,
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<(), IoError> {
    let werr = |source| IoError::Write { path: path.to_owned(), source };
    let mut w = BufWriter::new(File::create(path).map_err(werr)?);
    for item in items {
        serde_json::to_writer(&mut w, &item).map_err(|source| IoError::Json { path: path.to_owned(), source })?;
        w.write_all(b"\n").map_err(werr)?;
    }
    w.flush().map_err(werr)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|source| IoError::Json { path: path.to_owned(), source })?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| IoError::Write { path: path.to_owned(), source })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    serde_json::from_reader(open(path)?).map_err(|source| IoError::Json { path: path.to_owned(), source })
}

pub fn read_label_records(path: &Path) -> Result<Vec<LabelRecord>, IoError> {
    read_jsonl(path)
}

/// Loads a label file, inferring the domain from its own labels when none
/// is given.
pub fn load_annotations(path: &Path, domain: Option<&LabelDomain>) -> Result<AnnotationSet, IoError> {
    let records = read_label_records(path)?;
    annotations_from(path, records, domain)
}

pub fn annotations_from(
    path: &Path,
    records: Vec<LabelRecord>,
    domain: Option<&LabelDomain>,
) -> Result<AnnotationSet, IoError> {
    let invalid = |source| IoError::Invalid { path: path.to_owned(), source };
    let domain = match domain {
        Some(d) => d.clone(),
        None => AnnotationSet::infer_domain(&records).map_err(invalid)?,
    };
    AnnotationSet::from_records(records, domain).map_err(invalid)
}

pub fn save_annotations(path: &Path, ann: &AnnotationSet) -> Result<(), IoError> {
    write_jsonl(path, ann.records())
}

pub fn load_features(path: &Path) -> Result<VectorTable, IoError> {
    let lines: Vec<FeatureLine> = read_jsonl(path)?;
    let records = lines.into_iter().map(|l| VectorRecord {
        sample_id: l.sample_id,
        annotator_id: l.annotator_id,
        values: l.vector,
    });
    VectorTable::features(records).map_err(|source| IoError::Invalid { path: path.to_owned(), source })
}

/// Loads attention weights; each vector is rescaled to unit sum.
pub fn load_attentions(path: &Path) -> Result<VectorTable, IoError> {
    let lines: Vec<AttentionLine> = read_jsonl(path)?;
    let records = lines.into_iter().map(|l| VectorRecord {
        sample_id: l.sample_id,
        annotator_id: l.annotator_id,
        values: l.weights,
    });
    VectorTable::attentions(records).map_err(|source| IoError::Invalid { path: path.to_owned(), source })
}

/// Writes a table in the line format matching its kind.
pub fn save_vectors(path: &Path, table: &VectorTable) -> Result<(), IoError> {
    let records = table.records();
    match table.kind() {
        VectorKind::Feature => write_jsonl(
            path,
            records.into_iter().map(|r| FeatureLine {
                sample_id: r.sample_id,
                annotator_id: r.annotator_id,
                vector: r.values,
            }),
        ),
        VectorKind::Attention => write_jsonl(
            path,
            records.into_iter().map(|r| AttentionLine {
                sample_id: r.sample_id,
                annotator_id: r.annotator_id,
                weights: r.values,
            }),
        ),
    }
}
