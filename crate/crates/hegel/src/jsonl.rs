//! Line-delimited JSON: the document corpus plus the small record files
//! the pipeline passes between stages.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use hegel_core::corpus::{self, ValidateOptions, ValidationReport};
use hegel_core::{Document, RawDocument};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Stop after this many accepted documents.
    pub limit: Option<usize>,
    /// Fail on the first malformed line instead of skipping it.
    pub strict: bool,
    pub validate: ValidateOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub line: usize,
    pub article_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Loaded {
    pub documents: Vec<Document>,
    pub parse_errors: Vec<LineError>,
    pub rejected: Vec<Rejection>,
    pub dropped_sentences: usize,
    pub dropped_sections: usize,
    pub truncated_sentences: usize,
}

impl Loaded {
    fn absorb(&mut self, r: &ValidationReport) {
        self.dropped_sentences += r.dropped_sentences;
        self.dropped_sections += r.dropped_sections;
        self.truncated_sentences += r.truncated_sentences;
    }
}

pub fn load_jsonl(path: &Path, opts: LoadOptions) -> Result<Loaded> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_reader(BufReader::new(file), path, opts)
}

/// [`load_jsonl`] over any reader; `path` only labels errors.
pub fn load_reader(reader: impl BufRead, path: &Path, opts: LoadOptions) -> Result<Loaded> {
    let mut out = Loaded::default();
    for (idx, line) in reader.lines().enumerate() {
        if opts.limit.is_some_and(|l| out.documents.len() >= l) {
            break;
        }
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawDocument = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) if opts.strict => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    message: e.to_string(),
                })
            }
            Err(e) => {
                out.parse_errors.push(LineError {
                    line: lineno,
                    message: e.to_string(),
                });
                continue;
            }
        };
        match corpus::validate(&raw, opts.validate) {
            Ok((doc, report)) => {
                out.absorb(&report);
                out.documents.push(doc);
            }
            Err(hegel_core::Error::Rejected { id, reason }) => out.rejected.push(Rejection {
                line: lineno,
                article_id: id,
                reason,
            }),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

/// Reads every line of `path` as `T`; any bad line is an error.
pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_records<'a, T: Serialize + 'a>(
    path: &Path,
    items: impl IntoIterator<Item = &'a T>,
) -> Result<()> {
    let mut buf = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buf, item).expect("in-memory JSON serialization");
        buf.push(b'\n');
    }
    write_atomic(path, &buf)
}

/// Writes to a sibling temp file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = PathBuf::from(path);
    let name = format!(
        ".{}.tmp{}",
        path.file_name()
            .map(|n| n.to_string_lossy())
            .unwrap_or_default(),
        std::process::id()
    );
    tmp.set_file_name(name);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Oracle output, one line per document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub article_id: String,
    pub labels: Vec<u8>,
    #[serde(default)]
    pub selected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceNote {
    pub index: usize,
    pub section: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub topics: Vec<String>,
}

/// System summary for one document. Only `article_id` and `sentences` are
/// needed by `evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub article_id: String,
    pub sentences: Vec<String>,
    #[serde(default)]
    pub selected: Vec<usize>,
    #[serde(default)]
    pub scores: Vec<f32>,
    #[serde(default)]
    pub notes: Vec<SentenceNote>,
}
