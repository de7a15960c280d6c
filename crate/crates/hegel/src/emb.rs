//! Embedding interchange files and the choice between them and the built-in
//! hashed TF-IDF vectors.
//!
//! File layout: `HGEMB1`, u32 LE `n`, u32 LE `d`, then `n·d` f32 LE values,
//! row-major. A directory of such files carries a `manifest.json` mapping
//! article ids to file names.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use hegel_core::embed::{self, EmbeddingMatrix};
use hegel_core::keywords::CandidateVectors;
use hegel_core::Document;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonl::write_atomic;

pub const MAGIC: &[u8; 6] = b"HGEMB1";
pub const HEADER_LEN: usize = 14;
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn encoded_len(n: usize, d: usize) -> usize {
    HEADER_LEN + 4 * n * d
}

pub fn encode(m: &EmbeddingMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(encoded_len(m.n(), m.dim()));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.n() as u32).to_le_bytes());
    out.extend_from_slice(&(m.dim() as u32).to_le_bytes());
    for &x in m.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

/// Parses a whole file; `path` is only used in error messages.
pub fn decode(bytes: &[u8], path: &Path) -> Result<EmbeddingMatrix> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::format(path, "magic", "expected HGEMB1"));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(
            path,
            "header",
            format!("{} bytes, need {HEADER_LEN}", bytes.len()),
        ));
    }
    let n = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let d = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
    if d == 0 {
        return Err(Error::format(path, "d", "dimension is 0"));
    }
    let want = encoded_len(n, d);
    if bytes.len() != want {
        return Err(Error::format(
            path,
            "data",
            format!("{} bytes for n={n}, d={d}; expected {want}", bytes.len()),
        ));
    }
    let data = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    EmbeddingMatrix::new(n, d, data).map_err(|e| Error::format(path, "data", e.to_string()))
}

pub fn write_embeddings(path: &Path, m: &EmbeddingMatrix) -> Result<()> {
    write_atomic(path, &encode(m))
}

/// Reads a file and checks its row count against the document.
pub fn load_embeddings(path: &Path, expected_n: usize) -> Result<EmbeddingMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let m = decode(&bytes, path)?;
    if m.n() != expected_n {
        return Err(Error::format(
            path,
            "n",
            format!(
                "header has {} rows but the document has {expected_n} sentences",
                m.n()
            ),
        ));
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbManifest {
    pub dim: usize,
    #[serde(default)]
    pub encoder: Option<String>,
    pub documents: BTreeMap<String, ManifestEntry>,
}

impl EmbManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format(&path, "manifest", e.to_string()))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_atomic(&dir.join(MANIFEST_FILE), text.as_bytes())
    }
}

/// A file name derived from an article id (anything outside
/// `[A-Za-z0-9._-]` becomes `_`).
pub fn file_stem(article_id: &str) -> String {
    let s: String = article_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() || s.starts_with('.') {
        format!("_{s}")
    } else {
        s
    }
}

/// Where sentence vectors come from.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbSource {
    Tfidf {
        dim: usize,
        seed: u64,
    },
    Dir {
        root: PathBuf,
        manifest: EmbManifest,
    },
}

impl EmbSource {
    /// `tfidf` or a directory holding a manifest.
    pub fn open(arg: &str, tfidf_dim: usize, seed: u64) -> Result<Self> {
        if arg == "tfidf" {
            if tfidf_dim < embed::MIN_TFIDF_DIM {
                return Err(Error::Usage(format!(
                    "--tfidf-dim must be at least {}",
                    embed::MIN_TFIDF_DIM
                )));
            }
            return Ok(EmbSource::Tfidf {
                dim: tfidf_dim,
                seed,
            });
        }
        let root = PathBuf::from(arg);
        if !root.join(MANIFEST_FILE).is_file() {
            return Err(Error::Missing(format!(
                "no embedding manifest at {}; export embeddings there or pass --emb tfidf",
                root.join(MANIFEST_FILE).display()
            )));
        }
        let manifest = EmbManifest::read(&root)?;
        Ok(EmbSource::Dir { root, manifest })
    }

    pub fn dim(&self) -> usize {
        match self {
            EmbSource::Tfidf { dim, .. } => *dim,
            EmbSource::Dir { manifest, .. } => manifest.dim,
        }
    }

    pub fn candidate_vectors(&self) -> CandidateVectors {
        match self {
            EmbSource::Tfidf { seed, .. } => CandidateVectors::HashedTfidf { seed: *seed },
            EmbSource::Dir { .. } => CandidateVectors::ContainingSentences,
        }
    }

    /// Short description recorded in run manifests.
    pub fn describe(&self) -> String {
        match self {
            EmbSource::Tfidf { dim, seed } => format!("tfidf:{dim}:{seed}"),
            EmbSource::Dir { root, .. } => format!("dir:{}", root.display()),
        }
    }

    /// The manifest file, when there is one, so run hashes cover it.
    pub fn manifest_path(&self) -> Option<PathBuf> {
        match self {
            EmbSource::Tfidf { .. } => None,
            EmbSource::Dir { root, .. } => Some(root.join(MANIFEST_FILE)),
        }
    }

    pub fn embeddings(&self, doc: &Document) -> Result<EmbeddingMatrix> {
        match self {
            EmbSource::Tfidf { dim, seed } => Ok(embed::tfidf_embed(doc, *dim, *seed)?),
            EmbSource::Dir { root, manifest } => {
                let entry = manifest.documents.get(&doc.id).ok_or_else(|| {
                    Error::Missing(format!(
                        "embedding manifest in {} has no entry for {:?}; re-run the exporter on this corpus",
                        root.display(),
                        doc.id
                    ))
                })?;
                let m = load_embeddings(&root.join(&entry.file), doc.n_sentences())?;
                if m.dim() != manifest.dim {
                    return Err(Error::format(
                        root.join(&entry.file),
                        "d",
                        format!("{} but the manifest says {}", m.dim(), manifest.dim),
                    ));
                }
                Ok(m)
            }
        }
    }
}
