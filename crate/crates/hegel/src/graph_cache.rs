//! Per-document hypergraph cache: one JSON header line, then the incidence
//! matrix as packed bit rows (`ceil(m/8)` bytes per node, LSB-first).

use std::fs;
use std::path::{Path, PathBuf};

use hegel_core::keywords::Keyword;
use hegel_core::{EdgeType, Hypergraph, TopicModel};
use serde::{Deserialize, Serialize};

use crate::emb::file_stem;
use crate::error::{Error, Result};
use crate::jsonl::write_atomic;

pub const GRAPH_EXT: &str = "graph";
pub const KEYWORDS_EXT: &str = "keywords.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphHeader {
    pub article_id: String,
    pub n: usize,
    pub m: usize,
    pub edge_types: Vec<EdgeType>,
    pub degrees: Vec<usize>,
    pub labels: Vec<String>,
    /// Hash of the run manifest that produced this file.
    pub manifest: String,
}

pub fn graph_path(dir: &Path, article_id: &str) -> PathBuf {
    dir.join(format!("{}.{GRAPH_EXT}", file_stem(article_id)))
}

pub fn keywords_path(dir: &Path, article_id: &str) -> PathBuf {
    dir.join(format!("{}.{KEYWORDS_EXT}", file_stem(article_id)))
}

fn row_bytes(m: usize) -> usize {
    m.div_ceil(8)
}

pub fn encode(article_id: &str, g: &Hypergraph, manifest: &str) -> Vec<u8> {
    let header = GraphHeader {
        article_id: article_id.to_string(),
        n: g.n(),
        m: g.m(),
        edge_types: g.edge_types().to_vec(),
        degrees: g.degrees(),
        labels: g.labels().to_vec(),
        manifest: manifest.to_string(),
    };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    let rb = row_bytes(g.m());
    let start = out.len();
    out.resize(start + g.n() * rb, 0);
    for j in 0..g.m() {
        for &i in g.members(j) {
            out[start + i * rb + j / 8] |= 1 << (j % 8);
        }
    }
    out
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<(GraphHeader, Hypergraph)> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::format(path, "header", "no header line"))?;
    let header: GraphHeader = serde_json::from_slice(&bytes[..nl])
        .map_err(|e| Error::format(path, "header", e.to_string()))?;
    if header.edge_types.len() != header.m
        || header.degrees.len() != header.m
        || header.labels.len() != header.m
    {
        return Err(Error::format(
            path,
            "m",
            "edge_types/degrees/labels lengths disagree with m",
        ));
    }
    let rb = row_bytes(header.m);
    let body = &bytes[nl + 1..];
    if body.len() != header.n * rb {
        return Err(Error::format(
            path,
            "rows",
            format!(
                "{} bytes for n={}, m={}; expected {}",
                body.len(),
                header.n,
                header.m,
                header.n * rb
            ),
        ));
    }
    let mut members = vec![Vec::new(); header.m];
    for i in 0..header.n {
        let row = &body[i * rb..(i + 1) * rb];
        for (j, col) in members.iter_mut().enumerate() {
            if row[j / 8] >> (j % 8) & 1 == 1 {
                col.push(i);
            }
        }
        if header.m % 8 != 0 && row[rb - 1] >> (header.m % 8) != 0 {
            return Err(Error::format(
                path,
                "rows",
                format!("padding bits set in row {i}"),
            ));
        }
    }
    let g = Hypergraph::from_parts(
        header.n,
        members,
        header.edge_types.clone(),
        header.labels.clone(),
    )
    .map_err(|e| Error::format(path, "rows", e.to_string()))?;
    if g.degrees() != header.degrees {
        return Err(Error::format(
            path,
            "degrees",
            "header degrees differ from the rows",
        ));
    }
    Ok((header, g))
}

pub fn write_graph(
    dir: &Path,
    article_id: &str,
    g: &Hypergraph,
    manifest: &str,
) -> Result<PathBuf> {
    let p = graph_path(dir, article_id);
    write_atomic(&p, &encode(article_id, g, manifest))?;
    Ok(p)
}

/// Loads the cached graph for a document with `n` sentences.
pub fn read_graph(dir: &Path, article_id: &str, n: usize) -> Result<(GraphHeader, Hypergraph)> {
    let p = graph_path(dir, article_id);
    if !p.is_file() {
        return Err(Error::Missing(format!(
            "no graph cache for {article_id:?} at {}; run `hegel build-graph` first",
            p.display()
        )));
    }
    let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
    let (h, g) = decode(&bytes, &p)?;
    if h.article_id != article_id {
        return Err(Error::format(
            &p,
            "article_id",
            format!("{:?} in file, wanted {article_id:?}", h.article_id),
        ));
    }
    if h.n != n {
        return Err(Error::format(
            &p,
            "n",
            format!("graph has {} nodes but the document has {n} sentences; rebuild with `hegel build-graph`", h.n),
        ));
    }
    Ok((h, g))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordEntry {
    pub text: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicEntry {
    pub topic: usize,
    pub top_words: Vec<String>,
    pub sentences: Vec<usize>,
}

/// Human-readable extraction results kept beside each graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordSidecar {
    pub article_id: String,
    pub keywords: Vec<KeywordEntry>,
    pub topics: Vec<TopicEntry>,
}

impl KeywordSidecar {
    pub fn new(article_id: &str, keywords: &[Keyword], topics: Option<&TopicModel>) -> Self {
        let topics = topics
            .map(|m| {
                (0..m.k)
                    .filter_map(|t| {
                        let sentences: Vec<usize> = (0..m.assignments.len())
                            .filter(|&i| m.assignments[i] == t)
                            .collect();
                        (!sentences.is_empty()).then(|| TopicEntry {
                            topic: t,
                            top_words: m.top_words(t, 5).into_iter().map(String::from).collect(),
                            sentences,
                        })
                    })
                    .collect()
            })
            .unwrap_or_default();
        KeywordSidecar {
            article_id: article_id.to_string(),
            keywords: keywords
                .iter()
                .map(|k| KeywordEntry {
                    text: k.text(),
                    score: k.score,
                })
                .collect(),
            topics,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("sidecar serializes");
        write_atomic(&keywords_path(dir, &self.article_id), text.as_bytes())
    }

    /// `None` when the sidecar was never written.
    pub fn read(dir: &Path, article_id: &str) -> Result<Option<Self>> {
        let p = keywords_path(dir, article_id);
        if !p.is_file() {
            return Ok(None);
        }
        let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| Error::format(&p, "keywords", e.to_string()))
    }
}
