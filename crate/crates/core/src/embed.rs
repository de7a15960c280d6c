//! Sentence vectors and hierarchical position offsets.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};
use crate::text::{self, Token};

pub const DEFAULT_EMBED_DIM: usize = 768;
pub const MIN_TFIDF_DIM: usize = 16;

/// n×d sentence embeddings, stored as `f32` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    n: usize,
    d: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(n: usize, d: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != n * d {
            return Err(Error::shape("EmbeddingMatrix", n * d, data.len()));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Config(alloc::format!(
                "non-finite embedding value at row {}, column {}",
                i / d.max(1),
                i % d.max(1)
            )));
        }
        Ok(EmbeddingMatrix { n, d, data })
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        EmbeddingMatrix {
            n,
            d,
            data: vec![0.0; n * d],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn to_tensor<T: Scalar>(&self) -> Tensor<T> {
        let data = self.data.iter().map(|&x| T::from_f64(x as f64)).collect();
        Tensor::from_vec(self.n, self.d, data).expect("consistent shape")
    }

    /// Rows gathered in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        EmbeddingMatrix {
            n: idx.len(),
            d: self.d,
            data,
        }
    }

    pub fn mean_row(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.d];
        for i in 0..self.n {
            for (o, &x) in out.iter_mut().zip(self.row(i)) {
                *o += x as f64;
            }
        }
        if self.n > 0 {
            out.iter_mut().for_each(|o| *o /= self.n as f64);
        }
        out
    }
}

/// Scales of the section-index and within-section-index encodings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionalConfig {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Default for PositionalConfig {
    fn default() -> Self {
        PositionalConfig {
            gamma1: 0.001,
            gamma2: 0.001,
        }
    }
}

/// Sinusoidal encoding: `sin(pos / 10000^(2i/d))` at `2i`, `cos(..)` at `2i+1`.
pub fn positional_encoding(pos: usize, d_model: usize) -> Result<Vec<f64>> {
    if d_model == 0 || d_model % 2 != 0 {
        return Err(Error::Config(alloc::format!(
            "positional encoding needs an even, non-zero dimension (got {d_model})"
        )));
    }
    let mut out = vec![0.0; d_model];
    for i in 0..d_model / 2 {
        let angle = pos as f64 / libm::pow(10000.0, (2 * i) as f64 / d_model as f64);
        out[2 * i] = libm::sin(angle);
        out[2 * i + 1] = libm::cos(angle);
    }
    Ok(out)
}

/// `γ1·PE(section index) + γ2·PE(index within section)`.
pub fn hierarchical_position(
    section: usize,
    within: usize,
    d_model: usize,
    cfg: &PositionalConfig,
) -> Result<Vec<f64>> {
    if cfg.gamma1 < 0.0 || cfg.gamma2 < 0.0 {
        return Err(Error::Config("position scales must be non-negative".into()));
    }
    let a = positional_encoding(section, d_model)?;
    let b = positional_encoding(within, d_model)?;
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| cfg.gamma1 * x + cfg.gamma2 * y)
        .collect())
}

/// `H0[i] = X[i] + HPE(sec_idx[i], sen_idx[i])`.
pub fn initial_node_reps(
    x: &EmbeddingMatrix,
    sec_idx: &[usize],
    sen_idx: &[usize],
    cfg: &PositionalConfig,
) -> Result<EmbeddingMatrix> {
    if sec_idx.len() != x.n || sen_idx.len() != x.n {
        return Err(Error::shape(
            "initial_node_reps",
            x.n,
            alloc::format!(
                "{} section / {} sentence indices",
                sec_idx.len(),
                sen_idx.len()
            ),
        ));
    }
    let mut data = x.data.clone();
    for i in 0..x.n {
        let offset = hierarchical_position(sec_idx[i], sen_idx[i], x.d, cfg)?;
        for (v, o) in data[i * x.d..(i + 1) * x.d].iter_mut().zip(&offset) {
            *v = (*v as f64 + o) as f32;
        }
    }
    EmbeddingMatrix::new(x.n, x.d, data)
}

/// [`initial_node_reps`] with positions read off the document's sections.
pub fn document_node_reps(
    doc: &Document,
    x: &EmbeddingMatrix,
    cfg: &PositionalConfig,
) -> Result<EmbeddingMatrix> {
    initial_node_reps(
        x,
        &doc.section_indices(),
        &doc.within_section_indices(),
        cfg,
    )
}

/// Seeded 64-bit FNV-1a.
pub fn seeded_hash(seed: u64, bytes: &[u8]) -> u64 {
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h
}

pub fn bucket(token: &str, d: usize, seed: u64) -> usize {
    (seeded_hash(seed, token.as_bytes()) % d as u64) as usize
}

/// Smoothed inverse sentence frequency, `ln((1 + N) / (1 + df)) + 1`.
pub fn idf_table(sentences: &[Vec<Token>]) -> BTreeMap<&str, f64> {
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for s in sentences {
        let mut seen: Vec<&str> = s.iter().map(Token::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let n = sentences.len() as f64;
    df.into_iter()
        .map(|(t, c)| (t, libm::log((1.0 + n) / (1.0 + c as f64)) + 1.0))
        .collect()
}

/// Hashed TF-IDF rows over the given (stopword-free) token lists.
pub fn tfidf_rows(sentences: &[Vec<Token>], d: usize, seed: u64) -> Result<EmbeddingMatrix> {
    if d < MIN_TFIDF_DIM {
        return Err(Error::Config(alloc::format!(
            "TF-IDF dimension must be at least {MIN_TFIDF_DIM} (got {d})"
        )));
    }
    let idf = idf_table(sentences);
    let mut data = vec![0.0f32; sentences.len() * d];
    for (i, s) in sentences.iter().enumerate() {
        let mut row = vec![0.0f64; d];
        for t in s {
            row[bucket(t, d, seed)] += idf[t.as_str()];
        }
        let norm = libm::sqrt(row.iter().map(|x| x * x).sum::<f64>());
        if norm > 0.0 {
            for (o, x) in data[i * d..(i + 1) * d].iter_mut().zip(&row) {
                *o = (x / norm) as f32;
            }
        }
    }
    EmbeddingMatrix::new(sentences.len(), d, data)
}

/// Self-contained sentence embeddings: stopword-free TF-IDF hashed into `d`
/// buckets, each row L2-normalized (all-stopword sentences give a zero row).
pub fn tfidf_embed(doc: &Document, d: usize, seed: u64) -> Result<EmbeddingMatrix> {
    let toks: Vec<Vec<Token>> = doc
        .sentences
        .iter()
        .map(|s| text::content_tokens(s))
        .collect();
    tfidf_rows(&toks, d, seed)
}
