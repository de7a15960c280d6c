//! Embedding-similarity keyword extraction and keyword hyperedges.
//!
//! Candidates are the document's uni- and bigrams without stopwords; each is
//! scored by cosine similarity to the document centroid.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::embed::{self, EmbeddingMatrix};
use crate::hypergraph::IncidenceColumns;
use crate::text::{self, Token};

pub const DEFAULT_KEYWORDS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyword {
    pub phrase: Vec<Token>,
    /// Cosine similarity to the document centroid, in [-1, 1].
    pub score: f64,
}

impl Keyword {
    pub fn text(&self) -> String {
        let parts: Vec<&str> = self.phrase.iter().map(Token::as_str).collect();
        parts.join(" ")
    }
}

/// How a candidate phrase is turned into a vector comparable with the rows
/// of the sentence embedding matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateVectors {
    /// Rows came from [`embed::tfidf_embed`] with this seed: a candidate is the
    /// mean of its tokens' hashed TF-IDF vectors.
    HashedTfidf { seed: u64 },
    /// Rows came from an external sentence encoder: a candidate is the mean
    /// of the rows of the sentences that contain it.
    ContainingSentences,
}

fn usable(t: &Token) -> bool {
    t.chars().count() > 1 && !text::is_stopword(t)
}

/// Candidate phrases in order of first occurrence.
pub fn candidates(sentences: &[Vec<Token>]) -> Vec<Vec<Token>> {
    let mut seen: BTreeMap<Vec<Token>, ()> = BTreeMap::new();
    let mut out = Vec::new();
    let mut push = |p: Vec<Token>| {
        if seen.insert(p.clone(), ()).is_none() {
            out.push(p);
        }
    };
    for s in sentences {
        for (i, t) in s.iter().enumerate() {
            if !usable(t) {
                continue;
            }
            push(vec![t.clone()]);
            if let Some(next) = s.get(i + 1) {
                // "virus virus" is not a phrase.
                if usable(next) && next != t {
                    push(vec![t.clone(), next.clone()]);
                }
            }
        }
    }
    out
}

/// True when `phrase` occurs as a contiguous run in `sentence`.
pub fn contains_phrase(sentence: &[Token], phrase: &[Token]) -> bool {
    !phrase.is_empty() && sentence.windows(phrase.len()).any(|w| w == phrase)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = libm::sqrt(a.iter().map(|x| x * x).sum::<f64>());
    let nb = libm::sqrt(b.iter().map(|x| x * x).sum::<f64>());
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

/// Top-`k` keywords by centroid similarity; ties keep first-occurrence order.
/// Returns an empty list when the document has no candidate phrases.
pub fn extract_keywords(
    doc: &Document,
    embeddings: &EmbeddingMatrix,
    k: usize,
    mode: CandidateVectors,
) -> Vec<Keyword> {
    let sentences = doc.sentence_tokens();
    let cands = candidates(&sentences);
    if cands.is_empty() || k == 0 {
        return Vec::new();
    }
    let d = embeddings.dim();
    let centroid = embeddings.mean_row();

    let content: Vec<Vec<Token>> = sentences
        .iter()
        .map(|s| {
            s.iter()
                .filter(|t| !text::is_stopword(t))
                .cloned()
                .collect()
        })
        .collect();
    let idf = embed::idf_table(&content);

    let mut scored: Vec<(usize, Keyword)> = cands
        .into_iter()
        .enumerate()
        .map(|(order, phrase)| {
            let mut v = vec![0.0f64; d];
            match mode {
                CandidateVectors::HashedTfidf { seed } => {
                    for t in &phrase {
                        let w = idf.get(t.as_str()).copied().unwrap_or(1.0);
                        v[embed::bucket(t, d, seed)] += w / phrase.len() as f64;
                    }
                }
                CandidateVectors::ContainingSentences => {
                    let rows: Vec<usize> = (0..sentences.len())
                        .filter(|&i| contains_phrase(&sentences[i], &phrase))
                        .collect();
                    for &i in &rows {
                        for (o, &x) in v.iter_mut().zip(embeddings.row(i)) {
                            *o += x as f64 / rows.len() as f64;
                        }
                    }
                }
            }
            let score = cosine(&v, &centroid);
            (order, Keyword { phrase, score })
        })
        .collect();

    scored.sort_by(|(oa, a), (ob, b)| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(oa.cmp(ob))
    });
    scored.into_iter().take(k).map(|(_, kw)| kw).collect()
}

/// Column `j` holds every sentence containing keyword `j` contiguously.
pub fn keyword_hyperedges(doc: &Document, keywords: &[Keyword]) -> IncidenceColumns {
    let sentences = doc.sentence_tokens();
    IncidenceColumns {
        n: sentences.len(),
        columns: keywords
            .iter()
            .map(|kw| {
                (0..sentences.len())
                    .filter(|&i| contains_phrase(&sentences[i], &kw.phrase))
                    .collect()
            })
            .collect(),
        labels: keywords.iter().map(Keyword::text).collect(),
    }
}
