//! Document → hypergraph construction.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::hypergraph::{self, Hypergraph, IncidenceColumns};
use crate::keywords::{self, CandidateVectors, Keyword};
use crate::text::{self, Token};
use crate::topics::{self, LdaConfig, TopicModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    pub lda: LdaConfig,
    pub keywords: usize,
    pub min_deg: usize,
    pub max_deg: usize,
    pub seed: u64,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            lda: LdaConfig::default(),
            keywords: keywords::DEFAULT_KEYWORDS,
            min_deg: hypergraph::DEFAULT_MIN_DEGREE,
            max_deg: hypergraph::DEFAULT_MAX_DEGREE,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GraphBuild {
    pub graph: Hypergraph,
    pub keywords: Vec<Keyword>,
    /// `None` when no sentence had a content word.
    pub topics: Option<TopicModel>,
}

pub fn fit_document_topics(doc: &Document, cfg: &GraphConfig) -> Result<Option<TopicModel>> {
    let content: Vec<Vec<Token>> = doc
        .sentences
        .iter()
        .map(|s| text::content_tokens(s))
        .collect();
    let k = topics::topic_count(doc.n_sentences(), cfg.lda.topics_max);
    match topics::fit_lda(
        &content,
        k,
        cfg.lda.alpha,
        cfg.lda.beta,
        cfg.lda.sweeps,
        cfg.seed,
    ) {
        Ok(m) => Ok(Some(m)),
        Err(Error::Empty(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Section, topic and keyword hyperedges for one document, fused and filtered.
pub fn build_graph(
    doc: &Document,
    embeddings: &EmbeddingMatrix,
    mode: CandidateVectors,
    cfg: &GraphConfig,
) -> Result<GraphBuild> {
    if cfg.min_deg > cfg.max_deg {
        return Err(Error::Config("min_deg exceeds max_deg".into()));
    }
    let n = doc.n_sentences();
    if embeddings.n() != n {
        return Err(Error::shape("build_graph", n, embeddings.n()));
    }
    let sections = hypergraph::section_hyperedges(doc);
    let topic_model = fit_document_topics(doc, cfg)?;
    let topic_cols = match &topic_model {
        Some(m) => topics::topic_hyperedges(m, n)?,
        None => IncidenceColumns::empty(n),
    };
    let kws = keywords::extract_keywords(doc, embeddings, cfg.keywords, mode);
    let kw_cols = keywords::keyword_hyperedges(doc, &kws);
    let graph = hypergraph::fuse(&sections, &topic_cols, &kw_cols, cfg.min_deg, cfg.max_deg)?;
    Ok(GraphBuild {
        graph,
        keywords: kws,
        topics: topic_model,
    })
}
