//! Per-document LDA with sentences as pseudo-documents (collapsed Gibbs).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::IncidenceColumns;
use crate::text::Token;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub topics_max: usize,
    pub alpha: f64,
    pub beta: f64,
    pub sweeps: usize,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig {
            topics_max: 100,
            alpha: 0.1,
            beta: 0.01,
            sweeps: 200,
        }
    }
}

/// `min(topics_max, max(2, n / 5))`.
pub fn topic_count(n_sentences: usize, topics_max: usize) -> usize {
    topics_max.min((n_sentences / 5).max(2)).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub k: usize,
    pub vocab: Vec<String>,
    /// K×V topic-word distributions.
    pub phi: Vec<Vec<f64>>,
    /// n×K sentence-topic distributions.
    pub sentence_topic: Vec<Vec<f64>>,
    /// Argmax topic per sentence (ties go to the lower topic id).
    pub assignments: Vec<usize>,
}

impl TopicModel {
    pub fn top_words(&self, topic: usize, count: usize) -> Vec<&str> {
        let mut idx: Vec<usize> = (0..self.vocab.len()).collect();
        idx.sort_by(|&a, &b| {
            self.phi[topic][b]
                .partial_cmp(&self.phi[topic][a])
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        idx.into_iter()
            .take(count)
            .map(|i| self.vocab[i].as_str())
            .collect()
    }
}

/// Collapsed Gibbs state: one topic per token plus the three count tables.
#[derive(Debug, Clone)]
pub struct GibbsSampler {
    k: usize,
    alpha: f64,
    beta: f64,
    vocab: Vec<String>,
    docs: Vec<Vec<usize>>,
    z: Vec<Vec<usize>>,
    doc_topic: Vec<Vec<u32>>,
    topic_word: Vec<Vec<u32>>,
    topic_total: Vec<u32>,
    rng: ChaCha8Rng,
    probs: Vec<f64>,
}

impl GibbsSampler {
    pub fn new(
        sentences: &[Vec<Token>],
        k: usize,
        alpha: f64,
        beta: f64,
        seed: u64,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("topic count must be at least 1".into()));
        }
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::Config("LDA priors must be positive".into()));
        }
        let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
        for t in sentences.iter().flatten() {
            ids.entry(t.as_str()).or_insert(0);
        }
        if ids.is_empty() {
            return Err(Error::Empty("vocabulary"));
        }
        let mut vocab = Vec::with_capacity(ids.len());
        for (i, (t, id)) in ids.iter_mut().enumerate() {
            *id = i;
            vocab.push(String::from(*t));
        }
        let docs: Vec<Vec<usize>> = sentences
            .iter()
            .map(|s| s.iter().map(|t| ids[t.as_str()]).collect())
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = vocab.len();
        let mut doc_topic = vec![vec![0u32; k]; docs.len()];
        let mut topic_word = vec![vec![0u32; v]; k];
        let mut topic_total = vec![0u32; k];
        let z: Vec<Vec<usize>> = docs
            .iter()
            .enumerate()
            .map(|(d, words)| {
                words
                    .iter()
                    .map(|&w| {
                        let t = rng.gen_range(0..k);
                        doc_topic[d][t] += 1;
                        topic_word[t][w] += 1;
                        topic_total[t] += 1;
                        t
                    })
                    .collect()
            })
            .collect();
        Ok(GibbsSampler {
            k,
            alpha,
            beta,
            vocab,
            docs,
            z,
            doc_topic,
            topic_word,
            topic_total,
            rng,
            probs: vec![0.0; k],
        })
    }

    pub fn total_tokens(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    /// Sum of the topic-word table; equals [`Self::total_tokens`] at all times.
    pub fn assigned_tokens(&self) -> usize {
        self.topic_word.iter().flatten().map(|&c| c as usize).sum()
    }

    pub fn sweep(&mut self) {
        let vbeta = self.vocab.len() as f64 * self.beta;
        for d in 0..self.docs.len() {
            for pos in 0..self.docs[d].len() {
                let w = self.docs[d][pos];
                let old = self.z[d][pos];
                self.doc_topic[d][old] -= 1;
                self.topic_word[old][w] -= 1;
                self.topic_total[old] -= 1;

                let mut total = 0.0;
                for t in 0..self.k {
                    let p = (self.doc_topic[d][t] as f64 + self.alpha)
                        * (self.topic_word[t][w] as f64 + self.beta)
                        / (self.topic_total[t] as f64 + vbeta);
                    total += p;
                    self.probs[t] = total;
                }
                let u = self.rng.gen::<f64>() * total;
                let new = self.probs.iter().position(|&c| u < c).unwrap_or(self.k - 1);

                self.z[d][pos] = new;
                self.doc_topic[d][new] += 1;
                self.topic_word[new][w] += 1;
                self.topic_total[new] += 1;
            }
        }
    }

    pub fn into_model(self) -> TopicModel {
        let (k, v) = (self.k, self.vocab.len());
        let vbeta = v as f64 * self.beta;
        let kalpha = k as f64 * self.alpha;
        let phi = (0..k)
            .map(|t| {
                (0..v)
                    .map(|w| {
                        (self.topic_word[t][w] as f64 + self.beta)
                            / (self.topic_total[t] as f64 + vbeta)
                    })
                    .collect()
            })
            .collect();
        let sentence_topic: Vec<Vec<f64>> = self
            .docs
            .iter()
            .enumerate()
            .map(|(d, words)| {
                (0..k)
                    .map(|t| {
                        (self.doc_topic[d][t] as f64 + self.alpha) / (words.len() as f64 + kalpha)
                    })
                    .collect()
            })
            .collect();
        let assignments = sentence_topic
            .iter()
            .map(|row| {
                let mut best = 0;
                for (t, &p) in row.iter().enumerate() {
                    if p > row[best] {
                        best = t;
                    }
                }
                best
            })
            .collect();
        TopicModel {
            k,
            vocab: self.vocab,
            phi,
            sentence_topic,
            assignments,
        }
    }
}

pub fn fit_lda(
    sentences: &[Vec<Token>],
    k: usize,
    alpha: f64,
    beta: f64,
    sweeps: usize,
    seed: u64,
) -> Result<TopicModel> {
    if sweeps == 0 {
        return Err(Error::Config("LDA needs at least one sweep".into()));
    }
    let mut sampler = GibbsSampler::new(sentences, k, alpha, beta, seed)?;
    for _ in 0..sweeps {
        sampler.sweep();
    }
    Ok(sampler.into_model())
}

/// One column per non-empty topic; sentence `i` is a member of its argmax topic.
pub fn topic_hyperedges(model: &TopicModel, n: usize) -> Result<IncidenceColumns> {
    if model.assignments.len() != n {
        return Err(Error::shape("topic_hyperedges", n, model.assignments.len()));
    }
    let mut columns = Vec::new();
    let mut labels = Vec::new();
    for t in 0..model.k {
        let members: Vec<usize> = (0..n).filter(|&i| model.assignments[i] == t).collect();
        if !members.is_empty() {
            columns.push(members);
            labels.push(alloc::format!(
                "topic {t}: {}",
                model.top_words(t, 3).join(" ")
            ));
        }
    }
    Ok(IncidenceColumns { n, columns, labels })
}
