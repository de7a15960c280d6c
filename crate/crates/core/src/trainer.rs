//! Training loop, validation by ROUGE-1 F, early stopping, and summary
//! selection at inference time.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::embed::{self, EmbeddingMatrix, PositionalConfig};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::model::{self, ModelConfig, ModelParams, Topology};
use crate::oracle;
use crate::pipeline::GraphConfig;
use crate::rouge;
use crate::tensor::{AdamConfig, AdamState, Graph, Scalar, Tensor};
use crate::text::{self, Token};

pub const ARXIV_BUDGET_WORDS: usize = 203;
pub const PUBMED_BUDGET_WORDS: usize = 220;
pub const DEFAULT_MAX_SENTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model: ModelConfig,
    pub adam: AdamConfig,
    pub epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub positional: PositionalConfig,
    pub graph: GraphConfig,
    pub budget_words: usize,
    pub max_sents: usize,
    /// Global gradient-norm ceiling; off by default.
    pub clip: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: ModelConfig::default(),
            adam: AdamConfig::default(),
            epochs: 20,
            patience: 3,
            seed: 0,
            positional: PositionalConfig::default(),
            graph: GraphConfig::default(),
            budget_words: ARXIV_BUDGET_WORDS,
            max_sents: DEFAULT_MAX_SENTS,
            clip: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.epochs == 0 || self.budget_words == 0 || self.max_sents == 0 {
            return Err(Error::Config(
                "epochs, budget_words and max_sents must be positive".into(),
            ));
        }
        if self.patience > self.epochs {
            return Err(Error::Config(format!(
                "patience {} exceeds epochs {}",
                self.patience, self.epochs
            )));
        }
        if self.adam.lr.is_nan() || self.adam.lr <= 0.0 {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if let Some(c) = self.clip {
            if c.is_nan() || c <= 0.0 {
                return Err(Error::Config("clip must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Best-so-far trained state.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams<f32>,
    /// 1-based epoch that produced `params`.
    pub epoch: usize,
    pub val_rouge1_f: f64,
    pub config: TrainConfig,
}

/// One document ready for the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub id: String,
    /// Node inputs with hierarchical positions already added.
    pub inputs: Tensor<f32>,
    pub graph: Hypergraph,
    pub labels: Vec<u8>,
    pub sentences: Vec<Vec<Token>>,
    pub sentence_words: Vec<usize>,
    pub reference: Vec<Token>,
}

impl Example {
    pub fn new(
        doc: &Document,
        embeddings: &EmbeddingMatrix,
        graph: Hypergraph,
        labels: Vec<u8>,
        positional: &PositionalConfig,
    ) -> Result<Self> {
        let n = doc.n_sentences();
        if graph.n() != n {
            return Err(Error::shape("example graph", n, graph.n()));
        }
        if labels.len() != n {
            return Err(Error::shape("example labels", n, labels.len()));
        }
        if embeddings.n() != n {
            return Err(Error::shape("example embeddings", n, embeddings.n()));
        }
        let h0 = embed::document_node_reps(doc, embeddings, positional)?;
        Ok(Example {
            id: doc.id.clone(),
            inputs: h0.to_tensor(),
            graph,
            labels,
            sentences: doc.sentence_tokens(),
            sentence_words: doc.sentences.iter().map(|s| text::word_count(s)).collect(),
            reference: doc.abstract_tokens(),
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn summary_tokens(&self, selected: &[usize]) -> Vec<Token> {
        oracle::concat_selection(&self.sentences, selected)
    }
}

/// Ranks by score (ties to the smaller index) and takes sentences while the
/// word and sentence budgets hold. Returns indices in document order. If even
/// the top sentence exceeds the word budget it is returned alone.
pub fn select_summary<T: Scalar>(
    scores: &[T],
    sentence_words: &[usize],
    budget_words: usize,
    max_sents: usize,
) -> Result<Vec<usize>> {
    if scores.len() != sentence_words.len() {
        return Err(Error::shape(
            "select_summary",
            sentence_words.len(),
            scores.len(),
        ));
    }
    if scores.is_empty() {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut picked = Vec::new();
    let mut words = 0;
    for &i in &order {
        if picked.len() >= max_sents || words + sentence_words[i] > budget_words {
            break;
        }
        words += sentence_words[i];
        picked.push(i);
    }
    if picked.is_empty() {
        picked.push(order[0]);
    }
    picked.sort_unstable();
    Ok(picked)
}

/// Leading sentences under the same budget rule.
pub fn lead_summary(sentence_words: &[usize], budget_words: usize, max_sents: usize) -> Vec<usize> {
    let n = sentence_words.len();
    let scores: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
    select_summary(&scores, sentence_words, budget_words, max_sents).unwrap_or_default()
}

pub fn rouge1_f(example: &Example, selected: &[usize]) -> f64 {
    rouge::rouge_n(&example.summary_tokens(selected), &example.reference, 1).f1
}

/// Mean ROUGE-1 F of the model's selections over `examples`.
pub fn validate(
    params: &ModelParams<f32>,
    examples: &[Example],
    budget_words: usize,
    max_sents: usize,
) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::Empty("validation set"));
    }
    let mut total = 0.0;
    for ex in examples {
        let (scores, _) = params.score(&ex.inputs, &ex.graph)?;
        let picked = select_summary(&scores, &ex.sentence_words, budget_words, max_sents)?;
        total += rouge1_f(ex, &picked);
    }
    Ok(total / examples.len() as f64)
}

/// Mean ROUGE-1 F of the LEAD baseline.
pub fn lead_rouge1(examples: &[Example], budget_words: usize, max_sents: usize) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::Empty("validation set"));
    }
    let total: f64 = examples
        .iter()
        .map(|ex| {
            rouge1_f(
                ex,
                &lead_summary(&ex.sentence_words, budget_words, max_sents),
            )
        })
        .sum();
    Ok(total / examples.len() as f64)
}

/// Parameters, optimizer state and the two seeded streams (shuffle, dropout).
#[derive(Debug, Clone)]
pub struct Trainer {
    pub params: ModelParams<f32>,
    adam: AdamState<f32>,
    shuffle_rng: ChaCha8Rng,
    dropout_rng: ChaCha8Rng,
    clip: Option<f64>,
}

impl Trainer {
    pub fn new(cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let params = ModelParams::init(cfg.model, cfg.seed)?;
        Ok(Self::from_params(params, cfg))
    }

    pub fn from_params(params: ModelParams<f32>, cfg: &TrainConfig) -> Self {
        let shapes: Vec<(usize, usize)> = params
            .weights
            .named()
            .iter()
            .map(|(_, t)| t.shape())
            .collect();
        let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        shuffle_rng.set_stream(1);
        let mut dropout_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        dropout_rng.set_stream(2);
        Trainer {
            params,
            adam: AdamState::new(cfg.adam, shapes),
            shuffle_rng,
            dropout_rng,
            clip: cfg.clip,
        }
    }

    pub fn steps(&self) -> u64 {
        self.adam.steps()
    }

    /// Forward, backward and one Adam update on a single document.
    /// Returns the loss before the update.
    pub fn step(&mut self, ex: &Example, epoch: usize) -> Result<f64> {
        let topo = Topology::new(&ex.graph)?;
        let mut g = Graph::<f32>::new();
        let w = self.params.attach(&mut g, true);
        let x = g.constant(ex.inputs.clone());
        let dropout = self.params.config.dropout > 0.0;
        let rng: Option<&mut dyn rand::RngCore> = if dropout {
            Some(&mut self.dropout_rng)
        } else {
            None
        };
        let (f, _) = model::forward_vars(&mut g, &w, &self.params.config, x, &topo, rng)?;
        let loss = model::bce_loss(&mut g, f.scores, &ex.labels)?;
        let value = g.value(loss).get(0, 0).to_f64();
        let non_finite = || Error::NonFinite {
            epoch,
            doc_id: ex.id.clone(),
        };
        if !value.is_finite() {
            return Err(non_finite());
        }
        g.backward(loss)?;
        let mut grads: Vec<Tensor<f32>> = w
            .named()
            .iter()
            .map(|(_, v)| g.grad_or_zeros(**v))
            .collect();
        if let Some(c) = self.clip {
            clip_global_norm(&mut grads, c);
        }
        if grads.iter().any(|t| !t.is_finite()) {
            return Err(non_finite());
        }
        let mut params = self.params.weights.values_mut();
        self.adam.step(&mut params, &grads)?;
        if !self.params.is_finite() {
            return Err(non_finite());
        }
        Ok(value)
    }

    /// One shuffled pass; returns the mean pre-update loss.
    pub fn epoch(&mut self, examples: &[Example], epoch: usize) -> Result<f64> {
        if examples.is_empty() {
            return Err(Error::Empty("training set"));
        }
        let mut order: Vec<usize> = (0..examples.len()).collect();
        order.shuffle(&mut self.shuffle_rng);
        let mut total = 0.0;
        for &i in &order {
            total += self.step(&examples[i], epoch)?;
        }
        Ok(total / examples.len() as f64)
    }
}

fn clip_global_norm(grads: &mut [Tensor<f32>], max_norm: f64) {
    let sq: f64 = grads
        .iter()
        .flat_map(|t| t.data().iter())
        .map(|&x| (x as f64) * (x as f64))
        .sum();
    let norm = libm::sqrt(sq);
    if norm > max_norm {
        let s = (max_norm / norm) as f32;
        for t in grads {
            t.data_mut().iter_mut().for_each(|x| *x *= s);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_rouge1_f: f64,
    pub improved: bool,
}

#[derive(Debug, Clone)]
pub struct TrainRun {
    pub checkpoint: Checkpoint,
    pub history: Vec<EpochRecord>,
}

/// Trains with early stopping; `on_epoch` sees every epoch as it finishes.
pub fn train(
    train_set: &[Example],
    val_set: &[Example],
    cfg: &TrainConfig,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainRun> {
    let mut score = |p: &ModelParams<f32>| validate(p, val_set, cfg.budget_words, cfg.max_sents);
    train_with(train_set, val_set, cfg, &mut score, on_epoch)
}

/// [`train`] with a caller-supplied validation scorer, e.g. one that fans
/// documents out over threads. It must return the mean ROUGE-1 F that
/// [`validate`] would.
pub fn train_with(
    train_set: &[Example],
    val_set: &[Example],
    cfg: &TrainConfig,
    score: &mut dyn FnMut(&ModelParams<f32>) -> Result<f64>,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainRun> {
    if train_set.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if val_set.is_empty() {
        return Err(Error::Empty("validation set"));
    }
    let mut trainer = Trainer::new(cfg)?;
    let mut best: Option<Checkpoint> = None;
    let mut history = Vec::new();
    let mut stale = 0;
    for epoch in 1..=cfg.epochs {
        let train_loss = trainer.epoch(train_set, epoch)?;
        let val = score(&trainer.params)?;
        let improved = best.as_ref().map_or(true, |b| val > b.val_rouge1_f);
        if improved {
            best = Some(Checkpoint {
                params: trainer.params.clone(),
                epoch,
                val_rouge1_f: val,
                config: *cfg,
            });
            stale = 0;
        } else {
            stale += 1;
        }
        let rec = EpochRecord {
            epoch,
            train_loss,
            val_rouge1_f: val,
            improved,
        };
        on_epoch(&rec);
        history.push(rec);
        if stale >= cfg.patience {
            break;
        }
    }
    let checkpoint = best.ok_or(Error::Empty("training epochs"))?;
    Ok(TrainRun {
        checkpoint,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{validate as validate_doc, RawDocument, ValidateOptions};
    use crate::hypergraph::EdgeType;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn selection_examples() {
        let words = [5, 5, 5];
        assert_eq!(
            select_summary(&[0.9f32, 0.1, 0.8], &words, 10, 10).unwrap(),
            [0, 2]
        );
        assert_eq!(
            select_summary(&[0.5f32; 3], &words, 10, 10).unwrap(),
            [0, 1]
        );
        assert_eq!(
            select_summary(&[0.1f32, 0.9, 0.8], &[5, 50, 5], 10, 10).unwrap(),
            [1]
        );
        assert_eq!(
            select_summary(&[0.1f32, 0.9, 0.8], &words, 100, 1).unwrap(),
            [1]
        );
        assert!(select_summary(&[0.1f32], &words, 10, 10).is_err());
        assert_eq!(lead_summary(&[3, 3, 3, 3], 7, 10), [0, 1]);
    }

    proptest! {
        #[test]
        fn selection_is_sorted_and_within_budget(
            scores in proptest::collection::vec(0.0f64..1.0, 1..30),
            seed_words in proptest::collection::vec(1usize..40, 30),
            budget in 1usize..300,
            max_sents in 1usize..12,
        ) {
            let words = &seed_words[..scores.len()];
            let picked = select_summary(&scores, words, budget, max_sents).unwrap();
            prop_assert!(!picked.is_empty());
            prop_assert!(picked.windows(2).all(|w| w[0] < w[1]));
            let total: usize = picked.iter().map(|&i| words[i]).sum();
            if picked.len() > 1 || total <= budget {
                prop_assert!(total <= budget && picked.len() <= max_sents);
            }
        }
    }

    fn tiny_example(id: &str, n: usize, positives: &[usize], seed: u64) -> Example {
        let sentences: Vec<String> = (0..n)
            .map(|i| {
                if positives.contains(&i) {
                    format!("signal word {i}")
                } else {
                    format!("noise filler {i}")
                }
            })
            .collect();
        let raw = RawDocument {
            article_id: id.into(),
            sections: vec![sentences],
            section_names: vec!["body".into()],
            abstract_text: vec![positives
                .iter()
                .map(|i| format!("signal word {i}"))
                .collect::<Vec<_>>()
                .join(" ")],
        };
        let doc = validate_doc(&raw, ValidateOptions::default()).unwrap().0;
        let emb = embed::tfidf_embed(&doc, 16, seed).unwrap();
        let graph = Hypergraph::from_parts(
            n,
            vec![(0..n).collect(), positives.to_vec()],
            vec![EdgeType::Section, EdgeType::Keyword],
            vec![],
        )
        .unwrap();
        let labels = (0..n).map(|i| positives.contains(&i) as u8).collect();
        Example::new(&doc, &emb, graph, labels, &PositionalConfig::default()).unwrap()
    }

    fn tiny_config() -> TrainConfig {
        TrainConfig {
            model: ModelConfig {
                input_dim: 16,
                model_dim: 8,
                layers: 1,
                heads: 2,
                head_dim: 4,
                ffn_dim: 16,
                hidden_dim: 16,
                dropout: 0.1,
                ..ModelConfig::default()
            },
            adam: AdamConfig {
                lr: 1e-2,
                ..AdamConfig::default()
            },
            epochs: 4,
            patience: 2,
            seed: 3,
            budget_words: 6,
            max_sents: 2,
            ..TrainConfig::default()
        }
    }

    fn data() -> Vec<Example> {
        (0..4)
            .map(|k| tiny_example(&k.to_string(), 6, &[k, k + 2], k as u64))
            .collect()
    }

    #[test]
    fn patience_zero_runs_one_epoch() {
        let d = data();
        let cfg = TrainConfig {
            patience: 0,
            ..tiny_config()
        };
        let run = train(&d, &d, &cfg, &mut |_| {}).unwrap();
        assert_eq!(run.history.len(), 1);
        assert_eq!(run.checkpoint.epoch, 1);
    }

    #[test]
    fn seeded_runs_are_bitwise_identical() {
        let d = data();
        let a = train(&d, &d, &tiny_config(), &mut |_| {}).unwrap();
        let b = train(&d, &d, &tiny_config(), &mut |_| {}).unwrap();
        assert_eq!(a.checkpoint, b.checkpoint);
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn checkpoint_holds_the_best_epoch() {
        let d = data();
        let cfg = TrainConfig {
            epochs: 6,
            patience: 6,
            ..tiny_config()
        };
        let run = train(&d, &d, &cfg, &mut |_| {}).unwrap();
        let max = run
            .history
            .iter()
            .map(|r| r.val_rouge1_f)
            .fold(f64::MIN, f64::max);
        assert_eq!(run.checkpoint.val_rouge1_f, max);
        let rec = &run.history[run.checkpoint.epoch - 1];
        assert_eq!(rec.val_rouge1_f, max);
        let again = validate(&run.checkpoint.params, &d, cfg.budget_words, cfg.max_sents).unwrap();
        assert_eq!(again, max);
    }

    #[test]
    fn validation_is_order_independent_and_perfect_on_verbatim_selection() {
        let d = data();
        let p = ModelParams::init(tiny_config().model, 1).unwrap();
        let a = validate(&p, &d, 6, 2).unwrap();
        let rev: Vec<Example> = d.iter().rev().cloned().collect();
        let b = validate(&p, &rev, 6, 2).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(validate(&p, &[], 6, 2).is_err());
        let ex = &d[0];
        assert_eq!(rouge1_f(ex, &[0, 2]), 1.0);
    }

    #[test]
    fn errors() {
        let d = data();
        assert!(matches!(
            train(&[], &d, &tiny_config(), &mut |_| {}),
            Err(Error::Empty(_))
        ));
        let bad = TrainConfig {
            patience: 9,
            ..tiny_config()
        };
        assert!(bad.validate().is_err());
        let mut tr = Trainer::new(&tiny_config()).unwrap();
        tr.params.weights.p2_w.data_mut()[0] = f32::NAN;
        assert!(matches!(
            tr.step(&d[1], 5),
            Err(Error::NonFinite { epoch: 5, .. })
        ));
    }

    #[test]
    fn loss_drops_on_a_tiny_set() {
        let d = data();
        let cfg = TrainConfig {
            model: ModelConfig {
                dropout: 0.0,
                ..tiny_config().model
            },
            ..tiny_config()
        };
        let mut tr = Trainer::new(&cfg).unwrap();
        let first = tr.epoch(&d, 1).unwrap();
        let mut last = first;
        for e in 2..=60 {
            last = tr.epoch(&d, e).unwrap();
        }
        assert!(last < 0.5 * first, "{first} -> {last}");
        assert_eq!(tr.steps(), 240);
    }

    #[test]
    fn clipping_bounds_the_norm() {
        let mut g = vec![Tensor::from_vec(1, 2, vec![3.0f32, 4.0]).unwrap()];
        clip_global_norm(&mut g, 1.0);
        assert!((g[0].data()[0] - 0.6).abs() < 1e-6 && (g[0].data()[1] - 0.8).abs() < 1e-6);
    }
}
