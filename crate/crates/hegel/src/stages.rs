//! One function per subcommand. Progress and diagnostics go to stderr as
//! JSON lines; results go to files and stdout.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::time::Instant;

use hegel_core::keywords::contains_phrase;
use hegel_core::model::{attention_stats, AttentionShares};
use hegel_core::oracle::greedy_oracle;
use hegel_core::pipeline::{self, GraphConfig};
use hegel_core::rouge::rouge_all;
use hegel_core::tensor::AdamConfig;
use hegel_core::text::tokenize;
use hegel_core::trainer::{self, EpochRecord, Example, TrainRun};
use hegel_core::{Document, EdgeType, ModelConfig, ModelParams, PositionalConfig, TrainConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::checkpoint;
use crate::cli::{
    BuildGraphArgs, CorpusArgs, EvaluateArgs, IngestArgs, InspectArgs, OracleArgs, SummarizeArgs,
    SynthArgs, TrainArgs,
};
use crate::emb::{file_stem, EmbSource};
use crate::error::{Error, Result};
use crate::graph_cache::{self, KeywordSidecar};
use crate::jsonl::{self, LabelRecord, LoadOptions, SentenceNote, SummaryRecord};
use crate::manifest::{manifest_path_for, RunManifest};
use crate::synth;

fn log(value: serde_json::Value) {
    eprintln!("{value}");
}

/// `println!` that treats a closed pipe (`hegel ... | head`) as a normal exit.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            return Err(Error::Io { path: "<stdout>".into(), source: e });
        }
    }};
}

fn load_options(args: &CorpusArgs) -> Result<LoadOptions> {
    if args.max_sentences == 0 {
        return Err(Error::Usage("--max-sentences must be at least 1".into()));
    }
    Ok(LoadOptions {
        limit: args.limit,
        strict: args.strict,
        validate: hegel_core::corpus::ValidateOptions {
            max_sentences: args.max_sentences,
        },
    })
}

/// Loads a corpus, logging skipped lines and rejected documents.
pub fn load_corpus(args: &CorpusArgs) -> Result<Vec<Document>> {
    load_path(&args.input, load_options(args)?)
}

fn load_path(path: &Path, opts: LoadOptions) -> Result<Vec<Document>> {
    if !path.is_file() {
        return Err(Error::Missing(format!(
            "corpus {} does not exist",
            path.display()
        )));
    }
    let loaded = jsonl::load_jsonl(path, opts)?;
    for e in &loaded.parse_errors {
        log(
            json!({"event": "skipped_line", "path": path.display().to_string(), "line": e.line, "error": e.message}),
        );
    }
    for r in &loaded.rejected {
        log(
            json!({"event": "rejected", "line": r.line, "article_id": r.article_id, "reason": r.reason}),
        );
    }
    Ok(loaded.documents)
}

fn emb_source(args: &crate::cli::EmbArgs) -> Result<EmbSource> {
    EmbSource::open(&args.emb, args.tfidf_dim, args.emb_seed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub documents: usize,
    pub sentences: usize,
    pub parse_errors: usize,
    pub rejected: usize,
    pub dropped_sentences: usize,
    pub dropped_sections: usize,
    pub truncated_sentences: usize,
}

pub fn ingest(args: &IngestArgs) -> Result<IngestSummary> {
    let loaded = jsonl::load_jsonl(&args.corpus.input, load_options(&args.corpus)?)?;
    for e in &loaded.parse_errors {
        log(json!({"event": "skipped_line", "line": e.line, "error": e.message}));
    }
    for r in &loaded.rejected {
        log(
            json!({"event": "rejected", "line": r.line, "article_id": r.article_id, "reason": r.reason}),
        );
    }
    let summary = IngestSummary {
        documents: loaded.documents.len(),
        sentences: loaded.documents.iter().map(Document::n_sentences).sum(),
        parse_errors: loaded.parse_errors.len(),
        rejected: loaded.rejected.len(),
        dropped_sentences: loaded.dropped_sentences,
        dropped_sections: loaded.dropped_sections,
        truncated_sentences: loaded.truncated_sentences,
    };
    if let Some(out) = &args.out {
        let raws: Vec<_> = loaded.documents.iter().map(Document::to_raw).collect();
        jsonl::write_records(out, &raws)?;
    }
    out!(
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    );
    Ok(summary)
}

fn cached(manifest: &RunManifest, output: &Path, is_dir: bool) -> bool {
    output.exists() && manifest.matches_existing(&manifest_path_for(output, is_dir))
}

pub fn oracle(args: &OracleArgs) -> Result<()> {
    if args.max_sents == 0 {
        return Err(Error::Usage("--max-sents must be at least 1".into()));
    }
    let config = json!({"max_sents": args.max_sents, "max_sentences": args.corpus.max_sentences, "limit": args.corpus.limit});
    let manifest = RunManifest::new("oracle", 0, config, &[&args.corpus.input])?;
    if args.cache && cached(&manifest, &args.output, false) {
        log(json!({"event": "cached", "output": args.output.display().to_string()}));
        return Ok(());
    }
    let docs = load_corpus(&args.corpus)?;
    let records: Vec<LabelRecord> = docs
        .par_iter()
        .map(|d| {
            let lv = greedy_oracle(d, args.max_sents);
            LabelRecord {
                article_id: d.id.clone(),
                labels: lv.labels,
                selected: lv.selected_order,
            }
        })
        .collect();
    jsonl::write_records(&args.output, &records)?;
    manifest.write(&manifest_path_for(&args.output, false))?;
    let positives: usize = records.iter().map(|r| r.selected.len()).sum();
    log(
        json!({"event": "oracle", "documents": records.len(), "positives": positives, "manifest": manifest.hash}),
    );
    Ok(())
}

fn check_unique_ids(docs: &[Document]) -> Result<()> {
    let mut stems = BTreeMap::new();
    for d in docs {
        if let Some(prev) = stems.insert(file_stem(&d.id), &d.id) {
            return Err(Error::Usage(format!(
                "article ids {prev:?} and {:?} map to the same cache file",
                d.id
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphRunConfig {
    graph: GraphConfig,
    emb: String,
    max_sentences: usize,
    limit: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub documents: usize,
    pub nodes: usize,
    pub section_edges: usize,
    pub topic_edges: usize,
    pub keyword_edges: usize,
}

pub fn build_graph(args: &BuildGraphArgs) -> Result<GraphStats> {
    let cfg = args.graph.config();
    if cfg.min_deg > cfg.max_deg {
        return Err(Error::Usage("--min-deg exceeds --max-deg".into()));
    }
    let source = emb_source(&args.emb)?;
    let run = GraphRunConfig {
        graph: cfg,
        emb: source.describe(),
        max_sentences: args.corpus.max_sentences,
        limit: args.corpus.limit,
    };
    let mut inputs = vec![args.corpus.input.as_path()];
    let emb_manifest = source.manifest_path();
    inputs.extend(emb_manifest.as_deref());
    let manifest = RunManifest::new("build-graph", cfg.seed, &run, &inputs)?;
    if args.cache && cached(&manifest, &args.out, true) {
        log(json!({"event": "cached", "output": args.out.display().to_string()}));
        return Ok(GraphStats::default());
    }
    let docs = load_corpus(&args.corpus)?;
    check_unique_ids(&docs)?;
    let per_doc: Vec<[usize; 4]> = docs
        .par_iter()
        .map(|d| {
            let emb = source.embeddings(d)?;
            let b = pipeline::build_graph(d, &emb, source.candidate_vectors(), &cfg)?;
            graph_cache::write_graph(&args.out, &d.id, &b.graph, &manifest.hash)?;
            KeywordSidecar::new(&d.id, &b.keywords, b.topics.as_ref()).write(&args.out)?;
            let g = &b.graph;
            Ok([
                g.n(),
                g.count_of(EdgeType::Section),
                g.count_of(EdgeType::Topic),
                g.count_of(EdgeType::Keyword),
            ])
        })
        .collect::<Result<_>>()?;
    manifest.write(&manifest_path_for(&args.out, true))?;
    let stats = GraphStats {
        documents: per_doc.len(),
        nodes: per_doc.iter().map(|c| c[0]).sum(),
        section_edges: per_doc.iter().map(|c| c[1]).sum(),
        topic_edges: per_doc.iter().map(|c| c[2]).sum(),
        keyword_edges: per_doc.iter().map(|c| c[3]).sum(),
    };
    log(json!({"event": "build_graph", "stats": stats, "manifest": manifest.hash}));
    Ok(stats)
}

/// Graph settings recorded by `build-graph`, if the cache has a manifest.
fn recorded_graph_config(graphs: &Path) -> Option<GraphConfig> {
    let m = RunManifest::read(&manifest_path_for(graphs, true)).ok()?;
    serde_json::from_value::<GraphRunConfig>(m.config)
        .ok()
        .map(|c| c.graph)
}

fn require_dir(dir: &Path) -> Result<()> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(Error::Missing(format!(
            "graph cache {} does not exist; run `hegel build-graph --out {}` first",
            dir.display(),
            dir.display()
        )))
    }
}

/// Embeds, loads graphs and attaches labels for every document.
pub fn examples(
    docs: &[Document],
    graphs: &Path,
    source: &EmbSource,
    positional: &PositionalConfig,
    labels: &(dyn Fn(&Document) -> Result<Vec<u8>> + Sync),
) -> Result<Vec<Example>> {
    require_dir(graphs)?;
    docs.par_iter()
        .map(|d| {
            let emb = source.embeddings(d)?;
            let (_, g) = graph_cache::read_graph(graphs, &d.id, d.n_sentences())?;
            Ok(Example::new(d, &emb, g, labels(d)?, positional)?)
        })
        .collect()
}

fn parallel_rouge1(
    params: &ModelParams<f32>,
    val: &[Example],
    budget: usize,
    max: usize,
) -> hegel_core::Result<f64> {
    if val.is_empty() {
        return Err(hegel_core::Error::Empty("validation set"));
    }
    let each = val
        .par_iter()
        .map(|ex| {
            let (scores, _) = params.score(&ex.inputs, &ex.graph)?;
            let picked = trainer::select_summary(&scores, &ex.sentence_words, budget, max)?;
            Ok(trainer::rouge1_f(ex, &picked))
        })
        .collect::<hegel_core::Result<Vec<f64>>>()?;
    Ok(each.iter().sum::<f64>() / val.len() as f64)
}

pub fn train_config(args: &TrainArgs, input_dim: usize, graph: GraphConfig) -> TrainConfig {
    let m = &args.model;
    TrainConfig {
        model: ModelConfig {
            input_dim,
            model_dim: m.model_dim,
            layers: m.layers,
            heads: m.heads,
            head_dim: m.head_dim,
            ffn_dim: m.ffn_dim,
            hidden_dim: m.hidden_dim,
            dropout: m.dropout,
            ..ModelConfig::default()
        },
        adam: AdamConfig {
            lr: args.lr,
            ..AdamConfig::default()
        },
        epochs: args.epochs,
        patience: args.patience,
        seed: args.seed,
        positional: PositionalConfig {
            gamma1: args.gamma1,
            gamma2: args.gamma2,
        },
        graph,
        budget_words: args.select.budget_words,
        max_sents: args.select.max_sents,
        clip: args.clip,
    }
}

pub fn train(args: &TrainArgs) -> Result<Option<TrainRun>> {
    let source = emb_source(&args.emb)?;
    require_dir(&args.graphs)?;
    if !args.labels.is_file() {
        return Err(Error::Missing(format!(
            "labels file {} does not exist; run `hegel oracle --output {}` first",
            args.labels.display(),
            args.labels.display()
        )));
    }
    let graph_cfg = recorded_graph_config(&args.graphs).unwrap_or_default();
    let cfg = train_config(args, source.dim(), graph_cfg);
    cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;

    let mut inputs = vec![
        args.train.as_path(),
        args.val.as_path(),
        args.graphs.as_path(),
        args.labels.as_path(),
    ];
    let emb_manifest = source.manifest_path();
    inputs.extend(emb_manifest.as_deref());
    let run_config =
        json!({"train": cfg, "emb": source.describe(), "max_sentences": args.max_sentences});
    let manifest = RunManifest::new("train", cfg.seed, run_config, &inputs)?;
    if args.cache && cached(&manifest, &args.out, false) {
        log(json!({"event": "cached", "output": args.out.display().to_string()}));
        return Ok(None);
    }

    let opts = LoadOptions {
        validate: hegel_core::corpus::ValidateOptions {
            max_sentences: args.max_sentences,
        },
        ..LoadOptions::default()
    };
    let train_docs = load_path(&args.train, opts)?;
    let val_docs = load_path(&args.val, opts)?;
    let labels: HashMap<String, Vec<u8>> = jsonl::read_records::<LabelRecord>(&args.labels)?
        .into_iter()
        .map(|r| (r.article_id, r.labels))
        .collect();
    let train_labels = |d: &Document| -> Result<Vec<u8>> {
        labels.get(&d.id).cloned().ok_or_else(|| {
            Error::Missing(format!(
                "no oracle labels for {:?} in {}; run `hegel oracle` on the training corpus",
                d.id,
                args.labels.display()
            ))
        })
    };
    // Validation is scored by ROUGE against the abstract; labels are unused.
    let val_labels = |d: &Document| -> Result<Vec<u8>> { Ok(vec![0; d.n_sentences()]) };
    let train_set = examples(
        &train_docs,
        &args.graphs,
        &source,
        &cfg.positional,
        &train_labels,
    )?;
    let val_set = examples(
        &val_docs,
        &args.graphs,
        &source,
        &cfg.positional,
        &val_labels,
    )?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::Core(hegel_core::Error::Empty(
            if train_set.is_empty() {
                "training set"
            } else {
                "validation set"
            },
        )));
    }

    let lead = trainer::lead_rouge1(&val_set, cfg.budget_words, cfg.max_sents)?;
    let params = ModelParams::<f32>::zeros(cfg.model)?.n_params();
    log(json!({
        "event": "start", "train_docs": train_set.len(), "val_docs": val_set.len(),
        "params": params, "val_lead_rouge1_f": lead, "manifest": manifest.hash,
    }));
    let started = Instant::now();
    let mut on_epoch = |r: &EpochRecord| {
        log(json!({
            "event": "epoch", "epoch": r.epoch, "loss": r.train_loss, "val_rouge1_f": r.val_rouge1_f,
            "improved": r.improved, "elapsed_s": started.elapsed().as_secs_f64(),
        }));
    };
    let mut score =
        |p: &ModelParams<f32>| parallel_rouge1(p, &val_set, cfg.budget_words, cfg.max_sents);
    let run = trainer::train_with(&train_set, &val_set, &cfg, &mut score, &mut on_epoch)?;
    checkpoint::save(&args.out, &run.checkpoint, &manifest.hash)?;
    manifest.write(&manifest_path_for(&args.out, false))?;
    log(json!({
        "event": "done", "best_epoch": run.checkpoint.epoch, "val_rouge1_f": run.checkpoint.val_rouge1_f,
        "epochs_run": run.history.len(), "checkpoint": args.out.display().to_string(),
    }));
    Ok(Some(run))
}

fn sentence_notes(
    doc: &Document,
    selected: &[usize],
    sidecar: Option<&KeywordSidecar>,
) -> Vec<SentenceNote> {
    let tokens = doc.sentence_tokens();
    selected
        .iter()
        .map(|&i| {
            let section = doc
                .section_of(i)
                .map(|s| doc.sections[s].name.clone())
                .unwrap_or_default();
            let (keywords, topics) = match sidecar {
                Some(sc) => (
                    sc.keywords
                        .iter()
                        .filter(|k| contains_phrase(&tokens[i], &tokenize(&k.text)))
                        .map(|k| k.text.clone())
                        .collect(),
                    sc.topics
                        .iter()
                        .filter(|t| t.sentences.contains(&i))
                        .map(|t| format!("topic {}: {}", t.topic, t.top_words.join(" ")))
                        .collect(),
                ),
                None => (Vec::new(), Vec::new()),
            };
            SentenceNote {
                index: i,
                section,
                keywords,
                topics,
            }
        })
        .collect()
}

fn render(rec: &SummaryRecord) -> String {
    let mut out = format!("# {}\n", rec.article_id);
    for (s, note) in rec.sentences.iter().zip(&rec.notes) {
        out.push_str(&format!("[{}] {}\n", note.section, s));
        let mut tags = Vec::new();
        if !note.keywords.is_empty() {
            tags.push(format!("keywords: {}", note.keywords.join(", ")));
        }
        tags.extend(note.topics.iter().cloned());
        if !tags.is_empty() {
            out.push_str(&format!("    {}\n", tags.join(" | ")));
        }
    }
    out
}

pub fn summarize(args: &SummarizeArgs) -> Result<Vec<SummaryRecord>> {
    let (_, ckpt) = checkpoint::load(&args.checkpoint)?;
    let source = emb_source(&args.emb)?;
    if source.dim() != ckpt.config.model.input_dim {
        return Err(Error::Usage(format!(
            "embeddings have width {} but the checkpoint expects {}",
            source.dim(),
            ckpt.config.model.input_dim
        )));
    }
    let budget = args.budget_words.unwrap_or(ckpt.config.budget_words);
    let max = args.max_sents.unwrap_or(ckpt.config.max_sents);
    if budget == 0 || max == 0 {
        return Err(Error::Usage(
            "--budget-words and --max-sents must be positive".into(),
        ));
    }
    let docs = load_corpus(&args.corpus)?;
    let zeros = |d: &Document| -> Result<Vec<u8>> { Ok(vec![0; d.n_sentences()]) };
    let exs = examples(
        &docs,
        &args.graphs,
        &source,
        &ckpt.config.positional,
        &zeros,
    )?;
    let records = docs
        .par_iter()
        .zip(&exs)
        .map(|(d, ex)| {
            let (scores, _) = ckpt.params.score(&ex.inputs, &ex.graph)?;
            let selected = trainer::select_summary(&scores, &ex.sentence_words, budget, max)?;
            let sidecar = KeywordSidecar::read(&args.graphs, &d.id)?;
            Ok(SummaryRecord {
                article_id: d.id.clone(),
                sentences: selected.iter().map(|&i| d.sentences[i].clone()).collect(),
                notes: sentence_notes(d, &selected, sidecar.as_ref()),
                selected,
                scores,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(out) = &args.output {
        jsonl::write_records(out, &records)?;
    }
    if !args.quiet {
        for r in &records {
            out!("{}", render(r));
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalScores {
    pub documents: usize,
    pub rouge1_f: f64,
    pub rouge2_f: f64,
    pub rouge_l_f: f64,
}

impl EvalScores {
    pub fn line(&self) -> String {
        format!(
            "ROUGE-1/2/L F: {:.2} / {:.2} / {:.2}",
            100.0 * self.rouge1_f,
            100.0 * self.rouge2_f,
            100.0 * self.rouge_l_f
        )
    }
}

pub fn evaluate(args: &EvaluateArgs) -> Result<EvalScores> {
    let docs = load_corpus(&args.corpus)?;
    let by_id: HashMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();
    let pairs: Vec<(Vec<String>, &Document)> = if args.lead {
        if args.select.budget_words == 0 || args.select.max_sents == 0 {
            return Err(Error::Usage(
                "--budget-words and --max-sents must be positive".into(),
            ));
        }
        docs.iter()
            .map(|d| {
                let words: Vec<usize> = d
                    .sentences
                    .iter()
                    .map(|s| hegel_core::text::word_count(s))
                    .collect();
                let picked =
                    trainer::lead_summary(&words, args.select.budget_words, args.select.max_sents);
                (picked.iter().map(|&i| d.sentences[i].clone()).collect(), d)
            })
            .collect()
    } else {
        let path = args
            .summaries
            .as_ref()
            .expect("clap requires --summaries without --lead");
        if !path.is_file() {
            return Err(Error::Missing(format!(
                "summaries {} do not exist; run `hegel summarize --output {}` first",
                path.display(),
                path.display()
            )));
        }
        jsonl::read_records::<SummaryRecord>(path)?
            .into_iter()
            .map(|r| {
                let d = by_id.get(r.article_id.as_str()).ok_or_else(|| {
                    Error::Missing(format!(
                        "summary for {:?} has no document in {}",
                        r.article_id,
                        args.corpus.input.display()
                    ))
                })?;
                Ok((r.sentences, *d))
            })
            .collect::<Result<_>>()?
    };
    if pairs.is_empty() {
        return Err(Error::Core(hegel_core::Error::Empty("evaluation set")));
    }
    let each: Vec<[f64; 3]> = pairs
        .par_iter()
        .map(|(sents, d)| {
            let cand = tokenize(&sents.join(" "));
            let r = rouge_all(&cand, &d.abstract_tokens());
            [r.rouge1.f1, r.rouge2.f1, r.rouge_l.f1]
        })
        .collect();
    let k = each.len() as f64;
    let mean = |j: usize| each.iter().map(|v| v[j]).sum::<f64>() / k;
    let scores = EvalScores {
        documents: each.len(),
        rouge1_f: mean(0),
        rouge2_f: mean(1),
        rouge_l_f: mean(2),
    };
    if args.json {
        out!(
            "{}",
            serde_json::to_string(&scores).expect("scores serialize")
        );
    } else {
        out!("{}", scores.line());
    }
    Ok(scores)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InspectReport {
    pub article_id: String,
    pub n: usize,
    pub edges: BTreeMap<EdgeType, usize>,
    pub scores: Vec<f32>,
    pub selected: Vec<usize>,
    /// Averaged over the selected sentences.
    pub attention: AttentionShares,
    /// Averaged over every sentence.
    pub attention_all: AttentionShares,
}

pub fn inspect(args: &InspectArgs) -> Result<InspectReport> {
    let (_, ckpt) = checkpoint::load(&args.checkpoint)?;
    let source = emb_source(&args.emb)?;
    if source.dim() != ckpt.config.model.input_dim {
        return Err(Error::Usage(format!(
            "embeddings have width {} but the checkpoint expects {}",
            source.dim(),
            ckpt.config.model.input_dim
        )));
    }
    let docs = load_corpus(&args.corpus)?;
    let doc = docs.iter().find(|d| d.id == args.doc).ok_or_else(|| {
        Error::Missing(format!(
            "no document {:?} in {}",
            args.doc,
            args.corpus.input.display()
        ))
    })?;
    let zeros = |d: &Document| -> Result<Vec<u8>> { Ok(vec![0; d.n_sentences()]) };
    let ex = examples(
        std::slice::from_ref(doc),
        &args.graphs,
        &source,
        &ckpt.config.positional,
        &zeros,
    )?
    .pop()
    .expect("one document in, one example out");
    let (scores, trace) = ckpt.params.score(&ex.inputs, &ex.graph)?;
    let selected = trainer::select_summary(
        &scores,
        &ex.sentence_words,
        ckpt.config.budget_words,
        ckpt.config.max_sents,
    )?;
    let types = ex.graph.edge_types();
    let report = InspectReport {
        article_id: doc.id.clone(),
        n: ex.n(),
        edges: EdgeType::ALL
            .iter()
            .map(|&t| (t, ex.graph.count_of(t)))
            .collect(),
        attention: attention_stats(&trace, types, &selected)?,
        attention_all: attention_stats(&trace, types, &[])?,
        scores,
        selected,
    };
    out!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(report)
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let docs = synth::corpus(args.style, args.docs, args.seed);
    jsonl::write_records(&args.out, &docs)?;
    let ids: BTreeSet<&str> = docs.iter().map(|d| d.article_id.as_str()).collect();
    log(json!({"event": "synth", "documents": ids.len(), "out": args.out.display().to_string()}));
    Ok(())
}
