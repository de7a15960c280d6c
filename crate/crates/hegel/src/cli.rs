//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hegel_core::corpus::DEFAULT_MAX_SENTENCES;
use hegel_core::embed::DEFAULT_EMBED_DIM;
use hegel_core::oracle::DEFAULT_MAX_ORACLE_SENTENCES;
use hegel_core::pipeline::GraphConfig;
use hegel_core::topics::LdaConfig;
use hegel_core::trainer::{ARXIV_BUDGET_WORDS, DEFAULT_MAX_SENTS};
use hegel_core::{ModelConfig, PositionalConfig, TrainConfig};

use crate::synth::Style;

#[derive(Debug, Parser)]
#[command(
    name = "hegel",
    version,
    about = "Hypergraph transformer extractive summarizer"
)]
pub struct Cli {
    /// Worker threads for document-parallel stages (0 = one per core).
    #[arg(long, global = true, env = "HEGEL_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a JSONL corpus and optionally write the cleaned documents.
    Ingest(IngestArgs),
    /// Greedy ROUGE oracle labels for every document.
    Oracle(OracleArgs),
    /// Section, topic and keyword hypergraphs for every document.
    BuildGraph(BuildGraphArgs),
    /// Train a model and write the best checkpoint.
    Train(TrainArgs),
    /// Score and select summary sentences.
    Summarize(SummarizeArgs),
    /// ROUGE-1/2/L of system summaries (or LEAD) against the abstracts.
    Evaluate(EvaluateArgs),
    /// Per-sentence scores and attention shares for one document.
    Inspect(InspectArgs),
    /// Write a synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// JSONL corpus, one document per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Stop after this many accepted documents.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Fail on the first malformed line instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Documents longer than this are truncated.
    #[arg(long, default_value_t = DEFAULT_MAX_SENTENCES)]
    pub max_sentences: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EmbArgs {
    /// `tfidf` or a directory of exported embedding files with a manifest.json.
    #[arg(long, default_value = "tfidf")]
    pub emb: String,
    /// Width of the hashed TF-IDF vectors.
    #[arg(long, default_value_t = DEFAULT_EMBED_DIM)]
    pub tfidf_dim: usize,
    /// Hash seed of the TF-IDF vectors; keep it fixed across stages.
    #[arg(long, default_value_t = 0)]
    pub emb_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Write the cleaned documents here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub output: PathBuf,
    /// Most sentences the oracle may pick.
    #[arg(long, default_value_t = DEFAULT_MAX_ORACLE_SENTENCES)]
    pub max_sents: usize,
    /// Skip when the output was produced from identical inputs.
    #[arg(long)]
    pub cache: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    #[arg(long, default_value_t = LdaConfig::default().topics_max)]
    pub topics_max: usize,
    #[arg(long, default_value_t = LdaConfig::default().sweeps)]
    pub lda_sweeps: usize,
    #[arg(long, default_value_t = LdaConfig::default().alpha)]
    pub lda_alpha: f64,
    #[arg(long, default_value_t = LdaConfig::default().beta)]
    pub lda_beta: f64,
    /// Keywords extracted per document.
    #[arg(long, default_value_t = GraphConfig::default().keywords)]
    pub keywords: usize,
    /// Topic and keyword edges outside [min-deg, max-deg] are dropped.
    #[arg(long, default_value_t = GraphConfig::default().min_deg)]
    pub min_deg: usize,
    #[arg(long, default_value_t = GraphConfig::default().max_deg)]
    pub max_deg: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl GraphArgs {
    pub fn config(&self) -> GraphConfig {
        GraphConfig {
            lda: LdaConfig {
                topics_max: self.topics_max,
                alpha: self.lda_alpha,
                beta: self.lda_beta,
                sweeps: self.lda_sweeps,
            },
            keywords: self.keywords,
            min_deg: self.min_deg,
            max_deg: self.max_deg,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BuildGraphArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub emb: EmbArgs,
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Cache directory; one file per document.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub cache: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    /// Word budget of a summary.
    #[arg(long, default_value_t = ARXIV_BUDGET_WORDS)]
    pub budget_words: usize,
    /// Sentence cap of a summary.
    #[arg(long, default_value_t = DEFAULT_MAX_SENTS)]
    pub max_sents: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = ModelConfig::default().model_dim)]
    pub model_dim: usize,
    #[arg(long, default_value_t = ModelConfig::default().layers)]
    pub layers: usize,
    #[arg(long, default_value_t = ModelConfig::default().heads)]
    pub heads: usize,
    #[arg(long, default_value_t = ModelConfig::default().head_dim)]
    pub head_dim: usize,
    #[arg(long, default_value_t = ModelConfig::default().ffn_dim)]
    pub ffn_dim: usize,
    #[arg(long, default_value_t = ModelConfig::default().hidden_dim)]
    pub hidden_dim: usize,
    #[arg(long, default_value_t = ModelConfig::default().dropout)]
    pub dropout: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Training corpus.
    #[arg(long = "train")]
    pub train: PathBuf,
    /// Validation corpus.
    #[arg(long)]
    pub val: PathBuf,
    /// Graph cache covering both corpora.
    #[arg(long)]
    pub graphs: PathBuf,
    #[command(flatten)]
    pub emb: EmbArgs,
    /// Oracle labels for the training documents.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub select: SelectArgs,
    #[arg(long, default_value_t = TrainConfig::default().adam.lr)]
    pub lr: f64,
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    pub epochs: usize,
    #[arg(long, default_value_t = TrainConfig::default().patience)]
    pub patience: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = PositionalConfig::default().gamma1)]
    pub gamma1: f64,
    #[arg(long, default_value_t = PositionalConfig::default().gamma2)]
    pub gamma2: f64,
    /// Clip the global gradient norm at this value.
    #[arg(long)]
    pub clip: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_SENTENCES)]
    pub max_sentences: usize,
    #[arg(long)]
    pub cache: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub graphs: PathBuf,
    #[command(flatten)]
    pub emb: EmbArgs,
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// JSONL of selected sentences; annotated text goes to stdout regardless.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Word budget (default: the one the checkpoint was validated with).
    #[arg(long)]
    pub budget_words: Option<usize>,
    #[arg(long)]
    pub max_sents: Option<usize>,
    /// Do not print the annotated summaries.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Corpus holding the reference abstracts.
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// System summaries as written by `summarize`.
    #[arg(long, required_unless_present = "lead", conflicts_with = "lead")]
    pub summaries: Option<PathBuf>,
    /// Score the LEAD baseline instead.
    #[arg(long)]
    pub lead: bool,
    #[command(flatten)]
    pub select: SelectArgs,
    /// Print a JSON object instead of the one-line table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub graphs: PathBuf,
    #[command(flatten)]
    pub emb: EmbArgs,
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Article id to inspect.
    #[arg(long)]
    pub doc: String,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = Style::Pubmed)]
    pub style: Style,
    #[arg(long, default_value_t = 100)]
    pub docs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}
