//! Acceptance checks. Run with `cargo test -p hegel --test acceptance`.
//!
//! Prints one PASS/FAIL line per criterion and exits non-zero if any fail.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hegel::synth::{self, Style};
use hegel::{emb, graph_cache};
use hegel_core::corpus::{validate, ValidateOptions};
use hegel_core::embed::tfidf_embed;
use hegel_core::keywords::CandidateVectors;
use hegel_core::model::{self, attention_stats, Topology};
use hegel_core::oracle::greedy_oracle;
use hegel_core::pipeline::{build_graph, GraphConfig};
use hegel_core::rouge::rouge_n;
use hegel_core::tensor::{AdamConfig, Graph};
use hegel_core::text::tokenize;
use hegel_core::topics::{fit_lda, LdaConfig};
use hegel_core::trainer::{self, Example, Trainer};
use hegel_core::{
    Document, EdgeType, EmbeddingMatrix, Hypergraph, ModelConfig, ModelParams, PositionalConfig,
    RawDocument, Tensor, TrainConfig,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRAD_STEP: f64 = 1e-5;
const GRAD_REL_TOL: f64 = 1e-4;
/// Denominator floor for the relative error of near-zero gradients.
const GRAD_FLOOR: f64 = 1e-6;
const GRAD_TIME: Duration = Duration::from_secs(10);
const NORM_TOL: f64 = 1e-6;
const PERM_TOL: f32 = 1e-5;
const OVERFIT_BCE: f64 = 0.05;
const OVERFIT_EPOCHS: usize = 200;
const OVERFIT_MIN_CORRECT: usize = 19;
const OVERFIT_TIME: Duration = Duration::from_secs(120);
const DEG_RANGE: (usize, usize) = (5, 25);
const LDA_PURITY: f64 = 0.9;
const SIGNAL_TIME: Duration = Duration::from_secs(30 * 60);
const SHARE_TOL: f64 = 1e-6;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { name, pass, detail }
}

fn raw(id: &str, sections: Vec<Vec<String>>, abstract_text: Vec<String>) -> RawDocument {
    let names = (0..sections.len())
        .map(|i| format!("section {i}"))
        .collect();
    RawDocument {
        article_id: id.to_string(),
        sections,
        section_names: names,
        abstract_text,
    }
}

fn clean(r: &RawDocument) -> Document {
    validate(r, ValidateOptions::default())
        .expect("valid document")
        .0
}

fn small_model(input_dim: usize, model_dim: usize, heads: usize, layers: usize) -> ModelConfig {
    ModelConfig {
        input_dim,
        model_dim,
        layers,
        heads,
        head_dim: model_dim / heads,
        ffn_dim: 2 * model_dim,
        hidden_dim: 2 * model_dim,
        dropout: 0.0,
        ..ModelConfig::default()
    }
}

fn random_tensor(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Tensor<f64> {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Tensor::from_vec(rows, cols, data).unwrap()
}

fn loss_of(params: &ModelParams<f64>, x: &Tensor<f64>, topo: &Topology, labels: &[u8]) -> f64 {
    let mut g = Graph::new();
    let w = params.attach(&mut g, false);
    let xv = g.constant(x.clone());
    let (f, _) = model::forward_vars(&mut g, &w, &params.config, xv, topo, None).unwrap();
    let l = model::bce_loss(&mut g, f.scores, labels).unwrap();
    g.value(l).get(0, 0)
}

fn gradient_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = small_model(8, 8, 1, 1);
    let mut params = ModelParams::<f64>::init(cfg, 2).unwrap();
    // Non-trivial LayerNorm affine terms and biases so their gradients are exercised.
    for t in params.weights.values_mut() {
        for v in t.data_mut() {
            *v += rng.gen_range(-0.3..0.3);
        }
    }
    let graph = Hypergraph::from_parts(
        6,
        vec![vec![0, 1, 2], vec![3, 4, 5], vec![1, 3, 5]],
        vec![EdgeType::Section, EdgeType::Section, EdgeType::Keyword],
        vec!["a".into(), "b".into(), "k".into()],
    )
    .unwrap();
    let topo = Topology::new(&graph).unwrap();
    let x = random_tensor(6, 8, &mut rng);
    let labels = [1u8, 0, 0, 1, 0, 1];

    let mut g = Graph::new();
    let w = params.attach(&mut g, true);
    let xv = g.constant(x.clone());
    let (f, _) = model::forward_vars(&mut g, &w, &cfg, xv, &topo, None).unwrap();
    let l = model::bce_loss(&mut g, f.scores, &labels).unwrap();
    g.backward(l).unwrap();
    let analytic: Vec<Tensor<f64>> = w
        .named()
        .iter()
        .map(|(_, v)| g.grad_or_zeros(**v))
        .collect();
    let names: Vec<String> = params.weights.named().into_iter().map(|(n, _)| n).collect();

    let mut worst = (0.0f64, String::new());
    let mut checked = 0;
    for (ti, grad) in analytic.iter().enumerate() {
        for k in 0..grad.len() {
            let mut plus = params.clone();
            plus.weights.values_mut()[ti].data_mut()[k] += GRAD_STEP;
            let mut minus = params.clone();
            minus.weights.values_mut()[ti].data_mut()[k] -= GRAD_STEP;
            let fd = (loss_of(&plus, &x, &topo, &labels) - loss_of(&minus, &x, &topo, &labels))
                / (2.0 * GRAD_STEP);
            let a = grad.data()[k];
            let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(GRAD_FLOOR);
            if rel > worst.0 {
                worst = (rel, format!("{}[{k}]", names[ti]));
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        "gradient fidelity",
        worst.0 < GRAD_REL_TOL && elapsed < GRAD_TIME,
        format!(
            "{checked} entries, max rel err {:.2e} at {}, {:.2}s",
            worst.0,
            worst.1,
            elapsed.as_secs_f64()
        ),
    )
}

fn random_hypergraph(rng: &mut ChaCha8Rng) -> Hypergraph {
    let n = rng.gen_range(2..=50);
    let m = rng.gen_range(1..=20);
    let mut members = vec![Vec::new(); m];
    for i in 0..n {
        members[rng.gen_range(0..m)].push(i);
    }
    for col in members.iter_mut() {
        for i in 0..n {
            if rng.gen_bool(0.15) && !col.contains(&i) {
                col.push(i);
            }
        }
        while col.len() < 2 {
            let i = rng.gen_range(0..n);
            if !col.contains(&i) {
                col.push(i);
            }
        }
        col.sort_unstable();
    }
    let types = (0..m).map(|_| EdgeType::ALL[rng.gen_range(0..3)]).collect();
    let labels = (0..m).map(|j| format!("e{j}")).collect();
    Hypergraph::from_parts(n, members, types, labels).unwrap()
}

fn attention_normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = small_model(12, 16, 2, 2);
    let params = ModelParams::<f64>::init(cfg, 4).unwrap();
    let mut worst_alpha = 0.0f64;
    let mut worst_beta = 0.0f64;
    let mut leaked = 0.0f64;
    for _ in 0..100 {
        let graph = random_hypergraph(&mut rng);
        let x = random_tensor(graph.n(), 12, &mut rng);
        let (_, trace) = params.score(&x, &graph).unwrap();
        for head in trace.layers.iter().flatten() {
            for j in 0..graph.m() {
                let row = head.alpha.row(j);
                let inside: f64 = graph.members(j).iter().map(|&i| row[i]).sum();
                let total: f64 = row.iter().sum();
                worst_alpha = worst_alpha.max((inside - 1.0).abs());
                leaked = leaked.max((total - inside).abs());
            }
            for i in 0..graph.n() {
                let row = head.beta.row(i);
                let inside: f64 = graph.incident_edges(i).iter().map(|&j| row[j]).sum();
                let total: f64 = row.iter().sum();
                worst_beta = worst_beta.max((inside - 1.0).abs());
                leaked = leaked.max((total - inside).abs());
            }
        }
    }
    outcome(
        "attention normalization",
        worst_alpha < NORM_TOL && worst_beta < NORM_TOL && leaked == 0.0,
        format!("100 graphs, max |sum-1| alpha {worst_alpha:.1e}, beta {worst_beta:.1e}, mass outside incidence {leaked:.1e}"),
    )
}

fn examples_from(
    raws: &[RawDocument],
    emb_dim: usize,
    gcfg: &GraphConfig,
    positional: &PositionalConfig,
) -> Vec<Example> {
    raws.iter()
        .map(|r| {
            let doc = clean(r);
            let emb = tfidf_embed(&doc, emb_dim, 0).unwrap();
            let b =
                build_graph(&doc, &emb, CandidateVectors::HashedTfidf { seed: 0 }, gcfg).unwrap();
            let labels = greedy_oracle(&doc, 30).labels;
            Example::new(&doc, &emb, b.graph, labels, positional).unwrap()
        })
        .collect()
}

fn permutation_equivariance() -> Outcome {
    let raws = synth::corpus(Style::Arxiv, 20, 17);
    let gcfg = GraphConfig {
        lda: LdaConfig {
            sweeps: 50,
            ..LdaConfig::default()
        },
        ..GraphConfig::default()
    };
    let exs = examples_from(&raws, 128, &gcfg, &PositionalConfig::default());
    let params = ModelParams::<f32>::init(small_model(128, 32, 4, 2), 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f32;
    for ex in &exs {
        let mut perm: Vec<usize> = (0..ex.n()).collect();
        perm.shuffle(&mut rng);
        let (base, _) = params.score(&ex.inputs, &ex.graph).unwrap();
        let (moved, _) = params
            .score(
                &ex.inputs.select_rows(&perm),
                &ex.graph.permute_nodes(&perm).unwrap(),
            )
            .unwrap();
        for (i, &p) in perm.iter().enumerate() {
            worst = worst.max((moved[i] - base[p]).abs());
        }
    }
    outcome(
        "permutation equivariance",
        worst < PERM_TOL,
        format!("20 documents, max |score diff| {worst:.2e} (f32)"),
    )
}

/// Clipped overlap by explicit matching: each candidate n-gram consumes one
/// unused equal reference n-gram.
fn brute_rouge_f<T: PartialEq>(cand: &[T], reference: &[T], n: usize) -> f64 {
    let grams = |t: &[T]| -> usize { (t.len() + 1).saturating_sub(n) };
    let (cg, rg) = (grams(cand), grams(reference));
    let mut used = vec![false; rg];
    let mut overlap = 0;
    for i in 0..cg {
        if let Some(j) = (0..rg).find(|&j| !used[j] && cand[i..i + n] == reference[j..j + n]) {
            used[j] = true;
            overlap += 1;
        }
    }
    if overlap == 0 {
        return 0.0;
    }
    let p = overlap as f64 / cg as f64;
    let r = overlap as f64 / rg as f64;
    2.0 * p * r / (p + r)
}

fn brute_oracle(sentences: &[Vec<&str>], reference: &[&str], max: usize) -> Vec<usize> {
    let objective = |sel: &[usize]| {
        let mut idx = sel.to_vec();
        idx.sort_unstable();
        let cand: Vec<&str> = idx
            .iter()
            .flat_map(|&i| sentences[i].iter().copied())
            .collect();
        0.5 * (brute_rouge_f(&cand, reference, 1) + brute_rouge_f(&cand, reference, 2))
    };
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = 0.0;
    while chosen.len() < max {
        let scored: Vec<(usize, f64)> = (0..sentences.len())
            .filter(|i| !chosen.contains(i))
            .map(|i| {
                let mut s = chosen.clone();
                s.push(i);
                (i, objective(&s))
            })
            .collect();
        let Some(best) = scored.iter().map(|&(_, v)| v).reduce(f64::max) else {
            break;
        };
        if best <= current + 1e-9 {
            break;
        }
        let pick = scored.iter().find(|&&(_, v)| v == best).unwrap().0;
        chosen.push(pick);
        current = best;
    }
    chosen
}

fn all_strings(alphabet: &[u8], max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        frontier = frontier
            .iter()
            .flat_map(|s: &Vec<u8>| {
                alphabet.iter().map(move |&c| {
                    let mut t = s.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let vocab = ["w0", "w1", "w2", "w3", "w4", "w5"];
    let mut oracle_mismatch = 0;
    for d in 0..200 {
        let n = rng.gen_range(1..=10);
        let sentences: Vec<Vec<&str>> = (0..n)
            .map(|_| {
                (0..rng.gen_range(1..=8))
                    .map(|_| *vocab.choose(&mut rng).unwrap())
                    .collect()
            })
            .collect();
        let reference: Vec<&str> = (0..rng.gen_range(1..=15))
            .map(|_| *vocab.choose(&mut rng).unwrap())
            .collect();
        let max = rng.gen_range(1..=n);
        let r = raw(
            &format!("d{d}"),
            vec![sentences.iter().map(|s| s.join(" ")).collect()],
            vec![reference.join(" ")],
        );
        let got = greedy_oracle(&clean(&r), max).selected_order;
        if got != brute_oracle(&sentences, &reference, max) {
            oracle_mismatch += 1;
        }
    }

    // Every {a,b} string up to length 12 against fixed references, plus every
    // pair of {a,b,c} strings up to length 4.
    let mut rouge_mismatch = 0;
    let mut pairs = 0;
    let long = all_strings(b"ab", 12);
    let refs: Vec<Vec<u8>> = (0..24)
        .map(|_| {
            let len = rng.gen_range(0..=12);
            (0..len)
                .map(|_| *b"abc".choose(&mut rng).unwrap())
                .collect()
        })
        .collect();
    let short = all_strings(b"abc", 4);
    let mut check = |c: &[u8], r: &[u8]| {
        pairs += 1;
        for n in [1, 2] {
            if rouge_n(c, r, n).f1 != brute_rouge_f(c, r, n) {
                rouge_mismatch += 1;
            }
        }
    };
    for c in &long {
        for r in &refs {
            check(c, r);
        }
    }
    for c in &short {
        for r in &short {
            check(c, r);
        }
    }
    outcome(
        "oracle equivalence",
        oracle_mismatch == 0 && rouge_mismatch == 0,
        format!("oracle: 200 docs, {oracle_mismatch} mismatches; ROUGE-1/2: {pairs} pairs, {rouge_mismatch} mismatches"),
    )
}

fn bce(scores: &[f32], labels: &[u8]) -> f64 {
    let eps = model::BCE_EPS;
    scores
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = (p as f64).clamp(eps, 1.0 - eps);
            if y == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / scores.len() as f64
}

fn top_k(scores: &[f32], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

fn overfit_sanity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let words: Vec<String> = (0..300).map(|i| format!("tok{i}")).collect();
    let positional = PositionalConfig::default();
    let mut exs = Vec::new();
    for d in 0..20 {
        let planted = format!("planted{d}");
        let mut pair: Vec<usize> = rand::seq::index::sample(&mut rng, 8, 2).into_vec();
        pair.sort_unstable();
        let sentences: Vec<String> = (0..8)
            .map(|i| {
                let mut s: Vec<String> = words.choose_multiple(&mut rng, 8).cloned().collect();
                if pair.contains(&i) {
                    s.insert(rng.gen_range(0..=s.len()), planted.clone());
                }
                s.join(" ")
            })
            .collect();
        let abstract_text = pair.iter().map(|&i| sentences[i].clone()).collect();
        let r = raw(
            &format!("o{d}"),
            vec![sentences[..4].to_vec(), sentences[4..].to_vec()],
            abstract_text,
        );
        let doc = clean(&r);
        let labels = greedy_oracle(&doc, 30).labels;
        let graph = Hypergraph::from_parts(
            8,
            vec![(0..4).collect(), (4..8).collect(), pair.clone()],
            vec![EdgeType::Section, EdgeType::Section, EdgeType::Keyword],
            vec!["section 0".into(), "section 1".into(), planted],
        )
        .unwrap();
        let emb = tfidf_embed(&doc, 64, 0).unwrap();
        exs.push(Example::new(&doc, &emb, graph, labels, &positional).unwrap());
    }
    let cfg = TrainConfig {
        model: small_model(64, 32, 4, 2),
        adam: AdamConfig {
            lr: 1e-3,
            ..AdamConfig::default()
        },
        epochs: OVERFIT_EPOCHS,
        seed: 11,
        ..TrainConfig::default()
    };
    let mut trainer = Trainer::new(&cfg).unwrap();
    let eval = |p: &ModelParams<f32>| -> (f64, usize) {
        let mut loss = 0.0;
        let mut correct = 0;
        for ex in &exs {
            let (s, _) = p.score(&ex.inputs, &ex.graph).unwrap();
            loss += bce(&s, &ex.labels);
            let k = ex.labels.iter().filter(|&&y| y == 1).count();
            let truth: Vec<usize> = (0..ex.n()).filter(|&i| ex.labels[i] == 1).collect();
            if top_k(&s, k) == truth {
                correct += 1;
            }
        }
        (loss / exs.len() as f64, correct)
    };
    let mut reached = None;
    let mut last = (f64::INFINITY, 0);
    for epoch in 1..=OVERFIT_EPOCHS {
        trainer.epoch(&exs, epoch).unwrap();
        last = eval(&trainer.params);
        if last.0 < OVERFIT_BCE {
            reached = Some(epoch);
            break;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        "overfit sanity",
        reached.is_some() && last.1 >= OVERFIT_MIN_CORRECT && elapsed < OVERFIT_TIME,
        format!(
            "BCE {:.4} at epoch {}, top-k correct {}/20, {:.1}s",
            last.0,
            reached.map_or("none".into(), |e| e.to_string()),
            last.1,
            elapsed.as_secs_f64()
        ),
    )
}

fn hypergraph_construction() -> Outcome {
    let raws = synth::corpus(Style::Arxiv, 200, 23);
    let cfg = GraphConfig::default();
    let build = || -> Vec<(Document, Hypergraph)> {
        raws.iter()
            .map(|r| {
                let doc = clean(r);
                let emb = tfidf_embed(&doc, 768, 0).unwrap();
                let g = build_graph(&doc, &emb, CandidateVectors::HashedTfidf { seed: 0 }, &cfg)
                    .unwrap()
                    .graph;
                (doc, g)
            })
            .collect()
    };
    let first = build();
    let second = build();
    let mut isolated = 0;
    let mut out_of_range = 0;
    let mut counts = [0usize; 3];
    let mut identical = true;
    for ((doc, g), (_, g2)) in first.iter().zip(&second) {
        isolated += (0..g.n())
            .filter(|&i| g.incident_edges(i).is_empty())
            .count();
        for j in 0..g.m() {
            let ty = g.edge_types()[j];
            counts[ty.index()] += 1;
            if ty != EdgeType::Section && !(DEG_RANGE.0..=DEG_RANGE.1).contains(&g.degree(j)) {
                out_of_range += 1;
            }
        }
        identical &= graph_cache::encode(&doc.id, g, "") == graph_cache::encode(&doc.id, g2, "");
    }
    outcome(
        "hypergraph construction",
        isolated == 0 && out_of_range == 0 && identical && counts[1] > 0 && counts[2] > 0,
        format!(
            "200 synthetic arXiv-style docs; edges section/topic/keyword {}/{}/{}; isolated {isolated}; out-of-range {out_of_range}; rebuild identical {identical}",
            counts[0], counts[1], counts[2]
        ),
    )
}

fn lda_recovery() -> Outcome {
    let mut purities = Vec::new();
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let vocab: [Vec<String>; 2] = [
            (0..20).map(|i| format!("alpha{i}")).collect(),
            (0..20).map(|i| format!("omega{i}")).collect(),
        ];
        let mut truth = Vec::new();
        let mut sentences = Vec::new();
        for i in 0..200 {
            let t = i % 2;
            let text: Vec<&str> = (0..10)
                .map(|_| vocab[t].choose(&mut rng).unwrap().as_str())
                .collect();
            sentences.push(tokenize(&text.join(" ")));
            truth.push(t);
        }
        let m = fit_lda(&sentences, 2, 0.1, 0.01, 200, seed).unwrap();
        let mut table: HashMap<usize, [usize; 2]> = HashMap::new();
        for (&a, &t) in m.assignments.iter().zip(&truth) {
            table.entry(a).or_default()[t] += 1;
        }
        let hit: usize = table.values().map(|c| c[0].max(c[1])).sum();
        purities.push(hit as f64 / 200.0);
    }
    let min = purities.iter().copied().fold(1.0, f64::min);
    outcome(
        "LDA recovery",
        min >= LDA_PURITY,
        format!("purity per seed {purities:?}"),
    )
}

fn learning_signal() -> (Outcome, Outcome) {
    let start = Instant::now();
    let positional = PositionalConfig::default();
    let gcfg = GraphConfig::default();
    let dim = 256;
    let train_set = examples_from(
        &synth::corpus(Style::Pubmed, 500, 31),
        dim,
        &gcfg,
        &positional,
    );
    let val_set = examples_from(
        &synth::corpus(Style::Pubmed, 100, 32),
        dim,
        &gcfg,
        &positional,
    );
    let cfg = TrainConfig {
        model: ModelConfig {
            input_dim: dim,
            model_dim: 64,
            heads: 4,
            head_dim: 16,
            ffn_dim: 256,
            hidden_dim: 256,
            ..ModelConfig::default()
        },
        epochs: 20,
        patience: 3,
        seed: 33,
        budget_words: trainer::PUBMED_BUDGET_WORDS,
        ..TrainConfig::default()
    };
    let lead = trainer::lead_rouge1(&val_set, cfg.budget_words, cfg.max_sents).unwrap();
    let run = trainer::train(&train_set, &val_set, &cfg, &mut |_| {}).unwrap();
    let best = run.checkpoint.val_rouge1_f;
    let elapsed = start.elapsed();
    let signal = outcome(
        "learning signal",
        best > lead && elapsed < SIGNAL_TIME,
        format!(
            "val ROUGE-1 F {:.2} (epoch {} of {}) vs LEAD {:.2}, {:.0}s",
            100.0 * best,
            run.checkpoint.epoch,
            run.history.len(),
            100.0 * lead,
            elapsed.as_secs_f64()
        ),
    );

    let params = &run.checkpoint.params;
    let mut worst = 0.0f64;
    let mut mean = [0.0f64; 3];
    for ex in &val_set {
        let (scores, trace) = params.score(&ex.inputs, &ex.graph).unwrap();
        let picked =
            trainer::select_summary(&scores, &ex.sentence_words, cfg.budget_words, cfg.max_sents)
                .unwrap();
        let s = attention_stats(&trace, ex.graph.edge_types(), &picked).unwrap();
        worst = worst.max((s.total() - 1.0).abs());
        for t in EdgeType::ALL {
            mean[t.index()] += s.get(t) / val_set.len() as f64;
        }
    }
    let shares = outcome(
        "attention shares",
        worst < SHARE_TOL,
        format!(
            "max |sum-1| {worst:.1e}; selected-sentence shares section {:.3}, topic {:.3}, keyword {:.3} (reported)",
            mean[0], mean[1], mean[2]
        ),
    );
    (signal, shares)
}

fn embedding_interchange() -> Outcome {
    let dir = std::env::temp_dir().join(format!("hegel-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut bad = 0;
    for r in synth::corpus(Style::Arxiv, 10, 41) {
        let doc = clean(&r);
        let tf = tfidf_embed(&doc, 768, 0).unwrap();
        let m = EmbeddingMatrix::new(tf.n(), 768, tf.data().to_vec()).unwrap();
        let path = dir.join(format!("{}.emb", emb::file_stem(&doc.id)));
        emb::write_embeddings(&path, &m).unwrap();
        let size = std::fs::metadata(&path).unwrap().len() as usize;
        let back = emb::load_embeddings(&path, doc.n_sentences());
        if size != 14 + 4 * doc.n_sentences() * 768 || back.map(|b| b != m).unwrap_or(true) {
            bad += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        "embedding interchange",
        bad == 0,
        format!("10 documents at d=768, {bad} size or round-trip failures"),
    )
}

fn main() -> ExitCode {
    let mut results = vec![
        gradient_fidelity(),
        attention_normalization(),
        permutation_equivariance(),
        oracle_equivalence(),
        overfit_sanity(),
        hypergraph_construction(),
        lda_recovery(),
        embedding_interchange(),
    ];
    let (signal, shares) = learning_signal();
    results.push(signal);
    results.push(shares);

    let mut failed = 0;
    for r in &results {
        println!(
            "{} {:<26} {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        failed += usize::from(!r.pass);
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
