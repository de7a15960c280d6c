//! Synthetic arXiv- and PubMed-shaped corpora.
//!
//! Words are pronounceable nonsense, so nothing is borrowed from real
//! articles. Each document has a handful of salient sentences placed after
//! the introduction. They carry corpus-wide cue words, the document's key
//! terms and a shared pool of finding words. The abstract paraphrases them,
//! so the oracle prefers them and the first sentences (LEAD) mostly miss.

use std::collections::BTreeSet;

use hegel_core::text::is_stopword;
use hegel_core::RawDocument;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Arxiv,
    Pubmed,
}

const CUES: &[&str] = &[
    "significantly",
    "demonstrate",
    "novel",
    "outperforms",
    "reveal",
    "conclude",
    "substantially",
    "achieves",
    "evidence",
    "strongly",
    "confirm",
    "key",
];
const HEDGES: &[&str] = &[
    "previously",
    "reported",
    "typically",
    "commonly",
    "described",
    "several",
    "studies",
    "known",
    "considered",
    "often",
    "generally",
    "usually",
];
const FUNCTION: &[&str] = &[
    "the", "of", "and", "in", "to", "with", "for", "was", "is", "by", "a", "on",
];
const ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "cl", "dr",
    "fl", "gr", "kr", "pl", "pr", "st", "tr", "th", "sh", "ph",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ae", "io", "ou"];
const CODAS: &[&str] = &["", "n", "r", "s", "l", "x", "m", "nd", "st", "th"];

/// Corpus-wide word pools.
#[derive(Debug, Clone)]
pub struct Lexicon {
    filler: Vec<String>,
    keys: Vec<String>,
}

fn pseudo_word(rng: &mut ChaCha8Rng, syllables: usize) -> String {
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(ONSETS.choose(rng).unwrap());
        w.push_str(VOWELS.choose(rng).unwrap());
    }
    w.push_str(CODAS.choose(rng).unwrap());
    w
}

impl Lexicon {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reserved: BTreeSet<&str> = CUES.iter().chain(HEDGES).chain(FUNCTION).copied().collect();
        let mut seen = BTreeSet::new();
        let mut draw =
            |count: usize, syll: std::ops::RangeInclusive<usize>, rng: &mut ChaCha8Rng| {
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    let s = rng.gen_range(syll.clone());
                    let w = pseudo_word(rng, s);
                    if w.len() > 2
                        && !is_stopword(&w)
                        && !reserved.contains(w.as_str())
                        && seen.insert(w.clone())
                    {
                        out.push(w);
                    }
                }
                out
            };
        let filler = draw(3000, 2..=3, &mut rng);
        let keys = draw(1500, 3..=4, &mut rng);
        Lexicon { filler, keys }
    }
}

fn section_names(style: Style, rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    match style {
        Style::Arxiv => {
            let middle = [
                "background",
                "related work",
                "model",
                "method",
                "experiments",
                "results",
                "discussion",
            ];
            let k = rng.gen_range(2..=4);
            let mut picks: Vec<usize> = rand::seq::index::sample(rng, middle.len(), k).into_vec();
            picks.sort_unstable();
            let mut names = vec!["introduction"];
            names.extend(picks.into_iter().map(|i| middle[i]));
            names.push("conclusion");
            names
        }
        Style::Pubmed => vec!["introduction", "methods", "results", "discussion"],
    }
}

fn sentence_text(words: &[String]) -> String {
    let mut s = words.join(" ");
    if let Some(first) = s.get(..1) {
        let upper = first.to_uppercase();
        s.replace_range(..1, &upper);
    }
    s.push_str(" .");
    s
}

struct DocPlan<'a> {
    topics: Vec<Vec<&'a str>>,
    findings: Vec<&'a str>,
    keys: Vec<&'a str>,
}

fn filler_sentence(plan: &DocPlan, topic: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let len = rng.gen_range(12..=22);
    (0..len)
        .map(|_| {
            let r: f64 = rng.gen();
            let w = if r < 0.30 {
                *FUNCTION.choose(rng).unwrap()
            } else if r < 0.85 {
                *plan.topics[topic].choose(rng).unwrap()
            } else if r < 0.95 {
                *plan.topics.choose(rng).unwrap().choose(rng).unwrap()
            } else {
                *HEDGES.choose(rng).unwrap()
            };
            w.to_string()
        })
        .collect()
}

fn salient_sentence(plan: &DocPlan, topic: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let len = rng.gen_range(12..=18);
    let mut words: Vec<String> = (0..len)
        .map(|_| {
            let r: f64 = rng.gen();
            let w = if r < 0.25 {
                *FUNCTION.choose(rng).unwrap()
            } else if r < 0.80 {
                *plan.findings.choose(rng).unwrap()
            } else {
                *plan.topics[topic].choose(rng).unwrap()
            };
            w.to_string()
        })
        .collect();
    for cue in CUES.choose_multiple(rng, 2) {
        let at = rng.gen_range(0..=words.len());
        words.insert(at, cue.to_string());
    }
    words
}

fn insert_term(words: &mut Vec<String>, term: &str, rng: &mut ChaCha8Rng) {
    if !words.iter().any(|w| w == term) {
        let at = rng.gen_range(0..=words.len());
        words.insert(at, term.to_string());
    }
}

/// One document. `id` becomes its `article_id`.
pub fn document(style: Style, id: String, lex: &Lexicon, rng: &mut ChaCha8Rng) -> RawDocument {
    let names = section_names(style, rng);
    let n_topics = 3;
    let mut pool: Vec<&str> = lex
        .filler
        .choose_multiple(rng, 25 * n_topics + 15)
        .map(String::as_str)
        .collect();
    let findings = pool.split_off(25 * n_topics);
    let topics = pool.chunks(25).map(<[&str]>::to_vec).collect();
    let keys = lex
        .keys
        .choose_multiple(rng, 3)
        .map(String::as_str)
        .collect();
    let plan = DocPlan {
        topics,
        findings,
        keys,
    };

    let lens: Vec<usize> = names
        .iter()
        .map(|_| match style {
            Style::Arxiv => rng.gen_range(5..=10),
            Style::Pubmed => rng.gen_range(5..=9),
        })
        .collect();
    let topic_offset = rng.gen_range(0..n_topics);
    // Salient slots: after the introduction, never a section's first sentence.
    let slots: Vec<(usize, usize)> = lens
        .iter()
        .enumerate()
        .skip(1)
        .flat_map(|(s, &len)| (1..len).map(move |i| (s, i)))
        .collect();
    let n_salient = rng.gen_range(4..=6).min(slots.len());
    let salient: BTreeSet<(usize, usize)> =
        slots.choose_multiple(rng, n_salient).copied().collect();

    let mut sections: Vec<Vec<Vec<String>>> = lens
        .iter()
        .enumerate()
        .map(|(s, &len)| {
            let topic = (s + topic_offset) % n_topics;
            (0..len)
                .map(|i| {
                    if salient.contains(&(s, i)) {
                        salient_sentence(&plan, topic, rng)
                    } else {
                        filler_sentence(&plan, topic, rng)
                    }
                })
                .collect()
        })
        .collect();

    let all: Vec<(usize, usize)> = lens
        .iter()
        .enumerate()
        .flat_map(|(s, &len)| (0..len).map(move |i| (s, i)))
        .collect();
    for key in &plan.keys {
        let mut hits = 0;
        for &(s, i) in &salient {
            if rng.gen_bool(0.7) {
                insert_term(&mut sections[s][i], key, rng);
                hits += 1;
            }
        }
        let extra = rng.gen_range(5usize..=8).saturating_sub(hits).max(2);
        for &(s, i) in all.choose_multiple(rng, extra) {
            insert_term(&mut sections[s][i], key, rng);
        }
    }

    let abstract_text = salient
        .iter()
        .map(|&(s, i)| {
            let kept: Vec<String> = sections[s][i]
                .iter()
                .filter(|_| rng.gen_bool(0.8))
                .cloned()
                .collect();
            format!("<S> {} </S>", sentence_text(&kept))
        })
        .collect();

    RawDocument {
        article_id: id,
        sections: sections
            .iter()
            .map(|sec| sec.iter().map(|w| sentence_text(w)).collect())
            .collect(),
        section_names: names.into_iter().map(String::from).collect(),
        abstract_text,
    }
}

/// `count` documents with ids `<style>-<seed>-00000`, `<style>-<seed>-00001`, and so on.
pub fn corpus(style: Style, count: usize, seed: u64) -> Vec<RawDocument> {
    let lex = Lexicon::new(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let prefix = match style {
        Style::Arxiv => "arxiv",
        Style::Pubmed => "pubmed",
    };
    (0..count)
        .map(|i| document(style, format!("{prefix}-{seed}-{i:05}"), &lex, &mut rng))
        .collect()
}
