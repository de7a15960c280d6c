//! Greedy extractive labels: repeatedly add the sentence that most improves
//! mean(ROUGE-1 F, ROUGE-2 F) of the selection against the gold abstract.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::rouge;
use crate::text::Token;

pub const DEFAULT_MAX_ORACLE_SENTENCES: usize = 30;

/// Minimum gain for a greedy step to count as an improvement.
pub const IMPROVEMENT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelVector {
    pub labels: Vec<u8>,
    /// Sentence indices in the order the greedy search picked them.
    pub selected_order: Vec<usize>,
    /// Objective value after each pick.
    pub objective_trace: Vec<f64>,
    /// Set when the abstract had no tokens and every label is 0.
    pub empty_abstract: bool,
}

impl LabelVector {
    pub fn positives(&self) -> usize {
        self.selected_order.len()
    }
}

/// Greedy objective for an arbitrary token sequence.
pub fn objective<T: Ord>(candidate: &[T], reference: &[T]) -> f64 {
    0.5 * (rouge::rouge_n(candidate, reference, 1).f1 + rouge::rouge_n(candidate, reference, 2).f1)
}

/// Tokens of the selected sentences concatenated in document order.
pub fn concat_selection<T: Clone>(sentences: &[Vec<T>], selected: &[usize]) -> Vec<T> {
    let mut idx = selected.to_vec();
    idx.sort_unstable();
    idx.iter()
        .flat_map(|&i| sentences[i].iter().cloned())
        .collect()
}

fn intern<'a>(vocab: &mut BTreeMap<&'a str, u32>, t: &'a Token) -> u32 {
    let next = vocab.len() as u32;
    *vocab.entry(t.as_str()).or_insert(next)
}

pub fn greedy_oracle(doc: &Document, max_sents: usize) -> LabelVector {
    greedy_oracle_tokens(&doc.sentence_tokens(), &doc.abstract_tokens(), max_sents)
}

/// Same as [`greedy_oracle`] on pre-tokenized input.
pub fn greedy_oracle_tokens(
    sentences: &[Vec<Token>],
    reference: &[Token],
    max_sents: usize,
) -> LabelVector {
    let n = sentences.len();
    let mut out = LabelVector {
        labels: vec![0; n],
        selected_order: Vec::new(),
        objective_trace: Vec::new(),
        empty_abstract: reference.is_empty(),
    };
    if reference.is_empty() {
        return out;
    }

    // Intern to integer ids so each evaluation compares u32 slices.
    let mut vocab: BTreeMap<&str, u32> = BTreeMap::new();
    let sent_ids: Vec<Vec<u32>> = sentences
        .iter()
        .map(|s| s.iter().map(|t| intern(&mut vocab, t)).collect())
        .collect();
    let ref_ids: Vec<u32> = reference.iter().map(|t| intern(&mut vocab, t)).collect();

    let mut selected: Vec<usize> = Vec::new();
    let mut current = 0.0f64;
    while selected.len() < max_sents {
        let mut best: Option<(usize, f64)> = None;
        for cand in 0..n {
            if out.labels[cand] == 1 {
                continue;
            }
            selected.push(cand);
            let score = objective(&concat_selection(&sent_ids, &selected), &ref_ids);
            selected.pop();
            // Strict `>` keeps the smaller index on ties.
            if best.map_or(true, |(_, b)| score > b) {
                best = Some((cand, score));
            }
        }
        match best {
            Some((cand, score)) if score > current + IMPROVEMENT_EPSILON => {
                selected.push(cand);
                out.labels[cand] = 1;
                out.selected_order.push(cand);
                out.objective_trace.push(score);
                current = score;
            }
            _ => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{validate, RawDocument, ValidateOptions};
    use crate::text::tokenize;
    use alloc::string::{String, ToString};

    fn doc(sentences: &[&str], abstract_text: &[&str]) -> Document {
        let raw = RawDocument {
            article_id: "x".into(),
            sections: vec![sentences.iter().map(|s| s.to_string()).collect()],
            section_names: vec!["body".into()],
            abstract_text: abstract_text.iter().map(|s| s.to_string()).collect(),
        };
        validate(&raw, ValidateOptions::default()).unwrap().0
    }

    #[test]
    fn verbatim_abstract_sentence_is_picked_alone() {
        let d = doc(
            &[
                "cats sit on mats in the sun",
                "dogs chase cats around the yard",
                "graph attention improves long document summarization",
                "results are reported on two datasets",
            ],
            &["graph attention improves long document summarization"],
        );
        let labels = greedy_oracle(&d, DEFAULT_MAX_ORACLE_SENTENCES);
        assert_eq!(labels.selected_order, [2]);
        assert_eq!(labels.labels, [0, 0, 1, 0]);
        assert!((labels.objective_trace[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_abstract_gives_zero_labels() {
        let d = doc(&["one sentence here", "another one"], &[]);
        let labels = greedy_oracle(&d, 5);
        assert!(labels.empty_abstract);
        assert_eq!(labels.labels, [0, 0]);
        assert!(labels.selected_order.is_empty());
    }

    #[test]
    fn respects_max_sents_and_is_strictly_increasing() {
        let d = doc(
            &["a b c", "d e f", "g h i", "j k l", "m n o"],
            &["a b c d e f g h i j k l m n o"],
        );
        let labels = greedy_oracle(&d, 3);
        assert_eq!(labels.positives(), 3);
        assert!(labels.objective_trace.windows(2).all(|w| w[1] > w[0]));
        let all = greedy_oracle(&d, 30);
        assert_eq!(all.positives(), 5);
    }

    #[test]
    fn ties_go_to_the_smaller_index() {
        let d = doc(&["alpha beta", "alpha beta", "gamma"], &["alpha beta"]);
        let labels = greedy_oracle(&d, 30);
        assert_eq!(labels.selected_order, [0]);
    }

    #[test]
    fn bigrams_span_sentence_boundaries_in_document_order() {
        let sents: Vec<Vec<Token>> = ["x a", "b y"].iter().map(|s| tokenize(s)).collect();
        let joined: Vec<String> = concat_selection(&sents, &[1, 0])
            .into_iter()
            .map(Token::into_string)
            .collect();
        assert_eq!(joined, ["x", "a", "b", "y"]);
    }
}
