//! ROUGE-N and summary-level ROUGE-L over token sequences.
//!
//! No stemming and no stopword removal. F is the plain harmonic mean.

use alloc::collections::BTreeMap;
use alloc::vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrfScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfScore {
    pub fn from_counts(overlap: usize, candidate_total: usize, reference_total: usize) -> Self {
        if overlap == 0 || candidate_total == 0 || reference_total == 0 {
            return PrfScore::default();
        }
        let precision = overlap as f64 / candidate_total as f64;
        let recall = overlap as f64 / reference_total as f64;
        PrfScore {
            precision,
            recall,
            f1: f_measure(precision, recall),
        }
    }
}

pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Multiset of n-grams, keyed by the n-gram slice.
pub fn ngram_counts<T: Ord>(tokens: &[T], n: usize) -> BTreeMap<&[T], usize> {
    let mut counts = BTreeMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Clipped overlap: each reference n-gram matches at most its multiplicity.
pub fn clipped_overlap<T: Ord>(
    candidate: &BTreeMap<&[T], usize>,
    reference: &BTreeMap<&[T], usize>,
) -> usize {
    candidate
        .iter()
        .map(|(g, &c)| reference.get(g).map_or(0, |&r| c.min(r)))
        .sum()
}

pub fn rouge_n<T: Ord>(candidate: &[T], reference: &[T], n: usize) -> PrfScore {
    if n == 0 {
        return PrfScore::default();
    }
    let cand = ngram_counts(candidate, n);
    let refc = ngram_counts(reference, n);
    let overlap = clipped_overlap(&cand, &refc);
    PrfScore::from_counts(
        overlap,
        candidate.len().saturating_sub(n - 1),
        reference.len().saturating_sub(n - 1),
    )
}

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L on the full concatenated sequences (summary level, single LCS).
pub fn rouge_l<T: PartialEq>(candidate: &[T], reference: &[T]) -> PrfScore {
    PrfScore::from_counts(
        lcs_len(candidate, reference),
        candidate.len(),
        reference.len(),
    )
}

/// ROUGE-1, ROUGE-2 and ROUGE-L for one candidate/reference pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RougeTriple {
    pub rouge1: PrfScore,
    pub rouge2: PrfScore,
    pub rouge_l: PrfScore,
}

pub fn rouge_all<T: Ord>(candidate: &[T], reference: &[T]) -> RougeTriple {
    RougeTriple {
        rouge1: rouge_n(candidate, reference, 1),
        rouge2: rouge_n(candidate, reference, 2),
        rouge_l: rouge_l(candidate, reference),
    }
}
