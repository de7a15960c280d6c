//! Document model: sections over a flat, reading-order sentence list.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{self, Token};

/// Default cap on sentences kept per document.
pub const DEFAULT_MAX_SENTENCES: usize = 600;

/// One line of an arXiv/PubMed-style JSONL release, before cleaning.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RawDocument {
    pub article_id: String,
    #[serde(default)]
    pub sections: Vec<Vec<String>>,
    #[serde(default)]
    pub section_names: Vec<String>,
    #[serde(default)]
    pub abstract_text: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    /// Half-open range into [`Document::sentences`].
    pub span: Range<usize>,
}

impl Section {
    pub fn len(&self) -> usize {
        self.span.len()
    }

    pub fn is_empty(&self) -> bool {
        self.span.is_empty()
    }
}

/// A validated document. Section spans are non-empty, disjoint and cover
/// `0..n_sentences()` in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub sections: Vec<Section>,
    pub sentences: Vec<String>,
    pub abstract_sentences: Vec<String>,
}

/// What cleaning removed from a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub dropped_sentences: usize,
    pub dropped_sections: usize,
    pub truncated_sentences: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    pub max_sentences: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            max_sentences: DEFAULT_MAX_SENTENCES,
        }
    }
}

fn is_blank(sentence: &str) -> bool {
    text::word_count(sentence) == 0
}

/// Removes the `<S>`/`</S>` markers the dataset wraps abstract sentences in.
fn strip_sentence_tags(s: &str) -> String {
    s.replace("<S>", " ")
        .replace("</S>", " ")
        .trim()
        .to_string()
}

/// Cleans a raw record into a [`Document`].
///
/// Blank sentences and sections left empty are dropped; documents longer
/// than `opts.max_sentences` are cut at the cap, keeping reading order.
pub fn validate(raw: &RawDocument, opts: ValidateOptions) -> Result<(Document, ValidationReport)> {
    if opts.max_sentences == 0 {
        return Err(Error::Config("max_sentences must be at least 1".into()));
    }
    let mut report = ValidationReport::default();
    let mut sections = Vec::new();
    let mut sentences = Vec::new();

    for (idx, sec) in raw.sections.iter().enumerate() {
        let name = raw
            .section_names
            .get(idx)
            .map(|s| s.trim().to_string())
            .unwrap_or_default();
        let start = sentences.len();
        for s in sec {
            if is_blank(s) {
                report.dropped_sentences += 1;
            } else if sentences.len() >= opts.max_sentences {
                report.truncated_sentences += 1;
            } else {
                sentences.push(s.trim().to_string());
            }
        }
        if sentences.len() == start {
            report.dropped_sections += 1;
        } else {
            sections.push(Section {
                name,
                span: start..sentences.len(),
            });
        }
    }

    if sentences.is_empty() {
        return Err(Error::Rejected {
            id: raw.article_id.clone(),
            reason: "no non-empty sentences".into(),
        });
    }

    let abstract_sentences = raw
        .abstract_text
        .iter()
        .map(|s| strip_sentence_tags(s))
        .filter(|s| !is_blank(s))
        .collect();

    let doc = Document {
        id: raw.article_id.clone(),
        sections,
        sentences,
        abstract_sentences,
    };
    debug_assert!(doc.check_invariants().is_ok());
    Ok((doc, report))
}

impl Document {
    pub fn n_sentences(&self) -> usize {
        self.sentences.len()
    }

    /// Inverse of [`validate`] for an already-clean document.
    pub fn to_raw(&self) -> RawDocument {
        RawDocument {
            article_id: self.id.clone(),
            sections: self
                .sections
                .iter()
                .map(|s| self.sentences[s.span.clone()].to_vec())
                .collect(),
            section_names: self.sections.iter().map(|s| s.name.clone()).collect(),
            abstract_text: self.abstract_sentences.clone(),
        }
    }

    pub fn check_invariants(&self) -> Result<()> {
        let fail = |reason: String| Error::Rejected {
            id: self.id.clone(),
            reason,
        };
        if self.sentences.is_empty() {
            return Err(fail("no sentences".into()));
        }
        let mut next = 0;
        for (j, sec) in self.sections.iter().enumerate() {
            if sec.span.start != next || sec.span.is_empty() {
                return Err(fail(alloc::format!(
                    "section {j} span {:?} breaks coverage",
                    sec.span
                )));
            }
            next = sec.span.end;
        }
        if next != self.sentences.len() {
            return Err(fail(alloc::format!(
                "sections cover 0..{next} but there are {} sentences",
                self.sentences.len()
            )));
        }
        Ok(())
    }

    /// Section index of every sentence (0-based).
    pub fn section_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n_sentences());
        for (j, sec) in self.sections.iter().enumerate() {
            out.extend(core::iter::repeat(j).take(sec.len()));
        }
        out
    }

    /// Position of every sentence inside its own section (0-based).
    pub fn within_section_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n_sentences());
        for sec in &self.sections {
            out.extend(0..sec.len());
        }
        out
    }

    pub fn section_of(&self, sentence: usize) -> Option<usize> {
        self.sections
            .iter()
            .position(|s| s.span.contains(&sentence))
    }

    pub fn sentence_tokens(&self) -> Vec<Vec<Token>> {
        self.sentences.iter().map(|s| text::tokenize(s)).collect()
    }

    pub fn abstract_tokens(&self) -> Vec<Token> {
        self.abstract_sentences
            .iter()
            .flat_map(|s| text::tokenize(s))
            .collect()
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(|s| text::word_count(s)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn raw(sections: Vec<Vec<String>>) -> RawDocument {
        let names = (0..sections.len())
            .map(|i| alloc::format!("sec{i}"))
            .collect();
        RawDocument {
            article_id: "d".into(),
            sections,
            section_names: names,
            abstract_text: s(&["<S> an abstract . </S>"]),
        }
    }

    #[test]
    fn empty_section_is_dropped_and_spans_reindexed() {
        let r = raw(vec![s(&["a b.", "c d."]), s(&["", "  "]), s(&["e f."])]);
        let (doc, report) = validate(&r, ValidateOptions::default()).unwrap();
        assert_eq!(doc.sections.len(), 2);
        assert_eq!(doc.sections[0].span, 0..2);
        assert_eq!(doc.sections[1].span, 2..3);
        assert_eq!(doc.sections[1].name, "sec2");
        assert_eq!(report.dropped_sections, 1);
        assert_eq!(report.dropped_sentences, 2);
        assert_eq!(doc.abstract_sentences, ["an abstract ."]);
    }

    #[test]
    fn all_empty_is_rejected() {
        let r = raw(vec![s(&["", " ... "]), vec![]]);
        assert!(matches!(
            validate(&r, ValidateOptions::default()),
            Err(Error::Rejected { .. })
        ));
    }

    #[test]
    fn ten_sentences_two_sections_cover_range() {
        let r = raw(vec![
            s(&["s0", "s1", "s2", "s3", "s4", "s5"]),
            s(&["s6", "s7", "s8", "s9"]),
        ]);
        let (doc, _) = validate(&r, ValidateOptions::default()).unwrap();
        assert_eq!(doc.sections[0].span, 0..6);
        assert_eq!(doc.sections[1].span, 6..10);
        assert_eq!(doc.section_indices(), [0, 0, 0, 0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(doc.within_section_indices(), [0, 1, 2, 3, 4, 5, 0, 1, 2, 3]);
    }

    #[test]
    fn truncation_keeps_reading_order() {
        let r = raw(vec![s(&["a", "b", "c"]), s(&["d", "e"]), s(&["f"])]);
        let (doc, report) = validate(&r, ValidateOptions { max_sentences: 4 }).unwrap();
        assert_eq!(doc.sentences, ["a", "b", "c", "d"]);
        assert_eq!(doc.sections.len(), 2);
        assert_eq!(doc.sections[1].span, 3..4);
        assert_eq!(report.truncated_sentences, 2);
        assert_eq!(report.dropped_sections, 1);
    }

    #[test]
    fn missing_section_names_default_to_empty() {
        let mut r = raw(vec![s(&["a"]), s(&["b"])]);
        r.section_names.truncate(1);
        let (doc, _) = validate(&r, ValidateOptions::default()).unwrap();
        assert_eq!(doc.sections[1].name, "");
    }

    fn arb_raw() -> impl Strategy<Value = RawDocument> {
        let sentence = prop_oneof![
            3 => "[a-z]{1,6}( [a-z]{1,6}){0,4}",
            1 => "[ .,]{0,3}",
        ];
        let section = proptest::collection::vec(sentence, 0..6);
        proptest::collection::vec(section, 1..6).prop_map(raw)
    }

    proptest! {
        #[test]
        fn spans_partition_sentences(r in arb_raw()) {
            if let Ok((doc, _)) = validate(&r, ValidateOptions::default()) {
                prop_assert!(doc.check_invariants().is_ok());
                let mut seen = vec![0u32; doc.n_sentences()];
                for sec in &doc.sections {
                    for i in sec.span.clone() { seen[i] += 1; }
                }
                prop_assert!(seen.iter().all(|&c| c == 1));
            }
        }

        #[test]
        fn validate_is_idempotent(r in arb_raw()) {
            if let Ok((doc, _)) = validate(&r, ValidateOptions::default()) {
                let (again, report) = validate(&doc.to_raw(), ValidateOptions::default()).unwrap();
                prop_assert_eq!(again, doc);
                prop_assert_eq!(report, ValidationReport::default());
            }
        }
    }
}
