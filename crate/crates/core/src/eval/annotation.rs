use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{strip_markers, Lexicon, MARKER_CLOSE, MARKER_OPEN};
use crate::extraction::RelationType;
use crate::generation::filter::reference_in_context;
use crate::generation::parse_descriptions;
use crate::text::{count_token_runs, normalize_phrase, singular_tokens};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedDescription {
    pub target: String,
    pub relation: RelationType,
    pub reference: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub context_id: String,
    /// Context text; may carry the target in markers.
    pub text: String,
    pub window_size: usize,
    pub target: String,
    pub label: bool,
    pub annotator_id: String,
    #[serde(default)]
    pub descriptions: Vec<AnnotatedDescription>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationOptions {
    pub relax_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    InvalidWindowSize { window_size: usize },
    DescriptionsOnNegative { count: usize },
    TargetNotInContext { target: String },
    MarkedTargetMismatch { marked: String, target: String },
    TargetNotInLexicon { target: String },
    Unparseable { index: usize },
    RelationMismatch { index: usize, parsed: RelationType },
    EmptyElaboration { index: usize },
    ReferenceMissing { index: usize, reference: String },
}

fn marked_span(text: &str) -> Option<&str> {
    let open = text.find(MARKER_OPEN)? + MARKER_OPEN.len();
    let close = open + text[open..].find(MARKER_CLOSE)?;
    Some(&text[open..close])
}

fn mentions(text: &str, phrase: &str) -> bool {
    count_token_runs(&singular_tokens(text), &singular_tokens(phrase)) > 0
}

/// Checks one annotation record against the description criteria. An empty
/// lexicon disables the lexicon check.
pub fn validate_annotation(rec: &AnnotationRecord, lexicon: &Lexicon, opts: ValidationOptions) -> Vec<Violation> {
    let mut out = Vec::new();
    if !matches!(rec.window_size, 1 | 2) {
        out.push(Violation::InvalidWindowSize { window_size: rec.window_size });
    }
    if !rec.label && !rec.descriptions.is_empty() {
        out.push(Violation::DescriptionsOnNegative { count: rec.descriptions.len() });
    }
    let plain = strip_markers(&rec.text);
    if let Some(marked) = marked_span(&rec.text) {
        if normalize_phrase(marked) != normalize_phrase(&rec.target) {
            out.push(Violation::MarkedTargetMismatch { marked: marked.to_string(), target: rec.target.clone() });
        }
    }
    let mut targets = vec![rec.target.as_str()];
    for d in &rec.descriptions {
        if !targets.iter().any(|t| normalize_phrase(t) == normalize_phrase(&d.target)) {
            targets.push(&d.target);
        }
    }
    for t in &targets {
        if !mentions(&plain, t) {
            out.push(Violation::TargetNotInContext { target: t.to_string() });
        }
        if !lexicon.is_empty() && !lexicon.contains(t) {
            out.push(Violation::TargetNotInLexicon { target: t.to_string() });
        }
    }
    for (index, d) in rec.descriptions.iter().enumerate() {
        match parse_descriptions(&d.text, Some(&d.target)) {
            Err(_) => out.push(Violation::Unparseable { index }),
            Ok(readings) => {
                let reading = readings
                    .iter()
                    .find(|p| normalize_phrase(&p.reference) == normalize_phrase(&d.reference))
                    .unwrap_or(&readings[0]);
                if reading.relation != d.relation {
                    out.push(Violation::RelationMismatch { index, parsed: reading.relation });
                }
                if d.relation != RelationType::UsedFor && reading.elaboration.trim().is_empty() {
                    out.push(Violation::EmptyElaboration { index });
                }
            }
        }
        if !reference_in_context(&d.reference, &d.target, &plain, opts.relax_reference) {
            out.push(Violation::ReferenceMissing { index, reference: d.reference.clone() });
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub records: usize,
    pub positives: usize,
    pub negatives: usize,
    pub descriptions: usize,
    pub descriptions_per_relation: BTreeMap<RelationType, usize>,
    pub windows_per_size: BTreeMap<usize, usize>,
}

pub fn corpus_stats(records: &[AnnotationRecord]) -> CorpusStats {
    let mut s = CorpusStats { records: records.len(), ..Default::default() };
    for r in RelationType::ALL {
        s.descriptions_per_relation.insert(r, 0);
    }
    for rec in records {
        if rec.label {
            s.positives += 1;
        } else {
            s.negatives += 1;
        }
        s.descriptions += rec.descriptions.len();
        for d in &rec.descriptions {
            *s.descriptions_per_relation.entry(d.relation).or_default() += 1;
        }
        *s.windows_per_size.entry(rec.window_size).or_default() += 1;
    }
    s
}
