use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::parse::ParsedDescription;
use crate::extraction::RelationType;
use crate::text::{count_token_runs, normalize_phrase, singular_tokens, token_run_positions};

pub const UNRESOLVED_PHRASES: &[&str] = &["our work", "this paper", "this work", "we propose", "our method", "our approach"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    UnresolvedReference,
    AuthorNameReference,
    DuplicateTarget,
    Unparseable,
    ReferenceMissing,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::UnresolvedReference => "unresolved_reference",
            RejectReason::AuthorNameReference => "author_name_reference",
            RejectReason::DuplicateTarget => "duplicate_target",
            RejectReason::Unparseable => "unparseable",
            RejectReason::ReferenceMissing => "reference_missing",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub accepted: bool,
    pub reasons: Vec<RejectReason>,
}

impl FilterVerdict {
    fn from_reasons(reasons: Vec<RejectReason>) -> Self {
        FilterVerdict { accepted: reasons.is_empty(), reasons }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterOptions {
    /// Accept a reference that only appears inside the target phrase
    /// ("neural network" for "recurrent neural network").
    pub relax_reference: bool,
}

// Corpus text is lowercased, so surnames are matched without a capital.
static AUTHOR_NAME: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)(?:\bet\s+al\.?$|^[a-z][a-z'-]+(?:\s+(?:and|&)\s+[a-z][a-z'-]+)?,?\s*\(?\s*(?:19|20)\d{2}[a-z]?\s*\)?$)")
        .expect("valid regex")
});

static UNRESOLVED: LazyLock<Regex> = LazyLock::new(|| {
    let alts: Vec<String> = UNRESOLVED_PHRASES.iter().map(|p| p.replace(' ', r"\s+")).collect();
    Regex::new(&format!(r"(?i)\b(?:{})\b", alts.join("|"))).expect("valid regex")
});

pub fn is_author_name(reference: &str) -> bool {
    AUTHOR_NAME.is_match(reference.trim())
}

pub fn has_unresolved_reference(text: &str) -> bool {
    UNRESOLVED.is_match(text)
}

/// True when the reference occurs in the context as a token run that does not
/// overlap an occurrence of the target. With `relax`, containment inside the
/// target phrase also counts.
pub fn reference_in_context(reference: &str, target: &str, context: &str, relax: bool) -> bool {
    let ctx = singular_tokens(context);
    let r = singular_tokens(reference);
    let t = singular_tokens(target);
    if r.is_empty() {
        return false;
    }
    let target_spans: Vec<(usize, usize)> = token_run_positions(&ctx, &t).into_iter().map(|p| (p, p + t.len())).collect();
    let outside = token_run_positions(&ctx, &r)
        .into_iter()
        .any(|p| !target_spans.iter().any(|&(s, e)| p < e && s < p + r.len()));
    outside || (relax && count_token_runs(&t, &r) > 0)
}

/// Quality gate for one parsed description against the text it came from.
pub fn filter_description(parsed: &ParsedDescription, context_text: &str, opts: FilterOptions) -> FilterVerdict {
    let mut reasons = Vec::new();
    if has_unresolved_reference(&parsed.text) {
        reasons.push(RejectReason::UnresolvedReference);
    }
    if is_author_name(&parsed.reference) {
        reasons.push(RejectReason::AuthorNameReference);
    }
    if count_token_runs(&singular_tokens(&parsed.text), &singular_tokens(&parsed.target)) > 1 {
        reasons.push(RejectReason::DuplicateTarget);
    }
    let self_reference = normalize_phrase(&parsed.reference) == normalize_phrase(&parsed.target);
    let missing_elaboration = parsed.elaboration.trim().is_empty() && parsed.relation != RelationType::UsedFor;
    if self_reference || missing_elaboration {
        reasons.push(RejectReason::Unparseable);
    }
    if !reference_in_context(&parsed.reference, &parsed.target, context_text, opts.relax_reference) {
        reasons.push(RejectReason::ReferenceMissing);
    }
    FilterVerdict::from_reasons(reasons)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parsed(text: &str, target: &str, relation: RelationType, reference: &str, elaboration: &str) -> ParsedDescription {
        ParsedDescription {
            target: target.into(),
            relation,
            reference: reference.into(),
            elaboration: elaboration.into(),
            text: text.into(),
        }
    }

    const CTX: &str = "we compare beam search with greedy decoding, a method used in our work.";

    #[test]
    fn clean_description_passes() {
        let p = parsed("beam search is like greedy decoding in that both decode.", "beam search", RelationType::Compare, "greedy decoding", "both decode");
        assert_eq!(filter_description(&p, CTX, FilterOptions::default()), FilterVerdict { accepted: true, reasons: vec![] });
    }

    #[test]
    fn unresolved_reference() {
        let p = parsed("beam search is a method used in our work.", "beam search", RelationType::IsA, "greedy decoding", "used in our work");
        let v = filter_description(&p, CTX, FilterOptions::default());
        assert_eq!(v.reasons, [RejectReason::UnresolvedReference]);
        assert!(!v.accepted);
    }

    #[test]
    fn duplicate_target() {
        let p = parsed("beam search is a method based on beam search", "beam search", RelationType::IsA, "method", "based on beam search");
        let v = filter_description(&p, "beam search is a method", FilterOptions::default());
        assert_eq!(v.reasons, [RejectReason::DuplicateTarget]);
    }

    #[test]
    fn author_names() {
        for r in ["cho et al", "cho et al.", "Cho et al.", "kingma and welling 2013", "Vaswani (2017)", "smith, 2020"] {
            assert!(is_author_name(r), "{r}");
        }
        for r in ["neural network", "word2vec", "et al model", "bert 2"] {
            assert!(!is_author_name(r), "{r}");
        }
        let p = parsed("x is like cho et al in that y.", "x", RelationType::Compare, "cho et al", "y");
        let v = filter_description(&p, "x and cho et al", FilterOptions::default());
        assert_eq!(v.reasons, [RejectReason::AuthorNameReference]);
    }

    #[test]
    fn reference_must_sit_outside_the_target() {
        let ctx = "a recurrent neural network reads the sequence.";
        assert!(!reference_in_context("neural network", "recurrent neural network", ctx, false));
        assert!(reference_in_context("neural network", "recurrent neural network", ctx, true));
        assert!(reference_in_context("autoencoder", "variational autoencoder", "autoencoders (ae), variational autoencoders", false));
        assert!(!reference_in_context("autoencoder", "variational autoencoder", "variational autoencoders (vae)", false));
    }

    #[test]
    fn empty_elaboration() {
        let p = parsed("x is a y.", "x", RelationType::IsA, "y", "");
        assert_eq!(filter_description(&p, "x y", FilterOptions::default()).reasons, [RejectReason::Unparseable]);
        let p = parsed("x is used for y.", "x", RelationType::UsedFor, "y", "");
        assert!(filter_description(&p, "x y", FilterOptions::default()).accepted);
    }
}
