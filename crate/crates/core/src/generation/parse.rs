//! Recovers (target, relation, reference, elaboration) from description text.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::GenerationError;
use crate::extraction::patterns::{forward_chunk, tokenize};
use crate::extraction::RelationType;
use crate::text::normalize_phrase;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedDescription {
    pub target: String,
    pub relation: RelationType,
    pub reference: String,
    pub elaboration: String,
    pub text: String,
}

// Alternation order matters: at a shared start position the earlier branch wins.
static CUE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?ix)
        \b(?:
          (?P<partof>(?:is|are)\s+(?:(?:a|an|the|one)\s+)?(?:[a-z-]+\s+)?(?:part|parts|component|components)\s+of)
         |(?P<compare>(?:is|are)\s+(?:like|similar\s+to))
         |(?P<both>are\s+both)
         |(?P<isa>(?:is|are)\s+(?:a|an))
         |(?P<usedfor>(?:(?:is|are|was|were|has\s+been|have\s+been|can\s+be)\s+)?(?:[a-z]+ly\s+)?(?:used|utilized|employed)\s+(?:for|to|in))
         |(?P<applied>(?:(?:is|are|was|were|has\s+been|have\s+been|can\s+be)\s+)?(?:[a-z]+ly\s+)?applied\s+to)
        )\b",
    )
    .expect("valid regex")
});

static IN_THAT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^in\s+that\b\s*").expect("valid regex"));

fn unparseable(text: &str, why: &str) -> GenerationError {
    GenerationError::Unparseable(format!("{why}: {text:?}"))
}

/// `[a, b]` expands to its items; anything else is a single phrase.
fn expand_list(phrase: &str) -> Vec<String> {
    let p = phrase.trim();
    match p.strip_prefix('[').and_then(|p| p.strip_suffix(']')) {
        Some(inner) => inner.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None if p.is_empty() => Vec::new(),
        None => vec![p.to_string()],
    }
}

/// Splits `rest` into (references, remainder). The reference is a bracketed
/// list or the noun chunk right after the cue.
fn split_reference(rest: &str) -> (Vec<String>, &str) {
    let trimmed = rest.trim_start();
    if trimmed.starts_with('[') {
        if let Some(close) = trimmed.find(']') {
            return (expand_list(&trimmed[..=close]), &trimmed[close + 1..]);
        }
    }
    let tokens = tokenize(rest);
    let (s, e) = forward_chunk(&tokens, 0);
    if e <= s {
        return (Vec::new(), rest);
    }
    let (start, end) = (tokens[s].start, tokens[e - 1].end);
    (vec![rest[start..end].to_string()], &rest[end..])
}

fn clean_elaboration(rest: &str, relation: RelationType) -> String {
    let mut e = rest.trim();
    if let Some(stripped) = e.strip_prefix(',') {
        e = stripped.trim_start();
    }
    if relation == RelationType::Compare {
        if let Some(m) = IN_THAT.find(e) {
            e = &e[m.end()..];
        }
    }
    if !e.ends_with("...") {
        e = e.strip_suffix('.').unwrap_or(e).trim_end();
    }
    e.to_string()
}

/// All (target, reference) readings of a description. Bracketed lists on
/// either side expand to one reading per item. When `target` is given, only
/// readings whose subject matches it (up to case and a plural head) survive
/// and they carry `target` verbatim.
pub fn parse_descriptions(text: &str, target: Option<&str>) -> Result<Vec<ParsedDescription>, GenerationError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(unparseable(text, "empty description"));
    }
    let caps = CUE.captures(trimmed).ok_or_else(|| unparseable(text, "no relation cue"))?;
    let cue = caps.get(0).expect("whole match");
    let (relation, both) = if caps.name("partof").is_some() {
        (RelationType::PartOf, false)
    } else if caps.name("compare").is_some() {
        (RelationType::Compare, false)
    } else if caps.name("both").is_some() {
        (RelationType::Compare, true)
    } else if caps.name("isa").is_some() {
        (RelationType::IsA, false)
    } else {
        (RelationType::UsedFor, false)
    };

    let subject = trimmed[..cue.start()].trim();
    let rest = &trimmed[cue.end()..];
    let (subjects, references, elaboration) = if both {
        // "x and y are both <elaboration>": the coordinated pair is the subject.
        let items: Vec<String> = subject.splitn(2, " and ").map(|s| s.trim().to_string()).collect();
        if items.len() != 2 || items.iter().any(String::is_empty) {
            return Err(unparseable(text, "expected `x and y are both`"));
        }
        let body = clean_elaboration(rest, relation);
        let elab = if body.is_empty() { String::new() } else { format!("they are both {body}") };
        (items.clone(), items, elab)
    } else {
        let (refs, remainder) = split_reference(rest);
        (expand_list(subject), refs, clean_elaboration(remainder, relation))
    };
    if subjects.is_empty() {
        return Err(unparseable(text, "empty subject"));
    }
    if references.is_empty() {
        return Err(unparseable(text, "no reference after the relation cue"));
    }

    let wanted = target.map(normalize_phrase);
    let mut out = Vec::new();
    for subj in &subjects {
        if wanted.as_ref().is_some_and(|w| *w != normalize_phrase(subj)) {
            continue;
        }
        for reference in &references {
            if normalize_phrase(reference) == normalize_phrase(subj) {
                continue;
            }
            out.push(ParsedDescription {
                target: target.unwrap_or(subj).to_string(),
                relation,
                reference: reference.clone(),
                elaboration: elaboration.clone(),
                text: trimmed.to_string(),
            });
        }
    }
    if out.is_empty() {
        let why = if target.is_some() && subjects.iter().all(|s| Some(normalize_phrase(s)) != wanted) {
            "subject does not name the target"
        } else {
            "reference equals target"
        };
        return Err(unparseable(text, why));
    }
    Ok(out)
}

/// Single reading for a known target: the first one in text order.
pub fn parse_description(text: &str, target: &str) -> Result<ParsedDescription, GenerationError> {
    parse_descriptions(text, Some(target)).map(|mut v| v.swap_remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn is_a_reading() {
        let p = parse_description(
            "variational autoencoder is a latent variable model that does not offer an exact density estimate.",
            "variational autoencoder",
        )
        .unwrap();
        assert_eq!(p.relation, RelationType::IsA);
        assert_eq!(p.reference, "latent variable model");
        assert_eq!(p.elaboration, "that does not offer an exact density estimate");
    }

    #[test]
    fn compare_keeps_ellipsis() {
        let p = parse_description(
            "sentence classification is like relation classification in that they are both tasks that word embedding has been used for ...",
            "sentence classification",
        )
        .unwrap();
        assert_eq!(p.relation, RelationType::Compare);
        assert_eq!(p.reference, "relation classification");
        assert_eq!(p.elaboration, "they are both tasks that word embedding has been used for ...");
    }

    #[test]
    fn used_for_reading() {
        let p = parse_description(
            "word representation has been used for sentence classification since the introduction of word2vec software.",
            "word representation",
        )
        .unwrap();
        assert_eq!(p.relation, RelationType::UsedFor);
        assert_eq!(p.reference, "sentence classification");
        assert_eq!(p.elaboration, "since the introduction of word2vec software");
    }

    #[test]
    fn bracket_lists_expand() {
        let all = parse_descriptions(
            "[sentence classification, relation classification] is a task that word embedding has been utilized for since the introduction of word2vec software.",
            None,
        )
        .unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|p| p.reference == "task" && p.relation == RelationType::IsA));
        let refs = parse_descriptions(
            "word representation has been used for [sentence classification, relation classification, sentiment analysis] since the introduction of word2vec software.",
            Some("word representation"),
        )
        .unwrap();
        assert_eq!(refs.len(), 3);
        assert_eq!(refs[2].reference, "sentiment analysis");
        assert_eq!(refs[2].elaboration, "since the introduction of word2vec software");
    }

    #[test]
    fn part_of_and_variants() {
        let p = parse_description("attention is a key component of the transformer that mixes tokens.", "attention").unwrap();
        assert_eq!((p.relation, p.reference.as_str()), (RelationType::PartOf, "transformer"));
        let p = parse_description("gav is used for query processing in stable environments.", "gav").unwrap();
        assert_eq!((p.relation, p.reference.as_str(), p.elaboration.as_str()), (RelationType::UsedFor, "query processing", "in stable environments"));
        let p = parse_description("beam search is similar to greedy search in that both decode left to right.", "beam search").unwrap();
        assert_eq!((p.relation, p.elaboration.as_str()), (RelationType::Compare, "both decode left to right"));
        let p = parse_description("beam search and greedy search are both decoding methods.", "beam search").unwrap();
        assert_eq!((p.relation, p.reference.as_str(), p.elaboration.as_str()), (RelationType::Compare, "greedy search", "they are both decoding methods"));
    }

    #[test]
    fn failures() {
        assert!(parse_description("beam search works well.", "beam search").is_err());
        assert!(parse_description("is a method.", "beam search").is_err());
        assert!(parse_description("beam search is a beam search.", "beam search").is_err());
        assert!(parse_description("greedy search is a method.", "beam search").is_err());
        assert!(parse_description("", "beam search").is_err());
    }
}
