use std::collections::HashMap;
use std::path::Path;

use accord_core::extraction::RelationType;
use accord_core::highlight::{shared_spans, HighlightSpan, DEFAULT_MIN_TOKENS};
use accord_core::io::{read_jsonl, JsonlError};
use accord_core::pipeline::Provenance;
use accord_core::selection::DescriptionSet;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum IndexError {
    #[error(transparent)]
    Read(#[from] JsonlError),
    #[error("set entries reference contexts without provenance: {}", .0.join(", "))]
    DanglingContexts(Vec<String>),
    #[error("concept {0:?} has more than one set")]
    DuplicateConcept(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Highlights {
    pub description: Vec<HighlightSpan>,
    pub context: Vec<HighlightSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Card {
    pub text: String,
    pub reference: String,
    pub context: String,
    pub paper_url: String,
    pub paper_title: String,
    pub highlights: Highlights,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardGroup {
    pub relation: RelationType,
    pub cards: Vec<Card>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardsResponse {
    pub target: String,
    pub groups: Vec<CardGroup>,
}

struct ConceptEntry {
    default_relations: Vec<RelationType>,
    /// Cards in set order, each tagged with its relation.
    cards: Vec<(RelationType, Card)>,
}

/// Immutable after build; cards and highlights are computed once up front.
pub struct DescriptionIndex {
    concepts: Vec<String>,
    entries: HashMap<String, ConceptEntry>,
    lowercase: HashMap<String, String>,
}

impl DescriptionIndex {
    pub fn build(sets: Vec<DescriptionSet>, provenance: Vec<Provenance>) -> Result<Self, IndexError> {
        let by_id: HashMap<&str, &Provenance> = provenance.iter().map(|p| (p.context_id.as_str(), p)).collect();
        let mut missing: Vec<String> = sets
            .iter()
            .flat_map(|s| &s.entries)
            .filter(|e| !by_id.contains_key(e.context_id.as_str()))
            .map(|e| e.context_id.clone())
            .collect();
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(IndexError::DanglingContexts(missing));
        }
        let mut entries = HashMap::new();
        for set in sets {
            let cards = set
                .entries
                .iter()
                .map(|e| {
                    let p = by_id[e.context_id.as_str()];
                    let (description, context) = shared_spans(&e.text, &p.text, DEFAULT_MIN_TOKENS);
                    let card = Card {
                        text: e.text.clone(),
                        reference: e.reference.clone(),
                        context: p.text.clone(),
                        paper_url: p.url.clone().unwrap_or_default(),
                        paper_title: p.title.clone(),
                        highlights: Highlights { description, context },
                    };
                    (e.relation, card)
                })
                .collect();
            let entry = ConceptEntry { default_relations: set.produced_with.relations.clone(), cards };
            if entries.insert(set.target.clone(), entry).is_some() {
                return Err(IndexError::DuplicateConcept(set.target));
            }
        }
        let mut concepts: Vec<String> = entries.keys().cloned().collect();
        concepts.sort();
        let lowercase = concepts.iter().map(|c| (c.to_lowercase(), c.clone())).collect();
        Ok(DescriptionIndex { concepts, entries, lowercase })
    }

    pub fn load(sets_path: impl AsRef<Path>, provenance_path: impl AsRef<Path>) -> Result<Self, IndexError> {
        Self::build(read_jsonl(sets_path)?, read_jsonl(provenance_path)?)
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// Case-insensitive prefix match, sorted; an empty prefix lists everything.
    pub fn query_concepts(&self, prefix: &str) -> Vec<String> {
        let q = prefix.trim().to_lowercase();
        self.concepts.iter().filter(|c| c.to_lowercase().starts_with(&q)).cloned().collect()
    }

    fn resolve(&self, concept: &str) -> Option<(&String, &ConceptEntry)> {
        self.entries
            .get_key_value(concept)
            .or_else(|| self.lowercase.get(&concept.to_lowercase()).and_then(|c| self.entries.get_key_value(c)))
    }

    /// Cards grouped by relation, in `relations` order (the set's own order
    /// when `None`), at most `k` per group. Relations with no cards are omitted.
    pub fn get_cards(&self, concept: &str, relations: Option<&[RelationType]>, k: usize) -> Option<CardsResponse> {
        let (target, entry) = self.resolve(concept)?;
        let order = relations.unwrap_or(&entry.default_relations);
        let mut groups = Vec::new();
        for &relation in order {
            let cards: Vec<Card> =
                entry.cards.iter().filter(|(r, _)| *r == relation).take(k).map(|(_, c)| c.clone()).collect();
            if !cards.is_empty() {
                groups.push(CardGroup { relation, cards });
            }
        }
        Some(CardsResponse { target: target.clone(), groups })
    }
}
